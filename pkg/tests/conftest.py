"""Shared fixtures: the certification battery used by the acceptance suite."""

import time
from dataclasses import dataclass

import pytest

from spreadcert import (
    CovarianceSpec,
    ExperimentConfig,
    GraphSpec,
    MuGrid,
    build_instance,
    run_mu_sweep,
)

BATTERY_COVARIANCE = CovarianceSpec(
    kind="steering", signal_angle=0.35, interferer_angles=(-0.6, 1.05),
    interferer_powers=(8.0, 5.0), spacing=1.0, sigma2=1.0,
)

# (family, n, spectral-norm target, rho); pairings chosen so the certificate
# holds with margin across the whole default mu grid (see the round-trip and
# soundness acceptance tests, which verify this end to end).
BATTERY_LAYOUT = (
    ("line", 8, 0.90, 0.5),
    ("line", 32, 0.90, 0.9),
    ("line", 128, 0.95, 0.5),
    ("cycle", 8, 0.50, 0.1),
    ("cycle", 32, 0.90, 0.5),
    ("cycle", 128, 0.90, 0.1),
    ("grid2d", 8, 0.50, 0.1),
    ("grid2d", 32, 0.90, 0.5),
    ("grid2d", 128, 0.95, 0.9),
    ("random_geometric", 8, 0.90, 0.5),
    ("random_geometric", 32, 0.90, 0.5),
    ("random_geometric", 128, 0.95, 0.1),
    ("scale_free", 8, 0.95, 0.5),
    ("scale_free", 32, 0.90, 0.5),
    ("scale_free", 128, 0.90, 0.9),
)

GRID_DIMS = {8: (2, 4), 32: (4, 8), 128: (8, 16)}


def battery_graph_spec(family: str, n: int, target: float) -> GraphSpec:
    if family == "grid2d":
        rows, cols = GRID_DIMS[n]
        return GraphSpec(kind="grid2d", rows=rows, cols=cols, target_spectral_norm=target)
    if family == "random_geometric":
        return GraphSpec(kind="random_geometric", n=n, radius=0.35, seed=11,
                         target_spectral_norm=target)
    if family == "scale_free":
        return GraphSpec(kind="scale_free", n=n, attachment_count=2, seed=5,
                         target_spectral_norm=target)
    return GraphSpec(kind=family, n=n, target_spectral_norm=target)


@dataclass(frozen=True)
class BatteryInstance:
    name: str
    family: str
    n: int
    target: float
    rho: float
    config: ExperimentConfig
    graph: object
    model: object
    records: tuple


@pytest.fixture(scope="session")
def battery():
    instances = []
    started = time.perf_counter()
    for family, n, target, rho in BATTERY_LAYOUT:
        config = ExperimentConfig(
            graph=battery_graph_spec(family, n, target),
            covariance=BATTERY_COVARIANCE,
            rho=rho,
            mu_grid=MuGrid(min_exp=-2.0, max_exp=4.0, points=25),
        )
        graph, model = build_instance(config)
        result = run_mu_sweep(config)
        instances.append(BatteryInstance(
            name=f"{family}-n{n}-t{target}-rho{rho}",
            family=family, n=n, target=target, rho=rho,
            config=config, graph=graph, model=model, records=result.records,
        ))
    elapsed = time.perf_counter() - started
    return {"instances": instances, "elapsed_seconds": elapsed}
