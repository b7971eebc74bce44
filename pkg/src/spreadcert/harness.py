"""Experiment orchestration: instance configs, sweeps, audits, and file IO.

Every sweep point runs the full pipeline (design solve, steady state both by
direct factorisation and by iteration, certificate evaluation) and is audited
on the spot: a measured spreading above the certified bound aborts the run.
CSV and JSON outputs round-trip at full double precision, and identical
configs produce byte-identical files.
"""

from __future__ import annotations

import io
import json
import math
from dataclasses import dataclass, field, replace
from pathlib import Path

import numpy as np

from . import certificate as cert
from .covariance import CovarianceModel, CovarianceSpec, build_covariances
from .design import MODES, RS_NORM, solve_design
from .diffusion import DiffusionConfig, check_stability, steady_state_direct, steady_state_iterative
from .errors import (
    CertificationAuditError,
    ConfigError,
    EdgelessGraphError,
    InfeasibleTargetError,
    SpreadcertError,
    StabilityError,
)
from .graph import Graph, GraphSpec, build, parse_edge_list

CSV_SCHEMA = "spreadcert-sweep-v1"
CSV_COLUMNS = (
    "mu", "rho", "xi_measured", "bound", "floor",
    "lambda_star", "laplacian_energy", "iterations", "stability_margin",
)
DEFAULT_RHO_SWEEP_MU = 10.0


@dataclass(frozen=True)
class MuGrid:
    min_exp: float = -2.0
    max_exp: float = 4.0
    points: int = 25

    def values(self) -> np.ndarray:
        if self.points < 1:
            raise ConfigError("mu grid needs at least one point")
        if self.max_exp < self.min_exp:
            raise ConfigError("mu grid has max_exp < min_exp")
        return np.logspace(self.min_exp, self.max_exp, self.points)


@dataclass(frozen=True)
class RhoGrid:
    start: float = 0.05
    stop: float = 0.95
    step: float = 0.05

    def values(self) -> np.ndarray:
        if self.step <= 0.0:
            raise ConfigError("rho grid step must be positive")
        count = int(math.floor((self.stop - self.start) / self.step + 1e-9)) + 1
        if count < 1:
            raise ConfigError("rho grid is empty")
        return self.start + self.step * np.arange(count)


@dataclass(frozen=True)
class ExperimentConfig:
    graph: GraphSpec
    covariance: CovarianceSpec
    rho: float | RhoGrid = 0.5
    mu_grid: MuGrid = field(default_factory=MuGrid)
    mode: str = RS_NORM
    min_stability_margin: float = 0.05
    seed: int = 0
    out_dir: str | None = None

    def __post_init__(self):
        if self.mode not in MODES:
            raise ConfigError(f"mode must be one of {MODES}, got {self.mode!r}")
        if self.min_stability_margin <= 0.0:
            raise ConfigError("min_stability_margin must be positive")


@dataclass(frozen=True)
class SweepRecord:
    mu: float
    rho: float
    xi_measured: float
    bound: float
    floor: float
    lambda_star: float
    laplacian_energy: float
    iterations: int
    stability_margin: float


@dataclass(frozen=True)
class PointFailure:
    mu: float
    rho: float
    error: str


@dataclass(frozen=True)
class MuSweepResult:
    records: tuple[SweepRecord, ...]
    slope: float
    failures: tuple[PointFailure, ...]


@dataclass(frozen=True)
class RhoSweepResult:
    records: tuple[SweepRecord, ...]
    failures: tuple[PointFailure, ...]


@dataclass(frozen=True)
class CertifyVerdict:
    feasible: bool
    passed: bool
    floor: float
    xi_target: float
    mu: float | None
    bound: float | None
    xi_measured: float | None
    slack_ratio: float | None
    message: str
    solution: dict | None = None

    def to_json_dict(self) -> dict:
        return {
            "verdict": "PASS" if self.passed else ("INFEASIBLE" if not self.feasible else "FAIL"),
            "feasible": self.feasible,
            "floor": self.floor,
            "xi_target": self.xi_target,
            "mu": self.mu,
            "bound": self.bound,
            "xi_measured": self.xi_measured,
            "slack_ratio": self.slack_ratio,
            "message": self.message,
            "solution": self.solution,
        }


def build_instance(config: ExperimentConfig) -> tuple[Graph, CovarianceModel]:
    """Materialise the graph and covariance model of a config.

    The experiment seed backs the graph generator when the graph spec does
    not pin its own seed.
    """
    graph_spec = config.graph
    if graph_spec.kind in ("random_geometric", "scale_free") and graph_spec.seed is None:
        graph_spec = replace(graph_spec, seed=config.seed)
    graph = build(graph_spec)
    model = build_covariances(config.covariance, graph.n)
    return graph, model


def _require_certifiable(graph: Graph, rho: float, min_margin: float) -> float:
    if graph.d_max == 0.0 and rho > 0.0:
        raise EdgelessGraphError(
            "certification excluded for edgeless graphs with rho > 0: the bound "
            "evaluates to zero while the measured spreading equals rho"
        )
    margin = check_stability(graph, rho)
    if margin < min_margin:
        raise StabilityError(
            f"stability margin {margin!r} below the required minimum {min_margin!r}"
        )
    return margin


def evaluate_point(
    graph: Graph,
    model: CovarianceModel,
    mu: float,
    rho: float,
    mode: str = RS_NORM,
    tol: float = 1e-12,
) -> SweepRecord:
    """Run design, diffusion (direct plus iterative cross-check), and bound."""
    sol = solve_design(model, graph, mu, mode)
    certificate = cert.bound(graph, model, rho, mu, mode)
    direct = steady_state_direct(graph, rho, sol.p0)
    iterative = steady_state_iterative(graph, DiffusionConfig(rho=rho, tol=tol), sol.p0)
    gap = float(np.linalg.norm(direct.p_inf - iterative.p_inf))
    allowance = 10.0 * tol * float(np.linalg.norm(sol.p0))
    if gap > allowance:
        raise CertificationAuditError(
            f"iterative and direct steady states disagree ({gap:.3e} > {allowance:.3e})"
        )
    record = SweepRecord(
        mu=float(mu),
        rho=float(rho),
        xi_measured=direct.xi,
        bound=certificate.bound,
        floor=certificate.floor,
        lambda_star=sol.lambda_star,
        laplacian_energy=sol.laplacian_energy,
        iterations=iterative.iterations,
        stability_margin=direct.stability_margin,
    )
    if record.xi_measured > record.bound:
        raise CertificationAuditError(
            f"audit failure at mu={mu!r}, rho={rho!r}: measured spreading "
            f"{record.xi_measured!r} exceeds the certified bound {record.bound!r}"
        )
    return record


def fit_loglog_slope(points, mid_fraction: float = 0.6) -> float:
    """Least-squares slope of log y against log x over the central points.

    Points are ordered by x and the outer (1 - mid_fraction)/2 share is
    dropped from each end before fitting. All retained values must be
    strictly positive.
    """
    if not (0.0 < mid_fraction <= 1.0):
        raise ConfigError(f"mid_fraction must lie in (0, 1], got {mid_fraction}")
    pts = sorted((float(x), float(y)) for x, y in points)
    drop = int(math.floor(len(pts) * (1.0 - mid_fraction) / 2.0))
    kept = pts[drop:len(pts) - drop]
    if len(kept) < 3:
        raise ConfigError(f"need at least 3 mid-range points to fit a slope, got {len(kept)}")
    if any(x <= 0.0 or y <= 0.0 for x, y in kept):
        raise ConfigError("log-log fit requires strictly positive x and y values")
    log_x = np.log([x for x, _ in kept])
    log_y = np.log([y for _, y in kept])
    slope, _ = np.polyfit(log_x, log_y, 1)
    return float(slope)


def run_mu_sweep(config: ExperimentConfig, tol: float = 1e-12) -> MuSweepResult:
    """Sweep the mu grid at fixed rho; fit the mid-range spreading slope."""
    if isinstance(config.rho, RhoGrid):
        raise ConfigError("mu sweep needs a single rho, not a grid")
    graph, model = build_instance(config)
    _require_certifiable(graph, config.rho, config.min_stability_margin)
    records: list[SweepRecord] = []
    failures: list[PointFailure] = []
    for mu in config.mu_grid.values():
        try:
            records.append(evaluate_point(graph, model, mu, config.rho, config.mode, tol))
        except CertificationAuditError:
            raise
        except SpreadcertError as exc:
            failures.append(PointFailure(mu=float(mu), rho=config.rho, error=str(exc)))
    if not records:
        raise ConfigError("mu sweep produced no successful points")
    slope = math.nan
    if len(records) >= 5:
        slope = fit_loglog_slope([(r.mu, r.xi_measured) for r in records])
    return MuSweepResult(records=tuple(records), slope=slope, failures=tuple(failures))


def run_rho_sweep(config: ExperimentConfig, fixed_mu: float = DEFAULT_RHO_SWEEP_MU,
                  tol: float = 1e-12) -> RhoSweepResult:
    """Sweep rho at fixed mu, skipping values below the stability margin."""
    rho_values = config.rho.values() if isinstance(config.rho, RhoGrid) else np.array([config.rho])
    graph, model = build_instance(config)
    if graph.d_max == 0.0:
        raise EdgelessGraphError("certification excluded for edgeless graphs")
    admissible = [r for r in rho_values
                  if check_stability(graph, float(r)) >= config.min_stability_margin]
    if not admissible:
        raise ConfigError(
            "no rho value on the grid satisfies the minimum stability margin "
            f"{config.min_stability_margin!r}"
        )
    records: list[SweepRecord] = []
    failures: list[PointFailure] = []
    for rho in admissible:
        try:
            records.append(evaluate_point(graph, model, fixed_mu, float(rho), config.mode, tol))
        except CertificationAuditError:
            raise
        except SpreadcertError as exc:
            failures.append(PointFailure(mu=fixed_mu, rho=float(rho), error=str(exc)))
    if not records:
        raise ConfigError("rho sweep produced no successful points")
    return RhoSweepResult(records=tuple(records), failures=tuple(failures))


def certify(config: ExperimentConfig, xi_target: float) -> CertifyVerdict:
    """Two-step certification: pick mu from the design rule, then verify.

    Reports the floor with mitigation hints when the target is infeasible;
    otherwise runs the full pipeline at the designed mu and reports whether
    both the certified bound and the measured spreading meet the target.
    """
    if isinstance(config.rho, RhoGrid):
        raise ConfigError("certification needs a single rho, not a grid")
    graph, model = build_instance(config)
    _require_certifiable(graph, config.rho, config.min_stability_margin)
    floor = cert.prefactor(graph, config.rho) * graph.d_max
    try:
        mu = cert.design_mu(graph, model, config.rho, xi_target, config.mode)
    except InfeasibleTargetError as exc:
        return CertifyVerdict(
            feasible=False, passed=False, floor=exc.floor, xi_target=xi_target,
            mu=None, bound=None, xi_measured=None, slack_ratio=None, message=str(exc),
        )
    # rho = 0 gives a zero prefactor: the certificate is identically zero and
    # the diffusion leaves p0 untouched; any positive mu reproduces that.
    mu_run = mu if mu > 0.0 else 1.0
    record = evaluate_point(graph, model, mu_run, config.rho, config.mode)
    solution = solve_design(model, graph, mu_run, config.mode)
    bound_ok = record.bound <= xi_target * (1.0 + 1e-12)
    xi_ok = record.xi_measured <= xi_target
    slack = record.bound / record.xi_measured if record.xi_measured > 0.0 else math.inf
    return CertifyVerdict(
        feasible=True,
        passed=bound_ok and xi_ok,
        floor=floor,
        xi_target=xi_target,
        mu=mu_run,
        bound=record.bound,
        xi_measured=record.xi_measured,
        slack_ratio=slack,
        message="bound and measured spreading both meet the target"
        if (bound_ok and xi_ok) else "target missed at the designed mu",
        solution=solution.to_json_dict(),
    )


# ---------------------------------------------------------------------------
# File IO
# ---------------------------------------------------------------------------

def render_sweep_csv(records) -> str:
    out = io.StringIO()
    out.write(f"# schema: {CSV_SCHEMA}\n")
    out.write(",".join(CSV_COLUMNS) + "\n")
    for r in records:
        out.write(",".join((
            repr(r.mu), repr(r.rho), repr(r.xi_measured), repr(r.bound), repr(r.floor),
            repr(r.lambda_star), repr(r.laplacian_energy), str(r.iterations),
            repr(r.stability_margin),
        )) + "\n")
    return out.getvalue()


def write_sweep_csv(records, path: str | Path) -> Path:
    path = Path(path)
    path.write_text(render_sweep_csv(records))
    return path


def parse_sweep_csv(text: str) -> tuple[SweepRecord, ...]:
    lines = text.splitlines()
    if not lines or lines[0].strip() != f"# schema: {CSV_SCHEMA}":
        raise ConfigError(f"sweep CSV missing schema line '# schema: {CSV_SCHEMA}'")
    if len(lines) < 2 or lines[1].strip() != ",".join(CSV_COLUMNS):
        raise ConfigError("sweep CSV header does not match the expected columns")
    records = []
    for raw in lines[2:]:
        if not raw.strip():
            continue
        parts = raw.split(",")
        if len(parts) != len(CSV_COLUMNS):
            raise ConfigError(f"malformed CSV row: {raw!r}")
        records.append(SweepRecord(
            mu=float(parts[0]), rho=float(parts[1]), xi_measured=float(parts[2]),
            bound=float(parts[3]), floor=float(parts[4]), lambda_star=float(parts[5]),
            laplacian_energy=float(parts[6]), iterations=int(parts[7]),
            stability_margin=float(parts[8]),
        ))
    return tuple(records)


def read_sweep_csv(path: str | Path) -> tuple[SweepRecord, ...]:
    return parse_sweep_csv(Path(path).read_text())


def write_summary_json(payload: dict, path: str | Path) -> Path:
    path = Path(path)
    path.write_text(json.dumps(payload, indent=2, sort_keys=True) + "\n")
    return path


# ---------------------------------------------------------------------------
# Config document parsing (JSON)
# ---------------------------------------------------------------------------

def _graph_spec_from_dict(data: dict) -> GraphSpec:
    known = {"kind", "n", "rows", "cols", "radius", "kernel_width",
             "attachment_count", "seed", "edges", "edges_file", "target_spectral_norm"}
    unknown = set(data) - known
    if unknown:
        raise ConfigError(f"unknown graph spec keys: {sorted(unknown)}")
    if "kind" not in data:
        raise ConfigError("graph spec requires a 'kind'")
    fields = dict(data)
    edges_file = fields.pop("edges_file", None)
    if edges_file is not None:
        if fields.get("edges") is not None:
            raise ConfigError("give either 'edges' or 'edges_file', not both")
        fields["edges"] = parse_edge_list(Path(edges_file).read_text())
    if fields.get("edges") is not None:
        fields["edges"] = tuple((int(i), int(j), float(w)) for i, j, w in fields["edges"])
    return GraphSpec(**fields)


def _covariance_spec_from_dict(data: dict) -> CovarianceSpec:
    known = {"kind", "signal_angle", "interferer_angles", "interferer_powers",
             "spacing", "ridge", "sigma2", "alpha", "r_s", "r_i"}
    unknown = set(data) - known
    if unknown:
        raise ConfigError(f"unknown covariance spec keys: {sorted(unknown)}")
    if "kind" not in data:
        raise ConfigError("covariance spec requires a 'kind'")
    fields = dict(data)
    for key in ("interferer_angles", "interferer_powers"):
        if key in fields:
            fields[key] = tuple(float(v) for v in fields[key])
    return CovarianceSpec(**fields)


def config_from_dict(data: dict) -> ExperimentConfig:
    known = {"graph", "covariance", "rho", "mu_grid", "mode",
             "min_stability_margin", "seed", "out_dir"}
    unknown = set(data) - known
    if unknown:
        raise ConfigError(f"unknown config keys: {sorted(unknown)}")
    if "graph" not in data or "covariance" not in data:
        raise ConfigError("config requires 'graph' and 'covariance' sections")
    rho = data.get("rho", 0.5)
    if isinstance(rho, dict):
        rho = RhoGrid(**rho)
    mu_grid = data.get("mu_grid", {})
    if isinstance(mu_grid, dict):
        mu_grid = MuGrid(**mu_grid)
    try:
        return ExperimentConfig(
            graph=_graph_spec_from_dict(data["graph"]),
            covariance=_covariance_spec_from_dict(data["covariance"]),
            rho=rho,
            mu_grid=mu_grid,
            mode=data.get("mode", RS_NORM),
            min_stability_margin=data.get("min_stability_margin", 0.05),
            seed=int(data.get("seed", 0)),
            out_dir=data.get("out_dir"),
        )
    except TypeError as exc:
        raise ConfigError(f"malformed config: {exc}") from exc


def load_config(path: str | Path) -> ExperimentConfig:
    try:
        data = json.loads(Path(path).read_text())
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config file {path} is not valid JSON: {exc}") from exc
    if not isinstance(data, dict):
        raise ConfigError("config document must be a JSON object")
    return config_from_dict(data)
