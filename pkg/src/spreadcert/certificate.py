"""Closed-form worst-case certificate for steady-state spreading.

The certified upper bound on xi = ||p_inf - p0||_2 / ||p0||_2 is

    C(rho, G) * (d_max + sqrt(K / mu)),   C(rho, G) = (1-rho)*rho / (1 - rho*||G||_2),

with K = 4*n*lambda_max(L)*lambda_ref*lambda_max(R_s) under the signal
normalisation, or K = 4*lambda_max(L)*(1' R_in 1) under the Euclidean one.
C(rho, G)*d_max is the feasibility floor no finite mu can remove; the bend
point mu_star = K / d_max^2 marks where the mu-dependent term stops
dominating the floor.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .covariance import CovarianceModel
from .design import EUCLIDEAN, MODES, RS_NORM
from .diffusion import check_stability
from .errors import BendPointUndefinedError, InfeasibleTargetError, StabilityError
from .graph import Graph


@dataclass(frozen=True)
class Certificate:
    """One bound evaluation with every constant needed to recompute it."""

    c_rho_g: float
    d_max: float
    floor: float
    mu: float
    mode: str
    design_term: float
    bound: float
    mu_star: float
    n: int
    lambda_max_laplacian: float
    lambda_ref: float
    lambda_max_rs: float
    spectral_norm: float
    ones_rin_quadratic: float

    def to_json_dict(self) -> dict:
        """Flat JSON-serialisable mapping of every field at full precision."""
        return {
            "c_rho_g": self.c_rho_g,
            "d_max": self.d_max,
            "floor": self.floor,
            "mu": self.mu,
            "mode": self.mode,
            "design_term": self.design_term,
            "bound": self.bound,
            "mu_star": self.mu_star,
            "n": self.n,
            "lambda_max_laplacian": self.lambda_max_laplacian,
            "lambda_ref": self.lambda_ref,
            "lambda_max_rs": self.lambda_max_rs,
            "spectral_norm": self.spectral_norm,
            "ones_rin_quadratic": self.ones_rin_quadratic,
        }


def prefactor(graph: Graph, rho: float) -> float:
    """C(rho, G) = (1-rho)*rho / (1 - rho*||G||_2)."""
    margin = check_stability(graph, rho)
    if margin <= 0.0:
        raise StabilityError(f"prefactor undefined: stability margin {margin!r} <= 0")
    return (1.0 - rho) * rho / margin


def _design_constant(graph: Graph, model: CovarianceModel, mode: str) -> float:
    """The constant K with design term sqrt(K / mu)."""
    if mode not in MODES:
        raise ValueError(f"mode must be one of {MODES}, got {mode!r}")
    if mode == RS_NORM:
        return 4.0 * graph.n * graph.lambda_max_laplacian * model.lambda_ref * model.lambda_max_rs
    return 4.0 * graph.lambda_max_laplacian * model.ones_quadratic_rin


def bound(graph: Graph, model: CovarianceModel, rho: float, mu: float, mode: str = RS_NORM) -> Certificate:
    """Evaluate the certified spreading bound at regularisation strength mu."""
    if mu <= 0.0:
        raise ValueError(f"mu must be positive, got {mu}")
    c = prefactor(graph, rho)
    k = _design_constant(graph, model, mode)
    design_term = math.sqrt(k / mu)
    mu_star = (k / graph.d_max ** 2) if graph.d_max > 0.0 else math.inf
    return Certificate(
        c_rho_g=c,
        d_max=graph.d_max,
        floor=c * graph.d_max,
        mu=mu,
        mode=mode,
        design_term=design_term,
        bound=c * (graph.d_max + design_term),
        mu_star=mu_star,
        n=graph.n,
        lambda_max_laplacian=graph.lambda_max_laplacian,
        lambda_ref=model.lambda_ref,
        lambda_max_rs=model.lambda_max_rs,
        spectral_norm=graph.spectral_norm,
        ones_rin_quadratic=model.ones_quadratic_rin,
    )


def bend_point(graph: Graph, model: CovarianceModel, mode: str = RS_NORM) -> float:
    """mu at which the design term equals d_max, so the bound is 2x the floor."""
    if graph.d_max <= 0.0:
        raise BendPointUndefinedError("bend point undefined for an edgeless graph (d_max = 0)")
    return _design_constant(graph, model, mode) / graph.d_max ** 2


def design_mu(graph: Graph, model: CovarianceModel, rho: float, xi_target: float, mode: str = RS_NORM) -> float:
    """Smallest mu whose certified bound meets ``xi_target`` exactly.

    Raises when the target does not exceed the feasibility floor: the floor
    term is structural, so no finite mu can certify such a target (reduce rho
    or reweight the graph instead). When rho = 0 the certificate is
    identically zero and 0.0 is returned, meaning no smoothing is required.
    """
    if xi_target <= 0.0:
        raise ValueError(f"xi_target must be positive, got {xi_target}")
    c = prefactor(graph, rho)
    floor = c * graph.d_max
    if xi_target <= floor:
        raise InfeasibleTargetError(
            f"target {xi_target!r} is at or below the feasibility floor {floor!r}; "
            "the bound cannot enforce it for any finite regularisation strength "
            "(reduce rho or reweight the graph to lower d_max and ||G||_2)",
            floor=floor,
        )
    k = _design_constant(graph, model, mode)
    return c ** 2 * k / (xi_target - floor) ** 2
