"""Signal/interference covariance models and the assembled noise-floor matrix.

The working matrix is R_in = R_i + sigma^2*I + alpha*(tr(R_i)/n)*I, i.e. the
interference covariance plus noise power plus optional diagonal loading. The
reference ratio lambda_ref = (1' R_in 1) / (1' R_s 1) is cached because the
certificate consumes it on every evaluation.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import StandingAssumptionError

HERMITICITY_RTOL = 1e-12
PSD_FLOOR_RTOL = 1e-10


def hermitize(m: np.ndarray) -> np.ndarray:
    return 0.5 * (m + m.conj().T)


def _check_hermitian_psd(m: np.ndarray, name: str) -> np.ndarray:
    m = np.asarray(m, dtype=complex)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise StandingAssumptionError(f"{name} must be square, got shape {m.shape}")
    if not np.all(np.isfinite(m.view(float))):
        raise StandingAssumptionError(f"{name} contains non-finite entries")
    scale = float(np.abs(m).max()) if m.size else 0.0
    defect = float(np.abs(m - m.conj().T).max())
    if defect > HERMITICITY_RTOL * max(scale, 1e-300):
        raise StandingAssumptionError(f"{name} is not Hermitian (defect {defect:.3e})")
    m = hermitize(m)
    n = m.shape[0]
    trace = float(np.real(np.trace(m)))
    floor = -PSD_FLOOR_RTOL * max(trace / n, 1e-300)
    min_eig = float(np.linalg.eigvalsh(m)[0])
    if min_eig < floor:
        raise StandingAssumptionError(
            f"{name} is not positive semidefinite (min eigenvalue {min_eig:.3e})"
        )
    return m


@dataclass(frozen=True)
class CovarianceModel:
    """Validated covariance pair plus the assembled R_in and cached ratios."""

    n: int
    r_s: np.ndarray
    r_i: np.ndarray
    sigma2: float
    alpha: float
    r_in: np.ndarray
    lambda_ref: float
    lambda_max_rs: float

    @property
    def ones_quadratic_rin(self) -> float:
        """1' R_in 1, the constant entering the Euclidean-normalisation bound."""
        ones = np.ones(self.n)
        return float(np.real(ones @ self.r_in @ ones))


@dataclass(frozen=True)
class CovarianceSpec:
    """Recipe for :func:`build_covariances`.

    ``identity`` gives R_s = I, R_i = 0. ``steering`` synthesises rank-one
    covariances from array response vectors a(theta)_k = exp(i*pi*k*spacing*
    sin(theta)); the signal covariance receives a small ridge so its
    ones-quadratic form stays positive at every angle. ``explicit`` takes
    both matrices verbatim (row-major [re, im] pairs when loaded from JSON).
    """

    kind: str
    signal_angle: float = 0.0
    interferer_angles: tuple[float, ...] = ()
    interferer_powers: tuple[float, ...] = ()
    spacing: float = 1.0
    ridge: float | None = None
    sigma2: float = 1.0
    alpha: float = 0.0
    r_s: tuple | None = None
    r_i: tuple | None = None

    KINDS = ("identity", "steering", "explicit")

    def __post_init__(self):
        if self.kind not in self.KINDS:
            raise StandingAssumptionError(f"unknown covariance kind {self.kind!r}")
        if self.sigma2 <= 0.0:
            raise StandingAssumptionError("sigma2 must be positive")
        if self.alpha < 0.0:
            raise StandingAssumptionError("alpha must be nonnegative")
        if self.ridge is not None and self.ridge < 0.0:
            raise StandingAssumptionError("ridge must be nonnegative")
        if any(p < 0.0 for p in self.interferer_powers):
            raise StandingAssumptionError("interferer powers must be nonnegative")
        if len(self.interferer_angles) != len(self.interferer_powers):
            raise StandingAssumptionError("interferer angles and powers must have equal length")


def steering_vector(angle: float, n: int, spacing: float = 1.0) -> np.ndarray:
    """Array response exp(i*pi*k*spacing*sin(angle)) for elements k = 0..n-1."""
    k = np.arange(n)
    return np.exp(1j * np.pi * k * spacing * np.sin(angle))


def assemble_r_in(r_i: np.ndarray, sigma2: float, alpha: float) -> np.ndarray:
    """R_i + sigma^2*I + alpha*(tr(R_i)/n)*I, composed exactly in this order."""
    n = r_i.shape[0]
    eye = np.eye(n)
    return r_i + sigma2 * eye + alpha * (np.real(np.trace(r_i)) / n) * eye


def _parse_complex_matrix(entries, n: int, name: str) -> np.ndarray:
    arr = np.asarray(entries, dtype=float)
    if arr.shape == (n, n):
        return arr.astype(complex)
    if arr.shape == (n * n, 2):
        flat = arr[:, 0] + 1j * arr[:, 1]
        return flat.reshape(n, n)
    if arr.shape == (n, n, 2):
        return arr[..., 0] + 1j * arr[..., 1]
    raise StandingAssumptionError(
        f"{name} must be an {n}x{n} matrix (real, or [re, im] pairs), got shape {arr.shape}"
    )


def build_covariances(spec: CovarianceSpec, n: int) -> CovarianceModel:
    """Build and validate the covariance model at dimension ``n``."""
    if n < 2:
        raise StandingAssumptionError("covariance models need n >= 2")

    if spec.kind == "identity":
        r_s = np.eye(n, dtype=complex)
        r_i = np.zeros((n, n), dtype=complex)
    elif spec.kind == "steering":
        ridge = spec.ridge if spec.ridge is not None else 1e-6 * n
        a_s = steering_vector(spec.signal_angle, n, spec.spacing)
        r_s = np.outer(a_s, a_s.conj()) + ridge * np.eye(n)
        r_i = np.zeros((n, n), dtype=complex)
        for angle, power in zip(spec.interferer_angles, spec.interferer_powers):
            a = steering_vector(angle, n, spec.spacing)
            r_i = r_i + power * np.outer(a, a.conj())
    else:
        if spec.r_s is None or spec.r_i is None:
            raise StandingAssumptionError("explicit covariances require both r_s and r_i")
        r_s = _parse_complex_matrix(spec.r_s, n, "r_s")
        r_i = _parse_complex_matrix(spec.r_i, n, "r_i")

    r_s = _check_hermitian_psd(r_s, "r_s")
    r_i = _check_hermitian_psd(r_i, "r_i")

    ones = np.ones(n)
    ones_rs = float(np.real(ones @ r_s @ ones))
    if ones_rs <= 0.0:
        raise StandingAssumptionError(
            "1' R_s 1 must be positive; the supplied signal covariance nulls the "
            "ones vector (increase the ridge to restore positivity)"
        )

    r_in = hermitize(assemble_r_in(r_i, spec.sigma2, spec.alpha))
    lambda_ref = float(np.real(ones @ r_in @ ones)) / ones_rs
    if not np.isfinite(lambda_ref) or lambda_ref <= 0.0:
        raise StandingAssumptionError(f"reference ratio must be positive and finite, got {lambda_ref}")
    lambda_max_rs = float(np.linalg.eigvalsh(r_s)[-1])

    for arr in (r_s, r_i, r_in):
        arr.setflags(write=False)
    return CovarianceModel(
        n=n,
        r_s=r_s,
        r_i=r_i,
        sigma2=spec.sigma2,
        alpha=spec.alpha,
        r_in=r_in,
        lambda_ref=lambda_ref,
        lambda_max_rs=lambda_max_rs,
    )


def lambda_ref_general(
    model: CovarianceModel,
    v: np.ndarray,
    mu: float,
    laplacian: np.ndarray,
    feasibility_atol: float = 1e-9,
) -> float:
    """Objective value v' R_in v + mu * v' L v of a feasible reference vector.

    ``v`` must satisfy the signal normalisation v' R_s v = 1 (checked to
    ``feasibility_atol``). For any such v the returned value upper-bounds the
    optimal design objective; with v proportional to the ones vector the
    Laplacian term vanishes and the value reduces to ``model.lambda_ref``.
    """
    v = np.asarray(v, dtype=complex)
    norm = float(np.real(v.conj() @ model.r_s @ v))
    if abs(norm - 1.0) > feasibility_atol:
        raise StandingAssumptionError(
            f"reference vector infeasible: v' R_s v = {norm!r}, expected 1"
        )
    quad_in = float(np.real(v.conj() @ model.r_in @ v))
    quad_l = float(np.real(v.conj() @ laplacian @ v))
    return quad_in + mu * quad_l
