"""Undirected weighted graphs, their Laplacians, and cached spectral constants.

Graphs are immutable once built. All spectral quantities are computed with
dense symmetric eigendecompositions, which is exact enough (and fast enough)
at the problem sizes this package targets (n <= 512); a power-iteration
routine is provided purely as an independent cross-check.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np

from .errors import GraphValidationError, RescaleUndefinedError

SYMMETRY_RTOL = 1e-12
KERNEL_ATOL = 1e-10
PSD_RTOL = 1e-10


@dataclass(frozen=True)
class Graph:
    """Validated undirected weighted graph with cached spectral constants.

    Attributes
    ----------
    n : node count
    adjacency : symmetric nonnegative (n, n) weight matrix with zero diagonal
    degrees : row sums of the adjacency
    laplacian : degree matrix minus adjacency (positive semidefinite)
    spectral_norm : largest singular value of the adjacency
    d_max : maximum degree (equals the 2-norm of the degree matrix)
    lambda_max_laplacian : largest Laplacian eigenvalue
    """

    n: int
    adjacency: np.ndarray
    degrees: np.ndarray
    laplacian: np.ndarray
    spectral_norm: float
    d_max: float
    lambda_max_laplacian: float

    def num_edges(self) -> int:
        return int(np.count_nonzero(np.triu(self.adjacency, k=1)))


@dataclass(frozen=True)
class GraphSpec:
    """Declarative recipe for :func:`build`.

    ``kind`` selects the generator; only the parameters that generator uses
    are consulted. Random kinds (``random_geometric``, ``scale_free``) are
    pure functions of ``seed``.
    """

    kind: str
    n: int | None = None
    rows: int | None = None
    cols: int | None = None
    radius: float = 0.35
    kernel_width: float | None = None
    attachment_count: int = 2
    seed: int | None = None
    edges: tuple[tuple[int, int, float], ...] | None = None
    target_spectral_norm: float | None = None

    KINDS = ("line", "cycle", "grid2d", "random_geometric", "scale_free", "explicit_edges")

    def __post_init__(self):
        if self.kind not in self.KINDS:
            raise GraphValidationError(f"unknown graph kind {self.kind!r}")
        if self.target_spectral_norm is not None and not (0.0 < self.target_spectral_norm < 1.0):
            raise GraphValidationError(
                f"target_spectral_norm must lie strictly in (0, 1), got {self.target_spectral_norm}"
            )


def from_adjacency(adjacency: np.ndarray) -> Graph:
    """Validate a raw weight matrix and assemble a :class:`Graph`.

    Enforces symmetry (to 1e-12 relative), entrywise nonnegativity, and a
    zero diagonal; nonzero diagonal entries are stripped with a warning so
    the combinatorial Laplacian D - G stays consistent. The Laplacian kernel
    and positive semidefiniteness are checked after assembly.
    """
    adjacency = np.asarray(adjacency, dtype=float)
    if adjacency.ndim != 2 or adjacency.shape[0] != adjacency.shape[1]:
        raise GraphValidationError(f"adjacency must be square, got shape {adjacency.shape}")
    n = adjacency.shape[0]
    if n < 2:
        raise GraphValidationError("graphs need at least 2 nodes")
    if not np.all(np.isfinite(adjacency)):
        raise GraphValidationError("adjacency contains non-finite entries")

    scale = float(np.abs(adjacency).max()) if adjacency.size else 0.0
    asym = float(np.abs(adjacency - adjacency.T).max())
    if asym > SYMMETRY_RTOL * max(scale, 1e-300):
        raise GraphValidationError(f"adjacency is asymmetric (max deviation {asym:.3e})")
    adjacency = 0.5 * (adjacency + adjacency.T)
    if np.any(adjacency < 0.0):
        raise GraphValidationError("adjacency has negative weights")

    if np.any(np.diagonal(adjacency) != 0.0):
        warnings.warn("self-loops stripped from adjacency diagonal", stacklevel=2)
        adjacency = adjacency.copy()
        np.fill_diagonal(adjacency, 0.0)

    degrees = adjacency.sum(axis=1)
    laplacian = np.diag(degrees) - adjacency

    eig_g = np.linalg.eigvalsh(adjacency)
    eig_l = np.linalg.eigvalsh(laplacian)
    spectral_norm = float(np.abs(eig_g).max())
    lambda_max_l = float(eig_l[-1])
    d_max = float(degrees.max())

    kernel_defect = float(np.abs(laplacian @ np.ones(n)).max())
    if kernel_defect > KERNEL_ATOL * max(d_max, 1.0):
        raise GraphValidationError(f"ones vector not in Laplacian kernel (defect {kernel_defect:.3e})")
    if eig_l[0] < -PSD_RTOL * max(lambda_max_l, 1e-300):
        raise GraphValidationError(f"Laplacian not positive semidefinite (min eig {eig_l[0]:.3e})")

    for arr in (adjacency, degrees, laplacian):
        arr.setflags(write=False)
    return Graph(
        n=n,
        adjacency=adjacency,
        degrees=degrees,
        laplacian=laplacian,
        spectral_norm=spectral_norm,
        d_max=d_max,
        lambda_max_laplacian=lambda_max_l,
    )


# ---------------------------------------------------------------------------
# Generators
# ---------------------------------------------------------------------------

def _line_adjacency(n: int) -> np.ndarray:
    adj = np.zeros((n, n))
    idx = np.arange(n - 1)
    adj[idx, idx + 1] = 1.0
    adj[idx + 1, idx] = 1.0
    return adj


def _cycle_adjacency(n: int) -> np.ndarray:
    if n < 3:
        raise GraphValidationError("cycle graphs need at least 3 nodes")
    adj = _line_adjacency(n)
    adj[0, n - 1] = adj[n - 1, 0] = 1.0
    return adj


def _grid2d_adjacency(rows: int, cols: int) -> np.ndarray:
    n = rows * cols
    adj = np.zeros((n, n))
    for r in range(rows):
        for c in range(cols):
            i = r * cols + c
            if c + 1 < cols:
                adj[i, i + 1] = adj[i + 1, i] = 1.0
            if r + 1 < rows:
                adj[i, i + cols] = adj[i + cols, i] = 1.0
    return adj


def _random_geometric_adjacency(n: int, radius: float, kernel_width: float, seed: int) -> np.ndarray:
    rng = np.random.default_rng(seed)
    points = rng.random((n, 2))
    diff = points[:, None, :] - points[None, :, :]
    dist = np.sqrt((diff ** 2).sum(axis=2))
    weights = np.exp(-dist ** 2 / (2.0 * kernel_width ** 2))
    adj = np.where(dist < radius, weights, 0.0)
    np.fill_diagonal(adj, 0.0)
    return adj


def _scale_free_adjacency(n: int, m: int, seed: int) -> np.ndarray:
    if m < 1:
        raise GraphValidationError("attachment_count must be >= 1")
    if n < m + 2:
        raise GraphValidationError(f"scale_free needs n >= attachment_count + 2, got n={n}, m={m}")
    rng = np.random.default_rng(seed)
    adj = np.zeros((n, n))
    # Seed clique on the first m+1 nodes, then preferential attachment.
    for i in range(m + 1):
        for j in range(i + 1, m + 1):
            adj[i, j] = adj[j, i] = 1.0
    degrees = adj.sum(axis=1)
    for new in range(m + 1, n):
        candidates = list(range(new))
        # Degrees frozen while this node picks its m targets; the cumulative
        # scan makes equal-weight ties resolve to the lowest node index.
        weights = degrees[:new].copy()
        for _ in range(m):
            total = weights[candidates].sum()
            if total <= 0.0:
                target = candidates[0]
            else:
                u = rng.random() * total
                acc = 0.0
                target = candidates[-1]
                for node in candidates:
                    acc += weights[node]
                    if u < acc:
                        target = node
                        break
            adj[new, target] = adj[target, new] = 1.0
            candidates.remove(target)
        degrees = adj.sum(axis=1)
    return adj


def _explicit_adjacency(n: int, edges) -> np.ndarray:
    adj = np.zeros((n, n))
    seen: dict[tuple[int, int], float] = {}
    for i, j, w in edges:
        i, j, w = int(i), int(j), float(w)
        if not (0 <= i < n and 0 <= j < n):
            raise GraphValidationError(f"edge ({i}, {j}) out of range for n={n}")
        if w < 0.0:
            raise GraphValidationError(f"negative edge weight {w} on ({i}, {j})")
        if i == j:
            warnings.warn(f"self-loop on node {i} ignored", stacklevel=3)
            continue
        key = (min(i, j), max(i, j))
        if key in seen and seen[key] != w:
            raise GraphValidationError(
                f"conflicting duplicate weights for edge {key}: {seen[key]} vs {w}"
            )
        seen[key] = w
        adj[i, j] = adj[j, i] = w
    return adj


def parse_edge_list(text: str) -> tuple[tuple[int, int, float], ...]:
    """Parse the ``i j w`` edge-list format (0-based indices, '#' comments)."""
    edges = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        if len(parts) != 3:
            raise GraphValidationError(f"line {lineno}: expected 'i j w', got {raw!r}")
        try:
            i, j, w = int(parts[0]), int(parts[1]), float(parts[2])
        except ValueError as exc:
            raise GraphValidationError(f"line {lineno}: {exc}") from exc
        edges.append((i, j, w))
    return tuple(edges)


def build(spec: GraphSpec) -> Graph:
    """Construct the graph described by ``spec``.

    Random kinds are deterministic functions of the seed, which must be
    supplied. A requested ``target_spectral_norm`` is applied as a final
    rescaling step.
    """
    kind = spec.kind
    if kind in ("line", "cycle"):
        if spec.n is None or spec.n < 2:
            raise GraphValidationError(f"{kind} requires n >= 2")
        adj = _line_adjacency(spec.n) if kind == "line" else _cycle_adjacency(spec.n)
    elif kind == "grid2d":
        if spec.rows is None or spec.cols is None or spec.rows < 1 or spec.cols < 1:
            raise GraphValidationError("grid2d requires positive rows and cols")
        if spec.rows * spec.cols < 2:
            raise GraphValidationError("grid2d requires at least 2 nodes")
        adj = _grid2d_adjacency(spec.rows, spec.cols)
    elif kind == "random_geometric":
        if spec.n is None or spec.n < 2:
            raise GraphValidationError("random_geometric requires n >= 2")
        if spec.radius <= 0.0:
            raise GraphValidationError("random_geometric requires radius > 0")
        if spec.seed is None:
            raise GraphValidationError("random_geometric requires a seed")
        width = spec.kernel_width if spec.kernel_width is not None else spec.radius / 2.0
        if width <= 0.0:
            raise GraphValidationError("kernel_width must be positive")
        adj = _random_geometric_adjacency(spec.n, spec.radius, width, spec.seed)
    elif kind == "scale_free":
        if spec.n is None:
            raise GraphValidationError("scale_free requires n")
        if spec.seed is None:
            raise GraphValidationError("scale_free requires a seed")
        adj = _scale_free_adjacency(spec.n, spec.attachment_count, spec.seed)
    elif kind == "explicit_edges":
        if spec.n is None or spec.n < 2:
            raise GraphValidationError("explicit_edges requires n >= 2")
        if not spec.edges:
            raise GraphValidationError("explicit_edges requires a non-empty edge list")
        adj = _explicit_adjacency(spec.n, spec.edges)
    else:  # pragma: no cover - guarded by GraphSpec.__post_init__
        raise GraphValidationError(f"unknown graph kind {kind!r}")

    if not np.any(adj):
        raise GraphValidationError(f"{kind} spec produced a graph with zero edges")

    graph = from_adjacency(adj)
    if spec.target_spectral_norm is not None:
        graph = rescale_spectral_norm(graph, spec.target_spectral_norm)
    return graph


def rescale_spectral_norm(g: Graph, target: float) -> Graph:
    """Return a copy of ``g`` whose adjacency has spectral norm ``target``.

    All degrees, the Laplacian, and the cached constants are recomputed from
    the rescaled adjacency rather than scaled in place.
    """
    if not (0.0 < target < 1.0):
        raise GraphValidationError(f"rescale target must lie in (0, 1), got {target}")
    if g.spectral_norm == 0.0:
        raise RescaleUndefinedError("cannot rescale an edgeless graph (spectral norm is zero)")
    return from_adjacency(g.adjacency * (target / g.spectral_norm))


def power_iteration_norm(matrix: np.ndarray, iters: int = 2000, seed: int = 0) -> float:
    """Spectral norm of a symmetric matrix by power iteration on its square.

    Used only as an independent cross-check of the dense eigendecomposition;
    accuracy is limited by the relative spectral gap.
    """
    matrix = np.asarray(matrix, dtype=float)
    rng = np.random.default_rng(seed)
    v = rng.standard_normal(matrix.shape[0])
    v /= np.linalg.norm(v)
    for _ in range(iters):
        u = matrix @ (matrix @ v)
        norm = np.linalg.norm(u)
        if norm == 0.0:
            return 0.0
        v = u / norm
    return float(np.sqrt(v @ (matrix @ (matrix @ v))))
