"""Random regular graphs with random orientation, their left-hand-turn faces, genus and adjacency spectra.

A model on ``n`` vertices of degree ``k`` lives on ``N = k * n`` half-edges. Vertex ``v`` owns the half-edges
``k*v, ..., k*v + k - 1``; ``beta`` cycles each block in the chosen cyclic order and ``alpha`` pairs half-edges
into edges. Faces are the cycles of ``beta * alpha`` (alpha first). Loops and multi-edges are kept.
"""

import logging
from math import factorial, sqrt, pi
from typing import Dict, Iterable, List, NamedTuple, Optional, Sequence

import numpy as np
from scipy.integrate import quad
from scipy.linalg import eigvalsh
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import connected_components

from .perm import Partition, Permutation, compose, cycle_type, parse_cycles
from .validation import InvariantViolationError, require

_log = logging.getLogger(__name__)

MAX_SHORT_CYCLE_LENGTH = 12
MAX_DENSE_VERTICES = 4096


class OrientedGraphModel(NamedTuple):
    """Pair (beta, alpha) realizing a k-regular multigraph with a cyclic order at every vertex."""

    n: int
    k: int
    beta: Permutation
    alpha: Permutation

    @property
    def degree(self) -> int:
        return self.n * self.k


class FaceSpectrum(NamedTuple):
    """Face lengths of a model in half-edge units."""

    n: int
    k: int
    face_lengths: Partition
    components: int = 1

    @property
    def l(self) -> int:  # noqa: E743
        return len(self.face_lengths)

    @property
    def L(self) -> int:
        return self.face_lengths[0]

    @property
    def genus(self) -> int:
        return genus(self.n, self.l, self.k, self.components)


class ShortCycleReport(NamedTuple):
    length: int
    trials: int
    empirical_mean: float
    standard_error: float
    classical_mean: float
    printed_mean: float
    closer: str


def validate_model(m: OrientedGraphModel) -> None:
    """Check the structural invariants of a model.

    Raises:
        PreconditionError: if beta does not cycle each vertex block or alpha is not a fixed-point-free involution
    """
    require(m.k >= 1 and m.n >= 1, "a model needs n >= 1 and k >= 1")
    require(m.beta.degree == m.degree and m.alpha.degree == m.degree, f"permutations must have degree {m.degree}")
    blocks = np.arange(m.degree) // m.k
    require(np.array_equal(blocks[m.beta.images], blocks), "beta must map every vertex block to itself")
    require(cycle_type(m.beta) == Partition([m.k] * m.n), f"beta must have cycle type {m.k}^{m.n}")
    alpha = m.alpha.images
    require(
        np.array_equal(alpha[alpha], np.arange(m.degree)) and not np.any(alpha == np.arange(m.degree)),
        "alpha must be a fixed-point-free involution",
    )


def model_from_cycles(beta: str, alpha: str, k: int) -> OrientedGraphModel:
    """Build and validate a model from 1-based cycle notation."""
    beta_perm = parse_cycles(beta)
    require(beta_perm.degree % k == 0, f"degree {beta_perm.degree} is not a multiple of k={k}")
    model = OrientedGraphModel(
        n=beta_perm.degree // k, k=k, beta=beta_perm, alpha=parse_cycles(alpha, beta_perm.degree)
    )
    validate_model(model)
    return model


def _sample_once(n: int, k: int, rng: np.random.Generator) -> OrientedGraphModel:
    degree = n * k
    # Row v of orders is a uniform linear order of the block; read cyclically it is a uniform cyclic order.
    orders = np.argsort(rng.random((n, k)), axis=1) + (np.arange(n) * k)[:, None]
    beta = np.empty(degree, dtype=np.int64)
    beta[orders] = np.roll(orders, -1, axis=1)

    points = rng.permutation(degree)
    alpha = np.empty(degree, dtype=np.int64)
    alpha[points[0::2]] = points[1::2]
    alpha[points[1::2]] = points[0::2]
    return OrientedGraphModel(n=n, k=k, beta=Permutation._trusted(beta), alpha=Permutation._trusted(alpha))


def sample_oriented_graph(
    n: int, k: int, rng: np.random.Generator, simple: bool = False, max_attempts: int = 10_000
) -> OrientedGraphModel:
    """Sample a configuration-model graph with a uniform cyclic order at every vertex.

    Args:
        n: number of vertices
        k: regularity, at least 3
        rng: random stream
        simple: condition on a simple graph by rejection
        max_attempts: rejection budget when ``simple`` is set

    Raises:
        PreconditionError: if k < 3 or k * n is odd
        RuntimeError: if no simple graph was found within the budget
    """
    require(k >= 3, f"regularity must be at least 3, got k={k}")
    require(n >= 1, f"vertex count must be positive, got n={n}")
    require((k * n) % 2 == 0, f"k * n must be even, got k={k}, n={n}")
    if not simple:
        return _sample_once(n, k, rng)
    require(n > k, f"a simple {k}-regular graph needs more than {k} vertices")
    for attempt in range(1, max_attempts + 1):
        model = _sample_once(n, k, rng)
        if is_simple(model):
            _log.debug("Simple graph found after %d attempt(s)", attempt)
            return model
    raise RuntimeError(f"No simple {k}-regular graph on {n} vertices after {max_attempts} attempts")


def component_count(m: OrientedGraphModel) -> int:
    """Number of connected components of the underlying multigraph."""
    degree = m.degree
    rows = np.concatenate([np.arange(degree), np.arange(degree)])
    cols = np.concatenate([m.beta.images, m.alpha.images])
    graph = csr_matrix((np.ones(2 * degree, dtype=np.int8), (rows, cols)), shape=(degree, degree))
    count, _ = connected_components(graph, directed=False)
    return int(count)


def faces(m: OrientedGraphModel) -> FaceSpectrum:
    """Face lengths of the surface glued along left-hand-turn paths."""
    face_lengths = cycle_type(compose(m.beta, m.alpha))
    return FaceSpectrum(n=m.n, k=m.k, face_lengths=face_lengths, components=component_count(m))


def genus(n: int, l: int, k: int = 3, components: int = 1) -> int:  # noqa: E741
    """Genus from Euler's formula, ``1 + ((k - 2) n - 2 l) / 4`` for a connected surface.

    For cubic graphs this is ``1 + (n - 2l) / 4``. A surface with several components reports the sum of the
    component genera.

    Raises:
        InvariantViolationError: if the value is not a nonnegative integer
    """
    numerator = (k - 2) * n - 2 * l
    if numerator % 4:
        raise InvariantViolationError(f"genus is not integral for n={n}, l={l}, k={k}")
    value = 1 + numerator // 4 + (components - 1)
    if value < 0:
        raise InvariantViolationError(f"negative genus {value} for n={n}, l={l}, k={k}, components={components}")
    return value


def configuration_count(m: int) -> int:
    """Number of perfect matchings of 2m points, (2m)! / (2^m m!)."""
    require(m >= 0, f"pair count must be nonnegative, got {m}")
    return factorial(2 * m) // (2**m * factorial(m))


def configuration_count_fixed_edges(m: int, l: int) -> int:  # noqa: E741
    """Number of perfect matchings of 2m points containing a given set of l disjoint pairs."""
    require(0 <= l <= m, f"need 0 <= l <= m, got l={l}, m={m}")
    total = configuration_count(m)
    denominator = 1
    for j in range(l):
        denominator *= 2 * m - 1 - 2 * j
    if total % denominator:
        raise InvariantViolationError(f"matching count N({m}) not divisible by the fixed-edge factor")
    return total // denominator


def cube_model(flipped_vertex: Optional[int] = None) -> OrientedGraphModel:
    """The cube 1-skeleton with its standard orientation.

    Vertex ``v`` sits at the corner whose coordinates are the bits of ``v``; its half-edge ``3v + d`` points
    along coordinate ``d``. Corners with an even number of set bits are ordered x, y, z and the others x, z, y,
    which makes every face a square. ``flipped_vertex`` reverses the order at one corner.
    """
    beta = np.empty(24, dtype=np.int64)
    alpha = np.empty(24, dtype=np.int64)
    for v in range(8):
        step = 1 if bin(v).count("1") % 2 == 0 else -1
        if v == flipped_vertex:
            step = -step
        for d in range(3):
            beta[3 * v + d] = 3 * v + (d + step) % 3
            alpha[3 * v + d] = 3 * (v ^ (1 << d)) + d
    return OrientedGraphModel(n=8, k=3, beta=Permutation._trusted(beta), alpha=Permutation._trusted(alpha))


def edge_pairs(m: OrientedGraphModel) -> np.ndarray:
    """Half-edge pairs (a, alpha(a)) with a < alpha(a), one row per edge, ordered by a."""
    half_edges = np.arange(m.degree)
    first = half_edges[half_edges < m.alpha.images]
    return np.column_stack([first, m.alpha.images[first]])


def multigraph_edges(m: OrientedGraphModel) -> np.ndarray:
    """Vertex pairs of the edges, one row per edge (loops and parallel edges repeated)."""
    return edge_pairs(m) // m.k


def is_simple(m: OrientedGraphModel) -> bool:
    edges = multigraph_edges(m)
    if np.any(edges[:, 0] == edges[:, 1]):
        return False
    ordered = np.sort(edges, axis=1)
    return len(np.unique(ordered, axis=0)) == len(ordered)


def adjacency_matrix(m: OrientedGraphModel) -> np.ndarray:
    """Dense adjacency matrix; a loop adds 2 to its diagonal entry so every row sums to k."""
    edges = multigraph_edges(m)
    matrix = np.zeros((m.n, m.n))
    np.add.at(matrix, (edges[:, 0], edges[:, 1]), 1)
    np.add.at(matrix, (edges[:, 1], edges[:, 0]), 1)
    return matrix


def adjacency_spectrum(m: OrientedGraphModel) -> np.ndarray:
    """Eigenvalues of the adjacency matrix, nonincreasing."""
    require(m.n <= MAX_DENSE_VERTICES, f"dense eigensolve limited to n <= {MAX_DENSE_VERTICES}, got n={m.n}")
    return eigvalsh(adjacency_matrix(m))[::-1]


def second_eigenvalue_samples(spectra: Iterable[np.ndarray]) -> np.ndarray:
    """Second largest eigenvalue of each nonincreasing spectrum; NaN for a single vertex graph."""
    return np.array([float(values[1]) if values.size > 1 else np.nan for values in spectra])


def kesten_mckay_density(k: int, t: float) -> float:
    """Limiting spectral density of random k-regular graphs; 0 outside the open support."""
    radicand = 4 * (k - 1) - t * t
    if radicand <= 0:
        return 0.0
    return k / (2 * pi) * sqrt(radicand) / (k * k - t * t)


def kesten_mckay_bin_masses(k: int, bins: int) -> np.ndarray:
    """Mass of the density on ``bins`` equal bins of its support."""
    edge = 2 * sqrt(k - 1)
    bounds = np.linspace(-edge, edge, bins + 1)
    return np.array([quad(lambda t: kesten_mckay_density(k, t), a, b)[0] for a, b in zip(bounds, bounds[1:])])


def spectral_histogram_distance(eigenvalues: np.ndarray, k: int, bins: int = 40) -> float:
    """L1 distance between the empirical eigenvalue mass per bin and the limiting density's mass per bin.

    Eigenvalues outside the support (the trivial eigenvalue k among them) count towards the total only.
    """
    eigenvalues = np.asarray(eigenvalues, dtype=float).ravel()
    edge = 2 * sqrt(k - 1)
    counts, _ = np.histogram(eigenvalues, bins=bins, range=(-edge, edge))
    empirical = counts / eigenvalues.size
    return float(np.abs(empirical - kesten_mckay_bin_masses(k, bins)).sum())


def short_cycle_counts(m: OrientedGraphModel, max_len: int) -> Dict[int, int]:
    """Number of cycles of each length 1..max_len in the multigraph.

    A cycle is a closed circuit of distinct edges through distinct vertices, up to rotation and reflection:
    each loop is a 1-cycle and each pair of parallel edges a 2-cycle.
    """
    require(1 <= max_len <= MAX_SHORT_CYCLE_LENGTH, f"max_len must be in 1..{MAX_SHORT_CYCLE_LENGTH}, got {max_len}")
    edges = multigraph_edges(m).tolist()
    neighbours: List[List[tuple]] = [[] for _ in range(m.n)]
    counts = {length: 0 for length in range(1, max_len + 1)}
    for edge_id, (u, v) in enumerate(edges):
        if u == v:
            counts[1] += 1
        else:
            neighbours[u].append((v, edge_id))
            neighbours[v].append((u, edge_id))

    # Every cycle of length >= 2 is found twice from its smallest vertex, once per direction.
    closed = [0] * (max_len + 1)
    on_path = [False] * m.n

    def extend(start: int, vertex: int, last_edge: int, length: int) -> None:
        for neighbour, edge_id in neighbours[vertex]:
            if edge_id == last_edge:
                continue
            if neighbour == start:
                closed[length] += 1
            elif neighbour > start and not on_path[neighbour] and length < max_len:
                on_path[neighbour] = True
                extend(start, neighbour, edge_id, length + 1)
                on_path[neighbour] = False

    for start in range(m.n):
        for neighbour, edge_id in neighbours[start]:
            if neighbour > start and max_len >= 2:
                on_path[neighbour] = True
                extend(start, neighbour, edge_id, 2)
                on_path[neighbour] = False

    for length in range(2, max_len + 1):
        counts[length] = closed[length] // 2
    return counts


def short_cycle_mean_check(
    n: int, k: int, length: int, trials: int, rng: np.random.Generator
) -> ShortCycleReport:
    """Empirical mean number of cycles of one length, against both candidate Poisson means.

    The classical limit is (k-1)^i / (2i); the alternative (k-1)^i / 2^i is reported alongside.
    """
    require(trials >= 2, f"need at least 2 trials, got {trials}")
    samples = [short_cycle_counts(sample_oriented_graph(n, k, rng), length)[length] for _ in range(trials)]
    report = short_cycle_report(samples, k, length)
    _log.info(
        "Mean %d-cycle count %.4f (classical %.4f, printed %.4f)",
        length,
        report.empirical_mean,
        report.classical_mean,
        report.printed_mean,
    )
    return report


def short_cycle_report(samples: Sequence[int], k: int, length: int) -> ShortCycleReport:
    """Summarize per-graph counts of cycles of one length against both candidate Poisson means."""
    samples = np.asarray(samples, dtype=float)
    trials = samples.size
    require(trials >= 2, f"need at least 2 trials, got {trials}")
    mean = float(samples.mean())
    classical = (k - 1) ** length / (2 * length)
    printed = (k - 1) ** length / 2**length
    report = ShortCycleReport(
        length=length,
        trials=trials,
        empirical_mean=mean,
        standard_error=float(samples.std(ddof=1) / sqrt(trials)),
        classical_mean=classical,
        printed_mean=printed,
        closer="classical" if abs(mean - classical) <= abs(mean - printed) else "printed",
    )
    return report
