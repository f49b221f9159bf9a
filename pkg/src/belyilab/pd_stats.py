"""Stick-breaking samples, face-count statistics and their comparison with the Poisson-Dirichlet limit.

Face lengths are measured in half-edges, so a model with n vertices of degree k has total stick length kn and the
largest face fraction is L / (kn).
"""

import logging
from fractions import Fraction
from math import log, pi, sqrt
from typing import List, NamedTuple, Optional, Tuple

import numpy as np
from scipy import stats
from scipy.integrate import quad
from scipy.special import digamma, exp1

from .perm import uniform_cycle_type
from .surface import FaceSpectrum, faces, genus, sample_oriented_graph
from .validation import InvariantViolationError, QuadratureError, require

_log = logging.getLogger(__name__)

EULER_GAMMA = 0.5772156649015329
ZETA_TWO = pi**2 / 6
DEFAULT_TRUNCATION = 200
RANKED_COORDINATES = 3
QUADRATURE_TOLERANCE = 1e-8


class RankedMassVector(NamedTuple):
    """Leading masses of a point of the simplex and the mass left beyond them."""

    masses: np.ndarray
    residual: float

    def ranked(self) -> "RankedMassVector":
        return RankedMassVector(masses=np.sort(self.masses)[::-1], residual=self.residual)


class FaceCountSample(NamedTuple):
    """Per-trial face count ``l``, largest face ``L``, genus and component count for fixed (n, k)."""

    n: int
    k: int
    l: np.ndarray  # noqa: E741
    L: np.ndarray
    genus: np.ndarray
    components: np.ndarray

    @property
    def trials(self) -> int:
        return int(self.l.size)


class FaceCountSummary(NamedTuple):
    n: int
    k: int
    trials: int
    mean: float
    mean_se: float
    variance: float
    variance_se: float
    predicted_mean: float
    predicted_variance: float


class CltReport(NamedTuple):
    trials: int
    ks_statistic: float
    ks_pvalue: float
    standardized_mean: float
    standardized_mean_se: float
    genus_mean: float
    genus_mean_se: float
    predicted_genus_mean: float
    genus_sd: float
    predicted_genus_sd: float
    lattice_ks_statistic: float


class RatioEstimate(NamedTuple):
    mean: float
    standard_error: float
    trials: int


class BaselineReport(NamedTuple):
    """Uniform permutations of size N: cycle count against H_N and largest cycle fraction."""

    size: int
    trials: int
    mean_cycles: float
    mean_cycles_se: float
    harmonic: float
    largest_fraction: float
    largest_fraction_se: float


class Interval(NamedTuple):
    low: float
    high: float


class PdComparison(NamedTuple):
    trials: int
    theta: float
    ks: float
    ks_pvalue: float
    ks_ci: Interval
    wasserstein: Tuple[float, ...]
    wasserstein_ci: Tuple[Interval, ...]

    def to_dict(self) -> dict:
        result = {"ks": self.ks, "trials": self.trials, "theta": self.theta, "ks_ci": list(self.ks_ci)}
        for j, (distance, interval) in enumerate(zip(self.wasserstein, self.wasserstein_ci), start=1):
            result[f"wasserstein_{j}"] = distance
            result[f"wasserstein_{j}_ci"] = list(interval)
        return result


def _breaks(theta: float, shape, rng: np.random.Generator) -> np.ndarray:
    uniforms = rng.random(shape)
    # Beta(1, theta) by inversion of its distribution function.
    return uniforms if theta == 1 else 1 - uniforms ** (1 / theta)


def gem_sample_batch(theta: float, trunc: int, size: int, rng: np.random.Generator) -> Tuple[np.ndarray, np.ndarray]:
    """Unranked stick-breaking masses.

    Returns:
        masses of shape (size, trunc) and residuals of shape (size,)
    """
    require(theta > 0, f"theta must be positive, got {theta}")
    require(trunc >= 1, f"truncation must be positive, got {trunc}")
    breaks = _breaks(theta, (size, trunc), rng)
    remaining = np.cumprod(1 - breaks, axis=1)
    before = np.hstack([np.ones((size, 1)), remaining[:, :-1]])
    return breaks * before, remaining[:, -1]


def gem_sample(theta: float, trunc: int, rng: np.random.Generator, ranked: bool = True) -> RankedMassVector:
    """First ``trunc`` stick-breaking masses with Beta(1, theta) fractions, ranked unless asked otherwise."""
    masses, residual = gem_sample_batch(theta, trunc, 1, rng)
    sample = RankedMassVector(masses=masses[0], residual=float(residual[0]))
    return sample.ranked() if ranked else sample


def ranked_gem_leaders(
    theta: float, size: int, rng: np.random.Generator, trunc: int = DEFAULT_TRUNCATION
) -> np.ndarray:
    """Largest ``RANKED_COORDINATES`` masses of ``size`` independent ranked samples, one row each."""
    masses, _ = gem_sample_batch(theta, trunc, size, rng)
    return -np.sort(-masses, axis=1)[:, :RANKED_COORDINATES]


def golomb_dickman_constant() -> float:
    """Integral over (0, inf) of exp(-x - E1(x)), the limiting mean largest fraction.

    Raises:
        QuadratureError: if the summed error estimate exceeds 1e-8
    """

    def integrand(x: float) -> float:
        return float(np.exp(-x - exp1(x))) if x > 0 else 0.0

    value, error = 0.0, 0.0
    for low, high in ((0, 1), (1, 40), (40, np.inf)):
        piece, piece_error = quad(integrand, low, high, epsabs=1e-12, epsrel=1e-12, limit=200)
        value += piece
        error += piece_error
    if error > QUADRATURE_TOLERANCE:
        raise QuadratureError("largest-fraction integral", error, QUADRATURE_TOLERANCE)
    return value


def normalized_leaders(spectrum: FaceSpectrum, count: int = RANKED_COORDINATES) -> np.ndarray:
    """Largest ``count`` face lengths divided by the half-edge count, padded with zeros."""
    total = spectrum.n * spectrum.k
    leaders = np.zeros(count)
    head = spectrum.face_lengths[:count]
    leaders[: len(head)] = np.asarray(head, dtype=float) / total
    return leaders


def face_record(n: int, k: int, rng: np.random.Generator) -> Tuple[int, int, int, int]:
    """(l, L, genus, components) of one sampled model."""
    spectrum = faces(sample_oriented_graph(n, k, rng))
    return spectrum.l, spectrum.L, spectrum.genus, spectrum.components


def face_count_sample(n: int, k: int, records: List[Tuple[int, int, int, int]]) -> FaceCountSample:
    """Assemble records and recompute the genus of every one from its face and component counts.

    Raises:
        InvariantViolationError: if a recorded genus disagrees with the recomputed one
    """
    array = np.asarray(records, dtype=np.int64).reshape(-1, 4)
    require(array.shape[0] > 0, "a face count sample needs at least one trial")
    sample = FaceCountSample(n=n, k=k, l=array[:, 0], L=array[:, 1], genus=array[:, 2], components=array[:, 3])
    records = zip(sample.l.tolist(), sample.genus.tolist(), sample.components.tolist())
    for faces_count, recorded, components in records:
        if recorded != genus(n, faces_count, k, components):
            raise InvariantViolationError(f"record with l={faces_count} carries genus {recorded}")
    return sample


def sample_face_counts(n: int, k: int, trials: int, rng: np.random.Generator) -> FaceCountSample:
    require(trials >= 1, f"trials must be positive, got {trials}")
    return face_count_sample(n, k, [face_record(n, k, rng) for _ in range(trials)])


def summarize_face_counts(sample: FaceCountSample) -> FaceCountSummary:
    """Mean and variance of the face count with standard errors, against log(kn) + gamma and that minus pi^2/6."""
    require(sample.trials >= 2, "a summary needs at least 2 trials")
    values = sample.l.astype(float)
    trials = sample.trials
    variance = float(values.var(ddof=1))
    fourth = float(np.mean((values - values.mean()) ** 4))
    centre = log(sample.k * sample.n) + EULER_GAMMA
    return FaceCountSummary(
        n=sample.n,
        k=sample.k,
        trials=trials,
        mean=float(values.mean()),
        mean_se=sqrt(variance / trials),
        variance=variance,
        variance_se=sqrt(max(fourth - variance**2, 0.0) / trials),
        predicted_mean=centre,
        predicted_variance=centre - ZETA_TWO,
    )


def face_count_stats(n: int, k: int, trials: int, rng: np.random.Generator) -> FaceCountSummary:
    summary = summarize_face_counts(sample_face_counts(n, k, trials, rng))
    _log.info("n=%d k=%d: mean faces %.4f (predicted %.4f)", n, k, summary.mean, summary.predicted_mean)
    return summary


def _lattice_ks(values: np.ndarray, mean: float, sd: float, spacing: int = 2) -> float:
    """KS distance of a lattice sample to a normal law, each atom compared at the midpoint to the next one."""
    support = np.arange(values.min(), values.max() + 1, spacing)
    empirical = np.searchsorted(np.sort(values), support, side="right") / values.size
    return float(np.max(np.abs(empirical - stats.norm.cdf(support + spacing / 2, loc=mean, scale=sd))))


def clt_check(sample: FaceCountSample, min_trials: int = 10_000) -> CltReport:
    """Standardize the face count by log(kn) and compare with the standard normal law.

    The face count only takes every other integer, so the plain KS statistic stays large at any size. The lattice
    statistic compares with the normal law of mean log(kn) + gamma and variance log(kn) + gamma - pi^2/6 at the
    midpoints between atoms. The genus comparison reads the Euler relation with the face count replaced by its
    predicted mean and spread.
    """
    require(sample.trials >= min_trials, f"normal approximation check needs at least {min_trials} trials")
    centre = log(sample.k * sample.n)
    standardized = (sample.l - centre) / sqrt(centre)
    ks = stats.kstest(standardized, "norm")
    genera = sample.genus.astype(float)
    trials = sample.trials
    return CltReport(
        trials=trials,
        ks_statistic=float(ks.statistic),
        ks_pvalue=float(ks.pvalue),
        standardized_mean=float(standardized.mean()),
        standardized_mean_se=float(standardized.std(ddof=1) / sqrt(trials)),
        genus_mean=float(genera.mean()),
        genus_mean_se=float(genera.std(ddof=1) / sqrt(trials)),
        predicted_genus_mean=1 + (sample.k - 2) * sample.n / 4 - (centre + EULER_GAMMA) / 2,
        genus_sd=float(genera.std(ddof=1)),
        predicted_genus_sd=sqrt(centre) / 2,
        lattice_ks_statistic=_lattice_ks(sample.l, centre + EULER_GAMMA, sqrt(centre + EULER_GAMMA - ZETA_TWO)),
    )


def largest_face_ratio_from_sample(sample: FaceCountSample) -> RatioEstimate:
    ratios = sample.L / (sample.k * sample.n)
    spread = float(ratios.std(ddof=1)) if sample.trials > 1 else 0.0
    return RatioEstimate(mean=float(ratios.mean()), standard_error=spread / sqrt(sample.trials), trials=sample.trials)


def largest_face_ratio(n: int, k: int, trials: int, rng: np.random.Generator) -> RatioEstimate:
    """Mean of L / (kn) with its standard error."""
    require(trials >= 1000, f"largest face ratio needs at least 1000 trials, got {trials}")
    return largest_face_ratio_from_sample(sample_face_counts(n, k, trials, rng))


def harmonic_number(n: int) -> Fraction:
    require(n >= 0, f"index must be nonnegative, got {n}")
    return sum((Fraction(1, i) for i in range(1, n + 1)), Fraction(0))


def uniform_permutation_baseline(size: int, trials: int, rng: np.random.Generator) -> BaselineReport:
    """Cycle count and largest cycle fraction of uniform permutations, sampled through their cycle types."""
    require(size >= 1 and trials >= 2, f"need size >= 1 and trials >= 2, got size={size}, trials={trials}")
    cycle_counts = np.empty(trials)
    largest = np.empty(trials)
    for trial in range(trials):
        parts = uniform_cycle_type(size, rng)
        cycle_counts[trial] = len(parts)
        largest[trial] = parts[0] / size
    return BaselineReport(
        size=size,
        trials=trials,
        mean_cycles=float(cycle_counts.mean()),
        mean_cycles_se=float(cycle_counts.std(ddof=1) / sqrt(trials)),
        harmonic=float(digamma(size + 1)) + EULER_GAMMA,
        largest_fraction=float(largest.mean()),
        largest_fraction_se=float(largest.std(ddof=1) / sqrt(trials)),
    )


def ks_null_quantile(n: int, m: int, alpha: float = 0.01) -> float:
    """Asymptotic critical value of the two-sample KS statistic at level ``alpha``."""
    require(0 < alpha < 1, f"alpha must be in (0, 1), got {alpha}")
    return sqrt(-log(alpha / 2) / 2) * sqrt((n + m) / (n * m))


def _ks_statistic(first: np.ndarray, second: np.ndarray) -> float:
    return stats.ks_2samp(first, second).statistic


def _percentile_interval(statistic, first: np.ndarray, second: np.ndarray, resamples: int, rng) -> Interval:
    result = stats.bootstrap(
        (first, second),
        statistic,
        n_resamples=resamples,
        vectorized=False,
        paired=False,
        method="percentile",
        random_state=rng,
    )
    return Interval(float(result.confidence_interval.low), float(result.confidence_interval.high))


def pd_distance(
    spectra: np.ndarray,
    theta: float,
    rng: np.random.Generator,
    reference: Optional[np.ndarray] = None,
    min_trials: int = 10_000,
    resamples: int = 200,
) -> PdComparison:
    """Compare normalized ranked face masses with ranked stick-breaking masses.

    Args:
        spectra: array (M, 3) of the three largest normalized face lengths per sample
        theta: parameter of the reference law
        rng: random stream for the reference sample and the bootstrap
        reference: precomputed reference leaders of the same shape; sampled when omitted
        min_trials: smallest accepted M
        resamples: bootstrap resamples per interval
    """
    spectra = np.asarray(spectra, dtype=float)
    require(spectra.ndim == 2 and spectra.shape[1] >= RANKED_COORDINATES, "spectra must be an (M, 3) array")
    trials = spectra.shape[0]
    require(trials >= min_trials, f"comparison needs at least {min_trials} spectra, got {trials}")
    if reference is None:
        reference = ranked_gem_leaders(theta, trials, rng)
    ks = stats.ks_2samp(spectra[:, 0], reference[:, 0])
    wasserstein = tuple(
        float(stats.wasserstein_distance(spectra[:, j], reference[:, j])) for j in range(RANKED_COORDINATES)
    )
    ks_ci = _percentile_interval(_ks_statistic, spectra[:, 0], reference[:, 0], resamples, rng)
    wasserstein_ci = tuple(
        _percentile_interval(stats.wasserstein_distance, spectra[:, j], reference[:, j], resamples, rng)
        for j in range(RANKED_COORDINATES)
    )
    _log.info("Largest-mass KS %.4f against theta=%g over %d samples", ks.statistic, theta, trials)
    return PdComparison(
        trials=trials,
        theta=float(theta),
        ks=float(ks.statistic),
        ks_pvalue=float(ks.pvalue),
        ks_ci=ks_ci,
        wasserstein=wasserstein,
        wasserstein_ci=wasserstein_ci,
    )
