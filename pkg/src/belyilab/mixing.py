"""Law of the face permutation beta * alpha for beta uniform on the class k^(N/k) and alpha uniform on 2^(N/2).

The exact law comes from the class multiplication formula

    P(mu) = |C_mu| / N! * sum_lambda chi^lambda(C_k) chi^lambda(C_2) chi^lambda(mu) / f^lambda

evaluated in integers after scaling every weight by N! (each f^lambda divides N!). It is compared with the uniform
law on the coset of A_N that contains beta * alpha.
"""

import logging
from collections import Counter
from decimal import Decimal, localcontext
from fractions import Fraction
from itertools import permutations as orderings
from math import factorial
from typing import Dict, Iterable, NamedTuple, Optional

import numpy as np

from .perm import (
    Partition,
    Permutation,
    class_size,
    compose,
    counts_to_cycle_type,
    cycle_type,
    orbit_lengths_batch,
    sample_uniform_class_batch,
)
from .symrep import PRECISION, class_function_values, dimension, mn_character, partitions
from .validation import InvariantViolationError, require

_log = logging.getLogger(__name__)

MAX_EXACT_DEGREE = 36
MAX_BRUTE_FORCE_DEGREE = 8
MC_CHUNK = 65_536


class ClassDistribution(NamedTuple):
    """Probability law over the cycle types of S_N, supported on one coset of A_N."""

    degree: int
    coset: int
    probabilities: Dict[Partition, Fraction]

    @property
    def coset_name(self) -> str:
        return "even" if self.coset == 1 else "odd"

    def total(self) -> Fraction:
        return sum(self.probabilities.values(), Fraction(0))


class MixingReport(NamedTuple):
    N: int
    k: int
    tv_exact: Fraction
    ds_bound: Decimal
    coset: str

    def to_dict(self) -> dict:
        return {
            "N": self.N,
            "k": self.k,
            "tv_exact": float(self.tv_exact),
            "ds_bound": float(self.ds_bound),
            "coset": self.coset,
        }


def _require_shape(n: int, k: int) -> None:
    require(n >= 2 and n % 2 == 0, f"N must be even and positive, got N={n}")
    require(k >= 2 and n % k == 0, f"k={k} must be at least 2 and divide N={n}")


def target_coset(n: int, k: int) -> int:
    """Sign shared by all products beta * alpha: +1 for A_N, -1 for its complement."""
    _require_shape(n, k)
    exponent = (k - 1) * (n // k) + n // 2
    return -1 if exponent % 2 else 1


def _rectangle(n: int, part: int) -> Partition:
    return Partition((part,) * (n // part))


def exact_convolution_law(n: int, k: int) -> ClassDistribution:
    """Exact law of the cycle type of beta * alpha.

    Raises:
        PreconditionError: outside N <= 36, k | N, 2 | N
        InvariantViolationError: if a probability is negative, the total is not 1 or mass leaves the coset
    """
    _require_shape(n, k)
    require(n <= MAX_EXACT_DEGREE, f"exact law limited to N <= {MAX_EXACT_DEGREE}, got N={n}")
    n_factorial = factorial(n)
    c_k, c_2 = _rectangle(n, k), _rectangle(n, 2)
    weights = {}
    for shape in partitions(n):
        product = mn_character(shape, c_k) * mn_character(shape, c_2)
        if product:
            weights[tuple(shape)] = product * (n_factorial // dimension(shape))
    _log.debug("Class function for N=%d, k=%d has %d nonzero weights", n, k, len(weights))

    coset = target_coset(n, k)
    probabilities = {}
    for mu, scaled in class_function_values(weights, n).items():
        if not scaled:
            continue
        probability = Fraction(class_size(mu) * scaled, n_factorial * n_factorial)
        if probability < 0:
            raise InvariantViolationError(f"negative probability {probability} for type {mu}")
        if mu.sign != coset:
            raise InvariantViolationError(f"type {mu} lies outside the {coset:+d} coset")
        probabilities[mu] = probability
    law = ClassDistribution(degree=n, coset=coset, probabilities=probabilities)
    if law.total() != 1:
        raise InvariantViolationError(f"exact law sums to {law.total()}")
    _log.info("Exact law for N=%d, k=%d: %d types in the %s coset", n, k, len(probabilities), law.coset_name)
    return law


def _class_elements(n: int, part: int) -> Iterable[Permutation]:
    target = _rectangle(n, part)
    for images in orderings(range(n)):
        perm = Permutation(images)
        if cycle_type(perm) == target:
            yield perm


def brute_force_law(n: int, k: int) -> ClassDistribution:
    """Law of beta * alpha by enumerating every pair of the two classes."""
    _require_shape(n, k)
    require(n <= MAX_BRUTE_FORCE_DEGREE, f"enumeration limited to N <= {MAX_BRUTE_FORCE_DEGREE}, got N={n}")
    betas, alphas = list(_class_elements(n, k)), list(_class_elements(n, 2))
    counts = Counter(cycle_type(compose(beta, alpha)) for beta in betas for alpha in alphas)
    total = len(betas) * len(alphas)
    return ClassDistribution(
        degree=n, coset=target_coset(n, k), probabilities={mu: Fraction(c, total) for mu, c in counts.items()}
    )


def uniform_law(n: int, coset: int) -> ClassDistribution:
    """Uniform measure on A_N (coset +1) or on its complement (coset -1)."""
    require(n >= 2, f"N must be at least 2, got N={n}")
    require(coset in (1, -1), f"coset must be +1 or -1, got {coset}")
    probabilities = {mu: Fraction(2 * class_size(mu), factorial(n)) for mu in partitions(n) if mu.sign == coset}
    return ClassDistribution(degree=n, coset=coset, probabilities=probabilities)


def tv_distance(first: ClassDistribution, second: ClassDistribution) -> Fraction:
    """Half the L1 distance between two laws."""
    require(first.degree == second.degree, "laws must live on the same S_N")
    support = set(first.probabilities) | set(second.probabilities)
    zero = Fraction(0)
    return sum(
        (abs(first.probabilities.get(mu, zero) - second.probabilities.get(mu, zero)) for mu in support), zero
    ) / 2


def tv_to_uniform(law: ClassDistribution) -> Fraction:
    """Total variation distance from the uniform law on the coset the law is tagged with."""
    return tv_distance(law, uniform_law(law.degree, law.coset))


def _ds_terms(n: int, k: int, reverse: bool) -> Iterable[Fraction]:
    shapes = list(partitions(n))
    if reverse:
        shapes.reverse()
    trivial, sign = Partition((n,)), Partition((1,) * n)
    c_k, c_2 = _rectangle(n, k), _rectangle(n, 2)
    for shape in shapes:
        if shape == trivial or shape == sign:
            continue
        yield Fraction(mn_character(shape, c_k) * mn_character(shape, c_2), dimension(shape)) ** 2


def ds_bound_squared(n: int, k: int, reverse: bool = False) -> Fraction:
    """Half the sum of squared character ratios over the partitions other than (N) and (1^N)."""
    _require_shape(n, k)
    require(n <= MAX_EXACT_DEGREE, f"bound limited to N <= {MAX_EXACT_DEGREE}, got N={n}")
    return sum(_ds_terms(n, k, reverse), Fraction(0)) / 2


def ds_upper_bound(n: int, k: int) -> Decimal:
    """Square root of ``ds_bound_squared``, taken in high precision."""
    squared = ds_bound_squared(n, k)
    with localcontext() as context:
        context.prec = PRECISION
        return (Decimal(squared.numerator) / Decimal(squared.denominator)).sqrt()


def mc_type_counts(n: int, k: int, trials: int, rng: np.random.Generator) -> Counter:
    """Cycle types of ``trials`` independent products beta * alpha, counted."""
    _require_shape(n, k)
    require(trials >= 1, f"trials must be positive, got {trials}")
    counts: Counter = Counter()
    done = 0
    while done < trials:
        size = min(MC_CHUNK, trials - done)
        betas = sample_uniform_class_batch(n, k, size, rng)
        alphas = sample_uniform_class_batch(n, 2, size, rng)
        cycle_counts = orbit_lengths_batch(np.take_along_axis(betas, alphas, axis=1))
        rows, multiplicity = np.unique(cycle_counts, axis=0, return_counts=True)
        for row, count in zip(rows, multiplicity):
            counts[counts_to_cycle_type(row)] += int(count)
        done += size
    return counts


def empirical_law(n: int, k: int, counts: Counter) -> ClassDistribution:
    total = sum(counts.values())
    return ClassDistribution(
        degree=n, coset=target_coset(n, k), probabilities={mu: Fraction(c, total) for mu, c in counts.items()}
    )


def mc_convolution_law(n: int, k: int, trials: int, rng: np.random.Generator) -> ClassDistribution:
    """Empirical law of the cycle type of beta * alpha over independent samples."""
    return empirical_law(n, k, mc_type_counts(n, k, trials, rng))


def mixing_report(n: int, k: int, law: Optional[ClassDistribution] = None) -> MixingReport:
    law = law or exact_convolution_law(n, k)
    report = MixingReport(N=n, k=k, tv_exact=tv_to_uniform(law), ds_bound=ds_upper_bound(n, k), coset=law.coset_name)
    _log.info("N=%d, k=%d: tv %.6g, bound %.6g", n, k, float(report.tv_exact), float(report.ds_bound))
    return report
