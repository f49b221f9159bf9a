"""Experiment execution: validated configurations, deterministic random streams, worker pools and the acceptance suite.

Random streams are PCG64 generators (numpy's PCG XSL-RR 128/64) seeded by the SplitMix64 finaliser of
``master_seed + (index + 1) * 0x9E3779B97F4A7C15`` modulo 2^64. Per-trial analyses use one stream per trial index and
batch analyses one stream per block of ``BLOCK_SIZE`` trials, so results never depend on the number of workers.
"""

import filecmp
import logging
import tempfile
import time
from collections import Counter
from concurrent.futures import ProcessPoolExecutor
from fractions import Fraction
from functools import partial
from math import factorial, sqrt
from pathlib import Path
from typing import Callable, Dict, Iterable, List, NamedTuple, Optional, Tuple

import numpy as np

from . import __version__
from .export import write_csv, write_edge_list, write_json, write_law, write_records
from .mixing import (
    brute_force_law,
    ds_bound_squared,
    empirical_law,
    exact_convolution_law,
    mc_type_counts,
    mixing_report,
    tv_distance,
)
from .pd_stats import (
    RANKED_COORDINATES,
    clt_check,
    face_count_sample,
    golomb_dickman_constant,
    ks_null_quantile,
    largest_face_ratio_from_sample,
    normalized_leaders,
    pd_distance,
    ranked_gem_leaders,
    summarize_face_counts,
    uniform_permutation_baseline,
)
from .perm import Partition, class_size, compose, format_cycles, parse_cycles
from .surface import (
    MAX_DENSE_VERTICES,
    MAX_SHORT_CYCLE_LENGTH,
    adjacency_spectrum,
    cube_model,
    faces,
    sample_oriented_graph,
    second_eigenvalue_samples,
    short_cycle_counts,
    short_cycle_report,
    spectral_histogram_distance,
)
from .symrep import (
    character_table_rows,
    count_standard_tableaux,
    dimension,
    dimension_lower_bounds_check,
    fomin_lulov_check,
    hook_grid,
    mn_character,
    partition_count_bound_check,
    partitions,
    restricted_sum_split,
    restricted_sum,
    rim_hook_count,
    codegree_table_verify,
)
from .validation import require

_log = logging.getLogger(__name__)

MASK64 = (1 << 64) - 1
GOLDEN_GAMMA = 0x9E3779B97F4A7C15
BLOCK_SIZE = 65_536
COMMANDS = ("simulate", "mixing", "character", "pd-compare", "spectrum", "bounds", "verify")
MIN_PD_TRIALS = 10_000
MIN_CLT_TRIALS = 10_000
NEAR_RAMANUJAN_SLACK = 0.1

FOUR_VERTEX_BETA = "(1,3,5)(2,12,8)(4,7,9)(6,10,11)"
FOUR_VERTEX_ALPHA = "(1,2)(3,4)(5,6)(7,8)(9,10)(11,12)"
FOUR_VERTEX_PHI = "(1,12,6)(2,3,7)(4,5,10)(8,9,11)"
GOLOMB_DICKMAN = 0.6243


def _mix64(z: int) -> int:
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & MASK64
    return z ^ (z >> 31)


def trial_seed(master_seed: int, index: int) -> int:
    """64-bit seed of the stream with the given index."""
    require(0 <= master_seed <= MASK64, f"master seed must be a 64-bit unsigned integer, got {master_seed}")
    require(0 <= index <= MASK64, f"stream index must be a 64-bit unsigned integer, got {index}")
    return _mix64((master_seed + (index + 1) * GOLDEN_GAMMA) & MASK64)


def derive_stream(master_seed: int, index: int) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(trial_seed(master_seed, index)))


def parallel_map(function: Callable, items: Iterable, workers: int) -> list:
    """Map in a process pool, results in input order."""
    items = list(items)
    if workers <= 1 or len(items) <= 1:
        return [function(item) for item in items]
    chunksize = max(1, len(items) // (workers * 8))
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(function, items, chunksize=chunksize))


def _blocks(trials: int) -> List[Tuple[int, int]]:
    """(block index, block size) pairs covering ``trials``."""
    return [(block, min(BLOCK_SIZE, trials - block * BLOCK_SIZE)) for block in range(-(-trials // BLOCK_SIZE))]


class ExperimentConfig(NamedTuple):
    """Parameters of one run; unused fields are ignored by the selected command."""

    command: str
    n: Optional[int] = None
    k: int = 3
    trials: Optional[int] = None
    theta: float = 1.0
    N: Optional[int] = None
    m: int = 4
    t: str = "1/3"
    r_max: int = 500
    graphs: int = 50
    bins: int = 40
    codegree_table: bool = False
    simple: bool = False
    cycles: int = 0
    export_graphs: bool = False
    scale: str = "quick"
    master_seed: int = 0
    workers: int = 1
    output_dir: Path = Path("belyilab-results")
    output_format: str = "csv"

    @property
    def exponent(self) -> Fraction:
        return Fraction(self.t)

    def validate(self) -> None:
        """Check every parameter the selected command uses.

        Raises:
            PreconditionError: naming the first violated constraint
        """
        require(self.command in COMMANDS, f"unknown command '{self.command}', expected one of {', '.join(COMMANDS)}")
        require(0 <= self.master_seed <= MASK64, "seed must be a 64-bit unsigned integer")
        require(self.workers >= 1, f"workers must be positive, got {self.workers}")
        require(self.output_format in ("csv", "json"), f"format must be csv or json, got {self.output_format}")
        if self.command in ("simulate", "pd-compare", "spectrum"):
            require(self.n is not None and self.n >= 1, "--n must be a positive vertex count")
            require(self.k >= 3, f"--k must be at least 3, got {self.k}")
            require((self.k * self.n) % 2 == 0, f"k * n must be even, got k={self.k}, n={self.n}")
        if self.command in ("simulate", "pd-compare"):
            require(self.trials is not None and self.trials >= 1, "--trials must be positive")
        if self.command == "simulate":
            if self.simple:
                require(self.n > self.k, f"a simple graph needs n > k, got n={self.n}")
            require(
                0 <= self.cycles <= MAX_SHORT_CYCLE_LENGTH,
                f"--cycles must be in 0..{MAX_SHORT_CYCLE_LENGTH}, got {self.cycles}",
            )
        if self.command == "pd-compare":
            require(self.trials >= MIN_PD_TRIALS, f"--trials must be at least {MIN_PD_TRIALS} for pd-compare")
            require(self.theta > 0, f"--theta must be positive, got {self.theta}")
        if self.command == "spectrum":
            require(self.n <= MAX_DENSE_VERTICES, f"--n must be at most {MAX_DENSE_VERTICES} for the eigensolve")
            require(self.graphs >= 1 and self.bins >= 1, "--graphs and --bins must be positive")
        if self.command == "mixing":
            require(self.N is not None and 2 <= self.N <= 36 and self.N % 2 == 0, "--N must be even and in 2..36")
            require(self.k >= 2 and self.N % self.k == 0, f"--k must divide N, got k={self.k}, N={self.N}")
            require(self.trials is None or self.trials >= 1, "--trials must be positive")
        if self.command == "character":
            require(self.N is not None and self.N >= 1, "--N must be positive")
            if self.codegree_table:
                require(self.N >= 6, f"the table check needs N >= 6, got N={self.N}")
            else:
                require(self.N <= 20, f"character table dump limited to N <= 20, got N={self.N}")
        if self.command == "bounds":
            require(self.N is not None and 1 <= self.N <= 64, "--N must be in 1..64")
            require(self.m >= 1, f"--m must be positive, got {self.m}")
            try:
                exponent = self.exponent
            except (ValueError, ZeroDivisionError):
                exponent = Fraction(0)
            require(exponent > 0, f"--t must be a positive number, got {self.t}")
            require(1 <= self.r_max <= 500, f"--r-max must be in 1..500, got {self.r_max}")
            require(self.k >= 1, f"--k must be positive, got {self.k}")
        if self.command == "verify":
            require(self.scale in ("quick", "full"), f"--scale must be quick or full, got {self.scale}")

    def echo(self) -> dict:
        return {key: (str(value) if isinstance(value, Path) else value) for key, value in self._asdict().items()}


class RunManifest(NamedTuple):
    """What was run, with which configuration, and how it went."""

    command: str
    config: dict
    version: str
    wall_time: float
    files: Tuple[str, ...]
    results: dict
    criteria: Dict[str, bool]

    @property
    def passed(self) -> bool:
        return all(self.criteria.values())

    def to_dict(self) -> dict:
        payload = self._asdict()
        payload["passed"] = self.passed
        return payload


Outcome = Tuple[List[Path], dict, Dict[str, bool]]


# Per-trial and per-block work items; module level so worker processes can unpickle them.


def _simulate_trial(
    index: int, master_seed: int, n: int, k: int, simple: bool, cycles: int = 0, graph_dir: Optional[Path] = None
) -> tuple:
    model = sample_oriented_graph(n, k, derive_stream(master_seed, index), simple=simple)
    if graph_dir is not None:
        write_edge_list(model, graph_dir / f"graph-{index}.txt")
    spectrum = faces(model)
    seed = trial_seed(master_seed, index)
    cycle_counts = tuple(short_cycle_counts(model, cycles).values()) if cycles else ()
    return (
        index,
        seed,
        spectrum.l,
        spectrum.L,
        spectrum.genus,
        spectrum.components,
        tuple(spectrum.face_lengths),
        cycle_counts,
    )


def _pd_trial(index: int, master_seed: int, n: int, k: int) -> tuple:
    spectrum = faces(sample_oriented_graph(n, k, derive_stream(master_seed, index)))
    return spectrum.l, spectrum.L, spectrum.genus, spectrum.components, tuple(normalized_leaders(spectrum).tolist())


def _mixing_block(block: Tuple[int, int], master_seed: int, n: int, k: int) -> Dict[Partition, int]:
    index, size = block
    return dict(mc_type_counts(n, k, size, derive_stream(master_seed, index)))


def _spectrum_graph(index: int, master_seed: int, n: int, k: int) -> np.ndarray:
    return adjacency_spectrum(sample_oriented_graph(n, k, derive_stream(master_seed, index)))


def simulate_records(config: ExperimentConfig) -> List[tuple]:
    """Per-trial (index, seed, l, L, genus, components, face lengths, cycle counts) records."""
    work = partial(
        _simulate_trial,
        master_seed=config.master_seed,
        n=config.n,
        k=config.k,
        simple=config.simple,
        cycles=config.cycles,
        graph_dir=config.output_dir / "graphs" if config.export_graphs else None,
    )
    return parallel_map(work, range(config.trials), config.workers)


def mc_law_counts(n: int, k: int, trials: int, master_seed: int, workers: int) -> Counter:
    counts: Counter = Counter()
    work = partial(_mixing_block, master_seed=master_seed, n=n, k=k)
    for block_counts in parallel_map(work, _blocks(trials), workers):
        counts.update(block_counts)
    return counts


def face_samples(n: int, k: int, trials: int, master_seed: int, workers: int) -> Tuple[List[tuple], np.ndarray]:
    """Per-trial (l, L, genus, components) records and the (trials, 3) array of leading normalized face lengths."""
    results = parallel_map(partial(_pd_trial, master_seed=master_seed, n=n, k=k), range(trials), workers)
    records = [result[:4] for result in results]
    leaders = np.array([result[4] for result in results]).reshape(-1, RANKED_COORDINATES)
    return records, leaders


def spectra(n: int, k: int, graphs: int, master_seed: int, workers: int) -> List[np.ndarray]:
    return parallel_map(partial(_spectrum_graph, master_seed=master_seed, n=n, k=k), range(graphs), workers)


# Commands


def _run_simulate(config: ExperimentConfig) -> Outcome:
    records = simulate_records(config)
    lengths = range(1, config.cycles + 1)
    header = ("trial", "seed", "n", "k", "l", "L", "genus", "face_lengths") + tuple(f"cycles_{i}" for i in lengths)
    rows = [record[:5] + (record[6],) + record[7] for record in records]
    path = write_records(config.output_dir / f"faces.{config.output_format}", header, rows, config.output_format)
    files = [path]
    if config.export_graphs:
        files.append(config.output_dir / "graphs")
    sample = face_count_sample(config.n, config.k, [record[2:6] for record in records])
    results = {"largest_face_ratio": largest_face_ratio_from_sample(sample)._asdict()}
    if sample.trials >= 2:
        results["face_counts"] = summarize_face_counts(sample)._asdict()
        if config.cycles:
            counts = np.array([record[7] for record in records])
            results["short_cycles"] = {
                str(length): short_cycle_report(counts[:, length - 1], config.k, length)._asdict()
                for length in lengths
            }
    if sample.trials >= MIN_CLT_TRIALS:
        results["clt"] = clt_check(sample, min_trials=MIN_CLT_TRIALS)._asdict()
    return files, results, {}


def _run_mixing(config: ExperimentConfig) -> Outcome:
    n, k = config.N, config.k
    law = exact_convolution_law(n, k)
    report = mixing_report(n, k, law=law)
    law_path = write_law(config.output_dir / f"law-N{n}-k{k}.csv", law)
    results = report.to_dict()
    if config.trials:
        counts = mc_law_counts(n, k, config.trials, config.master_seed, config.workers)
        results["mc_trials"] = config.trials
        results["tv_mc_to_exact"] = float(tv_distance(empirical_law(n, k, counts), law))
    report_path = write_json(config.output_dir / f"mixing-N{n}-k{k}.json", results)
    return [law_path, report_path], results, {"tv_below_bound": report.tv_exact <= report.ds_bound}


def _run_character(config: ExperimentConfig) -> Outcome:
    n = config.N
    if config.codegree_table:
        report = codegree_table_verify(n)
        header = ("lambda", "column", "printed", "corrected", "value", "status")
        rows = [
            (str(e.shape), e.column, e.printed, "" if e.corrected is None else e.corrected, e.value, e.status)
            for e in report.entries
        ]
        path = config.output_dir / f"codegree-table-N{n}.{config.output_format}"
        path = write_records(path, header, rows, config.output_format)
        statuses = Counter(entry.status for entry in report.entries)
        return [path], dict(statuses), {"codegree_table": report.passed}
    rows = [(str(shape), str(mu), chi) for shape, mu, chi in character_table_rows(n)]
    path = write_csv(config.output_dir / f"characters-N{n}.csv", ("lambda", "mu", "chi"), rows)
    return [path], {"rows": len(rows)}, {}


def _run_pd_compare(config: ExperimentConfig) -> Outcome:
    n, k, trials = config.n, config.k, config.trials
    records, leaders = face_samples(n, k, trials, config.master_seed, config.workers)
    # Streams past the trial range feed the reference sample, the bootstrap and the uniform baseline.
    reference = ranked_gem_leaders(config.theta, trials, derive_stream(config.master_seed, trials))
    comparison = pd_distance(leaders, config.theta, derive_stream(config.master_seed, trials + 1), reference=reference)
    sample = face_count_sample(n, k, records)
    rows = [
        (index, trial_seed(config.master_seed, index), n, k, l, L, g)
        for index, (l, L, g, _) in enumerate(records)  # noqa: E741
    ]
    header = ("trial", "seed", "n", "k", "l", "L", "genus")
    samples_path = config.output_dir / f"samples.{config.output_format}"
    samples_path = write_records(samples_path, header, rows, config.output_format)
    results = comparison.to_dict()
    results["largest_face_ratio"] = largest_face_ratio_from_sample(sample)._asdict()
    results["golomb_dickman"] = golomb_dickman_constant()
    results["ks_null_quantile"] = ks_null_quantile(trials, trials)
    results["clt"] = clt_check(sample, min_trials=MIN_CLT_TRIALS)._asdict()
    baseline = uniform_permutation_baseline(k * n, trials, derive_stream(config.master_seed, trials + 2))
    results["uniform_baseline"] = baseline._asdict()
    report_path = write_json(config.output_dir / "pd-compare.json", results)
    return [samples_path, report_path], results, {}


def _run_spectrum(config: ExperimentConfig) -> Outcome:
    n, k = config.n, config.k
    eigenvalues = spectra(n, k, config.graphs, config.master_seed, config.workers)
    second = second_eigenvalue_samples(eigenvalues)
    edge = 2 * sqrt(k - 1)
    rows = [(index, trial_seed(config.master_seed, index), float(value)) for index, value in enumerate(second)]
    lambda2_path = write_csv(config.output_dir / "lambda2.csv", ("graph", "seed", "lambda2"), rows)
    results = {
        "n": n,
        "k": k,
        "graphs": config.graphs,
        "bins": config.bins,
        "l1_distance": spectral_histogram_distance(np.concatenate(eigenvalues), k, config.bins),
        "lambda2_max": float(np.nanmax(second)) if n > 1 else None,
        "near_ramanujan_fraction": float(np.mean(second <= edge + NEAR_RAMANUJAN_SLACK)),
    }
    report_path = write_json(config.output_dir / "spectrum.json", results)
    return [lambda2_path, report_path], results, {}


def _bounds_results(n: int, k: int, m: int, t: Fraction, r_max: int) -> Tuple[dict, Dict[str, bool]]:
    results, criteria = {}, {}
    partition_report = partition_count_bound_check(r_max)
    results["partition_count_bound"] = partition_report._asdict()
    criteria["partition_count_bound"] = partition_report.holds
    if n % k == 0 and n <= 24:
        report = fomin_lulov_check(n, k)
        results["rim_hook_bound"] = report._asdict()
        criteria["rim_hook_bound"] = report.holds
    for name, report in dimension_lower_bounds_check(n).items():
        results[f"lower_bound_{name}"] = report._asdict()
        if name != "factorial-ratio":
            criteria[f"lower_bound_{name}"] = report.holds
    if n <= 60:
        results["restricted_sum"] = restricted_sum(n, m, t)
        results["restricted_sum_split"] = restricted_sum_split(n, m, t)._asdict()
        if 2 * n <= 60 and results["restricted_sum"] > 0:
            ratio = restricted_sum(2 * n, m, t) / results["restricted_sum"]
            results["doubling_ratio"] = ratio
            results["doubling_ratio_over_power"] = float(ratio) * 2 ** float(m * t)
    return results, criteria


def _run_bounds(config: ExperimentConfig) -> Outcome:
    results, criteria = _bounds_results(config.N, config.k, config.m, config.exponent, config.r_max)
    path = write_json(config.output_dir / f"bounds-N{config.N}.json", results)
    return [path], results, criteria


# Acceptance suite


class _Scale(NamedTuple):
    square_sum_max: int
    orthogonality_max: int
    mixing_sizes: Tuple[int, ...]
    mc_trials: int
    face_n: int
    face_trials: int
    ratio_trials: int
    pd_trials: int
    spectrum_n: int
    spectrum_graphs: int
    spectrum_tolerance: float
    lower_bound_max: int
    mean_tolerance: float
    variance_tolerance: float
    ratio_tolerance: float
    ks_tolerance: float


SCALES = {
    "quick": _Scale(
        square_sum_max=20,
        orthogonality_max=7,
        mixing_sizes=(12, 24),
        mc_trials=200_000,
        face_n=256,
        face_trials=2_000,
        ratio_trials=4_000,
        pd_trials=2_000,
        spectrum_n=500,
        spectrum_graphs=20,
        spectrum_tolerance=0.1,
        lower_bound_max=24,
        mean_tolerance=0.25,
        variance_tolerance=0.8,
        ratio_tolerance=0.02,
        ks_tolerance=0.06,
    ),
    "full": _Scale(
        square_sum_max=30,
        orthogonality_max=10,
        mixing_sizes=(12, 24, 36),
        mc_trials=1_000_000,
        face_n=2048,
        face_trials=20_000,
        ratio_trials=100_000,
        pd_trials=10_000,
        spectrum_n=2000,
        spectrum_graphs=50,
        spectrum_tolerance=0.05,
        lower_bound_max=48,
        mean_tolerance=0.05,
        variance_tolerance=0.3,
        ratio_tolerance=0.01,
        ks_tolerance=0.02,
    ),
}


def _check_composition(scale: _Scale, config: ExperimentConfig) -> Tuple[bool, dict]:
    phi = format_cycles(compose(parse_cycles(FOUR_VERTEX_BETA), parse_cycles(FOUR_VERTEX_ALPHA)))
    return phi == FOUR_VERTEX_PHI, {"phi": phi}


def _check_cube(scale: _Scale, config: ExperimentConfig) -> Tuple[bool, dict]:
    standard, flipped = faces(cube_model()), faces(cube_model(flipped_vertex=7))
    details = {
        "standard": {"l": standard.l, "genus": standard.genus},
        "flipped": {"l": flipped.l, "genus": flipped.genus, "faces": str(flipped.face_lengths)},
    }
    observed = (standard.l, standard.genus, flipped.l, flipped.genus, tuple(flipped.face_lengths))
    passed = observed == (6, 0, 4, 1, (12, 4, 4, 4))
    return passed, details


def _check_representations(scale: _Scale, config: ExperimentConfig) -> Tuple[bool, dict]:
    shape = (5, 5, 3, 2)
    hooks = factorial(15) // hook_grid(shape).product
    tableaux = count_standard_tableaux(shape)
    squares = all(
        sum(dimension(s) ** 2 for s in partitions(n)) == factorial(n) for n in range(scale.square_sum_max + 1)
    )
    orthogonal = True
    for n in range(1, scale.orthogonality_max + 1):
        shapes = list(partitions(n))
        table = {(s, mu): mn_character(s, mu) for s in shapes for mu in shapes}
        sizes = {mu: class_size(mu) for mu in shapes}
        for a in shapes:
            for b in shapes:
                total = sum(sizes[mu] * table[a, mu] * table[b, mu] for mu in shapes)
                orthogonal &= total == (factorial(n) if a == b else 0)
    details = {"hook_formula": hooks, "tableaux": tableaux, "square_sum": squares, "orthogonality": orthogonal}
    return hooks == tableaux == 96525 and squares and orthogonal, details


def _check_codegree_table(scale: _Scale, config: ExperimentConfig) -> Tuple[bool, dict]:
    reports = {n: codegree_table_verify(n) for n in (12, 18)}
    details = {n: dict(Counter(entry.status for entry in report.entries)) for n, report in reports.items()}
    return all(report.passed for report in reports.values()), details


def _check_rim_hooks(scale: _Scale, config: ExperimentConfig) -> Tuple[bool, dict]:
    mismatches = [
        (str(shape), k)
        for k in (2, 3, 4, 6)
        for shape in partitions(12)
        if rim_hook_count(shape, k) != abs(mn_character(shape, (k,) * (12 // k)))
    ]
    return not mismatches, {"mismatches": mismatches}


def _check_rim_hook_bound(scale: _Scale, config: ExperimentConfig) -> Tuple[bool, dict]:
    reports = {f"{n},{k}": fomin_lulov_check(n, k) for n, k in ((6, 3), (12, 2), (12, 3), (12, 4), (18, 3))}
    details = {key: report.max_ratio for key, report in reports.items()}
    return all(report.holds for report in reports.values()), details


def _check_mixing(scale: _Scale, config: ExperimentConfig) -> Tuple[bool, dict]:
    exact_matches = exact_convolution_law(6, 3).probabilities == brute_force_law(6, 3).probabilities
    reports = [mixing_report(n, 3) for n in scale.mixing_sizes]
    below = all(report.tv_exact <= report.ds_bound for report in reports)
    decreasing = all(
        later.tv_exact < earlier.tv_exact and later.ds_bound < earlier.ds_bound
        for earlier, later in zip(reports, reports[1:])
    )
    details = {"brute_force_agrees": exact_matches, "reports": [report.to_dict() for report in reports]}
    return exact_matches and below and decreasing, details


def _check_monte_carlo(scale: _Scale, config: ExperimentConfig) -> Tuple[bool, dict]:
    counts = mc_law_counts(12, 3, scale.mc_trials, config.master_seed, config.workers)
    tv = float(tv_distance(empirical_law(12, 3, counts), exact_convolution_law(12, 3)))
    return tv <= 0.01, {"trials": scale.mc_trials, "tv": tv}


def _check_face_counts(scale: _Scale, config: ExperimentConfig) -> Tuple[bool, dict]:
    records, _ = face_samples(scale.face_n, 3, scale.face_trials, config.master_seed, config.workers)
    summary = summarize_face_counts(face_count_sample(scale.face_n, 3, records))
    mean_gap = abs(summary.mean - summary.predicted_mean)
    variance_gap = abs(summary.variance - summary.predicted_variance)
    passed = mean_gap <= scale.mean_tolerance and variance_gap <= scale.variance_tolerance
    return passed, {"summary": summary._asdict(), "mean_gap": mean_gap, "variance_gap": variance_gap}


def _check_largest_face(scale: _Scale, config: ExperimentConfig) -> Tuple[bool, dict]:
    constant = golomb_dickman_constant()
    records, _ = face_samples(scale.face_n, 3, scale.ratio_trials, config.master_seed, config.workers)
    estimate = largest_face_ratio_from_sample(face_count_sample(scale.face_n, 3, records))
    passed = 0.6242 <= constant <= 0.6244 and abs(estimate.mean - GOLOMB_DICKMAN) <= scale.ratio_tolerance
    return passed, {"constant": constant, "estimate": estimate._asdict()}


def _check_poisson_dirichlet(scale: _Scale, config: ExperimentConfig) -> Tuple[bool, dict]:
    trials = scale.pd_trials
    _, leaders = face_samples(scale.face_n, 3, trials, config.master_seed, config.workers)
    reference = ranked_gem_leaders(1.0, trials, derive_stream(config.master_seed, trials))
    rng = derive_stream(config.master_seed, trials + 1)
    faces_vs_pd = pd_distance(leaders, 1.0, rng, reference=reference, min_trials=trials, resamples=50)
    self_test = pd_distance(
        ranked_gem_leaders(1.0, trials, rng), 1.0, rng, reference=reference, min_trials=trials, resamples=50
    )
    threshold = ks_null_quantile(trials, trials)
    passed = faces_vs_pd.ks <= scale.ks_tolerance and self_test.ks < threshold
    return passed, {"ks": faces_vs_pd.ks, "self_test_ks": self_test.ks, "null_quantile": threshold}


def _check_spectrum(scale: _Scale, config: ExperimentConfig) -> Tuple[bool, dict]:
    eigenvalues = spectra(scale.spectrum_n, 3, scale.spectrum_graphs, config.master_seed, config.workers)
    distance = spectral_histogram_distance(np.concatenate(eigenvalues), 3, 40)
    return distance <= scale.spectrum_tolerance, {"l1_distance": distance}


def _restricted_float_sum(n: int, m: int, t: float) -> float:
    total = 0.0
    for shape in partitions(n):
        if max(shape[0], shape.conjugate()[0]) <= n - m:
            total += float(dimension(shape)) ** -t
    return total


def _check_properties(scale: _Scale, config: ExperimentConfig) -> Tuple[bool, dict]:
    partition_bound = partition_count_bound_check(500)
    lower = {n: dimension_lower_bounds_check(n) for n in range(1, scale.lower_bound_max + 1)}
    lower_holds = all(reports["binomial"].holds and reports["exponential"].holds for reports in lower.values())
    factorial_ratio_failures = {n: len(reports["factorial-ratio"].failures) for n, reports in lower.items()}
    exact_sum = float(restricted_sum(12, 4, Fraction(1, 3)))
    dual = abs(exact_sum - _restricted_float_sum(12, 4, 1 / 3)) <= 1e-9 * max(1.0, exact_sum)
    forward, backward = ds_bound_squared(12, 3), ds_bound_squared(12, 3, reverse=True)

    with tempfile.TemporaryDirectory() as directory:
        paths = []
        for workers in (1, 2):
            run_config = ExperimentConfig(
                command="simulate",
                n=64,
                k=3,
                trials=64,
                master_seed=config.master_seed,
                workers=workers,
                output_dir=Path(directory) / f"workers-{workers}",
            )
            paths.append(_run_simulate(run_config)[0][0])
        deterministic = filecmp.cmp(paths[0], paths[1], shallow=False)

    details = {
        "partition_bound_max_ratio": partition_bound.max_ratio,
        "lower_bounds_hold": lower_holds,
        "factorial_ratio_failures": factorial_ratio_failures,
        "restricted_sum_dual_agrees": dual,
        "bound_order_independent": forward == backward,
        "deterministic_across_workers": deterministic,
    }
    passed = partition_bound.holds and lower_holds and dual and forward == backward and deterministic
    return passed, details


ACCEPTANCE_CHECKS = (
    ("composition", _check_composition),
    ("cube", _check_cube),
    ("representations", _check_representations),
    ("codegree_table", _check_codegree_table),
    ("rim_hook_counts", _check_rim_hooks),
    ("rim_hook_bound", _check_rim_hook_bound),
    ("mixing", _check_mixing),
    ("monte_carlo_law", _check_monte_carlo),
    ("face_counts", _check_face_counts),
    ("largest_face", _check_largest_face),
    ("poisson_dirichlet", _check_poisson_dirichlet),
    ("kesten_mckay", _check_spectrum),
    ("properties", _check_properties),
)


def _run_verify(config: ExperimentConfig) -> Outcome:
    scale = SCALES[config.scale]
    results, criteria = {}, {}
    for name, check in ACCEPTANCE_CHECKS:
        start = time.perf_counter()
        passed, details = check(scale, config)
        details["seconds"] = time.perf_counter() - start
        results[name], criteria[name] = details, bool(passed)
        _log.info("%-18s %s (%.1f s)", name, "pass" if passed else "FAIL", details["seconds"])
    path = write_json(config.output_dir / f"verify-{config.scale}.json", results)
    return [path], results, criteria


_HANDLERS: Dict[str, Callable[[ExperimentConfig], Outcome]] = {
    "simulate": _run_simulate,
    "mixing": _run_mixing,
    "character": _run_character,
    "pd-compare": _run_pd_compare,
    "spectrum": _run_spectrum,
    "bounds": _run_bounds,
    "verify": _run_verify,
}


def run(config: ExperimentConfig) -> RunManifest:
    """Validate the configuration, run the command, and write its data files and manifest.

    Raises:
        PreconditionError: if the configuration is invalid; nothing is written
        OSError: if an output file cannot be written
    """
    config.validate()
    _log.info("Running %s with seed %d on %d worker(s)", config.command, config.master_seed, config.workers)
    start = time.perf_counter()
    files, results, criteria = _HANDLERS[config.command](config)
    manifest = RunManifest(
        command=config.command,
        config=config.echo(),
        version=__version__,
        wall_time=time.perf_counter() - start,
        files=tuple(str(path) for path in files),
        results=results,
        criteria=criteria,
    )
    write_json(config.output_dir / f"{config.command}-manifest.json", manifest.to_dict())
    return manifest
