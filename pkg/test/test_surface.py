#!/usr/bin/env python3
"""Test the surface module."""

import tempfile
import unittest
from collections import Counter
from fractions import Fraction
from itertools import product
from math import pi, sqrt
from pathlib import Path

import numpy as np
from hypothesis import given, settings, strategies as st
from scipy import stats
from scipy.integrate import quad

from belyilab.export import write_edge_list
from belyilab.mixing import brute_force_law
from belyilab.perm import Partition, Permutation, compose, cycle_type, orbit_lengths_batch, sample_uniform_class_batch
from belyilab.surface import (
    FaceSpectrum,
    OrientedGraphModel,
    adjacency_spectrum,
    component_count,
    configuration_count,
    configuration_count_fixed_edges,
    cube_model,
    faces,
    genus,
    is_simple,
    kesten_mckay_bin_masses,
    kesten_mckay_density,
    model_from_cycles,
    multigraph_edges,
    sample_oriented_graph,
    second_eigenvalue_samples,
    short_cycle_counts,
    short_cycle_mean_check,
    spectral_histogram_distance,
    validate_model,
)
from belyilab.validation import InvariantViolationError, PreconditionError

DATA = Path(__file__).parent / "data"

K4_BETA = "(1,2,3)(4,5,6)(7,8,9)(10,11,12)"
K4_ALPHA = "(1,4)(2,7)(3,10)(5,8)(6,11)(9,12)"


def _load_model(name: str, k: int = 3) -> OrientedGraphModel:
    lines = [line for line in (DATA / name).read_text().splitlines() if line and not line.startswith("#")]
    return model_from_cycles(lines[0], lines[1], k)


def _matchings(points):
    """Every perfect matching of the points as a list of pairs."""
    if not points:
        yield []
        return
    first, rest = points[0], points[1:]
    for index, partner in enumerate(rest):
        for matching in _matchings(rest[:index] + rest[index + 1 :]):
            yield [(first, partner)] + matching


def _matching_key(alpha: np.ndarray) -> tuple:
    return tuple(alpha.tolist())


class TestCubeFixtures(unittest.TestCase):
    """Test faces and genus on the cube fixtures."""

    def test_standard_orientation(self) -> None:
        """Test the cube with its standard orientation.

        GIVEN the shipped standard cube fixture,
        WHEN computing its faces,
        THEN there should be 6 faces of length 4 and the genus should be 0.
        """
        # Setup environment.
        model = _load_model("cube_standard.txt")

        # Run.
        spectrum = faces(model)

        # Assert.
        self.assertEqual(spectrum.face_lengths, (4,) * 6)
        self.assertEqual((spectrum.l, spectrum.L, spectrum.genus), (6, 4, 0))
        self.assertEqual(faces(cube_model()).face_lengths, (4,) * 6)

    def test_flipped_orientation(self) -> None:
        """Test the cube with one vertex order reversed.

        GIVEN the shipped fixture with the order at the last vertex reversed,
            AND the generated cube with one vertex flipped,
        WHEN computing their faces,
        THEN both should have face lengths (12, 4, 4, 4) and genus 1.
        """
        for model in [_load_model("cube_flipped.txt"), cube_model(flipped_vertex=7)]:
            with self.subTest():
                # Run.
                spectrum = faces(model)

                # Assert.
                self.assertEqual(spectrum.face_lengths, (12, 4, 4, 4))
                self.assertEqual((spectrum.l, spectrum.genus), (4, 1))

    def test_cube_graph_structure(self) -> None:
        """Test the graph level views of the cube.

        GIVEN the cube model,
        WHEN computing cycle counts and the spectrum,
        THEN there should be no loops, digons or triangles and exactly 6 squares,
            AND the spectrum should be 3, 1, 1, 1, -1, -1, -1, -3.
        """
        # Setup environment.
        model = cube_model()

        # Run.
        counts = short_cycle_counts(model, 4)
        spectrum = adjacency_spectrum(model)

        # Assert.
        self.assertEqual(counts, {1: 0, 2: 0, 3: 0, 4: 6})
        np.testing.assert_allclose(spectrum, [3, 1, 1, 1, -1, -1, -1, -3], atol=1e-9)
        self.assertTrue(is_simple(model))
        self.assertEqual(component_count(model), 1)


class TestModelValidation(unittest.TestCase):
    """Test model construction and its invariants."""

    def test_rejects_broken_models(self) -> None:
        """Test validate_model on broken permutations.

        GIVEN a beta whose cycle leaves its vertex block and an alpha with a fixed point,
        WHEN building models from them,
        THEN PreconditionError should be raised.
        """
        cases = [
            ("(1,2,4)(3,5,6)", "(1,2)(3,4)(5,6)"),
            ("(1,2,3)(4,5,6)", "(1,2)(3,4)"),
        ]
        for beta, alpha in cases:
            with self.subTest(beta=beta, alpha=alpha):
                with self.assertRaises(PreconditionError):
                    model_from_cycles(beta, alpha, 3)

    def test_sampler_preconditions(self) -> None:
        """Test the sampler preconditions.

        GIVEN an odd k * n, a degree below 3 and a simple graph request on too few vertices,
        WHEN sampling,
        THEN PreconditionError should be raised.
        """
        rng = np.random.default_rng(0)
        for n, k, simple in [(3, 3, False), (4, 2, False), (2, 3, True)]:
            with self.subTest(n=n, k=k, simple=simple):
                with self.assertRaises(PreconditionError):
                    sample_oriented_graph(n, k, rng, simple=simple)

    def test_simple_sampler(self) -> None:
        """Test the rejection sampler for simple graphs.

        GIVEN a seeded generator,
        WHEN sampling 20 simple cubic graphs on 10 vertices,
        THEN each should be a valid model without loops or parallel edges.
        """
        rng = np.random.default_rng(8)
        for _ in range(20):
            model = sample_oriented_graph(10, 3, rng, simple=True)
            validate_model(model)
            self.assertTrue(is_simple(model))

    @settings(max_examples=30, deadline=None)
    @given(
        st.sampled_from([(3, 2), (3, 10), (3, 64), (4, 5), (5, 8)]),
        st.integers(min_value=0, max_value=2**32),
    )
    def test_sampled_model_invariants(self, shape, seed) -> None:
        """Property: sampled models are valid, faces cover every half-edge and the genus is a nonnegative integer."""
        k, n = shape
        model = sample_oriented_graph(n, k, np.random.default_rng(seed))
        validate_model(model)
        spectrum = faces(model)
        self.assertEqual(spectrum.face_lengths.size, k * n)
        self.assertGreaterEqual(spectrum.genus, 0)


class TestSamplerLaw(unittest.TestCase):
    """Test the law of the sampler on two vertices."""

    def test_orientations_are_uniform(self) -> None:
        """Test the orientation part of the sampler.

        GIVEN 10000 samples with k=3 and n=2,
        WHEN counting the distinct beta permutations,
        THEN there should be exactly 4 of them, each with frequency 1/4 within 0.02.
        """
        # Setup environment.
        rng = np.random.default_rng(21)

        # Run.
        counts = Counter(tuple(sample_oriented_graph(2, 3, rng).beta.images.tolist()) for _ in range(10000))

        # Assert.
        self.assertEqual(len(counts), 4)
        for count in counts.values():
            self.assertLess(abs(count / 10000 - 0.25), 0.02)

    def test_matchings_are_uniform(self) -> None:
        """Test the matching part of the sampler.

        GIVEN 15000 samples with k=3 and n=2,
        WHEN counting the distinct alpha permutations,
        THEN all 15 matchings of 6 points should appear,
            AND a chi-square test against the uniform law should not reject at level 1e-4.
        """
        # Setup environment.
        rng = np.random.default_rng(34)

        # Run.
        counts = Counter(_matching_key(sample_oriented_graph(2, 3, rng).alpha.images) for _ in range(15000))

        # Assert.
        self.assertEqual(len(counts), 15)
        self.assertGreater(stats.chisquare(list(counts.values())).pvalue, 1e-4)

    def test_face_law_matches_free_class_sampler(self) -> None:
        """Test that vertex grouped orientations give the same face law as a uniform element of the class 3^2.

        GIVEN every block aligned beta of type 3^2 and every matching of 6 points,
        WHEN counting the cycle types of beta * alpha,
        THEN the law should equal the law over the whole class 3^2 computed by enumeration.
        """
        # Setup environment.
        betas = []
        for first, second in product([(1, 2), (2, 1)], repeat=2):
            images = np.empty(6, dtype=np.int64)
            for block, (a, b) in enumerate([first, second]):
                base = 3 * block
                images[base], images[base + a], images[base + b] = base + a, base + b, base
            betas.append(Permutation(images))
        alphas = []
        for matching in _matchings(list(range(6))):
            images = np.empty(6, dtype=np.int64)
            for a, b in matching:
                images[a], images[b] = b, a
            alphas.append(Permutation(images))

        # Run.
        counts = Counter(cycle_type(compose(beta, alpha)) for beta in betas for alpha in alphas)
        law = {mu: Fraction(count, len(betas) * len(alphas)) for mu, count in counts.items()}

        # Assert.
        self.assertEqual(len(betas), 4)
        self.assertEqual(len(alphas), 15)
        self.assertEqual(law, brute_force_law(6, 3).probabilities)

    def test_face_counts_match_free_class_sampler(self) -> None:
        """Test vertex grouped orientations against free class sampling on 100 vertices.

        GIVEN 2000 sampled cubic models on 100 vertices,
            AND 2000 products of a uniform element of the class 3^100 with a uniform matching of 300 points,
        WHEN comparing the two face count samples,
        THEN the two sample KS test should not reject at the 0.1% level.
        """
        # Setup environment.
        rng = np.random.default_rng(21)

        # Run.
        grouped = [faces(sample_oriented_graph(100, 3, rng)).l for _ in range(2000)]
        betas = sample_uniform_class_batch(300, 3, 2000, rng)
        alphas = sample_uniform_class_batch(300, 2, 2000, rng)
        free = orbit_lengths_batch(np.take_along_axis(betas, alphas, axis=1))[:, 1:].sum(axis=1)

        # Assert.
        self.assertGreater(stats.ks_2samp(grouped, free).pvalue, 1e-3)


class TestCounts(unittest.TestCase):
    """Test genus and matching counts."""

    def test_genus(self) -> None:
        """Test the genus formula.

        GIVEN vertex and face counts,
        WHEN calling genus,
        THEN the cube values should be 0 and 1,
            AND non-integral or negative values should raise InvariantViolationError.
        """
        # Assert.
        self.assertEqual(genus(8, 6), 0)
        self.assertEqual(genus(8, 4), 1)
        self.assertEqual(genus(4, 2, k=4), 2)
        self.assertEqual(genus(8, 8, components=2), 0)
        for n, l in [(4, 1), (2, 5)]:
            with self.subTest(n=n, l=l):
                with self.assertRaises(InvariantViolationError):
                    genus(n, l)

    def test_configuration_counts(self) -> None:
        """Test the matching counts against enumeration.

        GIVEN small numbers of pairs,
        WHEN counting matchings with and without fixed pairs,
        THEN the counts should match enumeration of all matchings.
        """
        # Setup environment.
        matchings_12 = list(_matchings(list(range(12))))
        matchings_8 = list(_matchings(list(range(8))))
        fixed = {(0, 1), (2, 3)}

        # Assert.
        self.assertEqual([configuration_count(m) for m in (0, 1, 2)], [1, 1, 3])
        self.assertEqual(configuration_count(6), len(matchings_12))
        self.assertEqual(configuration_count(6), 10395)
        self.assertEqual(configuration_count_fixed_edges(5, 0), configuration_count(5))
        self.assertEqual(configuration_count_fixed_edges(2, 1), 1)
        self.assertEqual(configuration_count_fixed_edges(4, 2), sum(fixed <= set(m) for m in matchings_8))
        with self.assertRaises(PreconditionError):
            configuration_count_fixed_edges(2, 3)


class TestSpectrum(unittest.TestCase):
    """Test spectra and the limiting spectral density."""

    def test_complete_graph(self) -> None:
        """Test the spectrum of K4.

        GIVEN K4 as a cubic model,
        WHEN computing its spectrum,
        THEN it should be 3, -1, -1, -1.
        """
        model = model_from_cycles(K4_BETA, K4_ALPHA, 3)
        np.testing.assert_allclose(adjacency_spectrum(model), [3, -1, -1, -1], atol=1e-9)

    def test_top_eigenvalue_of_connected_graphs(self) -> None:
        """Test the trivial eigenvalue.

        GIVEN 200 sampled cubic graphs on 128 vertices,
        WHEN computing spectra,
        THEN the top eigenvalue should be 3 for every connected sample,
            AND the second eigenvalue should stay below 3.
        """
        rng = np.random.default_rng(13)
        for _ in range(200):
            model = sample_oriented_graph(128, 3, rng)
            spectrum = adjacency_spectrum(model)
            if component_count(model) == 1:
                self.assertAlmostEqual(spectrum[0], 3.0, places=9)
                self.assertLess(spectrum[1], 3.0 - 1e-9)

    def test_density(self) -> None:
        """Test the limiting density.

        GIVEN degrees 3, 4 and 5,
        WHEN evaluating and integrating the density,
        THEN it should vanish at and beyond the support edge, match sqrt(2)/(3 pi) at 0 for k=3,
            AND integrate to 1 within 1e-8.
        """
        edge = 2 * sqrt(2)
        self.assertEqual(kesten_mckay_density(3, edge), 0.0)
        self.assertEqual(kesten_mckay_density(3, -edge - 1), 0.0)
        self.assertAlmostEqual(kesten_mckay_density(3, 0.0), sqrt(2) / (3 * pi), places=12)
        for k in (3, 4, 5):
            with self.subTest(k=k):
                support = 2 * sqrt(k - 1)
                total, _ = quad(lambda t: kesten_mckay_density(k, t), -support, support, epsabs=1e-12)
                self.assertAlmostEqual(total, 1.0, delta=1e-8)
                self.assertAlmostEqual(kesten_mckay_bin_masses(k, 40).sum(), 1.0, delta=1e-7)

    def test_histogram_distance(self) -> None:
        """Test the histogram distance on sampled spectra.

        GIVEN 10 sampled cubic graphs on 400 vertices,
        WHEN computing the L1 distance of their pooled spectrum to the limiting density,
        THEN it should be below 0.15,
            AND the second eigenvalues should lie below 3.
        """
        rng = np.random.default_rng(2)
        spectra = [adjacency_spectrum(sample_oriented_graph(400, 3, rng)) for _ in range(10)]
        self.assertLess(spectral_histogram_distance(np.concatenate(spectra), 3), 0.15)
        self.assertTrue(np.all(second_eigenvalue_samples(spectra) < 3.0))
        self.assertTrue(np.isnan(second_eigenvalue_samples([np.array([3.0])])[0]))


class TestShortCycles(unittest.TestCase):
    """Test cycle counting in multigraphs."""

    def test_loops_and_parallel_edges(self) -> None:
        """Test the counting convention for loops and multi-edges.

        GIVEN a two vertex cubic multigraph with a loop at each vertex and one edge between them,
            AND a two vertex cubic multigraph with three parallel edges,
        WHEN counting short cycles,
        THEN the first should have two 1-cycles and nothing else,
            AND the second should have three 2-cycles and nothing else.
        """
        # Setup environment.
        loops = model_from_cycles("(1,2,3)(4,5,6)", "(1,2)(3,4)(5,6)", 3)
        theta = model_from_cycles("(1,2,3)(4,5,6)", "(1,4)(2,5)(3,6)", 3)

        # Run and assert.
        self.assertEqual(short_cycle_counts(loops, 3), {1: 2, 2: 0, 3: 0})
        self.assertEqual(short_cycle_counts(theta, 3), {1: 0, 2: 3, 3: 0})
        with self.assertRaises(PreconditionError):
            short_cycle_counts(theta, 13)

    def test_multigraph_edges(self) -> None:
        """Test that loops and parallel edges are kept as separate rows."""
        loops = model_from_cycles("(1,2,3)(4,5,6)", "(1,2)(3,4)(5,6)", 3)
        theta = model_from_cycles("(1,2,3)(4,5,6)", "(1,4)(2,5)(3,6)", 3)
        self.assertEqual(multigraph_edges(loops).tolist(), [[0, 0], [0, 1], [1, 1]])
        self.assertEqual(multigraph_edges(theta).tolist(), [[0, 1], [0, 1], [0, 1]])
        self.assertFalse(is_simple(loops))
        self.assertFalse(is_simple(theta))

    def test_mean_triangle_count(self) -> None:
        """Test the mean triangle count.

        GIVEN 1000 sampled cubic graphs on 100 vertices,
        WHEN comparing the mean triangle count with both candidate means,
        THEN the classical mean 4/3 should be the closer one.
        """
        report = short_cycle_mean_check(100, 3, 3, 1000, np.random.default_rng(17))
        self.assertAlmostEqual(report.classical_mean, 4 / 3)
        self.assertAlmostEqual(report.printed_mean, 1.0)
        self.assertEqual(report.closer, "classical")


class TestEdgeListExport(unittest.TestCase):
    """Test the edge list writer."""

    def test_write_edge_list(self) -> None:
        """Test write_edge_list on K4.

        GIVEN K4 as a cubic model,
        WHEN writing its edge list,
        THEN the header should record n and k,
            AND each of the 6 rows should hold 1-based vertices and half-edges.
        """
        model = model_from_cycles(K4_BETA, K4_ALPHA, 3)
        with tempfile.TemporaryDirectory() as directory:
            lines = write_edge_list(model, Path(directory) / "k4.txt").read_text().splitlines()
        self.assertEqual(lines[0], "# n=4 k=3")
        self.assertEqual(lines[1:], ["1 2 1 4", "1 3 2 7", "1 4 3 10", "2 3 5 8", "2 4 6 11", "3 4 9 12"])


class TestFaceSpectrum(unittest.TestCase):
    """Test the FaceSpectrum derived fields."""

    def test_derived_fields(self) -> None:
        """Test l, L and genus.

        GIVEN a face spectrum of a cubic graph on 8 vertices,
        WHEN reading its derived fields,
        THEN they should follow from the face lengths.
        """
        spectrum = FaceSpectrum(n=8, k=3, face_lengths=Partition((12, 4, 4, 4)))
        self.assertEqual((spectrum.l, spectrum.L, spectrum.genus), (4, 12, 1))


if __name__ == "__main__":
    unittest.main()
