import math
import unittest

import numpy as np

from qlio.errors import (
    BoundsError,
    InvalidExponentError,
    NumericOverflowError,
    ShapeError,
)
from qlio.hypernum import (
    Bounds,
    Quaternion,
    clip_coefficients,
    map_exponents,
    map_to_real,
    map_vector,
    pnorm,
    q_add,
    q_scale,
    q_sub,
    validate_exponent,
)

from .common import random_quaternions


class TestQuaternion(unittest.TestCase):
    def test_components(self):
        q = Quaternion(1, 2, 3, 4)
        self.assertEqual((q.a, q.b, q.c, q.d), (1.0, 2.0, 3.0, 4.0))
        self.assertEqual(list(q), [1.0, 2.0, 3.0, 4.0])
        self.assertEqual(len(q), 4)
        self.assertEqual(repr(q), "Quaternion(1.0, 2.0, 3.0, 4.0)")

    def test_immutable(self):
        q = Quaternion(1, 2, 3, 4)
        with self.assertRaises(ValueError):
            q.coefficients[0] = 5.0

    def test_from_coefficients_copies(self):
        source = np.array([1.0, 2.0, 3.0, 4.0])
        q = Quaternion.from_coefficients(source)
        source[0] = 9.0
        self.assertEqual(q.a, 1.0)

    def test_from_coefficients_shape(self):
        with self.assertRaises(ShapeError):
            Quaternion.from_coefficients([1.0, 2.0, 3.0])

    def test_non_finite(self):
        with self.assertRaises(NumericOverflowError):
            Quaternion(math.inf, 0, 0, 0)
        with self.assertRaises(NumericOverflowError):
            Quaternion.from_coefficients([0, math.nan, 0, 0])

    def test_equality_and_hash(self):
        self.assertEqual(Quaternion(1, 2, 3, 4), Quaternion(1, 2, 3, 4))
        self.assertNotEqual(Quaternion(1, 2, 3, 4), Quaternion(1, 2, 3, 5))
        self.assertEqual(
            len({Quaternion(1, 2, 3, 4), Quaternion(1.0, 2.0, 3.0, 4.0)}), 1
        )

    def test_constructors(self):
        self.assertEqual(Quaternion.zeros(), Quaternion(0, 0, 0, 0))
        self.assertEqual(Quaternion.ones(), Quaternion(1, 1, 1, 1))

        q = Quaternion.random(np.random.default_rng(3))
        self.assertTrue(all(0.0 <= c < 1.0 for c in q))

    def test_operators(self):
        a = Quaternion(1, 2, 3, 4)
        b = Quaternion(1, 1, 1, 1)
        self.assertEqual(a + b, Quaternion(2, 3, 4, 5))
        self.assertEqual(a - b, Quaternion(0, 1, 2, 3))
        self.assertEqual(2 * a, Quaternion(2, 4, 6, 8))

    def test_array_protocol(self):
        arr = np.asarray(Quaternion(1, 2, 3, 4))
        self.assertEqual(arr.tolist(), [1.0, 2.0, 3.0, 4.0])


class TestBounds(unittest.TestCase):
    def test_valid(self):
        b = Bounds(-10, 10)
        self.assertEqual(b.width, 20.0)
        self.assertIn(0.0, b)
        self.assertIn(10.0, b)
        self.assertNotIn(10.5, b)

    def test_invalid(self):
        with self.assertRaises(BoundsError):
            Bounds(1.0, 1.0)
        with self.assertRaises(BoundsError):
            Bounds(2.0, 1.0)
        with self.assertRaises(BoundsError):
            Bounds(-math.inf, 0.0)
        with self.assertRaises(ValueError):
            Bounds(0.0, math.nan)


class TestHypernum_q_add(unittest.TestCase):
    def test_examples(self):
        self.assertEqual(
            q_add(Quaternion(1, 2, 3, 4), Quaternion(0, 0, 0, 0)),
            Quaternion(1, 2, 3, 4),
        )
        self.assertEqual(
            q_add(Quaternion(1, 1, 1, 1), Quaternion(1, 2, 3, 4)),
            Quaternion(2, 3, 4, 5),
        )
        self.assertEqual(
            q_add(
                Quaternion(0.5, -0.5, 0.25, 0),
                Quaternion(-0.5, 0.5, -0.25, 0),
            ),
            Quaternion(0, 0, 0, 0),
        )

    def test_overflow(self):
        big = Quaternion(1e308, 0, 0, 0)
        with self.assertRaises(NumericOverflowError):
            q_add(big, big)

    def test_arrays(self):
        a = np.ones((3, 5, 4))
        b = np.full((3, 5, 4), 2.0)
        result = q_add(a, b)
        self.assertIsInstance(result, np.ndarray)
        self.assertEqual(result.shape, (3, 5, 4))
        self.assertTrue(np.all(result == 3.0))

    def test_mixed_returns_array(self):
        result = q_add(Quaternion(1, 2, 3, 4), np.zeros((2, 4)))
        self.assertIsInstance(result, np.ndarray)
        self.assertEqual(result.shape, (2, 4))

    def test_bad_trailing_axis(self):
        with self.assertRaises(ShapeError):
            q_add(np.zeros((2, 3)), np.zeros((2, 3)))


class TestHypernum_q_sub(unittest.TestCase):
    def test_examples(self):
        q = Quaternion(1, 2, 3, 4)
        self.assertEqual(q_sub(q, q), Quaternion(0, 0, 0, 0))
        self.assertEqual(q_sub(q, Quaternion.zeros()), q)
        self.assertEqual(
            q_sub(Quaternion(2, 3, 4, 5), Quaternion(1, 1, 1, 1)), q
        )

    def test_overflow(self):
        with self.assertRaises(NumericOverflowError):
            q_sub(Quaternion(-1e308, 0, 0, 0), Quaternion(1e308, 0, 0, 0))


class TestHypernum_q_scale(unittest.TestCase):
    def test_examples(self):
        q = Quaternion(1, 2, 3, 4)
        self.assertEqual(q_scale(1, q), q)
        self.assertEqual(q_scale(0, Quaternion(9, 9, 9, 9)), Quaternion.zeros())
        self.assertEqual(q_scale(2, q), Quaternion(2, 4, 6, 8))

    def test_overflow(self):
        with self.assertRaises(NumericOverflowError):
            q_scale(1e300, Quaternion(1e300, 0, 0, 0))
        with self.assertRaises(NumericOverflowError):
            q_scale(math.inf, Quaternion(1, 0, 0, 0))

    def test_per_quaternion_factors(self):
        qs = np.ones((2, 3, 4))
        k = np.arange(6, dtype=np.float64).reshape(2, 3)
        result = q_scale(k, qs)
        self.assertEqual(result.shape, (2, 3, 4))
        for i in range(2):
            for j in range(3):
                self.assertTrue(np.all(result[i, j] == k[i, j]))

    def test_factor_shape_mismatch(self):
        with self.assertRaises(ShapeError):
            q_scale(np.ones(3), np.ones((2, 3, 4)))


class TestHypernum_pnorm(unittest.TestCase):
    def test_examples(self):
        self.assertEqual(pnorm(Quaternion(1, 1, 1, 1), 2), 2.0)
        self.assertEqual(pnorm(Quaternion(1, 1, 1, 1), 1), 4.0)
        self.assertEqual(pnorm(Quaternion(3, 4, 0, 0), 2), 5.0)
        for p in (1, 1.5, 2, 3, 4.5, 5):
            self.assertEqual(pnorm(Quaternion.zeros(), p), 0.0)

    def test_negative_coefficients(self):
        self.assertEqual(pnorm(Quaternion(-3, 4, 0, 0), 2), 5.0)
        self.assertEqual(pnorm(Quaternion(-1, -1, 1, 1), 1), 4.0)

    def test_invalid_exponent(self):
        for p in (0.999, 0, -1, math.nan, math.inf, "x"):
            with self.assertRaises(InvalidExponentError):
                pnorm(Quaternion(1, 1, 1, 1), p)

    def test_naive_reference(self):
        generator = np.random.default_rng(11)
        qs = random_quaternions(generator, 10000, -5.0, 5.0)

        euclid = pnorm(qs, 2)
        taxicab = pnorm(qs, 1)
        naive_euclid = np.array([math.sqrt(sum(c * c for c in q)) for q in qs])
        naive_taxicab = np.array([sum(abs(c) for c in q) for q in qs])

        np.testing.assert_allclose(euclid, naive_euclid, rtol=1e-12)
        np.testing.assert_allclose(taxicab, naive_taxicab, rtol=1e-12)

    def test_integer_fast_path_matches_power(self):
        generator = np.random.default_rng(5)
        qs = random_quaternions(generator, 1000)
        for p in (3, 4, 5):
            expected = np.sum(np.abs(qs) ** p, axis=-1) ** (1.0 / p)
            np.testing.assert_allclose(pnorm(qs, p), expected, rtol=1e-13)

    def test_monotone_in_p(self):
        generator = np.random.default_rng(2)
        qs = random_quaternions(generator, 500)
        previous = pnorm(qs, 1.0)
        for p in np.linspace(1.1, 5.0, 40):
            current = pnorm(qs, p)
            self.assertTrue(np.all(current <= previous + 1e-12))
            previous = current


class TestHypernum_clip_coefficients(unittest.TestCase):
    def test_examples(self):
        q = Quaternion(0.5, 0.2, 0.9, 0.1)
        self.assertEqual(clip_coefficients(q), q)
        self.assertEqual(
            clip_coefficients(Quaternion(-1, 2, 0.5, 1.5)),
            Quaternion(0, 1, 0.5, 1),
        )

    def test_idempotent(self):
        generator = np.random.default_rng(1)
        qs = random_quaternions(generator, 1000, -3.0, 3.0)
        once = clip_coefficients(qs)
        self.assertTrue(np.all((once >= 0.0) & (once <= 1.0)))
        np.testing.assert_array_equal(clip_coefficients(once), once)


class TestHypernum_map_to_real(unittest.TestCase):
    def test_examples(self):
        self.assertEqual(
            map_to_real(Quaternion(1, 1, 1, 1), Bounds(-10, 10), 2), 10.0
        )
        for p in (1, 2, 3.3, 5):
            self.assertEqual(
                map_to_real(Quaternion.zeros(), Bounds(-10, 10), p), -10.0
            )
        self.assertEqual(
            map_to_real(Quaternion(1, 0, 0, 0), Bounds(0, 1), 2), 0.5
        )
        self.assertEqual(
            map_to_real(Quaternion(1, 0, 0, 0), Bounds(0, 1), 1), 0.25
        )

    def test_saturated_maps_to_upper_for_every_p(self):
        for p in np.linspace(1.0, 5.0, 81):
            self.assertEqual(
                map_to_real(Quaternion.ones(), Bounds(-35, 35), p), 35.0
            )

    def test_clips_unclipped_input(self):
        self.assertEqual(
            map_to_real(Quaternion(5, 5, 5, 5), Bounds(-1, 4), 2), 4.0
        )
        self.assertEqual(
            map_to_real(Quaternion(-5, -5, 0, 0), Bounds(-1, 4), 2), -1.0
        )

    def test_errors(self):
        with self.assertRaises(InvalidExponentError):
            map_to_real(Quaternion.ones(), Bounds(0, 1), 0.5)
        with self.assertRaises(BoundsError):
            map_to_real(Quaternion.ones(), (0, 1), 2)

    def test_boundedness(self):
        generator = np.random.default_rng(2024)
        qs = random_quaternions(generator, 10000)
        lows = generator.uniform(-100.0, 100.0, 10000)
        widths = generator.uniform(1e-3, 200.0, 10000)
        ps = generator.uniform(1.0, 5.0, 10000)

        for q, low, width, p in zip(qs, lows, widths, ps):
            b = Bounds(low, low + width)
            x = map_to_real(q, b, p)
            self.assertTrue(b.lower <= x <= b.upper)

    def test_continuous_in_p(self):
        generator = np.random.default_rng(8)
        b = Bounds(-5.12, 5.12)
        ps = np.arange(1.0, 5.0, 1e-3)
        for q in random_quaternions(generator, 20):
            values = np.array([map_to_real(q, b, p) for p in ps])
            self.assertLess(np.max(np.abs(np.diff(values))), b.width * 1e-2)


class TestHypernum_map_vector(unittest.TestCase):
    def test_single_variable(self):
        q = Quaternion(0.3, 0.6, 0.1, 0.9)
        b = Bounds(-2, 7)
        result = map_vector([q], [b], 3.0)
        self.assertEqual(result.shape, (1,))
        self.assertEqual(result[0], map_to_real(q, b, 3.0))

    def test_saturated_and_zero(self):
        bounds = [Bounds(-1, 4), Bounds(-10, 10), Bounds(0, 1)]
        np.testing.assert_array_equal(
            map_vector([Quaternion.ones()] * 3, bounds, 2), [4.0, 10.0, 1.0]
        )
        np.testing.assert_array_equal(
            map_vector(np.zeros((3, 4)), bounds, 4.5), [-1.0, -10.0, 0.0]
        )

    def test_stacked(self):
        generator = np.random.default_rng(4)
        qs = generator.random((6, 3, 4))
        bounds = [Bounds(-1, 1)] * 3
        result = map_vector(qs, bounds, 2.5)
        self.assertEqual(result.shape, (6, 3))
        for i in range(6):
            np.testing.assert_array_equal(
                result[i], map_vector(qs[i], bounds, 2.5)
            )

    def test_length_mismatch(self):
        with self.assertRaises(ShapeError):
            map_vector([Quaternion.ones()] * 2, [Bounds(0, 1)] * 3, 2)


class TestHypernum_map_exponents(unittest.TestCase):
    def test_rows_match_map_vector(self):
        generator = np.random.default_rng(13)
        qs = generator.uniform(-0.2, 1.2, (7, 4))
        bounds = [Bounds(-1, 4)] * 3 + [Bounds(-5.12, 5.12)] * 4
        ps = np.array([1.0, 1.25, 2.0, 2.5, 3.0, 4.75, 5.0])

        result = map_exponents(qs, bounds, ps)

        self.assertEqual(result.shape, (7, 7))
        for row, p in zip(result, ps):
            np.testing.assert_allclose(
                row, map_vector(qs, bounds, p), rtol=1e-13, atol=1e-13
            )

    def test_saturated_and_zero(self):
        bounds = [Bounds(-1, 4), Bounds(0, 1)]
        ps = np.array([1.0, 2.0, 3.5])
        np.testing.assert_array_equal(
            map_exponents(np.ones((2, 4)), bounds, ps), [[4.0, 1.0]] * 3
        )
        np.testing.assert_array_equal(
            map_exponents(np.zeros((2, 4)), bounds, ps), [[-1.0, 0.0]] * 3
        )

    def test_quaternion_sequence(self):
        qs = [Quaternion(0.3, 0.6, 0.1, 0.9), Quaternion.zeros()]
        bounds = [Bounds(-2, 7), Bounds(0, 1)]
        result = map_exponents(qs, bounds, [2.0])
        np.testing.assert_allclose(
            result[0], map_vector(qs, bounds, 2.0), rtol=1e-15
        )

    def test_errors(self):
        bounds = [Bounds(0, 1)] * 2
        with self.assertRaises(InvalidExponentError):
            map_exponents(np.zeros((2, 4)), bounds, [2.0, 0.5])
        with self.assertRaises(InvalidExponentError):
            map_exponents(np.zeros((2, 4)), bounds, [math.nan])
        with self.assertRaises(ShapeError):
            map_exponents(np.zeros((2, 4)), bounds, [[2.0]])
        with self.assertRaises(ShapeError):
            map_exponents(np.zeros((3, 4)), bounds, [2.0])
        with self.assertRaises(ShapeError):
            map_exponents(np.zeros((5, 2, 4)), bounds, [2.0])
        with self.assertRaises(ShapeError):
            map_vector(np.ones((3, 3)), [Bounds(0, 1)] * 3, 2)
        with self.assertRaises(ShapeError):
            map_vector(np.ones(4), [Bounds(0, 1)], 2)


class TestHypernum_validate_exponent(unittest.TestCase):
    def test_range(self):
        self.assertEqual(validate_exponent(1), 1.0)
        self.assertEqual(validate_exponent(5, 5.0), 5.0)
        with self.assertRaises(InvalidExponentError):
            validate_exponent(5.01, 5.0)
        with self.assertRaises(ValueError):
            validate_exponent(0.5)
