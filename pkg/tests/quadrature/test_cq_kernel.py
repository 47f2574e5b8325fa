# Copyright The fracstep Authors. All Rights Reserved.
# SPDX-License-Identifier: Apache-2.0
import math
from fractions import Fraction

import numpy as np
import pytest
from scipy import special

from fracstep.exceptions import RangeError
from fracstep.quadrature import (
    bdf_delta_coeffs,
    correction_coeffs,
    cq_weights,
    cq_weights_fft,
)


class TestBdfDeltaCoeffs:
    """Tests for bdf_delta_coeffs"""

    @pytest.mark.parametrize(
        "k,expected",
        [
            (1, [1.0, -1.0]),
            (2, [1.5, -2.0, 0.5]),
            (3, [11 / 6, -3.0, 1.5, -1 / 3]),
        ],
    )
    def test_expansion(self, k, expected):
        """Test the expansion of sum (1/i)(1 - xi)^i for small k"""
        delta = bdf_delta_coeffs(k)
        assert delta.k == k
        np.testing.assert_allclose(delta.coeffs, expected, rtol=0, atol=1e-15)

    def test_exact_rationals(self):
        """Test that the rational coefficients are kept alongside the floats"""
        assert bdf_delta_coeffs(3).exact == (
            Fraction(11, 6),
            Fraction(-3),
            Fraction(3, 2),
            Fraction(-1, 3),
        )

    @pytest.mark.parametrize("k", range(1, 7))
    def test_vanishes_at_one(self, k):
        """Test that delta(1) = 0 and delta'(1) = -1 for every order"""
        exact = bdf_delta_coeffs(k).exact
        assert sum(exact) == 0
        assert sum(j * c for j, c in enumerate(exact)) == -1

    def test_polynomial_evaluation(self):
        """Test that the BdfDelta callable evaluates the polynomial"""
        delta = bdf_delta_coeffs(2)
        xi = np.array([0.0, 0.5, 1.0])
        np.testing.assert_allclose(delta(xi), (1 - xi) + 0.5 * (1 - xi) ** 2)

    @pytest.mark.parametrize("k", [0, 7, -1, 2.5, True])
    def test_out_of_range(self, k):
        """Test that unsupported orders are rejected"""
        with pytest.raises(RangeError):
            bdf_delta_coeffs(k)


class TestCqWeights:
    """Tests for cq_weights"""

    def test_backward_euler_half(self):
        """Test the k=1, alpha=0.5 weights against the binomial series"""
        weights = cq_weights(1, 0.5, 2)
        np.testing.assert_allclose(weights.weights, [1.0, -0.5, -0.125], rtol=0, atol=1e-15)

    def test_alpha_one_reproduces_delta(self):
        """Test that alpha=1 gives the generating polynomial padded with zeros"""
        weights = cq_weights(2, 1.0, 4)
        np.testing.assert_allclose(weights.weights, [1.5, -2.0, 0.5, 0.0, 0.0], rtol=0, atol=1e-14)

    def test_single_weight(self):
        """Test omega_0 = c_0^alpha"""
        weights = cq_weights(2, 0.5, 0)
        assert len(weights) == 1
        assert weights.n_max == 0
        assert weights[0] == pytest.approx(math.sqrt(1.5), abs=1e-15)

    @pytest.mark.parametrize("alpha", [0.3, 0.5, 0.7])
    def test_binomial_oracle(self, alpha):
        """Test the k=1 weights (-1)^j binom(alpha, j) up to j = 200"""
        j = np.arange(201)
        expected = (-1.0) ** j * special.binom(alpha, j)
        np.testing.assert_allclose(cq_weights(1, alpha, 200).weights, expected, rtol=0, atol=1e-12)

    @pytest.mark.parametrize("k", range(1, 7))
    def test_semigroup(self, k):
        """Test that the weights of alpha and beta convolve to the weights of alpha + beta"""
        n = 300
        a = cq_weights(k, 0.3, n).weights
        b = cq_weights(k, 0.5, n).weights
        ab = cq_weights(k, 0.8, n).weights
        np.testing.assert_allclose(np.convolve(a, b)[: n + 1], ab, rtol=0, atol=1e-10)

    @pytest.mark.parametrize("k,alpha", [(1, 0.5), (3, 0.3), (6, 0.7)])
    def test_partial_sums_decay(self, k, alpha):
        """Test that n^alpha times the partial sums stays bounded up to n = 1e4"""
        weights = cq_weights(k, alpha, 10_000)
        sums = weights.partial_sums()
        n = np.arange(1, len(sums))
        scaled = np.abs(sums[1:]) * n**alpha
        assert np.max(scaled) < 20.0
        # the bound is attained early, not drifting upwards
        assert np.max(scaled[5000:]) <= 1.01 * np.max(scaled[1000:5000]) + 1e-12

    def test_read_only(self):
        """Test that the weight array cannot be modified"""
        weights = cq_weights(2, 0.5, 3)
        with pytest.raises(ValueError):
            weights.weights[0] = 0.0

    @pytest.mark.parametrize(
        "k,alpha,n_max",
        [(2, 0.0, 3), (2, 1.5, 3), (2, -0.5, 3), (2, 0.5, -1), (0, 0.5, 3)],
    )
    def test_invalid_arguments(self, k, alpha, n_max):
        """Test that out-of-range arguments are rejected"""
        with pytest.raises(RangeError):
            cq_weights(k, alpha, n_max)


class TestCqWeightsFft:
    """Tests for cq_weights_fft"""

    def test_trivial_case(self):
        """Test k=1, alpha=1 against 1 - xi"""
        weights = cq_weights_fft(1, 1.0, 3)
        np.testing.assert_allclose(weights.weights, [1.0, -1.0, 0.0, 0.0], rtol=0, atol=1e-12)

    @pytest.mark.parametrize("k", range(1, 7))
    @pytest.mark.parametrize("alpha", [0.3, 0.5, 0.7])
    def test_matches_recurrence(self, k, alpha):
        """Test that the FFT route agrees with the recurrence up to n = 512"""
        fft = cq_weights_fft(k, alpha, 512).weights
        recurrence = cq_weights(k, alpha, 512).weights
        np.testing.assert_allclose(fft, recurrence, rtol=0, atol=1e-11)

    def test_same_validation(self):
        """Test that the FFT route validates like the recurrence"""
        with pytest.raises(RangeError):
            cq_weights_fft(3, 1.2, 10)


class TestCorrectionCoeffs:
    """Tests for correction_coeffs"""

    @pytest.mark.parametrize(
        "k,expected",
        [
            (1, ()),
            (2, (Fraction(1, 2),)),
            (3, (Fraction(11, 12), Fraction(-5, 12))),
            (4, (Fraction(31, 24), Fraction(-7, 6), Fraction(3, 8))),
            (
                5,
                (
                    Fraction(1181, 720),
                    Fraction(-177, 80),
                    Fraction(341, 240),
                    Fraction(-251, 720),
                ),
            ),
            (
                6,
                (
                    Fraction(2837, 1440),
                    Fraction(-2543, 720),
                    Fraction(17, 5),
                    Fraction(-1201, 720),
                    Fraction(95, 288),
                ),
            ),
        ],
    )
    def test_table(self, k, expected):
        """Test every starting-step coefficient as an exact rational"""
        corrections = correction_coeffs(k)
        assert corrections.exact == expected
        assert corrections.coeffs == tuple(float(a) for a in expected)
        assert len(corrections) == k - 1

    def test_at_step(self):
        """Test that a_n vanishes from step k on"""
        corrections = correction_coeffs(3)
        assert corrections.at_step(1) == pytest.approx(11 / 12)
        assert corrections.at_step(2) == pytest.approx(-5 / 12)
        assert corrections.at_step(3) == 0.0
        assert corrections.at_step(100) == 0.0

    def test_out_of_range(self):
        """Test that unsupported orders are rejected"""
        with pytest.raises(RangeError):
            correction_coeffs(7)


class TestConstantQuadrature:
    """Tests for the quadrature of the fractional derivative of a constant"""

    @pytest.mark.parametrize("k", [1, 2, 3])
    @pytest.mark.parametrize("alpha", [0.3, 0.5, 0.7])
    def test_unit_function(self, k, alpha):
        """Test that tau^-alpha times the weight sum tends to 1 / Gamma(1 - alpha) at t = 1"""
        target = special.rgamma(1.0 - alpha)

        def error(n):
            return abs(n**alpha * math.fsum(cq_weights(k, alpha, n).weights) - target)

        coarse, fine = error(1024), error(4096)
        assert fine < coarse / 2
        assert fine < 1e-2
