"""Tests for the state catalog: distributions, generating functions, moments."""

import math

import numpy as np
import pytest

from clickstats import (
    StateSpec,
    generating_function,
    make_distribution,
    photon_moments,
    state_from_dict,
)
from clickstats.errors import (
    TruncationOverflow,
    UnnormalizedExplicit,
    ValidationError,
)
from clickstats.states import polynomial_gf

CATALOG = [
    StateSpec.coherent(0.0),
    StateSpec.coherent(1.0),
    StateSpec.coherent(4.0),
    StateSpec.coherent(10.0),
    StateSpec.thermal(0.5),
    StateSpec.thermal(1.0),
    StateSpec.thermal(5.0),
    StateSpec.fock(0),
    StateSpec.fock(3),
    StateSpec.fock(20),
    StateSpec.squeezed_vacuum(0.5),
    StateSpec.squeezed_vacuum(1.5),
    StateSpec.mixture(
        [(0.25, StateSpec.coherent(2.0)), (0.75, StateSpec.thermal(0.8))]
    ),
    StateSpec.explicit([0.5, 0.25, 0.125, 0.125]),
]


class TestMakeDistribution:
    def test_fock_point_mass(self):
        pnd = make_distribution(StateSpec.fock(3))
        assert pnd.probs[3] == 1.0
        assert pnd.probs.sum() == 1.0
        assert pnd.tail_bound == 0.0

    def test_coherent_poisson_entries(self):
        pnd = make_distribution(StateSpec.coherent(1.0))
        expected = math.exp(-1.0)
        assert pnd.probs[0] == pytest.approx(expected, abs=1e-15)
        assert pnd.probs[1] == pytest.approx(expected, abs=1e-15)
        # full Poisson law, not just the first entries
        mu = 1.0
        for n in range(pnd.probs.size):
            assert pnd.probs[n] == pytest.approx(
                math.exp(-mu) * mu**n / math.factorial(n), rel=1e-12
            )

    def test_thermal_geometric_entries(self):
        pnd = make_distribution(StateSpec.thermal(1.0))
        assert pnd.probs[0] == pytest.approx(0.5, abs=1e-15)
        assert pnd.probs[1] == pytest.approx(0.25, abs=1e-15)
        assert pnd.probs[2] == pytest.approx(0.125, abs=1e-15)

    def test_squeezed_vacuum_odd_entries_vanish(self):
        pnd = make_distribution(StateSpec.squeezed_vacuum(0.5))
        assert pnd.probs[1] == 0.0
        assert pnd.probs[3] == 0.0
        assert np.all(pnd.probs[1::2] == 0.0)

    @pytest.mark.parametrize("r", [0.3, 0.8, 1.5])
    def test_squeezed_vacuum_even_entries_formula(self, r):
        pnd = make_distribution(StateSpec.squeezed_vacuum(r))
        t = math.tanh(r)
        for m in range(min(6, pnd.probs.size // 2)):
            direct = (
                math.factorial(2 * m)
                * t ** (2 * m)
                / (2**m * math.factorial(m)) ** 2
                / math.cosh(r)
            )
            assert pnd.probs[2 * m] == pytest.approx(direct, rel=1e-12)

    def test_mixture_is_convex_combination(self):
        a, b = StateSpec.coherent(2.0), StateSpec.thermal(0.8)
        mix = StateSpec.mixture([(0.25, a), (0.75, b)])
        pnd = make_distribution(mix)
        pa, pb = make_distribution(a), make_distribution(b)
        n = pnd.probs.size
        pad = lambda arr: np.pad(arr, (0, n - arr.size))
        np.testing.assert_allclose(
            pnd.probs, 0.25 * pad(pa.probs) + 0.75 * pad(pb.probs), atol=1e-15
        )

    def test_explicit_small_deviation_renormalized(self):
        pnd = make_distribution(StateSpec.explicit([0.3, 0.7000005]))
        assert pnd.probs.sum() == pytest.approx(1.0, abs=1e-15)

    def test_explicit_large_deviation_rejected(self):
        with pytest.raises(UnnormalizedExplicit):
            make_distribution(StateSpec.explicit([0.3, 0.72]))

    def test_vacuum_limits(self):
        for spec in (StateSpec.coherent(0.0), StateSpec.thermal(0.0),
                     StateSpec.squeezed_vacuum(0.0)):
            pnd = make_distribution(spec)
            assert pnd.probs.tolist() == [1.0]

    @pytest.mark.parametrize("spec", CATALOG)
    def test_catalog_normalization_and_sign(self, spec):
        pnd = make_distribution(spec, tail_tolerance=1e-12)
        assert np.all(pnd.probs >= 0.0)
        total = float(pnd.probs.sum())
        assert 1.0 - 2e-12 <= total <= 1.0 + 1e-12
        assert pnd.tail_bound <= 1e-12

    def test_truncation_overflow(self):
        with pytest.raises(TruncationOverflow):
            make_distribution(StateSpec.thermal(400.0))
        with pytest.raises(TruncationOverflow):
            make_distribution(StateSpec.fock(5000))

    def test_tail_tolerance_range(self):
        with pytest.raises(ValueError):
            make_distribution(StateSpec.coherent(1.0), tail_tolerance=1e-3)
        with pytest.raises(ValueError):
            make_distribution(StateSpec.coherent(1.0), tail_tolerance=0.0)


class TestValidation:
    def test_mixture_weights_must_sum_to_one(self):
        spec = StateSpec(
            kind="mixture", components=((0.9, StateSpec.fock(1)),)
        )
        with pytest.raises(ValidationError, match="weights sum"):
            spec.validate()

    def test_negative_weight_rejected(self):
        spec = StateSpec(
            kind="mixture",
            components=((-0.1, StateSpec.fock(1)), (1.1, StateSpec.fock(2))),
        )
        with pytest.raises(ValidationError):
            spec.validate()

    def test_nesting_depth_cap(self):
        spec = StateSpec.fock(1)
        for _ in range(8):
            spec = StateSpec.mixture([(1.0, spec)])
        spec.validate()  # depth 8 is allowed
        spec = StateSpec.mixture([(1.0, spec)])
        with pytest.raises(ValidationError, match="depth"):
            spec.validate()

    def test_bad_parameters(self):
        with pytest.raises(ValidationError):
            StateSpec.coherent(-1.0).validate()
        with pytest.raises(ValidationError):
            StateSpec.squeezed_vacuum(-0.5).validate()
        with pytest.raises(ValidationError):
            StateSpec(kind="fock", n=-2).validate()
        with pytest.raises(ValidationError):
            StateSpec(kind="laser").validate()

    def test_roundtrip_through_dict(self):
        for spec in CATALOG:
            again = state_from_dict(spec.to_dict())
            assert again == spec


class TestGeneratingFunction:
    @pytest.mark.parametrize("spec", CATALOG)
    def test_normalization_at_one(self, spec):
        assert generating_function(spec, 1.0) == pytest.approx(1.0, abs=1e-12)

    def test_coherent_closed_form(self):
        assert generating_function(StateSpec.coherent(4.0), 0.75) == pytest.approx(
            math.exp(-1.0), abs=1e-15
        )

    def test_thermal_closed_form(self):
        assert generating_function(StateSpec.thermal(1.0), 0.5) == pytest.approx(
            2.0 / 3.0, abs=1e-15
        )

    @pytest.mark.parametrize("spec", CATALOG)
    def test_matches_truncated_sum(self, spec):
        pnd = make_distribution(spec)
        for x in (0.0, 0.3, 0.7, 1.0):
            assert generating_function(spec, x) == pytest.approx(
                polynomial_gf(pnd.probs, x), abs=1e-9
            )

    @pytest.mark.parametrize("spec", CATALOG)
    def test_nondecreasing_on_unit_interval(self, spec):
        grid = np.linspace(0.0, 1.0, 100)
        values = [generating_function(spec, x) for x in grid]
        assert all(b - a >= -1e-12 for a, b in zip(values, values[1:]))

    def test_mixture_linearity(self):
        a, b = StateSpec.coherent(3.0), StateSpec.squeezed_vacuum(0.9)
        mix = StateSpec.mixture([(0.6, a), (0.4, b)])
        for x in np.linspace(0.0, 1.0, 11):
            combo = 0.6 * generating_function(a, x) + 0.4 * generating_function(b, x)
            assert generating_function(mix, x) == pytest.approx(combo, abs=1e-12)

    def test_finite_difference_matches_mean(self):
        # (G(1) - G(1-h))/h -> <n> on the truncated distribution
        h = 1e-6
        for spec in (StateSpec.coherent(1.0), StateSpec.thermal(1.0),
                     StateSpec.fock(5), StateSpec.squeezed_vacuum(0.8)):
            pnd = make_distribution(spec)
            assert pnd.probs.size <= 101
            mean, _ = photon_moments(pnd)
            slope = (polynomial_gf(pnd.probs, 1.0) - polynomial_gf(pnd.probs, 1.0 - h)) / h
            assert slope == pytest.approx(mean, abs=1e-4)

    def test_domain_check(self):
        with pytest.raises(ValueError):
            generating_function(StateSpec.fock(1), 1.5)
        with pytest.raises(ValueError):
            generating_function(StateSpec.fock(1), -0.1)


class TestPhotonMoments:
    def test_fock_point_mass(self):
        mean, var = photon_moments(make_distribution(StateSpec.fock(5)))
        assert mean == 5.0
        assert var == 0.0

    def test_thermal_variance(self):
        mean, var = photon_moments(make_distribution(StateSpec.thermal(1.0)))
        assert mean == pytest.approx(1.0, abs=1e-9)
        # truncation shifts the second moment by ~n_max^2 * tail
        assert var == pytest.approx(2.0, abs=1e-7)

    def test_coherent_poisson_variance(self):
        mean, var = photon_moments(make_distribution(StateSpec.coherent(4.0)))
        assert mean == pytest.approx(4.0, abs=1e-9)
        assert var == pytest.approx(4.0, abs=1e-9)

    def test_squeezed_vacuum_moments(self):
        r = 0.8
        mean, var = photon_moments(make_distribution(StateSpec.squeezed_vacuum(r)))
        sh2 = math.sinh(r) ** 2
        assert mean == pytest.approx(sh2, abs=1e-9)
        assert var == pytest.approx(2.0 * sh2 * (1.0 + sh2), abs=1e-7)
