import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from pdmsplit.errors import DomainError
from pdmsplit.potentials import (
    BENDANIEL_DUKE,
    PRESETS,
    ZHU_KROEMER,
    AmbiguityParams,
    QuantumSetting,
    delta_v,
    u_alpha_gamma,
    u_eff,
)
from pdmsplit.profiles import builtin_profiles, constant, inverse_quadratic

R = np.linspace(0.05, 6.0, 40)


def square(r):
    return np.asarray(r) ** 2


class TestPresets:
    def test_values(self):
        assert (BENDANIEL_DUKE.alpha, BENDANIEL_DUKE.gamma) == (0.0, 0.0)
        assert (ZHU_KROEMER.alpha, ZHU_KROEMER.gamma) == (-0.5, -0.5)
        li_kuhn = AmbiguityParams.preset("Li-Kuhn")
        assert (li_kuhn.alpha, li_kuhn.gamma) == (0.0, -0.5)
        bastard = PRESETS["bastard"]
        assert bastard.alpha == -1.0 and not bastard.canonical

    def test_aliases(self):
        assert AmbiguityParams.preset("zk") == ZHU_KROEMER
        assert AmbiguityParams.preset("BenDaniel_Duke") == BENDANIEL_DUKE
        with pytest.raises(ValueError):
            AmbiguityParams.preset("nonsense")


class TestQuantumSetting:
    def test_one_dimension_needs_l_zero(self):
        with pytest.raises(ValueError):
            QuantumSetting(N=1, L=1)

    @pytest.mark.parametrize("kw", [dict(N=0), dict(L=-1), dict(omega=0.0), dict(n=-1), dict(N=2.5)])
    def test_rejects(self, kw):
        with pytest.raises(ValueError):
            QuantumSetting(**kw)

    @given(st.integers(3, 12), st.integers(0, 10))
    def test_centrifugal_nonnegative_from_three_dimensions(self, N, L):
        assert QuantumSetting(N, L).centrifugal >= 0


class TestUAlphaGamma:
    def test_bdd_vanishes(self, profile):
        np.testing.assert_array_equal(u_alpha_gamma(profile, BENDANIEL_DUKE, R), 0.0)

    def test_constant_mass_vanishes(self):
        for params in PRESETS.values():
            np.testing.assert_array_equal(u_alpha_gamma(constant(), params, R), 0.0)

    def test_zhu_kroemer_inverse_quadratic(self):
        # (1/2) M''/M^2 - (3/4) M'^2/M^3 with M = 1/2, M' = -1/2, M'' = 1/2
        assert u_alpha_gamma(inverse_quadratic(), ZHU_KROEMER, 1.0) == pytest.approx(-0.5)

    @given(st.floats(-2, 2), st.floats(-2, 2), st.floats(-5, 5))
    @settings(max_examples=60)
    def test_swap_symmetry(self, a, g, r):
        for profile in builtin_profiles():
            forward = u_alpha_gamma(profile, AmbiguityParams(a, g), r)
            swapped = u_alpha_gamma(profile, AmbiguityParams(g, a), r)
            assert forward == pytest.approx(swapped, rel=1e-12, abs=1e-12)


class TestDeltaV:
    def test_one_dimension_reduces_exactly(self, profile):
        s = QuantumSetting(1, 0)
        for params in PRESETS.values():
            np.testing.assert_array_equal(delta_v(profile, params, s, R), u_alpha_gamma(profile, params, R))

    def test_one_dimension_allows_full_line(self):
        assert delta_v(inverse_quadratic(), ZHU_KROEMER, QuantumSetting(1, 0), -1.0) == pytest.approx(-0.5)

    def test_constant_mass_values(self):
        assert delta_v(constant(), BENDANIEL_DUKE, QuantumSetting(1, 0), 3.0) == 0.0
        assert delta_v(constant(), BENDANIEL_DUKE, QuantumSetting(3, 0), 2.0) == 0.0
        assert delta_v(constant(), BENDANIEL_DUKE, QuantumSetting(2, 1), 1.0) == pytest.approx(0.75)

    def test_radial_needs_positive_r(self):
        with pytest.raises(DomainError):
            delta_v(constant(), BENDANIEL_DUKE, QuantumSetting(3, 0), 0.0)


class TestUEff:
    def test_values(self):
        c = constant()
        assert u_eff(c, BENDANIEL_DUKE, QuantumSetting(1, 0), square, 2.0) == pytest.approx(4.0)
        assert u_eff(c, BENDANIEL_DUKE, QuantumSetting(3, 0), square, 2.0) == pytest.approx(4.0)
        assert u_eff(c, BENDANIEL_DUKE, QuantumSetting(3, 1), square, 1.0) == pytest.approx(3.0)

    def test_is_v0_plus_delta_v(self, profile):
        s = QuantumSetting(4, 2)
        expected = square(R) + delta_v(profile, ZHU_KROEMER, s, R)
        np.testing.assert_array_equal(u_eff(profile, ZHU_KROEMER, s, square, R), expected)
