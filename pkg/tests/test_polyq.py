import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from arxid.errors import NotAntiStable, RootOnUnitCircle, ZeroPolynomial
from arxid.polyq import (
    EPS_RECON,
    Poly,
    allpass_gain,
    factor_stable_antistable,
    mirror,
    poly_add,
    poly_mul,
    roots,
)
from conftest import antistable_root_sets, mixed_root_sets, stable_root_sets


def sorted_roots(values):
    return sorted(np.asarray(values, dtype=complex), key=lambda p: (p.real, p.imag))


class TestPoly:
    def test_trailing_zeros_trimmed(self):
        assert Poly([1.0, 2.0, 0.0, 0.0]).degree == 1

    def test_zero_polynomial(self):
        p = Poly([0.0, 0.0])
        assert p.is_zero and p.degree == 0

    def test_leading_zero_kept(self):
        p = Poly([0.0, 1.0, -1.7])
        assert p.degree == 2 and p.coeffs[0] == 0.0

    def test_monic_flag(self):
        assert Poly([1.0, -0.5]).is_monic
        assert not Poly([0.0, 1.0]).is_monic

    def test_rendering(self):
        assert str(Poly([1.0, -2.0, 2.0])) == "1 - 2 q^-1 + 2 q^-2"
        assert str(Poly([0.0, 1.0, -1.7])) == "q^-1 - 1.7 q^-2"
        assert str(Poly([0.0])) == "0"

    def test_json_roundtrip(self):
        p = Poly([1.0, -2.0, 2.0])
        assert Poly(p.to_list()).to_list() == p.to_list()

    def test_at_freq_is_delay_sum(self):
        p = Poly([1.0, -0.5, 0.25])
        om = 0.7
        expected = 1.0 - 0.5 * np.exp(-1j * om) + 0.25 * np.exp(-2j * om)
        assert abs(p.at_freq(om) - expected) < 1e-14


class TestRoots:
    def test_complex_pair(self):
        rs = roots(Poly([1.0, -2.0, 2.0]))
        assert np.allclose(sorted_roots(rs.expanded()), [1 - 1j, 1 + 1j], atol=1e-12)
        assert set(rs.labels) == {"antistable"}

    def test_constant_has_no_roots(self):
        assert roots(Poly([1.0])).count == 0

    def test_linear_factor(self):
        rs = roots(Poly([1.0, -0.9]))
        assert np.allclose(rs.expanded(), [0.9])
        assert rs.labels == ("stable",)

    def test_zero_polynomial_raises(self):
        with pytest.raises(ZeroPolynomial):
            roots(Poly([0.0]))

    def test_leading_structural_zero_drops_a_root(self):
        rs = roots(Poly([0.0, 1.0, -1.7]))
        assert rs.count == 1
        assert np.allclose(rs.expanded(), [1.7])

    def test_double_root_multiplicity(self):
        rs = roots(poly_mul(Poly([1.0, -2.0]), Poly([1.0, -2.0])))
        assert list(rs.multiplicities) == [2]
        assert abs(rs.roots[0] - 2.0) < 1e-7


class TestFactorization:
    def test_fully_antistable_plant_denominator(self):
        f_s, f_a = factor_stable_antistable(Poly([1.0, -2.0, 2.0]))
        assert f_s.to_list() == [1.0]
        assert np.allclose(f_a.coeffs, [1.0, -2.0, 2.0], rtol=1e-12)

    def test_fully_stable(self):
        f_s, f_a = factor_stable_antistable(Poly([1.0, -0.9]))
        assert np.allclose(f_s.coeffs, [1.0, -0.9])
        assert f_a.to_list() == [1.0]

    def test_mixed_hand_expansion(self):
        # (1 - 0.5 q^-1)(1 - 2 q^-1) expanded by hand
        f = Poly([1.0, -2.5, 1.0])
        f_s, f_a = factor_stable_antistable(f)
        assert np.allclose(f_s.coeffs, [1.0, -0.5], atol=1e-12)
        assert np.allclose(f_a.coeffs, [1.0, -2.0], atol=1e-12)

    def test_requires_monic(self):
        with pytest.raises(ValueError):
            factor_stable_antistable(Poly([2.0, -1.0]))

    def test_unit_circle_root_raises(self):
        with pytest.raises(RootOnUnitCircle):
            factor_stable_antistable(Poly([1.0, -1.0]))


class TestMirror:
    def test_single_root(self):
        assert np.allclose(mirror(Poly([1.0, -2.0])).coeffs, [1.0, -0.5], atol=1e-12)

    def test_complex_pair_hand_expansion(self):
        # roots 1 +- i map to (1 -+ i)/2
        m = mirror(Poly([1.0, -2.0, 2.0]))
        assert np.allclose(m.coeffs, [1.0, -1.0, 0.5], atol=1e-12)

    def test_empty_product(self):
        assert mirror(Poly([1.0])).to_list() == [1.0]

    def test_rejects_stable_roots(self):
        with pytest.raises(NotAntiStable):
            mirror(Poly([1.0, -0.5]))


class TestAllpassGain:
    def test_complex_pair(self):
        assert abs(allpass_gain(Poly([1.0, -2.0, 2.0])) - 4.0) < 1e-12

    def test_empty(self):
        assert allpass_gain(Poly([1.0])) == 1.0

    def test_single_root(self):
        assert abs(allpass_gain(Poly([1.0, -2.0])) - 4.0) < 1e-12


class TestArithmetic:
    def test_mul_hand_expansion(self):
        p = poly_mul(Poly([1.0, -0.5]), Poly([1.0, -2.0]))
        assert np.allclose(p.coeffs, [1.0, -2.5, 1.0])

    def test_mul_identity(self):
        p = Poly([0.3, -1.2, 0.7])
        assert np.allclose(poly_mul(p, Poly([1.0])).coeffs, p.coeffs)

    def test_mul_by_zero(self):
        assert poly_mul(Poly([1.0, 2.0]), Poly([0.0])).is_zero

    def test_add_identity(self):
        p = Poly([0.3, -1.2, 0.7])
        assert np.allclose(poly_add(p, Poly([0.0])).coeffs, p.coeffs)

    def test_add_cancellation_trims(self):
        p = poly_add(Poly([1.0, 1.0]), Poly([1.0, -1.0]))
        assert p.degree == 0 and p.coeffs[0] == 2.0

    def test_mul_degree_bookkeeping(self):
        assert poly_mul(Poly([1.0, 1.0, 1.0]), Poly([2.0, 1.0])).degree == 3


# ---------------------------------------------------------------------------
# randomized properties


@settings(max_examples=100, deadline=None)
@given(mixed_root_sets())
def test_root_expansion_roundtrip(root_list):
    p = Poly.from_roots(root_list)
    assert p.degree <= 30
    rebuilt = Poly.from_roots(roots(p).expanded())
    scale = np.max(np.abs(p.coeffs))
    assert np.max(np.abs(rebuilt.coeffs - p.coeffs)) <= EPS_RECON * scale


@settings(max_examples=100, deadline=None)
@given(
    st.lists(st.floats(-1.5, 1.5), min_size=0, max_size=11),
    st.floats(0.05, 1.5),
    st.booleans(),
)
def test_coefficient_roundtrip(middle, last, negate):
    # trailing coefficient kept away from zero so the degree is unambiguous
    p = Poly([1.0] + middle + [-last if negate else last])
    rebuilt = Poly.from_roots(roots(p).expanded())
    scale = np.max(np.abs(p.coeffs))
    assert np.max(np.abs(rebuilt.coeffs - p.coeffs)) <= EPS_RECON * scale


@settings(max_examples=100, deadline=None)
@given(antistable_root_sets())
def test_mirror_inverts_roots(root_list):
    f_a = Poly.from_roots(root_list)
    mirrored = roots(mirror(f_a)).expanded()
    expected = 1.0 / np.asarray(root_list, dtype=complex)
    assert np.allclose(sorted_roots(mirrored), sorted_roots(expected), rtol=1e-6, atol=1e-9)
    assert np.all(np.abs(mirrored) < 1.0)


@settings(max_examples=100, deadline=None)
@given(antistable_root_sets(), st.integers(0, 2**31 - 1))
def test_allpass_constancy(root_list, seed):
    f_a = Poly.from_roots(root_list)
    f_a_star = mirror(f_a)
    omegas = np.random.default_rng(seed).uniform(-np.pi, np.pi, 100)
    ratio = np.abs(f_a.at_freq(omegas) / f_a_star.at_freq(omegas))
    expected = np.sqrt(allpass_gain(f_a))
    assert np.max(np.abs(ratio - expected)) <= 1e-8 * expected


@settings(max_examples=100, deadline=None)
@given(mixed_root_sets())
def test_factorization_reconstructs(root_list):
    f = Poly.from_roots(root_list)
    f_s, f_a = factor_stable_antistable(f)
    product = poly_mul(f_s, f_a)
    scale = np.max(np.abs(f.coeffs))
    assert np.max(np.abs(product.coeffs - f.coeffs)) <= EPS_RECON * scale
    assert all(abs(p) < 1 for p in roots(f_s).expanded()) if f_s.degree else True
    assert all(abs(p) > 1 for p in roots(f_a).expanded()) if f_a.degree else True


@settings(max_examples=100, deadline=None)
@given(stable_root_sets(), antistable_root_sets())
def test_real_coefficient_closure(stable, anti):
    # every operation on real-coefficient inputs stays real by construction
    f = Poly.from_roots(stable + anti)
    assert not np.iscomplexobj(f.coeffs)
    f_s, f_a = factor_stable_antistable(f)
    for p in (f_s, f_a, mirror(f_a), poly_mul(f_s, f_a), poly_add(f_s, f_a)):
        assert not np.iscomplexobj(p.coeffs)
