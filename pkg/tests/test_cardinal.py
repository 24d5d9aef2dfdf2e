"""Cardinal series, sinc kernels and Parseval sums."""
import numpy as np
import pytest
from hypothesis import given, strategies as st

from hclab.cardinal import (
    SampledEntire,
    biorth_residual,
    coefficients_from_masses,
    eval_cardinal,
    inner_pw,
    kernel_function,
    kernel_pw,
    kernel_residual,
    masses_from_coefficients,
    partial_sum,
)
from hclab.lattice import LatticeSequence, PowerLaw

# mpmath, 50 digits: sin(pi z) sum_{|n|<=8} 2^-|n| / (z - n) at z = 0.3 + 0.7i
CARDINAL_AT_Z = complex("6.3561952405057732669-5.6666905580762814439j")


def unit_mass(n=0, alpha=0.0):
    return SampledEntire.sparse([n], [1.0], alpha)


def test_unit_mass_at_origin_is_pi():
    assert eval_cardinal(unit_mass(), 0.0) == np.pi


def test_unit_mass_at_half():
    assert eval_cardinal(unit_mass(), 0.5) == pytest.approx(2.0, rel=1e-15)


def test_geometric_masses_against_high_precision():
    n = np.arange(-8, 9)
    f = SampledEntire.from_window(-8, 2.0 ** -np.abs(n))
    assert abs(f(0.3 + 0.7j) - CARDINAL_AT_Z) <= 1e-14 * abs(CARDINAL_AT_Z)


def test_lattice_values_are_pi_alternating_masses():
    n = np.arange(-5, 6)
    c = np.linspace(0.1, 1.1, n.size)
    f = SampledEntire.from_window(-5, c, alpha=0.25)
    vals = eval_cardinal(f, n + 0.25)
    assert np.array_equal(vals, np.pi * np.where(n % 2 == 0, 1.0, -1.0) * c)


def test_near_pole_expansion_is_continuous():
    f = SampledEntire.from_window(-3, [0.5, -1.0, 2.0, 1.0, 0.3, 0.2, -0.7], tail=PowerLaw(2))
    x = 2.0
    inside, outside = f(x + 5e-9), f(x + 2e-8)
    slope = (outside - inside) / 1.5e-8
    assert abs(slope - f.derivative(x + 1e-6)) <= 1e-5 * abs(slope)


@given(x=st.floats(-20, 20, allow_nan=False), y=st.floats(-2, 2, allow_nan=False))
def test_eval_matches_partial_sum_within_bound(x, y):
    z = complex(x, y)
    if abs(z - round(x)) < 1e-3:
        return
    f = SampledEntire(LatticeSequence([-2, 0, 3], [0.4, 1.0, -0.3], PowerLaw(2, 0.5)))
    ps = partial_sum(f, z, 4000)
    assert abs(f(z) - ps.value) <= ps.tail_bound + 1e-12 * (1 + abs(ps.value))


def test_kernel_examples():
    assert kernel_pw(0, 0) == 1.0
    assert kernel_pw(1j, 0) == pytest.approx(np.sinh(np.pi) / np.pi, rel=1e-15)


def test_kernel_is_exact_delta_on_integers():
    n = np.arange(-50, 51)
    K = kernel_pw(n[:, None].astype(complex), n[None, :].astype(complex))
    assert np.array_equal(K, np.eye(n.size))


def test_inner_single_term_parseval():
    f = unit_mass()
    assert inner_pw(f, f).value == pytest.approx(np.pi ** 2, rel=1e-15)


def test_inner_disjoint_masses_by_direct_lattice_evaluation():
    f, g = unit_mass(0), unit_mass(1)
    direct = sum(f(n) * np.conj(g(n)) for n in range(-3, 4))
    assert inner_pw(f, g).value == direct == 0


def test_inner_with_zero_function():
    f = SampledEntire.from_window(-2, [1.0, 2.0, 3.0, 4.0, 5.0])
    zero = SampledEntire(LatticeSequence.zero())
    assert inner_pw(f, zero).value == 0


def test_inner_rejects_mismatched_shift():
    with pytest.raises(ValueError):
        inner_pw(unit_mass(alpha=0.0), unit_mass(alpha=0.5))


def test_reproducing_identity_random_points():
    rng = np.random.default_rng(3)
    c = rng.normal(size=21)
    f = SampledEntire.from_window(-10, c)
    for lam in rng.uniform(-5, 5, 20) + 1j * rng.uniform(-1, 1, 20):
        k = kernel_function(lam, -10, 10)
        ip = inner_pw(f, k)
        assert abs(ip.value - f(lam)) <= ip.tail_bound + 1e-12 * np.sum(np.abs(c))


def test_coefficient_mass_conversion_round_trip():
    a = LatticeSequence([-1, 0, 2], [1 + 1j, 2.0, -0.5j], PowerLaw(2, 1.0))
    c = masses_from_coefficients(a)
    assert c.at(np.array([-1]))[0] == pytest.approx(-(1 - 1j) / np.pi)
    back = coefficients_from_masses(c)
    n = np.arange(-4, 5)
    assert np.allclose(back.at(n), a.at(n), rtol=1e-15, atol=0)
    # samples of h = sum conj(a_n) K_n are conj(a_n)
    h = SampledEntire(c)
    assert np.allclose(h(n.astype(complex)), np.conj(a.at(n)), rtol=1e-14, atol=0)


def test_biorth_residual_examples():
    zero = LatticeSequence.zero()
    assert biorth_residual(0.5, zero, LatticeSequence([0], [1.0])).value == 0
    a = LatticeSequence([0], [1.0])
    G = LatticeSequence([0], [np.pi])
    assert biorth_residual(0.5, a, G).value == pytest.approx(-2.0, rel=1e-15)
    with pytest.raises(ValueError):
        biorth_residual(3.0, a, G)


def test_kernel_residual_examples():
    assert kernel_residual(0.5, LatticeSequence.zero()).value == 0
    assert kernel_residual(0.5, LatticeSequence([0], [1.0])).value == pytest.approx(2.0, rel=1e-15)
    with pytest.raises(ValueError):
        kernel_residual(-1.0, LatticeSequence([0], [1.0]))


def test_kernel_residual_is_pi_h_over_sine():
    a = LatticeSequence([-1, 0, 1, 4], [0.3, 1.0, -0.2, 0.05], PowerLaw(2, 0.1))
    h = SampledEntire(masses_from_coefficients(a))
    lam = 0.37 + 0.2j
    lhs = kernel_residual(lam, a).value
    rhs = np.conj(np.pi * h(np.conj(lam)) / np.sin(np.pi * np.conj(lam)))
    assert abs(lhs - rhs) <= 1e-13 * abs(rhs)


def test_envelope_masses_rejected():
    from hclab.lattice import Envelope

    with pytest.raises(ValueError):
        SampledEntire(LatticeSequence([0], [1.0], envelope=Envelope(1.0, 2.0)))
