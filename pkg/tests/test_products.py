"""Canonical products: log-scale route against plain multiplication."""
import numpy as np
import pytest
from hypothesis import given, strategies as st

from hclab.products import ProductFunction, ratio_log


@given(
    seed=st.integers(0, 2**31 - 1),
    size=st.integers(1, 200),
    genus=st.sampled_from([0, 1]),
)
def test_log_route_matches_direct_product(seed, size, genus):
    rng = np.random.default_rng(seed)
    mag = rng.uniform(1.0, 50.0, size)
    zeros = mag * np.exp(1j * rng.uniform(-np.pi, np.pi, size))
    zeros[: size // 2] = mag[: size // 2]  # half of them real
    p = ProductFunction(zeros, genus=genus)
    z = rng.uniform(-3, 3, 5) + 1j * rng.uniform(-3, 3, 5)
    direct = np.atleast_1d(p.direct(z))
    via_log = p(z)
    assert np.all(np.abs(via_log - direct) <= 1e-12 * np.abs(direct))


def test_zero_at_origin_gives_monomial_and_finite_log():
    p = ProductFunction([0.0, 2.0])
    assert p(1.0) == pytest.approx(0.5)
    assert p.log(np.array([0.0]))[0].real == -np.inf


def test_derivative_at_zero_matches_finite_difference():
    zeros = np.array([1.5, -2.5, 4.0 + 1j, 7.0])
    p = ProductFunction(zeros)
    for j in range(zeros.size):
        assert p.derivative_at_zero(j) == pytest.approx(p.derivative(zeros[j], 1e-3), rel=1e-9)


def test_log_derivative_matches_difference_quotient():
    p = ProductFunction([1.0, 3.0, -2.0], genus=1)
    z = 0.4 + 0.3j
    h = 1e-5
    fd = (np.log(p(z + h)) - np.log(p(z - h))) / (2 * h)
    assert p.log_derivative(z)[0] == pytest.approx(fd, rel=1e-8)


def test_tail_law_adds_geometric_zeros():
    explicit = ProductFunction(12 * 2.0 ** np.arange(1, 60) + 0.5)
    lawful = ProductFunction([], tail_zero_law=lambda j: 12 * 2.0 ** (j + 1) + 0.5)
    z = np.array([3.0 + 1j, 100.0])
    assert np.allclose(lawful(z), explicit(z), rtol=1e-13, atol=0)


def test_ratio_log_cancels_large_products():
    zeros = np.arange(1, 400) + 0.5
    num = ProductFunction(zeros + 1e-3)
    den = ProductFunction(zeros)
    z = np.array([1000.3])
    direct = np.prod((1 - z[0] / (zeros + 1e-3)) / (1 - z[0] / zeros))
    assert np.exp(ratio_log(num, den, z))[0].real == pytest.approx(direct, rel=1e-11)


def test_genus_validation():
    with pytest.raises(ValueError):
        ProductFunction([1.0], genus=2)
