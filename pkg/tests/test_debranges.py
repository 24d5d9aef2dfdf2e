"""Clark models: closed forms, kernels, Parseval, residue identities and the construction pipeline."""
import json

import numpy as np
import pytest
from hypothesis import given, strategies as st

from hclab.debranges import (
    ModelError,
    ScheduleInfeasible,
    SplitZeros,
    build_clark,
    choose_blocks,
    construct_example,
    expand,
    export_model_json,
    hypothesis_constant,
    inner_db,
    inner_db_quadrature,
    kernel_db,
    power_spectrum,
    residual_ext,
    track_phase,
    tracked_phase_derivative,
)
from hclab.herglotz import CauchyTransform, locate_gap_zeros


def irregular_model(size=21, seed=4):
    rng = np.random.default_rng(seed)
    t = np.arange(size) - size // 2 + rng.uniform(-0.3, 0.3, size)
    return build_clark(t, rng.uniform(0.2, 2.0, size) / (1 + t ** 2))


@pytest.fixture(scope="module")
def model21():
    return irregular_model()


def test_two_point_model_is_square_of_linear_factor(two_point):
    x = np.array([0.0, 0.5, 2.0, -3.0, 1.5 + 0.7j])
    ratio = two_point.E(x) / (x + 1j) ** 2
    assert np.allclose(ratio, ratio[0], rtol=1e-14)
    assert np.allclose(two_point.phase_derivative(np.array([-1.0, 0.0, 1.0])), [1.0, 2.0, 1.0], rtol=1e-12)


def test_two_point_diagonal_kernel_at_origin(two_point):
    assert kernel_db(two_point, 0.0, 0.0) == pytest.approx(2 / np.pi, rel=1e-12)


def test_single_point_model():
    m = build_clark([0.0], [1.0])
    x = np.array([0.3, -2.0, 1.0 + 1.0j])
    ratio = m.E(x) / (x + 1j)
    assert np.allclose(ratio, ratio[0], rtol=1e-14) and abs(abs(ratio[0]) - 1) < 1e-14
    assert m.phase_derivative(np.array([0.0]))[0] == pytest.approx(1.0, rel=1e-14)


def test_model_validation():
    with pytest.raises(ModelError):
        build_clark([0.0, 0.0], [1.0, 1.0])
    with pytest.raises(ModelError):
        build_clark([0.0, 1.0], [1.0, -1.0])
    with pytest.raises(ModelError):
        build_clark([], [])


def test_kernel_vanishes_between_spectrum_points(model21):
    t = model21.spectrum
    scale = max(abs(kernel_db(model21, x, x)) for x in t)
    off = [abs(kernel_db(model21, t[i], t[j])) for i in range(0, 21, 4) for j in range(0, 21, 3) if i != j]
    assert max(off) <= 1e-10 * scale


def test_kernel_hermitian_symmetry(model21):
    rng = np.random.default_rng(6)
    w = rng.uniform(-8, 8, 20) + 1j * rng.uniform(-2, 2, 20)
    z = rng.uniform(-8, 8, 20) + 1j * rng.uniform(-2, 2, 20)
    for a, b in zip(w, z):
        kab, kba = kernel_db(model21, a, b), kernel_db(model21, b, a)
        assert abs(kab - np.conj(kba)) <= 1e-12 * abs(kab)


def test_kernel_diagonal_positive(model21):
    rng = np.random.default_rng(7)
    for x in rng.uniform(-12, 12, 20):
        assert kernel_db(model21, x, x) > 0


def test_kernel_diagonal_limit_matches_nearby_offdiagonal(model21):
    x = 0.37
    limit = kernel_db(model21, x, x)
    near = kernel_db(model21, x, x + 1e-6j)
    assert near.real == pytest.approx(limit, rel=1e-5)


def test_phase_steps_by_pi_and_increases(model21):
    t = model21.spectrum
    phi = model21.phase(t)
    assert np.allclose(np.diff(phi), np.pi, rtol=0, atol=1e-6)
    grid = np.linspace(t[0] - 2, t[-1] + 2, 2001)
    assert np.all(np.diff(model21.phase(grid)) > 0)


def test_phase_derivative_inverts_masses(model21):
    got = model21.phase_derivative(model21.spectrum) * model21.masses
    assert np.max(np.abs(got - 1)) <= 1e-6


def test_B_zeros_interlace(model21):
    t, bz = model21.spectrum, model21.B_zeros
    assert bz.size == t.size - 1
    assert np.all((t[:-1] < bz) & (bz < t[1:]))


def test_hermite_biehler_probe(model21):
    rng = np.random.default_rng(9)
    z = rng.uniform(-15, 15, 20) + 1j * rng.uniform(0.01, 5, 20)
    assert np.all(np.abs(model21.E(z)) > np.abs(model21.E_star(z)))


def test_phase_routes_agree(model21):
    # closed form against argument tracking of the products
    assert track_phase(model21).max_err <= 1e-8
    closed = model21.phase_derivative(model21.spectrum)
    tracked = tracked_phase_derivative(model21)
    assert np.allclose(tracked, closed, rtol=1e-6)


@given(st.integers(2, 30), st.integers(0, 2**31 - 1))
def test_random_models_interlace_and_invert_masses(size, seed):
    rng = np.random.default_rng(seed)
    t = np.cumsum(rng.uniform(0.2, 3.0, size)) - size
    m = build_clark(t, rng.uniform(0.05, 3.0, size))
    assert np.all((t[:-1] < m.B_zeros) & (m.B_zeros < t[1:]))
    assert np.max(np.abs(m.phase_derivative(t) * m.masses - 1)) <= 1e-6


def test_inner_examples(two_point, model21):
    assert inner_db(two_point, [1, 0], [1, 0]) == pytest.approx(np.pi)
    e = np.zeros(21)
    f = np.zeros(21)
    e[3], f[8] = 1.0, 1.0
    assert inner_db(model21, e, f) == 0
    with pytest.raises(ValueError):
        inner_db(model21, [1.0], [1.0])


def test_inner_matches_quadrature_on_two_point_model(two_point):
    for a, b in (([1, 0], [1, 0]), ([1, -2], [0.5, 3]), ([0.3, 0.0], [0.0, 1.0])):
        value, err = inner_db_quadrature(two_point, a, b)
        assert abs(value - inner_db(two_point, a, b)) <= 1e-6
        assert err <= 1e-6


def test_inner_with_complex_coefficients_is_conjugate_of_integral(two_point):
    a, b = [1, 2j], [0.5, -1]
    value, _ = inner_db_quadrature(two_point, a, b)
    assert abs(value - np.conj(inner_db(two_point, a, b))) <= 1e-6


def test_expand_matches_basis_definition(two_point):
    z = np.array([0.4 + 0.3j, 3.0])
    A = lambda x: x ** 2 - 1  # noqa: E731
    coeffs = np.array([1.0 + 1j, -0.5])
    direct = sum(np.conj(c) * np.sqrt(mu) * A(z) / (z - t)
                 for c, mu, t in zip(coeffs, two_point.masses, two_point.spectrum))
    scale = expand(two_point, [1, 0], np.array([5.0]))[0] / (A(5.0) / 6.0)
    assert np.allclose(expand(two_point, coeffs, z), scale * direct, rtol=1e-13)


def synthetic_ext(model, a):
    """Zero lists that satisfy all three identities for coefficients ``a > 0`` with empty ``S2`` and ``G1``."""
    t = model.spectrum
    G2 = SplitZeros.from_gaps(locate_gap_zeros(CauchyTransform(t, a * np.sqrt(model.masses))))
    S1 = SplitZeros.from_gaps(locate_gap_zeros(CauchyTransform(t, a ** 2)))
    empty = SplitZeros.of([])
    return empty, G2, S1, empty


def test_residual_ext_synthetic(model21):
    a = np.random.default_rng(12).uniform(0.5, 1.5, 21)
    G1, G2, S1, S2 = synthetic_ext(model21, a)
    rep = residual_ext(model21, a, G1, G2, S1, S2)
    assert rep.max_rel_err <= 1e-9 and rep.passed


def test_residual_ext_localizes_fault(model21):
    a = np.random.default_rng(12).uniform(0.5, 1.5, 21)
    G1, G2, S1, S2 = synthetic_ext(model21, a)
    bad = a.copy()
    bad[13] *= 1.01
    rep = residual_ext(model21, bad, G1, G2, S1, S2)
    assert rep.ext3.violations == [13]
    assert rep.ext3.max_rel_err == pytest.approx(1 - 1 / 1.0201, rel=1e-6)


def test_residual_ext_rejects_collision(model21):
    a = np.ones(21)
    G1, G2, S1, S2 = synthetic_ext(model21, a)
    with pytest.raises(ValueError):
        residual_ext(model21, a, G1, G2, S1, S2, samples=[model21.spectrum[4]])


def test_power_spectrum_and_hypothesis_constant():
    idx, t = power_spectrum(-3, 3, 1.5)
    assert list(idx) == [-3, -2, -1, 0, 1, 2, 3]
    assert t[-1] == pytest.approx(3 ** 1.5) and t[0] == -t[-1] and t[3] == 0
    assert hypothesis_constant(t, 1.0) > 0


def test_blocks_infeasible_on_short_window():
    idx = np.arange(-10, 301)
    with pytest.raises(ScheduleInfeasible):
        choose_blocks(idx, idx.astype(float), 4)


def test_pipeline_on_power_spectrum(pipeline):
    res, elapsed = pipeline
    assert elapsed < 60
    assert res.c_band_ratio <= 10
    assert res.weighted_tail() < 1e-3
    assert res.linear_growth
    assert res.ext.passed and res.ext.max_rel_err <= 1e-6
    assert res.c_recomputed_err <= 1e-6 and res.a_prime_err <= 1e-6
    assert res.shifted_in_range
    assert res.passed


def test_pipeline_schedule_inequalities(pipeline):
    res, _ = pipeline
    t, p, l = res.spectrum, res.schedule.n, res.schedule.l
    assert np.all(2 * t[p] < t[p + l]) and np.all(t[p + l][:-1] < t[p[1:]] / 2)
    k = np.arange(1, p.size + 1)
    assert np.all(k * (t[p + 1] - t[p]) <= t[p] / 100)
    assert np.all((res.schedule.rho > 1) & (res.schedule.rho < 2))


def test_pipeline_report_is_json_ready(pipeline):
    d = pipeline[0].to_dict()
    assert list(d["steps"]) == ["i_schedule", "ii_coefficients", "iii_S_zeros", "iv_split", "v_shift",
                                "vi_masses", "vii_model", "viii_G1", "ix_checks"]
    json.dumps(d)


def test_pipeline_on_integer_spectrum():
    idx = np.arange(-200, 3301)
    res = construct_example(idx, idx.astype(float), K=3)
    t, p = res.spectrum, res.schedule.n
    k = np.arange(1, p.size + 1)
    # as on the integer lattice: the block zero sits near the half-integer and moves k*rho half-steps left
    assert np.all(np.abs(res.s - (t[p] + 0.5)) < 0.05)
    assert np.allclose(t[p + 1] - res.s_shift, k * (t[p + 1] - res.s) * res.schedule.rho, rtol=1e-12)
    assert np.all((res.s_shift > t[p + 1] / 2) & (res.s_shift < t[p + 1]))
    assert res.ext.passed


def test_export_model_json(tmp_path, two_point):
    path = tmp_path / "model.json"
    export_model_json(path, two_point)
    d = json.loads(path.read_text())
    assert d["B_zeros"] == pytest.approx([0.0], abs=1e-15)
