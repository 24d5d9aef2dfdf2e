"""Assembled counterexample: zero sets, growth, interpolation identity and the defect certificate."""
import numpy as np
import pytest

from hclab.counterexample import (
    LogAbs,
    bundle_to_dict,
    defect_certificate,
    export_lattice_csv,
    g_lattice_profile,
    growth_ratio,
    lattice_residue_check,
    s_interlace,
    sensitivity_table,
    solve_and_build,
    verify_interp_6c,
)
from hclab.pair_sigma import residue_check, s_diagonal_check
from hclab.reporting import dumps

Y_GRID = np.arange(1.0, 65.0)


def gap_index(split):
    """Left end ``k`` of the unit interval ``(k, k+1)`` holding each split zero."""
    m = np.asarray(split.m)
    return np.where(np.asarray(split.u).real > 0, m, m - 1)


def test_scheduled_zeros_are_half_integers(bundle4):
    assert np.max(np.abs(bundle4.scheduled_zeros - (bundle4.schedule.n + 0.5))) <= 1e-9


def test_one_unscheduled_zero_per_window_interval(bundle4):
    W = bundle4.window
    k = gap_index(bundle4.lambda2_split)
    k = k[(k >= -W) & (k < W)]
    assert np.array_equal(k, np.arange(-W, W))


def test_zero_sets_are_disjoint_and_off_lattice(bundle4):
    l1, l2, s = bundle4.lambda1, bundle4.lambda2, bundle4.s
    assert np.allclose(l1, s - bundle4.schedule.k ** 2, rtol=0, atol=0)
    assert not np.intersect1d(l1, l2).size and not np.intersect1d(l1, s).size
    assert not np.intersect1d(l2, s).size
    assert np.all(np.asarray(bundle4.lambda2_split.u) != 0)


def test_single_block_zeros_match_dense_sign_scan():
    b = solve_and_build(1, window=32)
    step = 1e-4
    for lo, hi in ((-32, 32), (b.schedule.n[0] - 20, b.schedule.n[0] + 20)):
        x = np.arange(lo, hi, step) + step / 2
        v = b.h(x.astype(complex)).real
        cross = np.nonzero(np.sign(v[1:]) != np.sign(v[:-1]))[0]
        scanned = x[cross] + step / 2
        known = np.concatenate([b.lambda2, b.scheduled_zeros])
        known = np.sort(known[(known > lo + step) & (known < hi - step)])
        assert scanned.size == known.size
        assert np.max(np.abs(scanned - known)) <= step


def test_g_profile(bundle10):
    prof = g_lattice_profile(bundle10)
    assert prof.ratio <= 10
    assert prof.linear_growth and prof.growth_constant > 0
    assert np.all(np.diff(prof.cumulative) > 0)
    assert prof.tail_ok
    assert prof.passed


def test_interpolation_identity_random_points(bundle4):
    rng = np.random.default_rng(8)
    W = bundle4.window
    z = rng.uniform(-W / 2, W / 2, 20) + 1j * rng.uniform(0.5, 2.0, 20)
    rep = verify_interp_6c(bundle4, z)
    assert rep.max_rel_err <= 1e-6 and rep.passed


def test_interpolation_identity_on_imaginary_axis(bundle4):
    rep = verify_interp_6c(bundle4, 1j * Y_GRID)
    assert rep.passed
    band = growth_ratio(LogAbs(bundle4.log_abs_G1S1), Y_GRID)
    assert band.band_ratio <= 10


def test_interpolation_rejects_lattice_samples(bundle4):
    with pytest.raises(ValueError):
        verify_interp_6c(bundle4, [3.0 + 1e-5])


def test_lattice_residues(bundle4):
    assert lattice_residue_check(bundle4) <= 1e-8


def test_pair_identities_on_counterexample(bundle4):
    ps = bundle4.pair_system()
    assert residue_check(ps).max_rel_err <= 1e-8
    diag = s_diagonal_check(ps)
    # the pair system carries the samples a'_n = h(n) = pi (-1)^n a_n, so S(n) = (-1)^n |a'_n|^2 / pi
    n = np.arange(-5, 6)
    assert np.allclose(ps.a.at(n), np.pi * (-1.0) ** n * bundle4.a.at(n), rtol=1e-15)
    assert diag.passed and diag.kappa == pytest.approx(1 / np.pi, rel=1e-8)


def test_S_on_lattice_is_pi_alternating_square(bundle4):
    n = np.arange(-bundle4.window, bundle4.window + 1)
    a = bundle4.a.at(n).real
    direct = bundle4.S(n.astype(complex)).real
    expect = np.pi * np.where(n % 2 == 0, 1.0, -1.0) * a ** 2
    assert np.max(np.abs(direct - expect) / np.abs(expect)) <= 1e-8


def test_S_zeros_interlace(bundle4):
    rep = s_interlace(bundle4)
    assert rep.passed and rep.intervals_checked >= 2 * bundle4.window


def test_growth_calibration_with_sine():
    rep = growth_ratio(lambda z: np.sin(np.pi * z), Y_GRID)
    assert np.allclose(rep.values / Y_GRID, 0.5 * (1 - np.exp(-2 * np.pi * Y_GRID)), rtol=1e-13)
    assert rep.band_ratio == pytest.approx(Y_GRID[-1] / Y_GRID[0] * 0.5 / (0.5 * (1 - np.exp(-2 * np.pi))))


def test_growth_bands_for_h_and_G(bundle4):
    assert growth_ratio(LogAbs(bundle4.log_abs_h), Y_GRID).band_ratio <= 10
    assert growth_ratio(LogAbs(bundle4.log_abs_G), Y_GRID).band_ratio <= 10


def test_growth_log_route_matches_direct_values(bundle4):
    y = np.arange(1.0, 21.0)
    via_log = growth_ratio(LogAbs(bundle4.log_abs_G), y).values
    direct = growth_ratio(bundle4.G, y).values
    assert np.allclose(via_log, direct, rtol=1e-10)


def test_growth_rejects_bad_grid():
    with pytest.raises(ValueError):
        growth_ratio(np.sin, [2.0, 1.0])


def test_quotient_routes_agree(bundle4):
    z = np.array([3.3 + 0.5j, -17.2 + 2j, 1000.1 + 1j, 50000.0 + 3j])
    r1, r2 = bundle4.R(z), bundle4.R_partial_fractions(z)
    assert np.max(np.abs(r1 - r2) / np.abs(r1)) <= 1e-12


def test_certificate_and_control(bundle10):
    cert = defect_certificate(bundle10, per_side=12)
    assert cert.report.lambda1.size >= 10 and cert.report.lambda2.size >= 10
    assert cert.report.passed
    assert np.max(cert.lambda2_h_abs) <= 1e-9
    assert cert.control_residual > 0.1
    assert cert.passed


def test_no_extra_real_zeros_of_G(bundle4):
    lo, hi = -64.0, 64.0
    known = np.concatenate([bundle4.lambda1, bundle4.lambda2])
    known = np.sort(known[(known > lo) & (known < hi)])
    edges = np.concatenate([[lo], known, [hi]])
    signs = []
    for a, b in zip(edges[:-1], edges[1:]):
        x = np.linspace(a, b, 42)[1:-1]
        s = np.sign(bundle4.G(x.astype(complex)).real)
        assert np.all(s == s[0]), f"sign change inside ({a}, {b})"
        signs.append(s[0])
    assert np.all(np.array(signs[1:]) == -np.array(signs[:-1]))


def test_bundle_reproducible(bundle4):
    again = solve_and_build(4)
    assert dumps(bundle_to_dict(again)) == dumps(bundle_to_dict(bundle4))


def test_export_lattice_csv(tmp_path, bundle4):
    path = tmp_path / "lattice.csv"
    export_lattice_csv(path, bundle4)
    rows = path.read_text().splitlines()
    assert rows[0] == "n,a_n,G_n,h_n"
    assert len(rows) == 2 * bundle4.window + 2


def test_sensitivity_table_small():
    rows = sensitivity_table(Ks=(3, 4), window=64)
    assert [r["K"] for r in rows] == [3, 4]
    assert all(r["iterations"] <= 25 and r["G_ratio"] <= 10 for r in rows)


def test_single_block_window_too_small_for_schedule_is_still_built():
    b = solve_and_build(1, window=8)
    assert b.lambda2.size > 0 and b.scheduled_zeros.size == 1
