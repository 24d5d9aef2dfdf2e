"""Gap zeros of positive-mass transforms, the L_delta statistic, Boole measure and closeness sums."""
import numpy as np
import pytest
from hypothesis import given, strategies as st

from hclab.cardinal import SampledEntire
from hclab.debranges import build_clark
from hclab.herglotz import (
    CauchyTransform,
    GapZeros,
    LatticeCauchyTransform,
    NoSignChange,
    boole_measure,
    closeness_sums,
    export_zeros_csv,
    l_delta,
    locate_gap_zeros,
)
from hclab.lattice import LatticeSequence, PowerLaw


def test_symmetric_pair_has_midpoint_zero():
    z = locate_gap_zeros(CauchyTransform([0.0, 1.0], [1.0, 1.0]))
    assert z.x[0] == pytest.approx(0.5, abs=1e-12)


def test_unequal_pair_zero_at_one_third():
    # 1/x + 2/(x - 1) = 0  =>  x = 1/3
    z = locate_gap_zeros(CauchyTransform([0.0, 1.0], [1.0, 2.0]))
    assert z.x[0] == pytest.approx(1 / 3, abs=1e-12)


def test_decaying_masses_with_constant_push_zeros_onto_poles():
    n = np.arange(-50, 51)
    z = locate_gap_zeros(CauchyTransform(n.astype(float), 2.0 ** -np.abs(n), b=1.0))
    # the outer zeros sit below ulp of their pole, so read the stored distance
    d = z.distance
    assert np.all((d > 0) & (d < 1))
    assert d[0] < 1e-14 and d[-1] < 1e-14
    assert d[50] > 0.1  # the gap (0, 1) next to the heaviest masses
    assert max(d[:25].max(), d[-25:].max()) < 1e-6


def test_gap_without_poles_reports_no_sign_change():
    f = SampledEntire(LatticeSequence([0], [1.0]))
    ct = LatticeCauchyTransform(f, 3, 6, shift_value=0.0)
    with pytest.raises(NoSignChange):
        locate_gap_zeros(ct)


def test_l_delta_examples():
    k = np.arange(-60, 60)
    assert l_delta(k + 0.5, 0.0, 0.3, 50) == 1.0
    assert l_delta(k + 1e-3, 0.0, 0.1, 50) == 0.0
    with pytest.raises(ValueError):
        l_delta(k + 0.5, 0.0, 0.5, 50)
    with pytest.raises(ValueError):
        l_delta(k + 0.5, 0.0, 0.2, 80)


def test_l_delta_reads_distances_from_gap_zeros():
    # offset far below ulp of the anchor still counts as close
    zeros = GapZeros(np.arange(-3, 3.0), np.arange(-2, 4.0), np.ones(6), np.full(6, 1e-30))
    assert l_delta(zeros, 0.0, 0.01, 2) == 0.0


@given(st.lists(st.floats(0.01, 0.49), min_size=2, max_size=6), st.integers(0, 2**31 - 1))
def test_l_delta_non_increasing_in_delta(deltas, seed):
    rng = np.random.default_rng(seed)
    k = np.arange(-30, 30)
    x = k + rng.uniform(0.0, 1.0, k.size)
    vals = [l_delta(x, 0.0, d, 20) for d in sorted(deltas)]
    assert all(b <= a for a, b in zip(vals, vals[1:]))


def test_boole_single_mass():
    for t in (0.1, 1.0, 7.0):
        assert boole_measure(CauchyTransform([0.0], [1.0]), t) == pytest.approx(2 / t, rel=1e-12)


def test_boole_identity_masses_summing_to_one():
    rng = np.random.default_rng(2)
    c = rng.uniform(0.1, 1.0, 30)
    ct = CauchyTransform(np.sort(rng.uniform(-20, 20, 30)), c / c.sum())
    for N in (5, 10, 20):
        assert boole_measure(ct, 1 / N) == pytest.approx(2 * N, rel=1e-2)


def test_boole_large_threshold_vanishes():
    ct = CauchyTransform([0.0, 1.0, 3.0], [0.2, 0.3, 0.5])
    m = [boole_measure(ct, t) for t in (1e2, 1e4, 1e8)]
    assert m[0] > m[1] > m[2] and m[2] < 1e-7


def test_boole_rejects_bad_input():
    with pytest.raises(ValueError):
        boole_measure(CauchyTransform([0.0], [1.0]), 0.0)
    with pytest.raises(ValueError):
        boole_measure(CauchyTransform([0.0], [1.0], b=0.5), 1.0)


@st.composite
def finite_transforms(draw):
    size = draw(st.integers(1, 12))
    gaps = draw(st.lists(st.floats(0.05, 3.0), min_size=size, max_size=size))
    masses = draw(st.lists(st.floats(0.01, 5.0), min_size=size, max_size=size))
    return CauchyTransform(np.cumsum(gaps) - 5.0, np.asarray(masses))


@given(finite_transforms())
def test_boole_times_threshold_is_constant(ct):
    total = 2 * np.sum(ct.masses)
    for t in (0.1, 0.5, 1.0, 2.0):
        assert boole_measure(ct, t) * t == pytest.approx(total, rel=1e-2)


@given(finite_transforms(), st.floats(0.01, 100.0))
def test_gap_zeros_invariant_under_mass_scaling(ct, scale):
    if ct.poles.size < 2:
        return
    a = locate_gap_zeros(ct).x
    b = locate_gap_zeros(CauchyTransform(ct.poles, scale * ct.masses)).x
    assert np.allclose(a, b, rtol=0, atol=1e-12 * (1 + np.abs(a)))


@given(finite_transforms())
def test_gap_zeros_interlace_and_vanish(ct):
    if ct.poles.size < 2:
        return
    z = locate_gap_zeros(ct)
    t = ct.poles
    assert np.all((t[:-1] < z.x) & (z.x < t[1:]))
    # a sign change brackets each zero within the bisection resolution
    lo, hi = ct(z.x - 1e-9).real, ct(z.x + 1e-9).real
    assert np.all((lo > 0) | (hi < 0) | (np.sign(lo) != np.sign(hi)))


def test_closeness_geometric_approach_converges():
    n = np.arange(1, 41)
    t = np.arange(1, 42).astype(float)
    s = t[1:] - 2.0 ** -n
    rep = closeness_sums(t, s)
    assert rep.sums[0] == pytest.approx(np.sum(2.0 ** -n / s), rel=1e-14)
    assert rep.sums[1] == 0.0
    assert not rep.divergent_trend


def test_closeness_midpoints_flag_divergence():
    t = np.arange(1, 2002).astype(float)
    s = t[:-1] + 0.5
    rep = closeness_sums(t, s)
    assert rep.sums[0] == pytest.approx(np.sum(0.5 / s), rel=1e-14)
    assert rep.divergent_trend


def test_closeness_on_clark_model_zeros():
    t = np.arange(-30, 31).astype(float)
    m = build_clark(t, 1.0 / (1.0 + t ** 2))
    s = m.B_zeros
    rep = closeness_sums(t, s)
    pos = s > 0
    neg = s < 0
    direct_pos = sum((t[i + 1] - s[i]) / s[i] for i in np.nonzero(pos)[0])
    direct_neg = sum((s[i] - t[i]) / -s[i] for i in np.nonzero(neg)[0])
    assert rep.sums == pytest.approx((direct_pos, direct_neg), rel=1e-12)
    assert np.all(np.isfinite(rep.sums))


def test_closeness_rejects_bad_zeros():
    with pytest.raises(ValueError, match="gap 1"):
        closeness_sums([0.0, 1.0, 2.0], [0.5, 2.5])
    with pytest.raises(ValueError):
        closeness_sums([0.0, 1.0], [0.5, 0.7])


def test_lattice_transform_zeros_match_finite_transform():
    # one mass at 0 plus the exact n^-2 tail; compare with an explicit long window
    f = SampledEntire(LatticeSequence([0], [1.0], PowerLaw(2)))
    lct = locate_gap_zeros(LatticeCauchyTransform(f, 5, 12))
    n = np.arange(-40000, 40001)
    c = np.where(n == 0, 1.0, 1.0 / np.where(n == 0, 1, n).astype(float) ** 2)
    ct = CauchyTransform(n.astype(float), c)
    idx = np.arange(5, 12) + 40000
    ref = locate_gap_zeros(ct, idx).x
    assert np.allclose(lct.x, ref, atol=1e-6)


def test_export_zeros_csv(tmp_path):
    z = locate_gap_zeros(CauchyTransform([0.0, 1.0], [1.0, 2.0]))
    path = tmp_path / "zeros.csv"
    export_zeros_csv(path, z, start_index=4)
    rows = path.read_text().splitlines()
    assert rows[0] == "n,t_n,zero_n,dist"
    assert rows[1].startswith("4,0.0,0.333333333333")
