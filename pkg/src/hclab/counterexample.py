"""Non-hereditarily complete kernel system: assembly and verification.

Starting from the solved block system, ``h = sin(pi z) sum a_n/(z-n)`` and
``S = sin(pi z) sum a_n**2/(z-n)`` share the zeros ``s_k = n_k + 1/2``.
With ``S2`` the product over ``{s_k}``, ``G1`` the product over
``{s_k - k**2}`` and

    G = h * G1 / S2,

the zero set of ``G`` splits into ``Lambda_1 = {s_k - k**2}`` and
``Lambda_2`` = zeros of ``h`` other than the ``s_k``; ``h`` is orthogonal to
the kernels at ``Lambda_2`` and to ``G/(z - lam)`` for ``lam`` in
``Lambda_1``.

Lattice data is kept on a dense window ``[-W, W]`` plus a neighbourhood of
every scheduled block; outside these, ``G(n) = pi (-1)**n n**-2 R(n)`` with
the rational function ``R = G1/S2`` bounded explicitly, so every sum over
``G(n)`` comes with a remainder bound.
"""
from __future__ import annotations

import csv
from dataclasses import dataclass, field

import numpy as np

from .cardinal import SampledEntire, coefficients_from_masses, kernel_function
from .contraction import (
    BlockState,
    Schedule,
    auto_schedule,
    base_coefficients,
    solve_fixed_point,
    squared_coefficients,
    verify_vanishing,
)
from .herglotz import LatticeCauchyTransform, locate_gap_zeros
from .lattice import Envelope, LatticeSequence, _complement_intervals, _power_mass, cauchy_sum, product, sinpi, split, SplitPoint
from .pair_sigma import DefectReport, InterlaceReport, PairSystem, Partition, defect_report, interlace_check
from .products import ProductFunction

DEFAULT_WINDOW = 1024
BAND_FACTOR = 10.0
SCHEDULED_ZERO_TOL = 1e-9
CAUCHY_TAIL_TOL = 1e-3
INTERP_RTOL = 1e-6


def _neighbourhood(k: int) -> int:
    return max(4 * k * k, 32)


@dataclass(frozen=True, eq=False)
class CounterexampleBundle:
    """Everything derived from one solved schedule.

    ``window_indices`` lists the integers where lattice data is explicit;
    ``G_lattice`` is the sequence ``G(n)`` (explicit there, enveloped
    elsewhere).
    """

    schedule: Schedule
    state: BlockState
    iterations: int
    a: LatticeSequence
    h: SampledEntire
    S: SampledEntire
    S2: ProductFunction
    G1: ProductFunction
    lambda1: np.ndarray
    lambda2: np.ndarray
    lambda2_split: SplitPoint
    scheduled_zeros: np.ndarray
    S_zeros: np.ndarray
    window: int
    window_indices: np.ndarray
    G_lattice: LatticeSequence
    R_infinity: float
    residues: np.ndarray
    trace: list = field(default_factory=list)
    S_zeros_split: SplitPoint | None = None

    @property
    def K(self) -> int:
        return self.schedule.K

    @property
    def s(self) -> np.ndarray:
        return self.schedule.s

    def R(self, z) -> np.ndarray:
        """``G1/S2`` through the products."""
        z = np.atleast_1d(np.asarray(z, dtype=complex))
        return np.exp(self.G1.log(z) - self.S2.log(z))

    def R_partial_fractions(self, z) -> np.ndarray:
        """``G1/S2`` through ``R_inf + sum_k rho_k/(z - s_k)``."""
        z = np.atleast_1d(np.asarray(z, dtype=complex))
        return self.R_infinity + (1.0 / (z[:, None] - self.s[None, :])) @ self.residues

    def G(self, z) -> np.ndarray:
        """``h G1 / S2`` with the removable singularities at ``s_k`` filled in."""
        z = np.atleast_1d(np.asarray(z, dtype=complex))
        out = np.empty(z.shape, dtype=complex)
        dist = np.abs(z[:, None] - self.s[None, :])
        near = np.any(dist < 1e-8, axis=1)
        if np.any(~near):
            zz = z[~near]
            out[~near] = self.h(zz) * self.R(zz)
        for i in np.nonzero(near)[0]:
            k = int(np.argmin(dist[i]))
            out[i] = _h_prime_at(self.h, self.s[k]) * self.residues[k]
        return out

    def S1(self, z) -> np.ndarray:
        """``S/S2``; only evaluated off ``{s_k}``."""
        z = np.atleast_1d(np.asarray(z, dtype=complex))
        return self.S(z) * np.exp(-self.S2.log(z))

    def G2(self, z) -> np.ndarray:
        """``h/S2``, the generating function of ``Lambda_2``."""
        z = np.atleast_1d(np.asarray(z, dtype=complex))
        return self.h(z) * np.exp(-self.S2.log(z))

    def log_abs_h(self, z) -> np.ndarray:
        return _log_abs_cardinal(self.h, z)

    def log_abs_G(self, z) -> np.ndarray:
        z = np.atleast_1d(np.asarray(z, dtype=complex))
        return _log_abs_cardinal(self.h, z) + self.G1.log_abs(z) - self.S2.log_abs(z)

    def log_abs_G1S1(self, z) -> np.ndarray:
        z = np.atleast_1d(np.asarray(z, dtype=complex))
        return _log_abs_cardinal(self.S, z) + self.G1.log_abs(z) - self.S2.log_abs(z)

    def pair_system(self) -> PairSystem:
        """Lattice identities on the dense window: ``S1, S2, G1, G2`` with coefficients ``a' = conj(h(n))``."""
        W = self.window
        zs = self.S_zeros[np.abs(self.S_zeros) <= W]
        # scheduled zeros inside the window belong to S2
        zs = zs[np.min(np.abs(zs[:, None] - self.s[None, :]), axis=1) > SCHEDULED_ZERO_TOL]
        return PairSystem(
            coefficients_from_masses(self.h.masses),
            (-W, W), self.S1, self.S2, self.G1, self.G2,
            zeros_S1=zs,
            zeros_S2=self.s,
        )


def _h_prime_at(f: SampledEntire, x: float) -> complex:
    """``f'(x)`` at a zero ``x`` of the partial-fraction sum: ``sin(pi x) * sum c_n/(x-n)'``."""
    m, u = split(np.array([x], dtype=complex))
    return complex(sinpi(m, u)[0] * f.cauchy(m, u, deriv=1)[0])


def _log_abs_cardinal(f: SampledEntire, z) -> np.ndarray:
    z = np.atleast_1d(np.asarray(z, dtype=complex))
    m, u = split(z - f.alpha)
    y = np.abs(z.imag)
    # log|sin(pi z)| = pi |y| + log|(1 - e^{2 pi i z'})/2| with z' in the upper half-plane
    w = np.where(z.imag >= 0, u, np.conj(u))
    log_sin = np.pi * y + np.log(np.abs(1.0 - np.exp(2j * np.pi * w)) / 2.0)
    return log_sin + np.log(np.abs(f.cauchy(m, u)))


# ---------------------------------------------------------------------------
# construction


def _window_indices(sch: Schedule, W: int) -> np.ndarray:
    parts = [np.arange(-W, W + 1)]
    for k, nk in enumerate(sch.n, start=1):
        L = _neighbourhood(k)
        parts.append(np.arange(nk - L - k * k, nk + L + 1))
    return np.unique(np.concatenate(parts))


def _runs(idx: np.ndarray) -> list[tuple[int, int]]:
    brk = np.nonzero(np.diff(idx) != 1)[0]
    starts = np.concatenate(([idx[0]], idx[brk + 1]))
    ends = np.concatenate((idx[brk], [idx[-1]]))
    return [(int(a), int(b)) for a, b in zip(starts, ends)]


def _gap_zeros(f: SampledEntire, runs) -> SplitPoint:
    """Zeros of ``f`` in every gap of the runs, as nearest pole plus signed offset."""
    ms, us = [], []
    for lo, hi in runs:
        if hi > lo:
            z = locate_gap_zeros(LatticeCauchyTransform(f, lo, hi))
            ms.append(z.anchor.astype(np.int64))
            us.append(z.direction * z.distance)
    return SplitPoint(np.concatenate(ms), np.concatenate(us))


def build_bundle(sch: Schedule, r: BlockState | None = None, window: int = DEFAULT_WINDOW,
                 tol: float = 1e-13) -> CounterexampleBundle:
    """Assemble ``h, S, S2, G1, G`` and both frequency sets from a schedule.

    When ``r`` is omitted the fixed point is solved here with ``tol``.
    """
    if sch.K < 1:
        raise ValueError("need at least one block")
    iterations, trace = 0, []
    if r is None:
        fp = solve_fixed_point(sch, tol=tol)
        r, iterations, trace = fp.state, fp.iterations, fp.trace
    a = base_coefficients(sch, r)
    h = SampledEntire(a)
    S = SampledEntire(squared_coefficients(a))
    k = sch.k
    s = sch.s.astype(float)
    lam1 = s - k ** 2
    # half-integer minus integer is never an integer
    assert np.all(lam1 != np.rint(lam1)), "shifted zeros landed on the lattice"
    if np.any(lam1 <= 0):
        raise ValueError("shifted zeros s_k - k^2 must stay positive")
    S2 = ProductFunction(s)
    G1 = ProductFunction(lam1)

    idx = _window_indices(sch, window)
    runs = _runs(idx)
    zh_split = _gap_zeros(h, runs)
    zh = zh_split.value.real
    zS_split = _gap_zeros(S, runs)
    zS = zS_split.value.real
    # split off the scheduled zeros
    sched = np.empty(sch.K)
    keep = np.ones(zh.size, bool)
    for i, (nk, sk) in enumerate(zip(sch.n, s)):
        j = np.nonzero((zh > nk) & (zh < nk + 1))[0]
        if j.size != 1:
            raise RuntimeError(f"scheduled interval ({nk}, {nk + 1}) not covered by the window")
        sched[i] = zh[j[0]]
        keep[j[0]] = False
        if abs(sched[i] - sk) > SCHEDULED_ZERO_TOL:
            raise RuntimeError(f"zero of h in ({nk}, {nk + 1}) is {sched[i]!r}, not {sk}")
    lam2 = zh[keep]
    lam2_split = SplitPoint(zh_split.m[keep], zh_split.u[keep].real)
    if np.any(np.isin(lam1, lam2)):
        raise RuntimeError("Lambda_1 and Lambda_2 intersect")

    R_inf = float(np.prod(s / lam1))
    rho = np.array([G1(sk) / S2.derivative_at_zero(i) for i, sk in enumerate(s)], dtype=complex).real

    sg = np.where(idx % 2 == 0, 1.0, -1.0)
    Rn = np.exp(G1.log(idx.astype(complex)) - S2.log(idx.astype(complex))).real
    Gn = np.pi * sg * a.at(idx).real * Rn
    unlisted_dist = np.array([_unlisted_distance(idx, sk) for sk in s])
    C_R = abs(R_inf) + float(np.sum(np.abs(rho) / unlisted_dist))
    G_lat = LatticeSequence(idx, Gn, envelope=Envelope(np.pi * C_R, 2.0))
    return CounterexampleBundle(sch, r, iterations, a, h, S, S2, G1, lam1, lam2, lam2_split, sched, zS,
                                window, idx, G_lat, R_inf, rho, trace, zS_split)


def _unlisted_distance(idx: np.ndarray, x: float) -> float:
    """Distance from ``x`` to the nearest integer not in ``idx``."""
    n = int(np.floor(x))
    lo, hi = n, n + 1
    def is_listed(v):
        p = np.searchsorted(idx, v)
        return p < idx.size and idx[p] == v

    while is_listed(lo):
        lo -= 1
    while is_listed(hi):
        hi += 1
    return float(min(x - lo, hi - x))


def solve_and_build(K: int, base_M: int | None = None, tol: float = 1e-13,
                    window: int = DEFAULT_WINDOW, a0: float = 1.0) -> CounterexampleBundle:
    """Schedule (automatic ``base_M`` if not given), fixed point and bundle in one call."""
    sch = auto_schedule(K, a0=a0) if base_M is None else Schedule.geometric(K, base_M, a0)
    return build_bundle(sch, window=window, tol=tol)


# ---------------------------------------------------------------------------
# reports


@dataclass(frozen=True)
class GProfileReport:
    G_at_nk: np.ndarray
    block_sums: np.ndarray
    block_bounds: np.ndarray
    weighted_total: float
    weighted_tail: float
    weighted_tail_bound: float
    band_factor: float = BAND_FACTOR

    @property
    def ratio(self) -> float:
        g = np.abs(self.G_at_nk)
        return float(np.max(g) / np.min(g))

    @property
    def cumulative(self) -> np.ndarray:
        return np.cumsum(self.block_sums)

    @property
    def growth_constant(self) -> float:
        """Fitted ``c`` in ``P_k >= c k``: the smallest block increment."""
        return float(np.min(self.block_sums[1:])) if self.block_sums.size > 1 else float(self.block_sums[0])

    @property
    def linear_growth(self) -> bool:
        inc = self.block_sums[1:]
        return bool(inc.size and np.min(inc) > 0 and np.min(inc) >= 0.1 * np.max(inc))

    @property
    def tail_ok(self) -> bool:
        return self.weighted_tail + self.weighted_tail_bound < CAUCHY_TAIL_TOL

    @property
    def passed(self) -> bool:
        return self.ratio <= self.band_factor and self.linear_growth and self.tail_ok

    def to_dict(self) -> dict:
        return {
            "abs_G_nk": [float(v) for v in np.abs(self.G_at_nk)],
            "ratio_max_min": self.ratio,
            "block_sums": [float(v) for v in self.block_sums],
            "cumulative": [float(v) for v in self.cumulative],
            "growth_constant": self.growth_constant,
            "linear_growth": self.linear_growth,
            "weighted_total": self.weighted_total,
            "weighted_tail": self.weighted_tail,
            "weighted_tail_bound": self.weighted_tail_bound,
            "passed": self.passed,
        }


def g_lattice_profile(b: CounterexampleBundle) -> GProfileReport:
    """Size of ``G`` on the lattice: values at ``n_k``, block sums of ``|G|**2``, weighted sum.

    Block ``k`` collects the integers between the midpoints of consecutive
    scheduled indices (block 0 is everything closer to the origin than
    ``n_1/2``).  The weighted tail is the part of ``sum |G(n)|**2/(1+n)**2``
    beyond ``|n| > W/2``.
    """
    G = b.G_lattice
    n = G.indices
    v2 = np.abs(G.values) ** 2
    edges = np.concatenate([[0.0], 0.5 * (b.schedule.n[:-1] + b.schedule.n[1:]), [np.inf]])
    edges[0] = b.schedule.n[0] / 2.0
    an = np.abs(n)
    blocks = [float(np.sum(v2[an < edges[0]]))]
    for lo, hi in zip(edges[:-1], edges[1:]):
        blocks.append(float(np.sum(v2[(an >= lo) & (an < hi)])))
    # unlisted terms: |G(n)|^2 <= C^2 n^-4, summed over all unlisted n
    C = G.envelope.C
    iv = _complement_intervals(n)
    unlisted_sq = C ** 2 * _power_mass(iv, 4.0)
    bounds = np.full(len(blocks), unlisted_sq)
    w = v2 / (1.0 + an) ** 2
    tail_sel = an > b.window / 2
    tail = float(np.sum(w[tail_sel]))
    tail_bound = C ** 2 * _power_mass(iv, 6.0)
    Gnk = G.at(b.schedule.n)
    return GProfileReport(Gnk, np.array(blocks), bounds, float(np.sum(w)), tail, tail_bound)


@dataclass(frozen=True)
class InterpReport:
    z: np.ndarray
    lhs: np.ndarray
    rhs: np.ndarray
    tail_bound: np.ndarray
    rtol: float = INTERP_RTOL

    @property
    def rel_err(self) -> np.ndarray:
        return np.abs(self.lhs - self.rhs) / np.abs(self.lhs)

    @property
    def rel_bound(self) -> np.ndarray:
        return self.tail_bound / np.abs(self.lhs)

    @property
    def max_rel_err(self) -> float:
        return float(np.max(self.rel_err))

    @property
    def passed(self) -> bool:
        return bool(np.all(self.rel_err <= self.rtol + self.rel_bound))

    def to_dict(self) -> dict:
        return {
            "samples": int(self.z.size),
            "max_rel_err": self.max_rel_err,
            "max_rel_tail_bound": float(np.max(self.rel_bound)),
            "passed": self.passed,
        }


def verify_interp_6c(b: CounterexampleBundle, z_samples) -> InterpReport:
    """Compare ``pi G1(z) S1(z) / sin(pi z)`` with ``sum (-1)**n a_n G(n)/(z-n)``.

    The left side goes through the products and the closed-form ``S``; the
    right side is a lattice sum over the stored ``G(n)`` plus a remainder
    bound.
    """
    z = np.atleast_1d(np.asarray(z_samples, dtype=complex))
    m, u = split(z)
    if np.any(np.abs(u) < 1e-3):
        raise ValueError("sample too close to a lattice point")
    if np.any(np.min(np.abs(z[:, None] - b.s[None, :]), axis=1) < 1e-3):
        raise ValueError("sample too close to a zero of S2")
    lhs = np.pi * b.G1(z) * b.S1(z) / sinpi(m, u)
    seq = product(b.a.conj_alternate(), b.G_lattice)  # (-1)^n a_n G(n), a_n real
    cs = cauchy_sum(seq, z)
    return InterpReport(z, lhs, np.asarray(cs.value), np.asarray(cs.tail_bound, dtype=float))


@dataclass(frozen=True)
class RunInterlace:
    """Interlacing of the zeros of ``S`` over every explicit run of the window."""

    runs: list
    reports: list

    @property
    def violations(self) -> list[int]:
        return [k for r in self.reports for k in r.violations]

    @property
    def intervals_checked(self) -> int:
        return int(sum(r.counts.size for r in self.reports))

    @property
    def passed(self) -> bool:
        return not self.violations

    def to_dict(self) -> dict:
        return {"runs": [list(r) for r in self.runs], "intervals_checked": self.intervals_checked,
                "violations": self.violations, "passed": self.passed}


def s_interlace(b: CounterexampleBundle) -> RunInterlace:
    """One zero of ``S`` per unit interval on the dense window and on every block neighbourhood."""
    runs = [r for r in _runs(b.window_indices) if r[1] > r[0]]
    zs = b.S_zeros_split
    m = np.asarray(zs.m)
    u = np.asarray(zs.u).real
    reps = []
    for lo, hi in runs:
        k = np.where(u > 0, m, m - 1)
        sel = (k >= lo) & (k < hi)
        reps.append(interlace_check(SplitPoint(m[sel], u[sel]), 0.0, (lo, hi - 1)))
    return RunInterlace(runs, reps)


def lattice_residue_check(b: CounterexampleBundle, n=None) -> float:
    """Max relative error of ``G1(n) S1(n) = a_n G(n)`` on the window."""
    n = np.arange(-b.window, b.window + 1) if n is None else np.asarray(n)
    z = n.astype(complex)
    lhs = b.G1(z) * b.S1(z)
    rhs = b.a.at(n) * b.G_lattice.at(n)
    return float(np.max(np.abs(lhs - rhs) / np.abs(rhs)))


@dataclass(frozen=True)
class GrowthReport:
    y: np.ndarray
    values: np.ndarray
    band_factor: float = BAND_FACTOR

    @property
    def band_ratio(self) -> float:
        return float(np.max(self.values) / np.min(self.values))

    @property
    def passed(self) -> bool:
        return self.band_ratio <= self.band_factor

    def to_dict(self) -> dict:
        return {"y": [float(v) for v in self.y], "y_abs_f_exp": [float(v) for v in self.values],
                "band_ratio": self.band_ratio, "passed": self.passed}


def growth_ratio(f, y_list, type_rate: float = np.pi) -> GrowthReport:
    """``y |f(iy)| exp(-type_rate y)`` per ``y``, computed from ``log|f|``.

    ``f`` is either a callable returning ``log|f(z)|`` through a
    ``log_abs`` attribute, or a plain callable returning values.
    """
    y = np.asarray(y_list, dtype=float)
    if np.any(y <= 0) or np.any(np.diff(y) <= 0):
        raise ValueError("y values must be positive and increasing")
    z = 1j * y
    if hasattr(f, "log_abs"):
        la = np.asarray(f.log_abs(z), dtype=float)
    else:
        with np.errstate(over="raise"):
            la = np.log(np.abs(np.asarray(f(z))))
    return GrowthReport(y, np.exp(np.log(y) + la - type_rate * y))


class LogAbs:
    """Wrap a ``log|f|`` function so that :func:`growth_ratio` uses it."""

    def __init__(self, fn):
        self.log_abs = fn


@dataclass(frozen=True)
class Certificate:
    report: DefectReport
    control: DefectReport
    lambda2_h_abs: np.ndarray
    control_floor: float = 0.1

    @property
    def control_residual(self) -> float:
        return self.control.residual_sup

    @property
    def passed(self) -> bool:
        return (self.report.passed and self.report.lambda1.size >= 10 and self.report.lambda2.size >= 10
                and self.control_residual >= self.control_floor)

    def to_dict(self) -> dict:
        d = self.report.to_dict()
        d["max_abs_h_on_lambda2"] = float(np.max(self.lambda2_h_abs))
        d["control_residual_sup"] = self.control_residual
        d["control_floor"] = self.control_floor
        d["passed"] = self.passed
        return d


def _sample(points: np.ndarray, count: int) -> np.ndarray:
    if points.size <= count:
        return points
    pos = np.unique(np.linspace(0, points.size - 1, count).round().astype(int))
    return points[pos]


def defect_certificate(b: CounterexampleBundle, per_side: int = 12, section: int = 64) -> Certificate:
    """Orthogonality residuals of ``h`` on sampled ``Lambda_1``, ``Lambda_2`` and a ``K_0`` control."""
    l1 = _sample(b.lambda1, per_side)
    pos = np.arange(b.lambda2.size)
    near = pos[np.argsort(np.abs(b.lambda2), kind="stable")][: per_side // 2]
    far = _sample(pos[np.abs(b.lambda2) > b.window], per_side - near.size)
    sel = np.sort(np.concatenate([near, far]))
    l2 = b.lambda2[sel]
    part = Partition(l1, l2, SplitPoint(b.lambda2_split.m[sel], b.lambda2_split.u[sel]))
    rep = defect_report(part, b.h, b.G_lattice, section=section)
    ctrl = defect_report(part, kernel_function(0.0, 0, 0), b.G_lattice, section=section)
    return Certificate(rep, ctrl, np.abs(b.h(l2.astype(complex))))


def sensitivity_table(Ks=range(3, 9), window: int = 256, tol: float = 1e-13) -> list[dict]:
    """One row per block count: schedule size, iterations and the main certificate numbers."""
    rows = []
    for K in Ks:
        b = solve_and_build(K, window=window, tol=tol)
        prof = g_lattice_profile(b)
        van = verify_vanishing(b.schedule, b.state)
        rows.append({
            "K": int(K),
            "base_M": int(b.schedule.base_M),
            "iterations": int(b.iterations),
            "r_dist": b.state.distance_to_center(),
            "vanishing_sup": van.to_dict()["residual_sup"],
            "G_ratio": prof.ratio,
            "growth_constant": prof.growth_constant,
        })
    return rows


# ---------------------------------------------------------------------------
# export


def bundle_to_dict(b: CounterexampleBundle) -> dict:
    W = b.window
    n = np.arange(-W, W + 1)
    return {
        "schedule": {"n_k": [int(v) for v in b.schedule.n], "base_M": b.schedule.base_M,
                     "horizon": int(b.schedule.horizon), "a0": float(b.schedule.a0)},
        "r": [float(v) for v in b.state.r],
        "iterations": int(b.iterations),
        "window": int(W),
        "a_window": {"n_min": int(-W), "values": [float(v) for v in b.a.at(n).real]},
        "lambda1": [float(v) for v in b.lambda1],
        "lambda2": [float(v) for v in b.lambda2],
    }


def export_lattice_csv(path, b: CounterexampleBundle) -> None:
    """Rows ``(n, a_n, G(n), h(n))`` on the dense window."""
    n = np.arange(-b.window, b.window + 1)
    a = b.a.at(n).real
    G = b.G_lattice.at(n).real
    h = b.h(n.astype(complex)).real
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh)
        w.writerow(["n", "a_n", "G_n", "h_n"])
        for row in zip(n, a, G, h):
            w.writerow([int(row[0])] + [repr(float(v)) for v in row[1:]])


__all__ = [
    "CounterexampleBundle", "ProductFunction", "build_bundle", "solve_and_build", "g_lattice_profile",
    "verify_interp_6c", "lattice_residue_check", "growth_ratio", "LogAbs", "defect_certificate",
    "sensitivity_table", "bundle_to_dict", "export_lattice_csv", "GProfileReport", "InterpReport",
    "GrowthReport", "Certificate", "RunInterlace", "s_interlace",
]
