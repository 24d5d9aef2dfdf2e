"""Positive-mass Cauchy transforms: gap zeros, Boole measure, displacement statistics.

A transform ``s(x) = b + sum_n c_n/(x - t_n)`` with ``c_n > 0`` decreases on
every gap ``(t_n, t_{n+1})`` from ``+inf`` to ``-inf``, so each gap holds
exactly one zero.  Zeros are located by bisection on the offset from the
nearer pole, which keeps full relative precision for zeros that crowd a
pole.
"""
from __future__ import annotations

import csv
from dataclasses import dataclass
from typing import Callable

import numpy as np
from scipy.optimize import brentq

from .cardinal import SampledEntire

_EPS = np.finfo(float).eps


@dataclass(frozen=True, eq=False)
class CauchyTransform:
    """``s(x) = b + sum_n c_n / (x - t_n)`` over finitely many poles."""

    poles: np.ndarray
    masses: np.ndarray
    b: float = 0.0

    def __post_init__(self):
        t = np.asarray(self.poles, dtype=float).ravel()
        c = np.asarray(self.masses, dtype=float).ravel()
        if t.shape != c.shape:
            raise ValueError("poles and masses differ in length")
        if np.any(np.diff(t) <= 0):
            raise ValueError("poles must be strictly increasing")
        if np.any(c <= 0):
            raise ValueError("masses must be positive")
        object.__setattr__(self, "poles", t)
        object.__setattr__(self, "masses", c)

    def __call__(self, x):
        x = np.atleast_1d(np.asarray(x, dtype=complex))
        v = self.b + (1.0 / (x[:, None] - self.poles[None, :])) @ self.masses
        return v

    @property
    def gaps(self) -> tuple[np.ndarray, np.ndarray]:
        return self.poles[:-1], self.poles[1:]

    def offset_evaluator(self, gap_index: np.ndarray) -> Callable:
        """Return ``f(direction, d)`` giving ``s`` at ``left + d`` (direction +1) or ``right - d`` (-1)."""
        left, right = self.poles[gap_index], self.poles[gap_index + 1]
        t, c = self.poles, self.masses

        def f(direction, d, sel=None):
            sel = np.arange(left.size) if sel is None else sel
            out = np.empty(sel.size)
            chunk = max(1, 2_000_000 // max(c.size, 1))
            for s in range(0, sel.size, chunk):
                j = sel[s:s + chunk]
                dj = direction[s:s + chunk]
                anchor = np.where(dj > 0, left[j], right[j])
                diff = (anchor[:, None] - t[None, :]) + (dj * d[s:s + chunk])[:, None]
                out[s:s + chunk] = (1.0 / diff) @ c
            return out + self.b

        return f


@dataclass(frozen=True, eq=False)
class LatticeCauchyTransform:
    """``sum_n c_n / (x - n - alpha)`` for a cardinal function, restricted to a window of gaps.

    Poles are ``n + alpha`` for ``n`` in ``[n_lo, n_hi]``; masses outside
    the window still contribute exactly through the function's tail law.
    """

    f: SampledEntire
    n_lo: int
    n_hi: int
    shift_value: float = 0.0

    @property
    def poles(self) -> np.ndarray:
        return np.arange(self.n_lo, self.n_hi + 1) + self.f.alpha

    @property
    def b(self) -> float:
        return self.shift_value

    def offset_evaluator(self, gap_index: np.ndarray) -> Callable:
        left = self.n_lo + np.asarray(gap_index, dtype=np.int64)

        def f(direction, d, sel=None):
            sel = np.arange(left.size) if sel is None else sel
            m = np.where(direction > 0, left[sel], left[sel] + 1)
            u = direction * d
            return self.f.cauchy(m, u).real + self.shift_value

        return f


@dataclass(frozen=True)
class GapZeros:
    """One zero per gap: ``x = anchor + direction * distance``; ``distance`` is to the nearer pole."""

    left: np.ndarray
    right: np.ndarray
    direction: np.ndarray
    distance: np.ndarray

    @property
    def anchor(self) -> np.ndarray:
        return np.where(self.direction > 0, self.left, self.right)

    @property
    def x(self) -> np.ndarray:
        return self.anchor + self.direction * self.distance

    def __len__(self):
        return int(self.left.size)


class NoSignChange(RuntimeError):
    pass


def bisect_gaps(evaluate: Callable, left: np.ndarray, right: np.ndarray, max_iter: int = 1100) -> GapZeros:
    """Locate the zero of a function decreasing from ``+inf`` to ``-inf`` on each gap.

    ``evaluate(direction, d, sel)`` returns the function at ``left + d``
    (direction ``+1``) or ``right - d`` (direction ``-1``) for the gaps
    selected by ``sel``.  Bisection runs on the distance to the nearer
    pole until the bracket is a few ulps wide in relative terms.
    """
    left = np.asarray(left, dtype=float)
    right = np.asarray(right, dtype=float)
    n = left.size
    half = (right - left) / 2.0
    allsel = np.arange(n)
    mid = evaluate(np.ones(n), half, allsel)
    if np.any(~np.isfinite(mid)):
        bad = int(np.nonzero(~np.isfinite(mid))[0][0])
        raise NoSignChange(f"non-finite value in gap ({left[bad]}, {right[bad]})")
    direction = np.where(mid > 0, -1.0, 1.0)
    lo = np.zeros(n)
    hi = half.copy()
    done = mid == 0
    lo[done] = hi[done]
    active = np.nonzero(~done)[0]
    for _ in range(max_iter):
        if active.size == 0:
            break
        md = 0.5 * (lo[active] + hi[active])
        v = evaluate(direction[active], md, active)
        if np.any(np.isnan(v)):
            bad = int(active[np.nonzero(np.isnan(v))[0][0]])
            raise NoSignChange(f"no usable sign information in gap ({left[bad]}, {right[bad]})")
        same = np.sign(v) == direction[active]
        lo[active] = np.where(same, md, lo[active])
        hi[active] = np.where(same, hi[active], md)
        width = hi[active] - lo[active]
        active = active[width > 4 * _EPS * hi[active]]
    if active.size:
        bad = int(active[0])
        raise NoSignChange(f"bisection did not resolve gap ({left[bad]}, {right[bad]})")
    dist = 0.5 * (lo + hi)
    if np.any(dist <= 0):
        bad = int(np.nonzero(dist <= 0)[0][0])
        raise NoSignChange(f"no sign change inside gap ({left[bad]}, {right[bad]})")
    return GapZeros(left, right, direction, dist)


def locate_gap_zeros(ct, gap_index=None) -> GapZeros:
    """One zero per gap of the transform's pole window."""
    t = ct.poles
    gi = np.arange(t.size - 1) if gap_index is None else np.asarray(gap_index, dtype=np.int64)
    return bisect_gaps(ct.offset_evaluator(gi), t[gi], t[gi + 1])


def lattice_distance(zeros, lattice_shift: float = 0.0) -> np.ndarray:
    x = np.asarray(zeros, dtype=float) - lattice_shift
    return np.abs(x - np.rint(x))


def l_delta(zeros, lattice_shift: float, delta: float, N: int) -> float:
    """Fraction of the ``2N+1`` unit intervals ``[k, k+1]``, ``|k| <= N``, whose zero is farther than ``delta`` from the lattice.

    ``zeros`` is a :class:`GapZeros` (distances taken from it) or a list
    of positions.
    """
    if not 0 < delta < 0.5:
        raise ValueError("need 0 < delta < 1/2")
    if isinstance(zeros, GapZeros):
        x = zeros.x
        dist = zeros.distance
    else:
        x = np.asarray(zeros, dtype=float)
        dist = lattice_distance(x, lattice_shift)
    k = np.floor(x - lattice_shift).astype(np.int64)
    want = np.arange(-N, N + 1)
    present = np.isin(want, k)
    if not np.all(present):
        raise ValueError(f"N = {N} exceeds the window of located zeros")
    sel = np.abs(k) <= N
    far = np.unique(k[sel & (dist > delta)])
    return float(far.size) / float(want.size)


def boole_measure(ct: CauchyTransform, threshold: float) -> float:
    """Lebesgue measure of ``{x : |s(x)| >= threshold}`` for ``b = 0`` and finite masses."""
    if threshold <= 0:
        raise ValueError("threshold must be positive")
    if ct.b != 0:
        raise ValueError("the measure identity needs b = 0")
    t, c = ct.poles, ct.masses
    total = 0.0
    if t.size > 1:
        gi = np.arange(t.size - 1)
        base = ct.offset_evaluator(gi)
        left, right = t[:-1], t[1:]
        for sgn in (1.0, -1.0):
            def ev(direction, d, sel, sgn=sgn):
                return base(direction, d, sel) - sgn * threshold
            z = bisect_gaps(ev, left, right)
            to_left = np.where(z.direction > 0, z.distance, (right - left) - z.distance)
            to_right = (right - left) - to_left
            total += float(np.sum(to_left if sgn > 0 else to_right))
    # outer half-lines: s = -threshold left of t_0, s = +threshold right of t_last
    reach = float(np.sum(c)) / threshold + 1.0

    def left_end(y):
        return float(np.sum(c / ((t[0] - y) - t))) + threshold

    def right_end(y):
        return float(np.sum(c / ((t[-1] + y) - t))) - threshold

    for g, sign_near in ((left_end, -1.0), (right_end, 1.0)):
        lo = reach / 2
        while np.sign(g(lo)) != sign_near:
            lo /= 2
        total += brentq(g, lo, reach, xtol=1e-300, rtol=4 * _EPS, maxiter=500)
    return total


@dataclass(frozen=True)
class ClosenessReport:
    positive_sum: float
    negative_sum: float
    positive_tail: float
    negative_tail: float
    tail_tol: float

    @property
    def sums(self) -> tuple[float, float]:
        return self.positive_sum, self.negative_sum

    @property
    def divergent_trend(self) -> bool:
        return self.positive_tail > self.tail_tol or self.negative_tail > self.tail_tol

    def to_dict(self) -> dict:
        return {
            "positive_sum": self.positive_sum,
            "negative_sum": self.negative_sum,
            "positive_last_quarter": self.positive_tail,
            "negative_last_quarter": self.negative_tail,
            "divergent_trend": self.divergent_trend,
        }


def closeness_sums(t, s, tail_tol: float = 1e-2) -> ClosenessReport:
    """Relative closeness of the gap zeros ``s_n`` to the right (left) pole for ``s_n > 0`` (``< 0``).

    The tail diagnostic is the contribution of the outermost quarter of
    terms on each side; a value above ``tail_tol`` flags a divergence trend.
    """
    t = np.asarray(t, dtype=float)
    s = np.asarray(s, dtype=float)
    if s.size != t.size - 1:
        raise ValueError("need one zero per gap")
    bad = np.nonzero(~((t[:-1] < s) & (s < t[1:])))[0]
    if bad.size:
        raise ValueError(f"interlacing violated in gap {int(bad[0])}")
    pos = s > 0
    neg = s < 0
    tp = (t[1:][pos] - s[pos]) / s[pos]
    tn = (s[neg] - t[:-1][neg]) / np.abs(s[neg])
    tn = tn[::-1]  # order by increasing |s|

    def tail(v):
        q = v.size // 4
        return float(np.sum(v[v.size - q:])) if q else 0.0

    return ClosenessReport(float(np.sum(tp)), float(np.sum(tn)), tail(tp), tail(tn), tail_tol)


def export_zeros_csv(path, zeros: GapZeros, lattice_shift: float = 0.0, start_index: int = 0) -> None:
    """Write ``(n, t_n, zero_n, dist)`` rows."""
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh)
        w.writerow(["n", "t_n", "zero_n", "dist"])
        x = zeros.x
        for i in range(len(zeros)):
            w.writerow([start_index + i, repr(float(zeros.left[i])), repr(float(x[i])),
                        repr(float(zeros.distance[i]))])
