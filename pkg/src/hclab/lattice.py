"""Integer-lattice sequences and closed-form Cauchy sums over them.

A :class:`LatticeSequence` stores finitely many explicit values and
describes every other index in one of two ways:

* an exact power law ``v_n = scale * sigma_n * |n|**(-p)`` (``n != 0``),
  where ``sigma_n`` is ``1`` or ``(-1)**n``; sums against ``1/(z - n)``
  are then evaluated in closed form from zeta values and ``cot``/``csc``;
* a bounding envelope ``|v_n| <= C * |n|**(-q)``; sums are then computed
  over the explicit part and returned together with a rigorous bound on
  the neglected remainder.

Evaluation points are handled in split form ``z = m + u`` with integer
``m`` and ``|Re u| <= 1/2`` so that distances to nearby lattice points are
resolved to full relative precision even when ``|z|`` is in the millions.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np
from scipy.special import zeta

_SERIES_TERMS = 170
_SMALL_X = 0.75


class Bounded(NamedTuple):
    """A computed quantity together with a bound on the neglected remainder."""

    value: complex
    tail_bound: float


def signed_zeta(j: int, alternating: bool) -> float:
    """``sum_{n != 0} sigma_n n**(-j)`` for integer ``j >= 2``."""
    if j % 2:
        return 0.0
    z = float(zeta(j))
    if alternating:
        return -2.0 * (1.0 - 2.0 ** (1 - j)) * z
    return 2.0 * z


def signed_abs_zeta(q: float, alternating: bool) -> float:
    """``sum_{n != 0} sigma_n |n|**(-q)`` for real ``q > 1``."""
    z = float(zeta(q))
    if alternating:
        return -2.0 * (1.0 - 2.0 ** (1 - q)) * z
    return 2.0 * z


class SplitPoint(NamedTuple):
    """A point ``m + u`` kept as integer part and offset, for points closer to the lattice than ``ulp(m)``."""

    m: np.ndarray
    u: np.ndarray

    @property
    def value(self) -> np.ndarray:
        return np.asarray(self.m, dtype=float) + np.asarray(self.u, dtype=complex)


def split(z) -> tuple[np.ndarray, np.ndarray]:
    """Split ``z`` into nearest integer ``m`` and offset ``u = z - m``."""
    z = np.asarray(z, dtype=complex)
    m = np.rint(z.real)
    return m.astype(np.int64), z - m


def sinpi(m, u):
    """``sin(pi (m + u))`` computed as ``(-1)**m sin(pi u)``; exact zero on the lattice."""
    m = np.asarray(m, dtype=np.int64)
    return np.where(m % 2 == 0, 1.0, -1.0) * np.sin(np.pi * np.asarray(u))


def cospi(m, u):
    m = np.asarray(m, dtype=np.int64)
    return np.where(m % 2 == 0, 1.0, -1.0) * np.cos(np.pi * np.asarray(u))


def law_sum(m, u, p: int, alternating: bool = False, deriv: int = 0):
    """Closed form of ``sum_{n != 0} sigma_n n**(-p) / (x - n)`` at ``x = m + u``.

    Parameters
    ----------
    m, u : array_like
        Split evaluation point, see :func:`split`. ``u`` must be nonzero
        unless ``m == 0``.
    p : int
        Even decay exponent, ``p >= 2``.
    alternating : bool
        Use ``sigma_n = (-1)**n`` instead of ``1``.
    deriv : {0, 1}
        Return the sum (0) or its derivative in ``x`` (1).

    Notes
    -----
    Partial fractions give ``n**-p/(x-n) = sum_j x**-(p+1-j) n**-j + x**-p/(x-n)``;
    the lattice sums of ``n**-j`` are zeta values and the last term sums to
    ``pi cot(pi x) - 1/x`` (or ``pi csc(pi x) - 1/x`` with alternation).
    Near ``x = 0`` the Taylor series in ``x`` is used instead.
    """
    if p < 2 or p % 2:
        raise ValueError(f"closed-form lattice sums need an even exponent p >= 2, got {p}")
    m = np.asarray(m, dtype=np.int64)
    u = np.asarray(u, dtype=complex)
    m, u = np.broadcast_arrays(m, u)
    x = m + u
    out = np.empty(x.shape, dtype=complex)
    small = np.abs(x) < _SMALL_X
    if np.any(small):
        xs = x[small]
        acc = np.zeros_like(xs)
        for k in range(_SERIES_TERMS, -1, -1):
            j = p + 1 + k
            coef = -signed_zeta(j, alternating) if j % 2 == 0 else 0.0
            if deriv == 0:
                acc = acc * xs + coef
            else:
                acc = acc * xs + (k + 1) * (-signed_zeta(j + 1, alternating) if (j + 1) % 2 == 0 else 0.0)
        out[small] = acc
    big = ~small
    if np.any(big):
        xb, mb, ub = x[big], m[big], u[big]
        sgn = np.where(mb % 2 == 0, 1.0, -1.0)
        s = np.sin(np.pi * ub)
        if alternating:
            core = np.pi * sgn / s
            dcore = -np.pi ** 2 * sgn * np.cos(np.pi * ub) / s ** 2
        else:
            core = np.pi * np.cos(np.pi * ub) / s
            dcore = -np.pi ** 2 / s ** 2
        inv = 1.0 / xb
        if deriv == 0:
            val = xb ** (-p) * (core - inv)
            for j in range(2, p + 1, 2):
                val = val + signed_zeta(j, alternating) * xb ** (-(p + 1 - j))
        else:
            val = -p * xb ** (-p - 1) * (core - inv) + xb ** (-p) * (dcore + inv ** 2)
            for j in range(2, p + 1, 2):
                val = val - (p + 1 - j) * signed_zeta(j, alternating) * xb ** (-(p + 2 - j))
        out[big] = val
    return out


def law_sum_removed(m, p: int, alternating: bool = False):
    """``sum_{n != 0, m} sigma_n n**(-p) / (m - n)`` at integer ``m``."""
    m = np.asarray(m, dtype=np.int64)
    mf = m.astype(float)
    out = np.zeros(m.shape, dtype=float)
    nz = m != 0
    if np.any(nz):
        x = mf[nz]
        sg = np.where(m[nz] % 2 == 0, 1.0, -1.0) if alternating else 1.0
        val = -(sg * p + 1.0) * x ** (-(p + 1))
        for j in range(2, p + 1, 2):
            val = val + signed_zeta(j, alternating) * x ** (-(p + 1 - j))
        out[nz] = val
    return out


def upper_law_sum(m0: int, s: float, p: int) -> float:
    """``sum_{n >= m0} n**(-p) / (s - n)`` for ``0 < s < m0`` via Hurwitz zeta and digamma."""
    from scipy.special import digamma

    if not 0 < s < m0:
        raise ValueError("need 0 < s < m0")
    val = s ** (-p) * (digamma(m0 - s) - digamma(m0))
    for j in range(2, p + 1):
        val += s ** (-(p + 1 - j)) * float(zeta(j, m0))
    return float(val)


# ---------------------------------------------------------------------------
# sequences


@dataclass(frozen=True)
class PowerLaw:
    """Exact off-list values ``scale * sigma_n * |n|**(-p)``; zero at ``n = 0``."""

    p: int
    scale: complex = 1.0
    alternating: bool = False

    def __post_init__(self):
        if self.p < 2 or self.p % 2:
            raise ValueError(f"power laws need an even exponent p >= 2, got {self.p}")

    def at(self, n) -> np.ndarray:
        n = np.asarray(n, dtype=np.int64)
        out = np.zeros(n.shape, dtype=complex)
        nz = n != 0
        sg = np.where(n[nz] % 2 == 0, 1.0, -1.0) if self.alternating else 1.0
        out[nz] = self.scale * sg * np.abs(n[nz]).astype(float) ** (-self.p)
        return out


@dataclass(frozen=True)
class Envelope:
    """Bound ``|v_n| <= C |n|**(-q)`` at every unlisted ``n != 0``."""

    C: float
    q: float


def _canonical_order(idx: np.ndarray) -> np.ndarray:
    """Permutation sorting indices by ascending ``|n|``, negative first on ties."""
    return np.lexsort((idx, np.abs(idx)))


@dataclass(frozen=True, eq=False)
class LatticeSequence:
    """Complex sequence on the integers: explicit values plus an off-list rule.

    ``law`` gives exact values off the list; ``envelope`` only bounds them.
    With neither, unlisted entries are zero. An envelope requires index 0
    to be listed.
    """

    indices: np.ndarray
    values: np.ndarray
    law: PowerLaw | None = None
    envelope: Envelope | None = None
    _dev_idx: np.ndarray = field(init=False, repr=False)
    _dev_val: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        idx = np.asarray(self.indices, dtype=np.int64).ravel()
        val = np.asarray(self.values, dtype=complex).ravel()
        if idx.shape != val.shape:
            raise ValueError("indices and values differ in length")
        order = np.argsort(idx, kind="stable")
        idx, val = idx[order], val[order]
        if idx.size and np.any(np.diff(idx) == 0):
            raise ValueError("duplicate indices")
        if self.law is not None and self.envelope is not None:
            raise ValueError("give either an exact law or an envelope, not both")
        if self.envelope is not None and (idx.size == 0 or not np.any(idx == 0)):
            raise ValueError("an envelope sequence must list index 0")
        idx.setflags(write=False)
        val.setflags(write=False)
        object.__setattr__(self, "indices", idx)
        object.__setattr__(self, "values", val)
        dev = val - (self.law.at(idx) if self.law is not None else 0.0)
        keep = dev != 0
        di, dv = idx[keep], dev[keep]
        o = _canonical_order(di)
        object.__setattr__(self, "_dev_idx", di[o])
        object.__setattr__(self, "_dev_val", dv[o])

    # construction helpers -------------------------------------------------
    @classmethod
    def window(cls, n_min: int, values, law: PowerLaw | None = None) -> "LatticeSequence":
        values = np.asarray(values, dtype=complex)
        return cls(np.arange(n_min, n_min + values.size), values, law)

    @classmethod
    def zero(cls) -> "LatticeSequence":
        return cls(np.zeros(0, np.int64), np.zeros(0, complex))

    @property
    def exact(self) -> bool:
        return self.envelope is None

    def is_listed(self, n) -> np.ndarray:
        n = np.asarray(n, dtype=np.int64)
        pos = np.searchsorted(self.indices, n)
        pos = np.minimum(pos, max(self.indices.size - 1, 0))
        return (self.indices.size > 0) & (self.indices[pos] == n) if self.indices.size else np.zeros(n.shape, bool)

    def at(self, n) -> np.ndarray:
        """Values at integer indices; raises for unlisted indices of an envelope sequence."""
        n = np.asarray(n, dtype=np.int64)
        listed = self.is_listed(n)
        if self.law is not None:
            out = self.law.at(n)
        else:
            if self.envelope is not None and not np.all(listed):
                raise ValueError("value requested at an index known only through its envelope")
            out = np.zeros(n.shape, dtype=complex)
        if np.any(listed):
            pos = np.searchsorted(self.indices, n[listed])
            out[listed] = self.values[pos]
        return out

    def deviations(self) -> tuple[np.ndarray, np.ndarray]:
        """Listed indices where the value differs from the law, in canonical order."""
        return self._dev_idx, self._dev_val

    def conj_alternate(self) -> "LatticeSequence":
        """The sequence ``conj(v_n) (-1)**n``."""
        sg = np.where(self.indices % 2 == 0, 1.0, -1.0)
        law = None
        if self.law is not None:
            law = PowerLaw(self.law.p, np.conj(self.law.scale), not self.law.alternating)
        return LatticeSequence(self.indices, np.conj(self.values) * sg, law, self.envelope)

    def scaled(self, c: complex) -> "LatticeSequence":
        law = None if self.law is None else PowerLaw(self.law.p, self.law.scale * c, self.law.alternating)
        env = None if self.envelope is None else Envelope(self.envelope.C * abs(c), self.envelope.q)
        return LatticeSequence(self.indices, self.values * c, law, env)

    def off_list_envelope(self, exclude: np.ndarray) -> Envelope:
        """Envelope valid for all ``n != 0`` outside ``exclude``."""
        if self.envelope is not None:
            C, q = self.envelope.C, self.envelope.q
        elif self.law is not None:
            C, q = abs(self.law.scale), float(self.law.p)
        else:
            C, q = 0.0, 2.0
        extra = ~np.isin(self.indices, exclude) & (self.indices != 0)
        if np.any(extra):
            n = np.abs(self.indices[extra]).astype(float)
            C = max(C, float(np.max(np.abs(self.values[extra]) * n ** q)))
        return Envelope(C, q)


def product(a: LatticeSequence, b: LatticeSequence) -> LatticeSequence:
    """Termwise product ``a_n b_n`` with the appropriate off-list rule."""
    if a.exact and b.exact:
        idx = np.union1d(a.indices, b.indices)
        vals = a.at(idx) * b.at(idx)
        law = None
        if a.law is not None and b.law is not None:
            law = PowerLaw(a.law.p + b.law.p, a.law.scale * b.law.scale,
                           a.law.alternating != b.law.alternating)
        return LatticeSequence(idx, vals, law)
    if a.exact:
        a, b = b, a
    # a carries an envelope; b may be exact or not
    if b.exact:
        idx = a.indices
    else:
        idx = np.intersect1d(a.indices, b.indices)
    if not np.any(idx == 0):
        raise ValueError("index 0 must be known for both factors")
    vals = a.at(idx) * b.at(idx)
    ea, eb = a.off_list_envelope(idx), b.off_list_envelope(idx)
    return LatticeSequence(idx, vals, None, Envelope(ea.C * eb.C, ea.q + eb.q))


# ---------------------------------------------------------------------------
# remainder bounds over unlisted indices


def _hurwitz_block(a: int, b: float, q: float) -> float:
    """``sum_{n=a}^{b} n**(-q)`` for ``1 <= a``, ``b`` possibly infinite."""
    if b < a:
        return 0.0
    head = float(zeta(q, a))
    if np.isinf(b):
        return head
    return max(head - float(zeta(q, b + 1)), 0.0)


def _runs(idx: np.ndarray) -> np.ndarray:
    """Maximal runs of consecutive integers as an ``(r, 2)`` array of ``[start, end]``."""
    if idx.size == 0:
        return np.zeros((0, 2), dtype=np.int64)
    brk = np.nonzero(np.diff(idx) != 1)[0]
    starts = np.concatenate(([idx[0]], idx[brk + 1]))
    ends = np.concatenate((idx[brk], [idx[-1]]))
    return np.stack([starts, ends], axis=1)


def _complement_intervals(idx: np.ndarray) -> list[tuple[float, float]]:
    """Integer intervals covering the nonzero integers not in ``idx``."""
    runs = _runs(np.union1d(idx, [0]))
    out: list[tuple[float, float]] = []
    lo = -np.inf
    for s, e in runs:
        if s - 1 >= lo:
            out.append((lo, s - 1))
        lo = e + 1
    out.append((lo, np.inf))
    return out


def _power_mass(intervals, q: float, lo: float = -np.inf, hi: float = np.inf) -> float:
    """``sum |n|**(-q)`` over the integers of ``intervals`` clipped to ``[lo, hi]``."""
    total = 0.0
    for a, b in intervals:
        a, b = max(a, np.ceil(lo)), min(b, np.floor(hi))
        if a > b:
            continue
        if a > 0:
            total += _hurwitz_block(int(a), b, q)
        elif b < 0:
            total += _hurwitz_block(int(-b), -a, q)
        else:  # straddles zero, which is never part of the complement
            total += _hurwitz_block(1, b, q) + _hurwitz_block(1, -a, q)
    return total


def _nearest_gap_distance(intervals, z: complex) -> float:
    """Distance from ``z`` to the nearest integer in ``intervals``."""
    x = z.real
    best = np.inf
    for a, b in intervals:
        n = min(max(np.rint(x), a), b)
        best = min(best, abs(complex(n - x, z.imag)) if np.isfinite(n) else np.inf)
    return best


def unlisted_cauchy_bound(listed: np.ndarray, z: complex, env: Envelope) -> float:
    """Bound on ``sum |v_n| / |z - n|`` over unlisted ``n != 0`` given ``|v_n| <= C|n|**-q``."""
    if env.C == 0.0:
        return 0.0
    iv = _complement_intervals(np.asarray(listed, dtype=np.int64))
    x = z.real
    rho = max(abs(x) / 2.0, 1.0)
    d = _nearest_gap_distance(iv, z)
    if d == 0.0:
        raise ValueError("evaluation point coincides with an unlisted lattice point")
    far = _power_mass(iv, env.q) / max(rho, abs(z.imag))
    near = _power_mass(iv, env.q, x - rho, x + rho) / d
    return env.C * (far + near)


# ---------------------------------------------------------------------------
# Cauchy sums


def _dev_sum(dev_idx, dev_val, m, u, power: int = 1, absolute: bool = False):
    """``sum_j d_j / ((m - j) + u)**power`` for arrays of split points."""
    m = np.atleast_1d(m)
    u = np.atleast_1d(u)
    out = np.zeros(m.shape, dtype=complex)
    if dev_idx.size == 0:
        return out
    chunk = max(1, 2_000_000 // dev_idx.size)
    for s in range(0, m.size, chunk):
        diff = (m[s:s + chunk, None] - dev_idx[None, :]).astype(float) + u[s:s + chunk, None]
        w = 1.0 / diff ** power
        out[s:s + chunk] = (np.abs(w) @ np.abs(dev_val)) if absolute else (w @ dev_val)
    return out


def cauchy_sum(seq: LatticeSequence, z) -> Bounded:
    """``sum_n v_n / (z - n)`` with a remainder bound.

    Exact-law sequences are summed in closed form (bound reflects rounding
    only); envelope sequences are summed over the listed indices.
    """
    if isinstance(z, SplitPoint):
        scalar = np.ndim(z.m) == 0
        m = np.atleast_1d(np.asarray(z.m, dtype=np.int64))
        u = np.atleast_1d(np.asarray(z.u, dtype=complex))
        zs = m + u
    else:
        scalar = np.ndim(z) == 0
        zs = np.atleast_1d(np.asarray(z, dtype=complex))
        m, u = split(zs)
    if np.any(np.abs(u) < 1e-300):
        raise ValueError("evaluation point coincides with a lattice point")
    di, dv = seq.deviations()
    if seq.exact:
        val = _dev_sum(di, dv, m, u)
        if seq.law is not None:
            val = val + seq.law.scale * law_sum(m, u, seq.law.p, seq.law.alternating)
        mag = _dev_sum(di, dv, m, u, absolute=True).real
        bound = 1e-15 * (np.abs(val) + np.abs(mag))
        return Bounded(val[0] if scalar else val, float(np.ravel(bound)[0]) if scalar else bound)
    val = _dev_sum(di, dv, m, u)
    bounds = np.array([unlisted_cauchy_bound(seq.indices, complex(zz), seq.envelope) for zz in zs])
    return Bounded(val[0] if scalar else val, float(bounds[0]) if scalar else bounds)


def power_tail_bound(x, horizon: int, p: float, scale: float = 1.0):
    """Bound on ``sum_{|n| > N} scale |n|**-p / |x - n|`` for ``|x| < N + 1``."""
    ax = np.abs(np.asarray(x, dtype=complex))
    N = float(horizon)
    if np.any(ax >= N + 1):
        raise ValueError("evaluation point outside the horizon")
    return 2.0 * scale * N ** (-p) / p / (1.0 - ax / (N + 1.0))
