"""Paley-Wiener primitives: cardinal series, sinc kernels, Parseval sums.

A cardinal function is stored through its masses,

    f(z) = sin(pi (z - alpha)) * sum_n c_n / (z - n - alpha),

so that ``f(n + alpha) = pi (-1)**n c_n``.  The coefficient convention
``h = sum_n conj(a_n) K_n`` (expansion in the orthonormal sinc basis) is
related to the masses by

    c_n = (-1)**n conj(a_n) / pi,   equivalently   a_n = conj(f(n + alpha)).

:func:`masses_from_coefficients` and :func:`coefficients_from_masses` are
the only places where this conversion happens.  :func:`biorth_residual`
and :func:`kernel_residual` consume coefficients ``a_n``; everything else
consumes masses.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .lattice import (
    Bounded,
    LatticeSequence,
    PowerLaw,
    SplitPoint,
    _dev_sum,
    cauchy_sum,
    law_sum,
    law_sum_removed,
    power_tail_bound,
    product,
    signed_abs_zeta,
    sinpi,
    cospi,
    split,
)

NEAR_POLE = 1e-8


@dataclass(frozen=True, eq=False)
class SampledEntire:
    """Entire function ``sin(pi(z-alpha)) * sum_n c_n/(z-n-alpha)``.

    Parameters
    ----------
    masses : LatticeSequence
        The masses ``c_n``. Unlisted indices follow the sequence's exact
        power law (or vanish); envelope-only sequences are rejected because
        the function must be evaluable exactly.
    alpha : float
        Lattice shift in ``[0, 1)``.
    """

    masses: LatticeSequence
    alpha: float = 0.0

    def __post_init__(self):
        if not 0.0 <= self.alpha < 1.0:
            raise ValueError("shift must lie in [0, 1)")
        if not self.masses.exact:
            raise ValueError("cardinal functions need exactly known masses")

    @classmethod
    def from_window(cls, n_min: int, masses, alpha: float = 0.0, tail: PowerLaw | None = None):
        """Masses on the contiguous window starting at ``n_min``; ``tail`` applies elsewhere."""
        return cls(LatticeSequence.window(n_min, masses, tail), alpha)

    @classmethod
    def sparse(cls, indices, masses, alpha: float = 0.0, tail: PowerLaw | None = None):
        return cls(LatticeSequence(indices, masses, tail), alpha)

    def __call__(self, z):
        return eval_cardinal(self, z)

    def cauchy(self, m, u, deriv: int = 0):
        """``sum c_n/(x - n)`` (or its derivative) at split point ``x = m + u`` relative to the shifted lattice."""
        di, dv = self.masses.deviations()
        m = np.atleast_1d(np.asarray(m, dtype=np.int64))
        u = np.atleast_1d(np.asarray(u, dtype=complex))
        if deriv == 0:
            val = _dev_sum(di, dv, m, u)
        else:
            val = -_dev_sum(di, dv, m, u, power=2)
        law = self.masses.law
        if law is not None:
            val = val + law.scale * law_sum(m, u, law.p, law.alternating, deriv=deriv)
        return val

    def lattice_values(self) -> LatticeSequence:
        """The samples ``f(n + alpha) = pi (-1)**n c_n`` as a lattice sequence."""
        seq = self.masses
        sg = np.where(seq.indices % 2 == 0, 1.0, -1.0)
        law = None
        if seq.law is not None:
            law = PowerLaw(seq.law.p, np.pi * seq.law.scale, not seq.law.alternating)
        return LatticeSequence(seq.indices, np.pi * sg * seq.values, law)

    def derivative(self, z):
        """``f'(z)`` away from the lattice."""
        z = np.atleast_1d(np.asarray(z, dtype=complex))
        m, u = split(z - self.alpha)
        if np.any(np.abs(u) < NEAR_POLE):
            raise ValueError("derivative requested next to a lattice point")
        c = self.cauchy(m, u)
        dc = self.cauchy(m, u, deriv=1)
        return np.pi * cospi(m, u) * c + sinpi(m, u) * dc


def masses_from_coefficients(a: LatticeSequence) -> LatticeSequence:
    """Convert basis coefficients ``a_n`` into masses ``c_n = (-1)**n conj(a_n)/pi``."""
    return a.conj_alternate().scaled(1.0 / np.pi)


def coefficients_from_masses(c: LatticeSequence) -> LatticeSequence:
    """Inverse of :func:`masses_from_coefficients`: ``a_n = pi (-1)**n conj(c_n)``."""
    return c.conj_alternate().scaled(np.pi)


def _rest_at_lattice(f: SampledEntire, m: np.ndarray) -> np.ndarray:
    """``sum_{n != m} c_n / (m - n)`` at integers ``m``."""
    seq = f.masses
    di, dv = seq.deviations()
    out = np.zeros(m.shape, dtype=complex)
    if di.size:
        diff = (m[:, None] - di[None, :]).astype(float)
        with np.errstate(divide="ignore"):
            w = np.where(diff == 0, 0.0, 1.0 / np.where(diff == 0, 1.0, diff))
        out += w @ dv
    if seq.law is not None:
        out += seq.law.scale * law_sum_removed(m, seq.law.p, seq.law.alternating)
    return out


def eval_cardinal(f: SampledEntire, z):
    """Evaluate ``f`` at ``z`` (scalar or array).

    Points within ``1e-8`` of the shifted lattice use the first-order
    expansion ``(-1)**m pi (c_m + u R_m)`` with ``R_m`` the remaining sum;
    exactly on the lattice this is ``pi (-1)**m c_m``.
    """
    zz = np.atleast_1d(np.asarray(z, dtype=complex))
    m, u = split(zz - f.alpha)
    out = np.empty(zz.shape, dtype=complex)
    near = np.abs(u) < NEAR_POLE
    if np.any(~near):
        out[~near] = sinpi(m[~near], u[~near]) * f.cauchy(m[~near], u[~near])
    if np.any(near):
        mn, un = m[near], u[near]
        sg = np.where(mn % 2 == 0, 1.0, -1.0)
        cm = f.masses.at(mn)
        out[near] = sg * np.pi * (cm * (1.0 - (np.pi * un) ** 2 / 6.0) + un * _rest_at_lattice(f, mn))
    return out if np.ndim(z) else out[0]


def partial_sum(f: SampledEntire, z: complex, horizon: int) -> Bounded:
    """Direct truncated series over ``|n| <= horizon`` and a bound on the rest.

    Terms are added in order of increasing ``|n|`` (negative index first on
    ties). This is an independent route to :func:`eval_cardinal`.
    """
    z = complex(z)
    x = z - f.alpha
    n = np.arange(-horizon, horizon + 1)
    n = n[np.lexsort((n, np.abs(n)))]
    c = f.masses.at(n)
    if np.any(np.abs(x - n) < NEAR_POLE):
        raise ValueError("partial sums are not evaluated next to lattice points")
    m, u = split(x)
    s = complex(sinpi(m, u))
    val = s * np.sum(c / (x - n))
    bound = 0.0
    law = f.masses.law
    if law is not None:
        bound += float(power_tail_bound(x, horizon, law.p, abs(law.scale)))
    far = np.abs(f.masses.indices) > horizon
    if np.any(far):
        bound += float(np.sum(np.abs(f.masses.values[far] / (x - f.masses.indices[far]))))
        if law is not None:
            bound += float(np.sum(np.abs(law.at(f.masses.indices[far]) / (x - f.masses.indices[far]))))
    return Bounded(val, abs(s) * bound)


def kernel_pw(lam, z):
    """Reproducing kernel ``sin(pi(z - conj lam)) / (pi (z - conj lam))``.

    Exact ``1``/``0`` whenever ``z - conj lam`` is an integer.
    """
    w = np.asarray(z, dtype=complex) - np.conj(np.asarray(lam, dtype=complex))
    m, u = split(w)
    s = sinpi(m, u)
    small = np.abs(w) < NEAR_POLE
    with np.errstate(divide="ignore", invalid="ignore"):
        out = np.where(small, 1.0 - (np.pi * w) ** 2 / 6.0, s / (np.pi * np.where(small, 1.0, w)))
    return out if out.ndim else complex(out)


def kernel_function(lam: complex, n_min: int, n_max: int) -> SampledEntire:
    """``K_lam`` sampled on ``[n_min, n_max]`` as a cardinal function (masses zero outside)."""
    n = np.arange(n_min, n_max + 1)
    vals = kernel_pw(lam, n.astype(complex))
    sg = np.where(n % 2 == 0, 1.0, -1.0)
    return SampledEntire.from_window(n_min, sg * vals / np.pi)


def inner_pw(f: SampledEntire, g: SampledEntire) -> Bounded:
    """Parseval sum ``sum_n f(n+alpha) conj(g(n+alpha))``.

    The listed part is summed directly; the product of the two power laws
    on unlisted indices is a zeta value, so the result is exact up to
    rounding, which is what the returned bound estimates.
    """
    if f.alpha != g.alpha:
        raise ValueError("inner products need a common lattice shift")
    a, b = f.masses, g.masses
    idx = np.union1d(a.indices, b.indices)
    terms = a.at(idx) * np.conj(b.at(idx))
    val = np.pi ** 2 * np.sum(terms)
    mag = np.pi ** 2 * np.sum(np.abs(terms))
    if a.law is not None and b.law is not None:
        q = a.law.p + b.law.p
        alt = a.law.alternating != b.law.alternating
        coef = a.law.scale * np.conj(b.law.scale)
        listed = idx[idx != 0]
        sg = np.where(listed % 2 == 0, 1.0, -1.0) if alt else 1.0
        law_part = coef * (signed_abs_zeta(q, alt) - np.sum(sg * np.abs(listed).astype(float) ** (-q)))
        val += np.pi ** 2 * law_part
        mag += np.pi ** 2 * abs(coef) * 2.0 * signed_abs_zeta(q, False)
    return Bounded(complex(val), 1e-15 * float(mag) * max(1.0, np.log2(idx.size + 1)))


def _frequency(lam):
    """Validate a frequency given as a number or as a :class:`SplitPoint`."""
    if isinstance(lam, SplitPoint):
        if np.ndim(lam.m) or abs(complex(lam.u)) == 0 or abs(complex(lam.u).real) > 0.5:
            raise ValueError(f"bad split frequency {lam!r}")
        return lam
    lam = complex(lam)
    if abs(lam - np.rint(lam.real)) < 1e-12:
        raise ValueError(f"lambda={lam} collides with a lattice point")
    return lam


def biorth_residual(lam: complex, a: LatticeSequence, G: LatticeSequence) -> Bounded:
    """``(1/pi) sum_n a_n G(n) / (n - lam)``: the pairing of ``G/(z-lam)`` with ``h = sum conj(a_n) K_n``."""
    lam = _frequency(lam)
    s = cauchy_sum(product(a, G), lam)
    return Bounded(-complex(s.value) / np.pi, float(s.tail_bound) / np.pi)


def kernel_residual(lam: complex, a: LatticeSequence) -> Bounded:
    """``sum_n conj(a_n) (-1)**n / (lam - n)``; equals ``pi h(lam)/sin(pi lam)`` for ``h = sum conj(a_n) K_n``."""
    lam = _frequency(lam)
    s = cauchy_sum(a.conj_alternate(), lam)
    return Bounded(complex(s.value), float(s.tail_bound))
