"""Mixed kernel/biorthogonal systems: residue identities, interlacing, defect evidence.

For a partition of the frequencies into ``Lambda_1`` (biorthogonal side)
and ``Lambda_2`` (kernel side), a nonzero ``h`` orthogonal to the mixed
family yields two interpolation formulas whose residues tie the lattice
coefficients ``a_n`` of ``h`` to products ``S_1, S_2, G_1, G_2``.  This
module checks those identities on a window of integers and measures how
far a candidate ``h`` is from orthogonality.

Every identity is checked modulo one least-squares scalar per relation,
since canonical products are only defined up to normalization.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .cardinal import SampledEntire, biorth_residual, coefficients_from_masses, inner_pw, kernel_pw, kernel_residual
from .lattice import LatticeSequence, PowerLaw, SplitPoint, cauchy_sum, product, sinpi, split

Evaluable = Callable[[np.ndarray], np.ndarray]

LATTICE_RTOL = 1e-8
RESIDUAL_RTOL = 1e-6
GRAM_SECTION = 64
COND_FLAG = 1e14


@dataclass(frozen=True)
class Partition:
    """Finite truncations of ``Lambda_1`` and ``Lambda_2``.

    ``lambda2_split`` optionally carries ``Lambda_2`` as integer part plus
    offset, which residual sums use instead of the rounded values.
    """

    lambda1: np.ndarray
    lambda2: np.ndarray
    lambda2_split: SplitPoint | None = None

    def __post_init__(self):
        l1 = np.asarray(self.lambda1, dtype=complex).ravel()
        l2 = np.asarray(self.lambda2, dtype=complex).ravel()
        if l1.size == 0 or l2.size == 0:
            raise ValueError("both parts of the partition must be nonempty")
        if np.intersect1d(l1, l2).size:
            raise ValueError("the two parts of the partition overlap")
        sp = self.lambda2_split
        if sp is not None:
            m = np.atleast_1d(np.asarray(sp.m, dtype=np.int64))
            u = np.atleast_1d(np.asarray(sp.u, dtype=complex))
            if m.size != l2.size or u.size != l2.size:
                raise ValueError("split representation does not match lambda2")
            object.__setattr__(self, "lambda2_split", SplitPoint(m, u))
        object.__setattr__(self, "lambda1", l1)
        object.__setattr__(self, "lambda2", l2)


@dataclass(frozen=True, eq=False)
class PairSystem:
    """Coefficients ``a_n`` on an integer window plus the four generating functions.

    ``S1``, ``S2``, ``G1``, ``G2`` are any vectorized callables (typically
    :class:`~hclab.products.ProductFunction` or compositions of cardinal
    functions); ``zeros_S1``/``zeros_S2`` are the zero lists known on the
    window.
    """

    a: LatticeSequence
    window: tuple[int, int]
    S1: Evaluable
    S2: Evaluable
    G1: Evaluable
    G2: Evaluable
    zeros_S1: np.ndarray = field(default_factory=lambda: np.zeros(0))
    zeros_S2: np.ndarray = field(default_factory=lambda: np.zeros(0))

    def __post_init__(self):
        z1 = np.asarray(self.zeros_S1, dtype=float)
        z2 = np.asarray(self.zeros_S2, dtype=float)
        if np.intersect1d(z1, z2).size:
            raise ValueError("S1 and S2 share a zero")
        object.__setattr__(self, "zeros_S1", z1)
        object.__setattr__(self, "zeros_S2", z2)
        a = self.a.at(self.n)
        if np.any(a == 0):
            raise ValueError("coefficients must be nonzero on the window")

    @property
    def n(self) -> np.ndarray:
        return np.arange(self.window[0], self.window[1] + 1)


@dataclass(frozen=True)
class IdentityReport:
    """Per-index relative errors of ``y_n = kappa x_n`` after fitting ``kappa``."""

    name: str
    n: np.ndarray
    rel_err: np.ndarray
    kappa: complex
    tol: float

    @property
    def max_rel_err(self) -> float:
        return float(np.max(self.rel_err)) if self.rel_err.size else 0.0

    @property
    def violations(self) -> list[int]:
        return [int(v) for v in self.n[self.rel_err > self.tol]]

    @property
    def passed(self) -> bool:
        return not self.violations

    def to_dict(self) -> dict:
        return {
            "identity": self.name,
            "kappa": [float(np.real(self.kappa)), float(np.imag(self.kappa))],
            "max_rel_err": self.max_rel_err,
            "violations": self.violations,
            "passed": self.passed,
        }


def _fit(name: str, n: np.ndarray, x: np.ndarray, y: np.ndarray, tol: float) -> IdentityReport:
    den = np.vdot(x, x)
    if den == 0 or not np.any(y != 0):
        raise ValueError(f"{name}: degenerate fit, all values vanish")
    # median of the ratios first, so one corrupted index cannot drag the constant
    live = x != 0
    ratio = y[live] / x[live]
    rough = complex(np.median(ratio.real), np.median(ratio.imag))
    inlier = np.zeros_like(live)
    inlier[live] = np.abs(ratio - rough) <= max(tol, 1e-12) * abs(rough)
    if abs(rough) > 0 and np.any(inlier):
        kappa = np.vdot(x[inlier], y[inlier]) / np.vdot(x[inlier], x[inlier])
    else:
        kappa = np.vdot(x, y) / den
    ref = np.abs(kappa * x)
    err = np.abs(y - kappa * x) / np.where(ref > 0, ref, np.inf)
    err = np.where(ref > 0, err, np.where(y == 0, 0.0, np.inf))
    return IdentityReport(name, n, err, complex(kappa), tol)


@dataclass(frozen=True)
class ResidueReport:
    first: IdentityReport
    second: IdentityReport

    @property
    def max_rel_err(self) -> float:
        return max(self.first.max_rel_err, self.second.max_rel_err)

    @property
    def violations(self) -> list[int]:
        return sorted(set(self.first.violations) | set(self.second.violations))

    @property
    def passed(self) -> bool:
        return self.first.passed and self.second.passed

    def to_dict(self) -> dict:
        return {"max_rel_err": self.max_rel_err, "violations": self.violations, "passed": self.passed,
                "identities": [self.first.to_dict(), self.second.to_dict()]}


def residue_check(ps: PairSystem, tol: float = LATTICE_RTOL) -> ResidueReport:
    """``S1(n) = k1 (-1)**n a_n G2(n)`` and ``G2(n) S2(n) = k2 conj(a_n)`` on the window."""
    n = ps.n
    z = n.astype(complex)
    a = ps.a.at(n)
    sg = np.where(n % 2 == 0, 1.0, -1.0)
    g2 = np.asarray(ps.G2(z))
    first = _fit("S1(n) = k (-1)^n a_n G2(n)", n, sg * a * g2, np.asarray(ps.S1(z)), tol)
    second = _fit("G2(n) S2(n) = k conj(a_n)", n, np.conj(a), g2 * np.asarray(ps.S2(z)), tol)
    return ResidueReport(first, second)


def s_diagonal_check(ps: PairSystem, tol: float = LATTICE_RTOL) -> IdentityReport:
    """``S(n) = S1(n) S2(n) = k (-1)**n |a_n|**2`` on the window."""
    n = ps.n
    z = n.astype(complex)
    a = ps.a.at(n)
    sg = np.where(n % 2 == 0, 1.0, -1.0)
    return _fit("S(n) = k (-1)^n |a_n|^2", n, sg * np.abs(a) ** 2, np.asarray(ps.S1(z)) * np.asarray(ps.S2(z)), tol)


@dataclass(frozen=True)
class InterlaceReport:
    intervals: tuple[int, int]
    counts: np.ndarray
    shift: float

    @property
    def violations(self) -> list[int]:
        return [int(k) for k in np.arange(self.intervals[0], self.intervals[1] + 1)[self.counts != 1]]

    @property
    def passed(self) -> bool:
        return not self.violations

    def to_dict(self) -> dict:
        return {"first_interval": self.intervals[0], "last_interval": self.intervals[1],
                "violations": self.violations, "passed": self.passed}


def interlace_check(zeros, lattice_shift: float = 0.0, window: tuple[int, int] | None = None) -> InterlaceReport:
    """Count zeros in each open interval ``(k + shift, k + 1 + shift)`` of the window.

    ``zeros`` is an array of positions or a :class:`SplitPoint` (integer
    part plus offset, relative to the shifted lattice), which keeps zeros
    that crowd a lattice point on the correct side.  Zeros sitting exactly
    on a lattice point count for no interval, which makes the neighbouring
    intervals fail.
    """
    if isinstance(zeros, SplitPoint):
        m = np.asarray(zeros.m, dtype=np.int64).ravel()
        u = np.asarray(zeros.u).real.ravel()
        if np.any(np.diff(m + u) < 0):
            raise ValueError("zeros must be sorted")
        on_lattice = u == 0
        k = np.where(u > 0, m, m - 1)
    else:
        x = np.asarray(zeros, dtype=float).ravel() - lattice_shift
        if np.any(np.diff(x) < 0):
            raise ValueError("zeros must be sorted")
        k = np.floor(x).astype(np.int64)
        on_lattice = x == k
    if window is None:
        if k.size == 0:
            raise ValueError("no zeros and no window")
        window = (int(k[0]), int(k[-1]))
    k = k[~on_lattice]
    lo, hi = window
    sel = (k >= lo) & (k <= hi)
    counts = np.bincount(k[sel] - lo, minlength=hi - lo + 1)
    return InterlaceReport((lo, hi), counts, lattice_shift)


def cross_pair_check(ps1: PairSystem, ps2: PairSystem, tol: float = LATTICE_RTOL) -> IdentityReport:
    """``S1(n) T2(n) = k S2(n) T1(n)`` for two pair systems on a shared window."""
    if ps1.window != ps2.window:
        raise ValueError("pair systems must share the window")
    n = ps1.n
    z = n.astype(complex)
    lhs = np.asarray(ps1.S1(z)) * np.asarray(ps2.S2(z))
    rhs = np.asarray(ps1.S2(z)) * np.asarray(ps2.S1(z))
    return _fit("S1(n) T2(n) = k S2(n) T1(n)", n, rhs, lhs, tol)


def density_upper(points, r_grid, phase: Callable[[np.ndarray], np.ndarray] | None = None) -> float:
    """Largest ``n_r / 2r`` over the grid, with ``n_r = #{|lambda| <= r}``.

    With ``phase`` given, the denominator becomes ``phase(r) - phase(-r)``.
    """
    r = np.asarray(r_grid, dtype=float)
    if r.size == 0:
        raise ValueError("empty radius grid")
    if np.any(np.diff(r) <= 0):
        raise ValueError("radius grid must be increasing")
    p = np.sort(np.abs(np.asarray(points, dtype=complex)).ravel())
    counts = np.searchsorted(p, r, side="right")
    den = 2 * r if phase is None else np.asarray(phase(r)) - np.asarray(phase(-r))
    return float(np.max(counts / den))


# ---------------------------------------------------------------------------
# defect evidence


@dataclass(frozen=True)
class DefectReport:
    lambda1: np.ndarray
    lambda2: np.ndarray
    residuals1: np.ndarray
    residuals2: np.ndarray
    bounds1: np.ndarray
    bounds2: np.ndarray
    scale: float
    rtol: float
    sigma_min: float
    condition: float
    section_size: int

    @property
    def residual_sup(self) -> float:
        r = np.concatenate([np.abs(self.residuals1), np.abs(self.residuals2)])
        return float(np.max(r)) if r.size else 0.0

    @property
    def violations(self) -> list[str]:
        out = []
        lim = self.rtol * self.scale
        for lam, r, b in zip(self.lambda1, self.residuals1, self.bounds1):
            if abs(r) > lim + b:
                out.append(f"lambda1={lam.real!r}")
        for lam, r, b in zip(self.lambda2, self.residuals2, self.bounds2):
            if abs(r) > lim + b:
                out.append(f"lambda2={lam.real!r}")
        return out

    @property
    def passed(self) -> bool:
        return not self.violations

    @property
    def ill_conditioned(self) -> bool:
        return bool(self.condition > COND_FLAG)

    def to_dict(self) -> dict:
        return {
            "residual_sup": self.residual_sup,
            "scale": self.scale,
            "tolerance": self.rtol * self.scale,
            "tail_bound_max": float(max(np.max(self.bounds1, initial=0.0), np.max(self.bounds2, initial=0.0))),
            "n_lambda1": int(self.lambda1.size),
            "n_lambda2": int(self.lambda2.size),
            "sigma_min": self.sigma_min,
            "gram_condition": self.condition,
            "gram_ill_conditioned": self.ill_conditioned,
            "gram_section_size": self.section_size,
            "gram_note": "finite-section trend evidence only",
            "violations": self.violations,
            "passed": self.passed,
        }


def _alternate(seq: LatticeSequence) -> LatticeSequence:
    """``(-1)**n v_n``."""
    sg = np.where(seq.indices % 2 == 0, 1.0, -1.0)
    law = None if seq.law is None else PowerLaw(seq.law.p, seq.law.scale, not seq.law.alternating)
    return LatticeSequence(seq.indices, seq.values * sg, law, seq.envelope)


def _conj(seq: LatticeSequence) -> LatticeSequence:
    law = None if seq.law is None else PowerLaw(seq.law.p, np.conj(seq.law.scale), seq.law.alternating)
    return LatticeSequence(seq.indices, np.conj(seq.values), law, seq.envelope)


def _point(lam) -> SplitPoint:
    if isinstance(lam, SplitPoint):
        return SplitPoint(int(lam.m), complex(lam.u))
    m, u = split(np.array([lam], dtype=complex))
    return SplitPoint(int(m[0]), complex(u[0]))


def _conj_point(p: SplitPoint) -> SplitPoint:
    return SplitPoint(p.m, np.conj(p.u))


def _gap(p: SplitPoint, q: SplitPoint) -> complex:
    """``p - q`` without forming either point in floating point."""
    return (p.m - q.m) + (p.u - q.u)


def _pair_sum(seq: LatticeSequence, p: SplitPoint, q: SplitPoint) -> complex:
    """``sum_n v_n / ((n - p)(n - q))`` by partial fractions, or a squared sum when ``p == q``.

    The squared sum runs over the listed indices only; for envelope
    sequences the neglected part is of the envelope's order.
    """
    d = _gap(p, q)
    if d == 0:
        if seq.law is not None:
            raise ValueError("squared sums are only needed for listed or envelope sequences")
        diff = (seq.indices - p.m).astype(float) - p.u
        return complex(np.sum(seq.values / diff ** 2))
    c1 = cauchy_sum(seq, p).value
    c2 = cauchy_sum(seq, q).value
    # 1/((n-p)(n-q)) = (1/(p-q)) (1/(n-p) - 1/(n-q)) and sum v/(n-p) = -cauchy(p)
    return complex((c2 - c1) / d)


def _gram_section(part: Partition, h: SampledEntire, G: LatticeSequence, size: int) -> tuple[float, float]:
    """Smallest singular value and condition number of the normalized Gram matrix.

    The section holds the ``size - 1`` frequencies of smallest modulus
    (``g_lam = G/(z - lam)`` for ``Lambda_1``, ``K_lam`` for ``Lambda_2``)
    and ``h/||h||``.
    """
    sp = part.lambda2_split
    pts = [("g", _point(l)) for l in part.lambda1]
    pts += [("k", _point(SplitPoint(sp.m[i], sp.u[i]) if sp is not None else l))
            for i, l in enumerate(part.lambda2)]
    pts.sort(key=lambda t: (abs(t[1].m + t[1].u), t[1].m, t[1].u.real))
    pts = pts[: max(size - 1, 1)]
    Gc = _conj(G)
    GG = product(G, Gc)
    altG = _alternate(G)
    hG = product(h.lattice_values(), Gc)
    hh = inner_pw(h, h).value.real

    def ip(a, b):
        """``<a, b>`` for members of the mixed family."""
        (ta, pa), (tb, pb) = a, b
        if ta == "k" and tb == "k":
            return complex(kernel_pw(0.0, _gap(pb, _conj_point(pa))))
        if ta == "g" and tb == "k":
            # g_a(b) through the sinc expansion of g_a on the lattice
            s = complex(sinpi(np.array([pb.m]), np.array([pb.u]))[0])
            return -s / np.pi * _pair_sum(altG, pa, pb)
        if ta == "k" and tb == "g":
            return np.conj(ip(b, a))
        return _pair_sum(GG, pa, _conj_point(pb))

    m = len(pts) + 1
    gram = np.zeros((m, m), dtype=complex)
    for i, (kind, p) in enumerate(pts):
        for j in range(i, len(pts)):
            gram[i, j] = ip(pts[i], pts[j])
            gram[j, i] = np.conj(gram[i, j])
        if kind == "k":
            mm, uu = np.array([p.m]), np.array([p.u])
            v = complex(sinpi(mm, uu)[0] * h.cauchy(mm, uu)[0])
        else:
            v = complex(-cauchy_sum(hG, _conj_point(p)).value)
        gram[-1, i] = v / np.sqrt(hh)
        gram[i, -1] = np.conj(gram[-1, i])
    gram[-1, -1] = 1.0
    d = np.sqrt(np.abs(np.diag(gram)))
    gram = gram / d[:, None] / d[None, :]
    sv = np.linalg.svd(gram, compute_uv=False)
    smin = float(sv[-1])
    cond = float(sv[0] / smin) if smin > 0 else float("inf")
    return smin, cond


def defect_report(partition: Partition, h: SampledEntire, G_lattice: LatticeSequence,
                  rtol: float = RESIDUAL_RTOL, section: int = GRAM_SECTION) -> DefectReport:
    """Orthogonality residuals of ``h`` against ``{G/(z-lam)}_{Lambda_1}`` and ``{K_lam}_{Lambda_2}``.

    ``h`` enters through its basis coefficients ``a_n = conj(h(n))``.  The
    tolerance is ``rtol * scale`` with ``scale = sum |a_n G(n)| / (1 + |n|)``
    over the listed indices, plus each residual's own tail bound.
    """
    if h.masses.law is None and not np.any(h.masses.values != 0):
        raise ValueError("h must be nonzero")
    if h.alpha != 0:
        raise ValueError("defect reports use the integer lattice")
    a = coefficients_from_masses(h.masses)
    r1, b1 = [], []
    for lam in partition.lambda1:
        res = biorth_residual(lam, a, G_lattice)
        r1.append(res.value)
        b1.append(res.tail_bound)
    r2, b2 = [], []
    sp = partition.lambda2_split
    for i, lam in enumerate(partition.lambda2):
        if sp is not None:
            lam = SplitPoint(sp.m[i], sp.u[i])
        res = kernel_residual(lam, a)
        r2.append(res.value)
        b2.append(res.tail_bound)
    aG = product(a, G_lattice)
    scale = float(np.sum(np.abs(aG.values) / (1.0 + np.abs(aG.indices))))
    smin, cond = _gram_section(partition, h, G_lattice, section)
    return DefectReport(partition.lambda1, partition.lambda2, np.array(r1), np.array(r2),
                        np.array(b1, dtype=float), np.array(b2, dtype=float), scale, rtol,
                        smin, cond, section)


__all__ = [
    "Partition", "PairSystem", "IdentityReport", "ResidueReport", "InterlaceReport", "DefectReport",
    "residue_check", "s_diagonal_check", "interlace_check", "cross_pair_check", "density_upper",
    "defect_report",
]
