"""Finite de Branges models built from a spectrum and point masses.

Given real points ``t_n`` and masses ``mu_n > 0`` the model is

    A(z) = prod (1 - z/t_n)       (factor z for t_n = 0),
    B(z) / A(z) = sum mu_n / (t_n - z),
    E = A - i B,

so ``E`` is Hermite-Biehler, ``A = (E + E*)/2`` vanishes exactly on the
spectrum and the phase ``phi = -arg E`` satisfies ``phi'(t_n) = 1/mu_n``.
Everything lives on a finite window of the spectrum, where all identities
below are exact; the module checks them numerically.

Two independent routes are kept throughout: the closed form through the
partial-fraction sum above, and a product route where ``B`` is rebuilt
from its located zeros.  Phase, ``phi'`` and ``E(t_n)`` are compared
across the two.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Callable

import numpy as np
from scipy.integrate import quad

from .herglotz import CauchyTransform, locate_gap_zeros
from .products import ProductFunction

PHASE_RTOL = 1e-6
IDENTITY_RTOL = 1e-6
MAX_REFINE = 200


class ModelError(ValueError):
    """The data does not define a valid model (interlacing or Hermite-Biehler failure)."""


class ScheduleInfeasible(ValueError):
    """The spectrum window is too short for the requested number of blocks."""


# ---------------------------------------------------------------------------
# model


@dataclass(frozen=True, eq=False)
class ClarkModel:
    """Spectrum, masses and the derived ``A``, ``B``, ``E`` and phase.

    The zeros of ``B`` are stored split as ``B_anchor + B_offset`` with the
    anchor a spectrum point, so that zeros crowding a spectrum point closer
    than its ulp stay distinct.  ``B_log_scale`` is the fitted constant of
    the product route.  ``phase_grid``/``phase_values`` hold tracked samples.
    """

    spectrum: np.ndarray
    masses: np.ndarray
    A: ProductFunction
    B_anchor: np.ndarray
    B_offset: np.ndarray
    B_log_scale: complex
    phase_grid: np.ndarray = field(repr=False, default_factory=lambda: np.zeros(0))
    phase_values: np.ndarray = field(repr=False, default_factory=lambda: np.zeros(0))
    checks: dict = field(default_factory=dict)

    @property
    def size(self) -> int:
        return int(self.spectrum.size)

    @property
    def B_zeros(self) -> np.ndarray:
        return self.B_anchor + self.B_offset

    # closed-form route ------------------------------------------------------
    def ratio(self, z) -> np.ndarray:
        """``B/A = sum mu_n/(t_n - z)``."""
        z = np.atleast_1d(np.asarray(z, dtype=complex))
        return _chunked_sum(self.masses, self.spectrum, z, sign=-1.0)

    def _nearest(self, x: np.ndarray) -> np.ndarray:
        pos = np.searchsorted(self.spectrum, x)
        lo = np.clip(pos - 1, 0, self.size - 1)
        hi = np.clip(pos, 0, self.size - 1)
        return np.where(np.abs(x - self.spectrum[lo]) <= np.abs(x - self.spectrum[hi]), lo, hi)

    def log_basis(self, n: int, z) -> np.ndarray:
        """``log(A(z)/(z - t_n))``."""
        z = np.atleast_1d(np.asarray(z, dtype=complex))
        t = self.spectrum
        out = ProductFunction(np.delete(t, n)).log(z)
        if t[n] != 0:
            out = out + np.log(complex(-1.0 / t[n]))
        return out

    def log_E(self, z) -> np.ndarray:
        """``log E(z)`` from ``E = A/(z-t_m) * ((z-t_m) + i mu_m + i (z-t_m) sum_{j != m} mu_j/(z-t_j))``.

        ``t_m`` is the spectrum point nearest to ``Re z``; the form has no
        cancellation at or near ``t_m``.
        """
        z = np.atleast_1d(np.asarray(z, dtype=complex))
        m = self._nearest(z.real)
        out = np.empty(z.shape, dtype=complex)
        for idx in np.unique(m):
            sel = np.nonzero(m == idx)[0]
            zz = z[sel]
            d = zz - self.spectrum[idx]
            others = np.delete(np.arange(self.size), idx)
            rest = _chunked_sum(self.masses[others], self.spectrum[others], zz, sign=1.0)
            inner = d + 1j * self.masses[idx] + 1j * d * rest
            out[sel] = self.log_basis(int(idx), zz) + np.log(inner)
        return out

    def E(self, z) -> np.ndarray:
        return np.exp(self.log_E(z))

    def E_star(self, z) -> np.ndarray:
        z = np.atleast_1d(np.asarray(z, dtype=complex))
        return np.conj(self.E(np.conj(z)))

    def phase_split(self, idx, offset) -> np.ndarray:
        """Closed-form phase ``arctan(B/A) + pi #{t_n < x}`` at ``x = t[idx] + offset``."""
        idx = np.atleast_1d(np.asarray(idx, dtype=np.int64))
        d = np.atleast_1d(np.asarray(offset, dtype=float))
        t, mu = self.spectrum, self.masses
        out = np.empty(d.shape)
        on = d == 0
        out[on] = np.pi / 2 + np.pi * idx[on]
        for i in np.nonzero(~on)[0]:
            n = idx[i]
            w = -mu[n] / d[i] + float(np.sum(np.delete(mu / ((t - t[n]) - d[i]), n)))
            out[i] = np.arctan(w) + np.pi * (n + (d[i] > 0))
        return out

    def phase(self, x) -> np.ndarray:
        """Closed-form phase; ``pi/2 + pi j`` at the ``j``-th spectrum point."""
        x = np.atleast_1d(np.asarray(x, dtype=float))
        m = self._nearest(x)
        return self.phase_split(m, x - self.spectrum[m])

    def phase_derivative(self, x) -> np.ndarray:
        """``phi' = (B/A)'/(1 + (B/A)**2)``, written around the nearest pole so that ``phi'(t_n) = 1/mu_n``."""
        x = np.atleast_1d(np.asarray(x, dtype=float))
        m = self._nearest(x)
        out = np.empty(x.shape)
        for i, (xi, mi) in enumerate(zip(x, m)):
            d = self.spectrum[mi] - xi
            mask = np.arange(self.size) != mi
            tt, mu = self.spectrum[mask], self.masses[mask]
            r = float(np.sum(mu / (tt - xi)))
            rp = float(np.sum(mu / (tt - xi) ** 2))
            mum = self.masses[mi]
            # numerator and denominator multiplied by d**2
            out[i] = (mum + rp * d * d) / (d * d + (mum + r * d) ** 2)
        return out

    # product route ----------------------------------------------------------
    def log_B_product(self, z) -> np.ndarray:
        z = np.atleast_1d(np.asarray(z, dtype=complex))
        return self.B_log_scale + ProductFunction(self.B_zeros).log(z)

    def log_E_product(self, z) -> np.ndarray:
        """``log(A - iB)`` with ``B`` from its zeros, for complex ``z``."""
        z = np.atleast_1d(np.asarray(z, dtype=complex))
        la = self.A.log(z)
        lb = self.log_B_product(z)
        big = lb.real > la.real
        out = np.empty(z.shape, dtype=complex)
        out[big] = lb[big] + np.log(np.exp(la[big] - lb[big]) - 1j)
        out[~big] = la[~big] + np.log(1.0 - 1j * np.exp(lb[~big] - la[~big]))
        return out

    def real_products(self, idx, offset) -> tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
        """``log|A|, sign A, log|B|, sign B`` at the real points ``t[idx] + offset`` from the zero lists."""
        idx = np.atleast_1d(np.asarray(idx, dtype=np.int64))
        d = np.atleast_1d(np.asarray(offset, dtype=float))
        t = self.spectrum
        base = t[idx]
        la, sa = _split_real_product(t, np.zeros_like(t), base, d)
        lb, sb = _split_real_product(self.B_anchor, self.B_offset, base, d)
        lb = lb + self.B_log_scale.real
        sb = sb * np.sign(np.cos(self.B_log_scale.imag))
        return la, sa, lb, sb

    def product_phase_raw(self, idx, offset) -> np.ndarray:
        """``-arg E`` in ``(-pi, pi]`` at split real points, product route."""
        la, sa, lb, sb = self.real_products(idx, offset)
        top = np.maximum(la, lb)
        top = np.where(np.isfinite(top), top, 0.0)
        return np.arctan2(sb * np.exp(lb - top), sa * np.exp(la - top))

    def to_dict(self) -> dict:
        return {
            "spectrum": [float(v) for v in self.spectrum],
            "masses": [float(v) for v in self.masses],
            "B_zeros": [float(v) for v in self.B_zeros],
            "B_zero_offsets": [float(v) for v in self.B_offset],
            "phase_samples": {"x": [float(v) for v in self.phase_grid],
                              "phi": [float(v) for v in self.phase_values]},
            "checks": self.checks,
        }


def _split_real_product(anchor: np.ndarray, offset: np.ndarray, base: np.ndarray, d: np.ndarray):
    """``log|P|`` and ``sign P`` for ``P(x) = prod (1 - x/z_j)`` (factor ``x`` when ``z_j = 0``).

    Zeros are ``anchor + offset`` and points ``base + d``; differences are
    formed as ``(anchor - base) + (offset - d)`` so that equal anchors cancel exactly.
    """
    zeros = anchor + offset
    zero_at_origin = zeros == 0
    denom = np.where(zero_at_origin, -1.0, zeros)
    logs = np.empty(base.shape)
    signs = np.empty(base.shape)
    chunk = max(1, 2_000_000 // max(anchor.size, 1))
    for s in range(0, base.size, chunk):
        diff = (anchor[None, :] - base[s:s + chunk, None]) + (offset[None, :] - d[s:s + chunk, None])
        q = diff / denom[None, :]
        with np.errstate(divide="ignore"):
            logs[s:s + chunk] = np.sum(np.log(np.abs(q)), axis=1)
        signs[s:s + chunk] = np.prod(np.sign(q), axis=1)
    return logs, signs


def _chunked_sum(mu: np.ndarray, t: np.ndarray, z: np.ndarray, sign: float) -> np.ndarray:
    """``sum mu/(sign*(z - t))`` for every ``z``."""
    out = np.empty(z.shape, dtype=complex)
    chunk = max(1, 2_000_000 // max(t.size, 1))
    for s in range(0, z.size, chunk):
        out[s:s + chunk] = (1.0 / (sign * (z[s:s + chunk, None] - t[None, :]))) @ mu
    return out


def _wrap(d: np.ndarray) -> np.ndarray:
    return (d + np.pi) % (2 * np.pi) - np.pi


@dataclass(frozen=True)
class PhaseTrack:
    """Tracked phase per spectrum point ``idx`` over offsets spanning half the neighbouring gaps."""

    idx: np.ndarray
    offset: np.ndarray
    phase: np.ndarray
    max_err: float


def _window_bounds(t: np.ndarray, n: int) -> tuple[float, float]:
    gaps = np.diff(t)
    left = gaps[n - 1] if n > 0 else (gaps[0] if gaps.size else 1.0)
    right = gaps[n] if n < gaps.size else (gaps[-1] if gaps.size else 1.0)
    return -0.5 * left, 0.5 * right


def _refine_point(a: float, b: float) -> float:
    """Split ``(a, b)``: geometric when both ends share a sign, a deep cut toward ``0`` otherwise."""
    if a == 0:
        return b / 64
    if b == 0:
        return a / 64
    if a * b > 0:
        return float(np.sign(a) * np.sqrt(a * b))
    return 0.0


def track_phase(model: ClarkModel, windows=None) -> PhaseTrack:
    """Continuous branch of ``-arg E`` from the product route, one spectrum point at a time.

    Around each selected ``t_n`` the offsets run over half the adjacent
    gaps; intervals whose wrapped phase step reaches ``pi/2`` are split
    (geometrically near ``t_n``) until every step is below ``pi/2``.  Each
    window's branch is anchored to the closed form modulo ``pi`` at its
    left end; the reported error is the largest deviation elsewhere.
    """
    t = model.spectrum
    windows = np.arange(t.size) if windows is None else np.unique(np.asarray(windows, dtype=np.int64))
    all_idx, all_off, all_phi = [], [], []
    max_err = 0.0
    for n in windows:
        lo, hi = _window_bounds(t, int(n))
        off = [lo, 0.0, hi]
        arg = list(model.product_phase_raw(np.full(3, n), np.array(off)))
        for _ in range(MAX_REFINE):
            step = _wrap(np.diff(arg))
            bad = np.nonzero(np.abs(step) >= np.pi / 2)[0]
            if bad.size == 0:
                break
            mids = np.array([_refine_point(off[i], off[i + 1]) for i in bad])
            if np.any((mids == np.array(off)[bad]) | (mids == np.array(off)[bad + 1])):
                raise ModelError(f"phase tracking ran out of resolution near spectrum point {int(n)}")
            vals = model.product_phase_raw(np.full(mids.size, n), mids)
            off = np.concatenate([off, mids])
            arg = np.concatenate([arg, vals])
            o = np.argsort(off)
            off, arg = list(off[o]), list(arg[o])
        else:
            raise ModelError(f"phase tracking did not converge near spectrum point {int(n)}")
        off = np.asarray(off)
        arg = np.asarray(arg)
        phi = arg[0] + np.concatenate([[0.0], np.cumsum(_wrap(np.diff(arg)))])
        closed = model.phase_split(np.full(off.size, n), off)
        # -arg E and the closed form differ by a constant multiple of pi (the sign of A)
        phi += np.pi * np.round((closed[0] - phi[0]) / np.pi)
        max_err = max(max_err, float(np.max(np.abs(phi - closed))))
        all_idx.append(np.full(off.size, n))
        all_off.append(off)
        all_phi.append(phi)
    return PhaseTrack(np.concatenate(all_idx), np.concatenate(all_off), np.concatenate(all_phi), max_err)


def tracked_phase_derivative(model: ClarkModel, n=None, rel_step: float = 1e-4) -> np.ndarray:
    """``phi'(t_n)`` by central differences of the product-route phase with one Richardson step.

    The step is ``rel_step`` times the smaller of the adjacent gap and the
    mass ``mu_n`` (the width of the phase jump at ``t_n``).
    """
    t, mu = model.spectrum, model.masses
    n = np.arange(t.size) if n is None else np.atleast_1d(np.asarray(n, dtype=np.int64))
    gaps = np.diff(t) if t.size > 1 else np.ones(1)
    left = gaps[np.clip(n - 1, 0, gaps.size - 1)]
    right = gaps[np.clip(n, 0, gaps.size - 1)]
    h = rel_step * np.minimum(np.minimum(left, right), mu[n])
    idx = np.concatenate([n, n, n, n])
    off = np.concatenate([h, -h, h / 2, -h / 2])
    v = model.product_phase_raw(idx, off).reshape(4, n.size)
    coarse = _wrap(v[0] - v[1]) / (2 * h)
    fine = _wrap(v[2] - v[3]) / h
    return (4 * fine - coarse) / 3


def build_clark(spectrum, masses, probe_seed: int = 0, check: bool = True,
                track_windows=None) -> ClarkModel:
    """Construct the model and verify interlacing, phase consistency and the Hermite-Biehler probe.

    ``track_windows`` selects the spectrum points around which the phase is
    tracked; by default all of them for up to 512 points, otherwise both
    ends plus 128 evenly spaced points.  ``phi'(t_n) mu_n = 1`` is checked
    at every spectrum point regardless.
    """
    t = np.asarray(spectrum, dtype=float).ravel()
    mu = np.asarray(masses, dtype=float).ravel()
    if t.size == 0 or t.shape != mu.shape:
        raise ModelError("spectrum and masses must be nonempty and of equal length")
    if np.any(np.diff(t) <= 0):
        raise ModelError("spectrum must be strictly increasing")
    if np.any(~(mu > 0)):
        raise ModelError("masses must be positive")
    A = ProductFunction(t)
    if t.size > 1:
        gz = locate_gap_zeros(CauchyTransform(t, mu))
        b_anchor, b_offset = gz.anchor, gz.direction * gz.distance
        bz = b_anchor + b_offset
        inside = (t[:-1] < bz) & (bz < t[1:])
        if not np.all(inside):
            raise ModelError(f"zero of B outside gap {int(np.nonzero(~inside)[0][0])}")
    else:
        b_anchor = b_offset = np.zeros(0)
    # one real constant fixes B's scale: match A * (B/A) at a reference point
    x_ref = _reference_point(t, b_anchor + b_offset)
    r_ref = complex(np.sum(mu / (t - x_ref)))
    log_b = complex(A.log(x_ref)[0] + np.log(r_ref) - ProductFunction(b_anchor + b_offset).log(x_ref)[0])
    model = ClarkModel(t, mu, A, b_anchor, b_offset, log_b)
    if not check:
        return model
    if track_windows is None:
        track_windows = np.arange(t.size) if t.size <= 512 else \
            np.unique(np.linspace(0, t.size - 1, 130).round().astype(np.int64))
    track = track_phase(model, track_windows)
    deriv = tracked_phase_derivative(model)
    deriv_err = float(np.max(np.abs(deriv * mu - 1.0)))
    rng = np.random.default_rng(probe_seed)
    span = max(t[-1] - t[0], 1.0)
    probe = rng.uniform(t[0] - 0.1 * span, t[-1] + 0.1 * span, 20) + 1j * rng.uniform(0.05, 1.0, 20) * span
    hb = model.log_E(np.conj(probe)).real - model.log_E(probe).real  # log|E*/E|
    phi_scale = max(1.0, float(np.max(np.abs(track.phase))))
    checks = {
        "phase_tracked_windows": int(np.unique(track.idx).size),
        "phase_tracking_max_err": track.max_err,
        "phi_prime_mu_max_err": deriv_err,
        "hermite_biehler_max_log_ratio": float(np.max(hb)),
        "B_zeros_interlace": True,
    }
    if track.max_err > PHASE_RTOL * phi_scale:
        raise ModelError(f"tracked phase deviates from the closed form by {track.max_err:.3g}")
    if deriv_err > PHASE_RTOL:
        raise ModelError(f"phi'(t_n) mu_n deviates from 1 by {deriv_err:.3g}")
    if np.any(hb >= 0):
        raise ModelError("Hermite-Biehler probe failed")
    return ClarkModel(t, mu, A, b_anchor, b_offset, log_b, t[track.idx] + track.offset, track.phase, checks)


def _reference_point(t: np.ndarray, bz: np.ndarray) -> float:
    """A real point away from both the spectrum and the zeros of ``B``."""
    if t.size == 1:
        return float(t[0] + 1.0)
    pts = np.sort(np.concatenate([t, bz]))
    g = np.argmax(np.diff(pts[: min(pts.size, 64)]))
    return float(0.5 * (pts[g] + pts[g + 1]))


# ---------------------------------------------------------------------------
# kernels and inner products


def kernel_db(m: ClarkModel, w: complex, z: complex) -> complex:
    """Reproducing kernel ``K_w(z)``; the real diagonal uses ``phi'(w)|E(w)|**2/pi``."""
    w = complex(w)
    z = complex(z)
    if w.imag == 0 and z == w:
        le = m.log_E(np.array([w]))[0]
        return float(m.phase_derivative(np.array([w.real]))[0] * np.exp(2 * le.real) / np.pi)
    le_w = m.log_E(np.array([w]))[0]
    le_z = m.log_E(np.array([z]))[0]
    ls_w = np.conj(m.log_E(np.array([np.conj(w)]))[0])  # log E*(w)
    ls_z = np.conj(m.log_E(np.array([np.conj(z)]))[0])
    num = np.exp(np.conj(le_w) + le_z) - np.exp(np.conj(ls_w) + ls_z)
    return complex(num / (2j * np.pi * (np.conj(w) - z)))


def expand(m: ClarkModel, coeffs, z) -> np.ndarray:
    """``F(z) = A(z) sum conj(a_n) mu_n**(1/2) / (z - t_n)`` through the basis functions."""
    a = _coeffs(m, coeffs)
    z = np.atleast_1d(np.asarray(z, dtype=complex))
    out = np.zeros(z.shape, dtype=complex)
    for n in np.nonzero(a)[0]:
        out += np.conj(a[n]) * np.sqrt(m.masses[n]) * np.exp(m.log_basis(int(n), z))
    return out


def _coeffs(m: ClarkModel, coeffs) -> np.ndarray:
    a = np.asarray(coeffs, dtype=complex).ravel()
    if a.size != m.size:
        raise ValueError(f"coefficient window of length {a.size} does not match the spectrum ({m.size})")
    return a


def inner_db(m: ClarkModel, F_coeffs, G_coeffs) -> complex:
    """Parseval over the orthogonal basis ``A/(z - t_n)``: ``pi sum a_n conj(b_n)``.

    Since ``F`` carries ``conj(a_n)`` in :func:`expand`, this equals
    ``int G conj(F) / |E|**2``; the two orders agree for real coefficients.
    """
    a = _coeffs(m, F_coeffs)
    b = _coeffs(m, G_coeffs)
    return complex(np.pi * np.sum(a * np.conj(b)))


def inner_db_quadrature(m: ClarkModel, F_coeffs, G_coeffs, L: float = 1e4) -> tuple[complex, float]:
    """``int F conj(G) / |E|**2`` over the real line by adaptive quadrature.

    The integral over ``[-L, L]`` uses the spectrum as breakpoints; beyond
    ``L`` the integrand is replaced by its ``C/x**2`` asymptote.  Returns
    the value and the quadrature error estimate.
    """
    a = _coeffs(m, F_coeffs)
    b = _coeffs(m, G_coeffs)

    def integrand(x, part):
        xx = np.array([x])
        f = expand(m, a, xx)[0]
        g = expand(m, b, xx)[0]
        v = f * np.conj(g) * np.exp(-2 * m.log_E(xx)[0].real)
        return v.real if part == 0 else v.imag

    pts = np.sort(np.concatenate([m.spectrum, [0.0]]))
    pts = pts[(pts > -L) & (pts < L)]
    total, err = 0.0 + 0.0j, 0.0
    edges = np.concatenate([[-L], pts, [L]])
    for lo, hi in zip(edges[:-1], edges[1:]):
        if hi <= lo:
            continue
        for part in (0, 1):
            v, e = quad(integrand, lo, hi, args=(part,), limit=200, epsabs=1e-13, epsrel=1e-12)
            total += v if part == 0 else 1j * v
            err += e
    # F ~ conj(sum conj(a) mu^1/2) * A/z and |A/E| -> 1/sqrt(1 + (sum mu)^2 / z^2) -> 1
    sa = np.sum(np.conj(a) * np.sqrt(m.masses))
    sb = np.sum(np.conj(b) * np.sqrt(m.masses))
    C = sa * np.conj(sb)
    total += 2 * C / L
    return complex(total), err


# ---------------------------------------------------------------------------
# residue identities


@dataclass(frozen=True, eq=False)
class SplitZeros:
    """Zero list ``anchor + offset`` for a genus-0 product; anchors are spectrum points where zeros crowd."""

    anchor: np.ndarray
    offset: np.ndarray

    @classmethod
    def of(cls, zeros) -> "SplitZeros":
        if isinstance(zeros, SplitZeros):
            return zeros
        if isinstance(zeros, ProductFunction):
            zeros = zeros.zeros.real
        z = np.asarray(zeros, dtype=float).ravel()
        return cls(z, np.zeros_like(z))

    @classmethod
    def from_gaps(cls, gz) -> "SplitZeros":
        return cls(gz.anchor, gz.direction * gz.distance)

    def take(self, sel) -> "SplitZeros":
        return SplitZeros(self.anchor[sel], self.offset[sel])

    def join(self, other) -> "SplitZeros":
        other = SplitZeros.of(other)
        return SplitZeros(np.concatenate([self.anchor, other.anchor]), np.concatenate([self.offset, other.offset]))

    @property
    def values(self) -> np.ndarray:
        return self.anchor + self.offset

    def log(self, z) -> np.ndarray:
        return ProductFunction(self.values).log(z)

    def log_at(self, points) -> np.ndarray:
        """Complex log at real points (``pi`` imaginary part for negative values)."""
        x = np.asarray(points, dtype=float)
        la, sg = _split_real_product(self.anchor, self.offset, x, np.zeros_like(x))
        return la + 1j * np.pi * (sg < 0)


@dataclass(frozen=True)
class FitReport:
    """Relative errors of ``lhs = kappa * rhs`` after fitting ``kappa`` on ratios."""

    name: str
    labels: np.ndarray
    rel_err: np.ndarray
    kappa: complex
    tol: float

    @property
    def max_rel_err(self) -> float:
        return float(np.max(self.rel_err)) if self.rel_err.size else 0.0

    @property
    def violations(self) -> list:
        return [v.item() if hasattr(v, "item") else v for v in self.labels[self.rel_err > self.tol]]

    @property
    def passed(self) -> bool:
        return not self.violations

    def to_dict(self) -> dict:
        return {"identity": self.name, "kappa": [float(self.kappa.real), float(self.kappa.imag)],
                "max_rel_err": self.max_rel_err, "violations": self.violations, "passed": self.passed}


def _fit_ratio(name: str, labels, lhs: np.ndarray, log_rhs: np.ndarray, tol: float) -> FitReport:
    """Fit ``lhs = kappa exp(log_rhs)`` with ``kappa`` the median ratio; errors relative to ``|lhs|``."""
    ratio = lhs * np.exp(-log_rhs)
    kappa = complex(np.median(ratio.real) + 1j * np.median(ratio.imag))
    if kappa == 0:
        raise ValueError(f"{name}: degenerate fit")
    err = np.abs(ratio / kappa - 1.0)
    return FitReport(name, np.asarray(labels), err, kappa, tol)


@dataclass(frozen=True)
class ExtReport:
    ext1: FitReport
    ext2: FitReport
    ext3: FitReport
    tail_bound: float = 0.0

    @property
    def max_rel_err(self) -> float:
        return max(self.ext1.max_rel_err, self.ext2.max_rel_err, self.ext3.max_rel_err)

    @property
    def passed(self) -> bool:
        return self.ext1.passed and self.ext2.passed and self.ext3.passed

    def to_dict(self) -> dict:
        return {"ext1": self.ext1.to_dict(), "ext2": self.ext2.to_dict(), "ext3": self.ext3.to_dict(),
                "max_rel_err": self.max_rel_err, "tail_bound": self.tail_bound, "passed": self.passed}


def log_A_prime(m: ClarkModel) -> np.ndarray:
    """``log A'(t_n)`` from the product with the ``n``-th factor removed."""
    return np.array([m.log_basis(n, np.array([m.spectrum[n]], dtype=complex))[0] for n in range(m.size)])


def A_prime_difference(m: ClarkModel, n: int, log_scale: complex) -> complex:
    """``A'(t_n) e^{-log_scale}`` by central differences (step ``1e-6`` gap) with Richardson.

    Points are taken as exact offsets from ``t_n`` so the step is not lost to rounding.
    """
    t = m.spectrum
    gaps = np.diff(t)
    gap = min(gaps[max(n - 1, 0)], gaps[min(n, gaps.size - 1)]) if gaps.size else 1.0
    h = 1e-6 * gap
    off = np.array([h, -h, h / 2, -h / 2])
    la, sa = _split_real_product(t, np.zeros_like(t), np.full(4, t[n]), off)
    v = sa * np.exp(la - log_scale.real) * np.exp(-1j * log_scale.imag)
    coarse = (v[0] - v[1]) / (2 * h)
    fine = (v[2] - v[3]) / h
    return complex((4 * fine - coarse) / 3)


def residual_ext(m: ClarkModel, a, G1, G2, S1_zeros, S2_zeros, samples=None,
                 tol: float = IDENTITY_RTOL) -> ExtReport:
    """Check the three residue identities of a model with coefficients ``a`` (real window).

    * ext1: ``sum a_n mu_n**(1/2)/(z - t_n) = k G2 S2 / A`` at the samples;
    * ext2: ``sum (G/E)(t_n) a_n mu_n**(1/2)/(z - t_n) = k i G1 S1 / A`` at the samples;
    * ext3: ``S(t_n) = k |a_n|**2 A'(t_n)`` at every spectrum point.

    ``E(t_n)`` comes from the product route for ``B``.  ``G1``, ``G2`` and
    the zero lists may be :class:`SplitZeros`, products or plain arrays;
    split lists keep zeros that crowd the spectrum exact at ``t_n``.
    """
    a = np.asarray(a, dtype=float).ravel()
    if a.size != m.size:
        raise ValueError("coefficients and spectrum differ in length")
    t = m.spectrum
    if samples is None:
        rng = np.random.default_rng(1)
        span = max(t[-1] - t[0], 1.0)
        samples = rng.uniform(t[0], t[-1], 20) + 1j * rng.uniform(0.01, 0.1, 20) * span
    z = np.atleast_1d(np.asarray(samples, dtype=complex))
    if np.any(np.min(np.abs(z[:, None] - t[None, :]), axis=1) < 1e-9):
        raise ValueError("sample collides with the spectrum")
    S1, S2 = SplitZeros.of(S1_zeros), SplitZeros.of(S2_zeros)
    G1, G2 = SplitZeros.of(G1), SplitZeros.of(G2)
    w = a * np.sqrt(m.masses)
    lhs1 = _chunked_sum(w, t, z, sign=1.0)
    e1 = _fit_ratio("ext1", np.arange(z.size), lhs1, G2.log(z) + S2.log(z) - m.A.log(z), tol)
    # E(t_n) = -i B(t_n), with B from its zero list
    _, _, lb, sb = m.real_products(np.arange(m.size), np.zeros(m.size))
    logE_t = lb + np.log(-1j * sb)
    GE = np.exp(G1.log_at(t) + G2.log_at(t) - logE_t)
    lhs2 = _chunked_sum(GE * w, t, z, sign=1.0)
    e2 = _fit_ratio("ext2", np.arange(z.size), lhs2,
                    np.log(1j) + G1.log(z) + S1.log(z) - m.A.log(z), tol)
    lap = log_A_prime(m)
    nz = a != 0
    logS = S1.log_at(t) + S2.log_at(t)
    e3 = _fit_ratio("ext3", np.nonzero(nz)[0], np.exp(logS[nz] - lap[nz]), 2 * np.log(np.abs(a[nz])) + 0j, tol)
    return ExtReport(e1, e2, e3)


# ---------------------------------------------------------------------------
# example construction


@dataclass(frozen=True)
class ExampleSchedule:
    """Block positions (spectrum positions), shift radii and the growth constants of the spectrum."""

    n: np.ndarray
    l: np.ndarray
    rho: np.ndarray
    rho_prime: np.ndarray
    N: float
    c: float

    def to_dict(self) -> dict:
        return {"n_k": [int(v) for v in self.n], "l_k": [int(v) for v in self.l],
                "rho_k": [float(v) for v in self.rho], "rho_prime_k": [float(v) for v in self.rho_prime],
                "N": float(self.N), "c": float(self.c)}


def power_spectrum(n_min: int, n_max: int, gamma: float = 1.5) -> tuple[np.ndarray, np.ndarray]:
    """Indices and points ``sign(n) |n|**gamma``."""
    n = np.arange(n_min, n_max + 1)
    return n, np.sign(n) * np.abs(n).astype(float) ** gamma


def hypothesis_constant(t: np.ndarray, N: float) -> float:
    """Largest ``c`` with ``c |t_n|**-N <= t_{n+1} - t_n`` on the window (points with ``t_n = 0`` skipped)."""
    gaps = np.diff(t)
    tn = np.abs(t[:-1])
    sel = tn > 0
    return float(np.min(gaps[sel] * tn[sel] ** N))


def choose_blocks(index: np.ndarray, t: np.ndarray, K: int) -> tuple[np.ndarray, np.ndarray]:
    """Greedy schedule: positions ``p_k`` (into ``t``) and offsets ``l_k``.

    Enforces ``2 t[p_k] < t[p_k + l_k] < t[p_{k+1}]/2`` and
    ``k (t[p_k + 1] - t[p_k]) <= t[p_k]/100``.
    """
    pos, ls = [], []
    start = int(np.searchsorted(index, 1))
    floor = 0.0
    for k in range(1, K + 1):
        p = start
        while p + 1 < t.size and not (t[p] > 0 and t[p] > 2 * floor and k * (t[p + 1] - t[p]) <= t[p] / 100):
            p += 1
        l = 1
        while p + l + 1 < t.size and not t[p + l] > 2 * t[p]:
            l += 1
        if p + l + 2 >= t.size:
            raise ScheduleInfeasible(f"window ends before block {k} can be placed")
        pos.append(p)
        ls.append(l)
        floor = t[p + l]
        start = p + l + 1
    return np.array(pos), np.array(ls)


def _shift(t: np.ndarray, p: int, s: float, k: int, rho: float) -> tuple[float, int]:
    """Shifted zero and the excluded spectrum position for the zero ``s`` in gap ``(t[p], t[p+1])``."""
    if abs(s - t[p]) > abs(s - t[p + 1]):
        return t[p + 1] - k * abs(s - t[p + 1]) * rho, p + 1
    return t[p] - k * abs(s - t[p]) * rho, p


def _choose_rho(t, p, s, k, threshold, forbidden, candidates):
    for rho in candidates:
        st, anchor = _shift(t, p, s, k, rho)
        others = np.delete(t, anchor)
        d_spec = float(np.min(np.abs(others - st)))
        d_zero = float(np.min(np.abs(forbidden - st))) if forbidden.size else np.inf
        if d_spec >= threshold and d_zero >= threshold and t[anchor] / 2 < st < t[anchor]:
            return rho, st, anchor, d_spec
    raise ScheduleInfeasible(f"no admissible shift radius for block {k}")


@dataclass(frozen=True, eq=False)
class ExampleResult:
    index: np.ndarray
    spectrum: np.ndarray
    schedule: ExampleSchedule
    a: np.ndarray
    c: np.ndarray
    S_zeros: np.ndarray
    s: np.ndarray
    s_shift: np.ndarray
    z_second: np.ndarray
    z_second_shift: np.ndarray
    model: ClarkModel
    G1_zeros: np.ndarray
    G2_zeros: np.ndarray
    S1_zeros: np.ndarray
    S2_zeros: np.ndarray
    ext: ExtReport
    c_recomputed_err: float
    a_prime_err: float
    threshold: float
    h20_distance: np.ndarray

    @property
    def c_band(self) -> np.ndarray:
        return np.abs(self.c[self.schedule.n + 1])

    @property
    def c_band_ratio(self) -> float:
        v = self.c_band
        return float(np.max(v) / np.min(v))

    def block_sums(self) -> np.ndarray:
        """``sum c_n**2`` over consecutive blocks split at the midpoints of the scheduled positions."""
        p = self.schedule.n
        cuts = np.concatenate([[0], ((p[:-1] + p[1:]) // 2), [self.c.size]])
        c2 = self.c ** 2
        return np.array([float(np.sum(c2[lo:hi])) for lo, hi in zip(cuts[:-1], cuts[1:])])

    @property
    def linear_growth(self) -> bool:
        b = self.block_sums()
        return bool(np.min(b) > 0 and np.min(b) >= 0.1 * np.max(b))

    def weighted_tail(self) -> float:
        """``sum c_n**2/t_n**2`` over the upper half of the positive window."""
        t = self.spectrum
        sel = t > t[-1] / 2
        return float(np.sum(self.c[sel] ** 2 / t[sel] ** 2))

    def weighted_total(self) -> float:
        sel = self.spectrum != 0
        return float(np.sum(self.c[sel] ** 2 / self.spectrum[sel] ** 2))

    @property
    def shifted_in_range(self) -> bool:
        t = self.spectrum
        ok = []
        for st, p in zip(self.s_shift, self.schedule.n):
            anchor = p + 1 if st > t[p] else p
            ok.append(t[anchor] / 2 < st < t[anchor])
        return bool(all(ok))

    @property
    def passed(self) -> bool:
        return (self.c_band_ratio <= 10 and self.linear_growth and self.weighted_tail() < 1e-3
                and self.ext.passed and self.c_recomputed_err <= IDENTITY_RTOL
                and self.a_prime_err <= IDENTITY_RTOL)

    def to_dict(self) -> dict:
        return {
            "steps": {
                "i_schedule": self.schedule.to_dict(),
                "ii_coefficients": {"abs_a_scheduled": [float(abs(self.a[p])) for p in self.schedule.n]},
                "iii_S_zeros": {"count": int(self.S_zeros.size)},
                "iv_split": {"s_k": [float(v) for v in self.s],
                             "S2_zeros": [float(v) for v in self.z_second]},
                "v_shift": {"s_tilde_k": [float(v) for v in self.s_shift], "h20_threshold": self.threshold,
                            "h20_distance": [float(v) for v in self.h20_distance],
                            "in_half_interval": self.shifted_in_range},
                "vi_masses": {"c_band": [float(v) for v in self.c_band], "c_band_ratio": self.c_band_ratio,
                              "c_recomputed_max_rel_err": self.c_recomputed_err},
                "vii_model": {**self.model.checks, "A_prime_difference_max_rel_err": self.a_prime_err},
                "viii_G1": {"shifted_zeros": [float(v) for v in self.z_second_shift]},
                "ix_checks": {
                    "residual_ext": self.ext.to_dict(),
                    "block_sums_c2": [float(v) for v in self.block_sums()],
                    "linear_growth": self.linear_growth,
                    "weighted_total": self.weighted_total(),
                    "weighted_tail": self.weighted_tail(),
                },
            },
            "passed": self.passed,
        }


def construct_example(index, spectrum, K: int = 4, N: float = 1.0, rho_candidates: int = 64,
                      check_model: bool = True) -> ExampleResult:
    """Run the full construction on a finite spectrum window.

    ``index`` holds the integer labels of the spectrum points (``0`` must be
    present so that the blocks start on the positive side).
    """
    index = np.asarray(index)
    t = np.asarray(spectrum, dtype=float)
    if t.size != index.size or np.any(np.diff(t) <= 0):
        raise ValueError("spectrum must be strictly increasing and match the index")
    c_hyp = hypothesis_constant(t, N)
    pos, ls = choose_blocks(index, t, K)
    # (ii) coefficient moduli
    absa = 1.0 / (np.abs(index).astype(float) + 1.0)
    k = np.arange(1, K + 1)
    for kk, p, l in zip(k, pos, ls):
        absa[[p, p + 1, p + l, p + l + 1]] = 1.0 / kk
    # (iii) zeros of S/A = sum a_n^2/(z - t_n), one per gap, kept split
    zS = SplitZeros.from_gaps(locate_gap_zeros(CauchyTransform(t, absa ** 2)))
    # (iv) ownership: T0 at gaps p_k, S2 at gaps p_k + l_k, T1 the rest
    owned = np.concatenate([pos, pos + ls])
    T0, S2 = zS.take(pos), zS.take(pos + ls)
    T1 = zS.take(np.setdiff1d(np.arange(t.size - 1), owned))
    s, z2 = T0.values, S2.values
    # (v) shift T0's zeros
    thr = c_hyp / 4 * np.abs(t[pos]) ** (-N)
    cands = 1.0 + np.arange(1, rho_candidates + 1) / (rho_candidates + 1.0)
    rho, st, dist = [], [], []
    for i, kk in enumerate(k):
        forbidden = np.concatenate([T1.values, z2, np.asarray(st)])
        r_, s_, _, d_ = _choose_rho(t, pos[i], s[i], int(kk), thr[i], forbidden, cands)
        rho.append(r_)
        st.append(s_)
        dist.append(d_)
    st = np.array(st)
    T0t = SplitZeros.of(st)
    # (vi) c_n = |a_n| T0~(t_n)/T0(t_n), signs of a follow c
    c = absa * np.exp(T0t.log_at(t) - T0.log_at(t)).real
    a = absa * np.sign(c)
    mu = c ** 2
    # (vii) model
    extra = np.concatenate([pos, pos + 1, pos + ls, pos + ls + 1])
    windows = None if t.size <= 512 else np.concatenate(
        [np.linspace(0, t.size - 1, 130).round().astype(np.int64), extra])
    model = build_clark(t, mu, check=check_model, track_windows=windows)
    # (viii) G1 from S2 by the same shift
    rho2, z2t = [], []
    for i, kk in enumerate(k):
        forbidden = np.concatenate([T1.values, st, np.asarray(z2t)])
        r_, s_, _, _ = _choose_rho(t, pos[i] + ls[i], z2[i], int(kk), thr[i], forbidden, cands)
        rho2.append(r_)
        z2t.append(s_)
    z2t = np.array(z2t)
    G1 = SplitZeros.of(z2t)
    G2 = T0t.join(T1)
    S1 = T0.join(T1)
    # (ix) identities; c_n recomputed from the residues of h = T0~ T1 S2 over A
    ext = residual_ext(model, a, G1, G2, S1, S2)
    lap = log_A_prime(model)
    ratio = np.exp(G2.log_at(t) + S2.log_at(t) - lap).real / absa  # proportional to c_n
    kappa = np.median(ratio / c)
    c_err = float(np.max(np.abs(ratio / kappa - c) / np.abs(c)))
    check_pts = np.unique(extra)
    a_prime_err = float(max(abs(A_prime_difference(model, int(n), lap[n]) - 1.0) for n in check_pts))
    sched = ExampleSchedule(pos, ls, np.array(rho), np.array(rho2), N, c_hyp)
    return ExampleResult(index, t, sched, a, c, zS.values, s, st, z2, z2t, model, z2t, G2.values, S1.values,
                         z2, ext, c_err, a_prime_err, float(np.min(thr)), np.array(dist))


def export_model_json(path, m: ClarkModel) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(m.to_dict(), fh, indent=1)


__all__ = [
    "ClarkModel", "PhaseTrack", "ModelError", "ScheduleInfeasible", "build_clark", "track_phase", "tracked_phase_derivative",
    "kernel_db", "expand", "inner_db", "inner_db_quadrature", "residual_ext", "ExtReport", "FitReport",
    "log_A_prime", "A_prime_difference", "SplitZeros", "ExampleSchedule", "ExampleResult", "power_spectrum",
    "hypothesis_constant", "choose_blocks", "construct_example", "export_model_json",
]
