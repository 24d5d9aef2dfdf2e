"""Block fixed-point system for a positive coefficient sequence.

The unknowns are ``r = (r_1, ..., r_{2K})``; block ``k`` fixes the three
coefficients next to the scheduled index ``n_k``:

    a_{n_k} = 2 r_{2k-1} / k**2,   a_{n_k+1} = r_{2k} / k**2,   a_{n_k+2} = 3 / k**2,

while ``a_0`` is a free positive constant and ``a_n = n**-2`` elsewhere.
Requiring both ``sum a_n/(s_k - n)`` and ``sum a_n**2/(s_k - n)`` to vanish
at ``s_k = n_k + 1/2`` gives ``D(r) + W(r) = y*``, where ``D`` acts
blockwise, ``W`` couples different blocks and ``y*`` collects the
unscheduled background.  The map

    T(r) = r* + r - D^{-1}(D(r) + W(r)),   r* = D^{-1}(y*),

is a contraction near ``r° = (1, ..., 1)`` once the schedule is sparse.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .cardinal import SampledEntire
from .lattice import LatticeSequence, PowerLaw, cauchy_sum, power_tail_bound, upper_law_sum

BALL_RADIUS = 0.01
SPARSE_THRESHOLD = 1.0 / 200.0


class ScheduleError(ValueError):
    """Schedule or horizon violates its invariants."""


class SparsenessError(RuntimeError):
    """The schedule is not sparse enough for the contraction argument."""


class ConvergenceError(RuntimeError):
    """The fixed-point iteration left the ball or ran out of iterations."""

    def __init__(self, msg: str, iteration: int):
        super().__init__(msg)
        self.iteration = iteration


@dataclass(frozen=True, eq=False)
class Schedule:
    """Sparse index schedule ``n_1 < ... < n_K``.

    ``n_{k+1} >= 2 n_k`` is required, so the geometric default
    ``n_k = base_M * 2**k`` is admissible.
    """

    n: np.ndarray
    base_M: int | None = None
    horizon: int | None = None
    a0: float = 1.0

    def __post_init__(self):
        n = np.asarray(self.n, dtype=np.int64).ravel()
        object.__setattr__(self, "n", n)
        if self.horizon is None:
            object.__setattr__(self, "horizon", int(4 * n[-1]) if n.size else 4)
        if n.size:
            if n[0] < 3:
                raise ScheduleError(f"n_1 = {n[0]} < 3")
            if np.any(n[1:] < 2 * n[:-1]):
                raise ScheduleError("schedule must satisfy n_(k+1) >= 2 n_k")
            if self.horizon <= n[-1] + 2:
                raise ScheduleError(f"horizon {self.horizon} does not cover n_K + 2 = {n[-1] + 2}")
        if not self.a0 > 0:
            raise ScheduleError("a_0 must be positive")

    @classmethod
    def geometric(cls, K: int, base_M: int, a0: float = 1.0) -> "Schedule":
        if K < 0 or base_M < 1:
            raise ScheduleError("need K >= 0 and base_M >= 1")
        n = base_M * 2 ** np.arange(1, K + 1, dtype=np.int64)
        return cls(n, base_M=base_M, a0=a0)

    @property
    def K(self) -> int:
        return int(self.n.size)

    @property
    def s(self) -> np.ndarray:
        """Vanishing points ``s_k = n_k + 1/2``."""
        return self.n + 0.5

    @property
    def k(self) -> np.ndarray:
        return np.arange(1, self.K + 1, dtype=float)


@dataclass(frozen=True)
class BlockState:
    """Block vector ``r`` stored as ``(r_1, r_2, ..., r_{2K})``."""

    r: np.ndarray

    def __post_init__(self):
        r = np.asarray(self.r, dtype=float).ravel().copy()
        if r.size % 2:
            raise ValueError("block vectors have even length")
        r.setflags(write=False)
        object.__setattr__(self, "r", r)

    @classmethod
    def center(cls, K: int) -> "BlockState":
        return cls(np.ones(2 * K))

    @property
    def odd(self) -> np.ndarray:
        return self.r[0::2]

    @property
    def even(self) -> np.ndarray:
        return self.r[1::2]

    @property
    def alpha(self) -> np.ndarray:
        """``alpha_k = 2 r_{2k-1}``, the scheduled coefficient times ``k**2``."""
        return 2.0 * self.odd

    def distance_to_center(self) -> float:
        return float(np.max(np.abs(self.r - 1.0))) if self.r.size else 0.0


def _interleave(odd: np.ndarray, even: np.ndarray) -> np.ndarray:
    out = np.empty(2 * odd.size)
    out[0::2] = odd
    out[1::2] = even
    return out


def _as_r(r) -> np.ndarray:
    return r.r if isinstance(r, BlockState) else np.asarray(r, dtype=float)


# ---------------------------------------------------------------------------
# coefficient sequences


def _scheduled(sch: Schedule, r: np.ndarray):
    k = sch.k
    idx = np.concatenate([[0], sch.n, sch.n + 1, sch.n + 2])
    vals = np.concatenate([[sch.a0], 2 * r[0::2] / k ** 2, r[1::2] / k ** 2, 3 / k ** 2])
    return idx, vals


def base_coefficients(sch: Schedule, r) -> LatticeSequence:
    """Coefficient sequence ``a_n`` for block vector ``r``; ``n**-2`` off the schedule."""
    r = _as_r(r)
    if r.size != 2 * sch.K:
        raise ScheduleError(f"block vector of length {r.size} for a schedule with K = {sch.K}")
    idx, vals = _scheduled(sch, r)
    return LatticeSequence(idx, vals, PowerLaw(2, 1.0))


def squared_coefficients(a: LatticeSequence) -> LatticeSequence:
    return LatticeSequence(a.indices, a.values ** 2, PowerLaw(2 * a.law.p, a.law.scale ** 2))


def _background(sch: Schedule, power: int) -> LatticeSequence:
    """Unscheduled part of ``a_n**power``: zero on ``{n_l, n_l+1}``, ``(3/l**2)**power`` at ``n_l+2``."""
    k = sch.k
    idx = np.concatenate([[0], sch.n, sch.n + 1, sch.n + 2])
    vals = np.concatenate([[sch.a0 ** power], np.zeros(2 * sch.K), (3 / k ** 2) ** power])
    return LatticeSequence(idx, vals, PowerLaw(2 * power, 1.0))


# ---------------------------------------------------------------------------
# block maps


def map_D(r) -> np.ndarray:
    """Blockwise ``(2 r_{2k-1} - r_{2k}, 4 r_{2k-1}**2 - r_{2k}**2)``."""
    r = _as_r(r)
    o, e = r[0::2], r[1::2]
    return _interleave(2 * o - e, 4 * o ** 2 - e ** 2)


def map_Dinv(y) -> BlockState:
    """Inverse of :func:`map_D`; needs every odd entry nonzero."""
    y = np.asarray(y, dtype=float)
    o, e = y[0::2], y[1::2]
    bad = np.nonzero(o == 0)[0]
    if bad.size:
        raise ValueError(f"map_Dinv: odd entry of block {int(bad[0]) + 1} is zero")
    return BlockState(_interleave((e + o ** 2) / (4 * o), (e - o ** 2) / (2 * o)))


def _coupling(sch: Schedule):
    k = sch.k
    d1 = sch.s[:, None] - sch.n[None, :]
    d2 = d1 - 1.0
    off = ~np.eye(sch.K, dtype=bool)
    with np.errstate(divide="ignore"):
        c1 = np.where(off, 1.0 / d1, 0.0)
        c2 = np.where(off, 1.0 / d2, 0.0)
    return k, c1, c2


def map_W(r, sch: Schedule) -> np.ndarray:
    """Off-diagonal coupling between blocks."""
    r = _as_r(r)
    if sch.K == 0:
        return np.zeros(0)
    k, c1, c2 = _coupling(sch)
    o, e = r[0::2], r[1::2]
    w_odd = k ** 2 * (c1 @ (o / k ** 2) + c2 @ (e / (2 * k ** 2)))
    w_even = k ** 4 * (c1 @ (2 * o ** 2 / k ** 4) + c2 @ (e ** 2 / (2 * k ** 4)))
    return _interleave(w_odd, w_even)


def jacobian(r, sch: Schedule) -> np.ndarray:
    """Jacobian of ``D + W`` in the interleaved ordering."""
    r = _as_r(r)
    K = sch.K
    J = np.zeros((2 * K, 2 * K))
    if K == 0:
        return J
    k, c1, c2 = _coupling(sch)
    o, e = r[0::2], r[1::2]
    kk = k[:, None]
    ll = k[None, :]
    J[0::2, 0::2] = kk ** 2 * c1 / ll ** 2
    J[0::2, 1::2] = kk ** 2 * c2 / (2 * ll ** 2)
    J[1::2, 0::2] = kk ** 4 * c1 * 4 * o[None, :] / ll ** 4
    J[1::2, 1::2] = kk ** 4 * c2 * e[None, :] / ll ** 4
    i = np.arange(K)
    J[2 * i, 2 * i] += 2.0
    J[2 * i, 2 * i + 1] += -1.0
    J[2 * i + 1, 2 * i] += 8 * o
    J[2 * i + 1, 2 * i + 1] += -2 * e
    return J


@dataclass(frozen=True)
class Target:
    y: np.ndarray
    tail_bound: np.ndarray


def target_y_star(sch: Schedule, include_background: bool = True, method: str = "exact") -> Target:
    """Right-hand side ``y*`` of ``D(r) + W(r) = y*``.

    ``method="exact"`` sums the background in closed form;
    ``method="direct"`` adds the terms with ``|n| <= horizon`` one by one and
    bounds the rest by the power-law tail integral.  With
    ``include_background=False`` every unscheduled coefficient is treated
    as zero and ``y* = y°``.
    """
    K = sch.K
    k = sch.k
    y0 = _interleave(np.ones(K), 3 * np.ones(K))
    if not include_background or K == 0:
        return Target(y0, np.zeros(2 * K))
    sums, bounds = [], []
    for power in (1, 2):
        bg = _background(sch, power)
        own = (3 / k ** 2) ** power / (sch.s - sch.n - 2)
        if method == "exact":
            cs = cauchy_sum(bg, sch.s.astype(complex))
            sums.append(cs.value.real - own)
            bounds.append(np.asarray(cs.tail_bound, dtype=float))
        elif method == "direct":
            N = sch.horizon
            n = np.arange(-N, N + 1)
            n = n[np.lexsort((n, np.abs(n)))]
            v = bg.at(n).real
            tot = np.array([np.sum(v / (s - n)) for s in sch.s])
            sums.append(tot - own)
            bounds.append(power_tail_bound(sch.s, N, 2 * power))
        else:
            raise ValueError(f"unknown method {method!r}")
    y = _interleave(1 - k ** 2 / 2 * sums[0], 3 - k ** 4 / 2 * sums[1])
    tb = _interleave(k ** 2 / 2 * bounds[0], k ** 4 / 2 * bounds[1])
    return Target(y, tb)


# ---------------------------------------------------------------------------
# sparseness


@dataclass(frozen=True)
class SparsenessReport:
    sp1: np.ndarray
    sp2: float
    sp3: float
    threshold: float

    @property
    def passed(self) -> bool:
        return bool(np.all(self.sp1 < self.threshold) and self.sp2 < self.threshold and self.sp3 < self.threshold)

    def to_dict(self) -> dict:
        return {
            "sp1": [float(v) for v in self.sp1],
            "sp1_max": float(np.max(self.sp1)) if self.sp1.size else 0.0,
            "sp2_W_sup": self.sp2,
            "sp3_W_lipschitz": self.sp3,
            "threshold": self.threshold,
            "violations": self.violations(),
            "passed": self.passed,
        }

    def violations(self) -> list[str]:
        out = [f"sp1[k={i + 1}]" for i in np.nonzero(self.sp1 >= self.threshold)[0]]
        if self.sp2 >= self.threshold:
            out.append("sp2")
        if self.sp3 >= self.threshold:
            out.append("sp3")
        return out


def _abs_background_sum(sch: Schedule, power: int) -> np.ndarray:
    """``sum' |a_n**power / (s_k - n)|`` per block, using signed sums and one-sided tails."""
    bg = _background(sch, power)
    p = 2 * power
    out = np.empty(sch.K)
    total = cauchy_sum(bg, sch.s.astype(complex)).value.real
    di, dv = bg.deviations()
    for i, (nk, s) in enumerate(zip(sch.n, sch.s)):
        own = (3 / (i + 1) ** 2) ** power / (s - nk - 2)
        signed = total[i] - own
        start = int(nk) + 3
        upper = upper_law_sum(start, float(s), p)
        sel = di >= start
        upper += float(np.sum(dv[sel].real / (s - di[sel])))
        out[i] = signed - 2.0 * upper
    return out


def _ball_samples(rng: np.random.Generator, K: int, count: int) -> np.ndarray:
    return 1.0 + rng.uniform(-BALL_RADIUS, BALL_RADIUS, size=(count, 2 * K))


def sparseness_report(sch: Schedule, samples: int = 50, seed: int = 0,
                      threshold: float = SPARSE_THRESHOLD) -> SparsenessReport:
    """Sparseness surrogates: background size per block, ``sup ||W||`` and ``Lip(W)`` on the ball."""
    K = sch.K
    if K == 0:
        return SparsenessReport(np.zeros(0), 0.0, 0.0, threshold)
    k = sch.k
    sp1 = k ** 2 / 2 * _abs_background_sum(sch, 1) + k ** 4 / 2 * _abs_background_sum(sch, 2)
    rng = np.random.default_rng(seed)
    pts = _ball_samples(rng, K, samples)
    sp2 = max(float(np.max(np.abs(map_W(p, sch)))) for p in pts)
    other = _ball_samples(rng, K, samples)
    lip = 0.0
    for p, q in zip(pts, other):
        lip = max(lip, float(np.max(np.abs(map_W(p, sch) - map_W(q, sch))) / np.max(np.abs(p - q))))
    return SparsenessReport(sp1, sp2, lip, threshold)


def auto_schedule(K: int, start: int = 12, a0: float = 1.0, max_doublings: int = 30) -> Schedule:
    """Smallest ``base_M = start * 2**j`` whose schedule passes :func:`sparseness_report`."""
    M = start
    for _ in range(max_doublings):
        sch = Schedule.geometric(K, M, a0)
        if sparseness_report(sch).passed:
            return sch
        M *= 2
    raise SparsenessError(f"no sparse schedule found up to base_M = {M // 2}")


# ---------------------------------------------------------------------------
# solvers


def contraction_map(r, sch: Schedule, r_star: np.ndarray) -> np.ndarray:
    r = _as_r(r)
    return r_star + r - map_Dinv(map_D(r) + map_W(r, sch)).r


def empirical_lipschitz(sch: Schedule, pairs: int = 100, seed: int = 0) -> float:
    """Largest ``||T(p) - T(q)|| / ||p - q||`` (sup norms) over random pairs in the ball around ``r°``."""
    if sch.K == 0:
        return 0.0
    r_star = map_Dinv(target_y_star(sch).y).r
    rng = np.random.default_rng(seed)
    ps = _ball_samples(rng, sch.K, pairs)
    qs = _ball_samples(rng, sch.K, pairs)
    worst = 0.0
    for p, q in zip(ps, qs):
        num = np.max(np.abs(contraction_map(p, sch, r_star) - contraction_map(q, sch, r_star)))
        worst = max(worst, float(num / np.max(np.abs(p - q))))
    return worst


@dataclass(frozen=True)
class FixedPoint:
    state: BlockState
    iterations: int
    trace: list = field(default_factory=list)


def _max_vanishing(sch: Schedule, r: np.ndarray) -> float:
    h = SampledEntire(base_coefficients(sch, r))
    return float(np.max(np.abs(h(sch.s.astype(complex))))) if sch.K else 0.0


def solve_fixed_point(sch: Schedule, tol: float = 1e-13, max_iter: int = 50, start=None,
                      check_sparseness: bool = True) -> FixedPoint:
    """Iterate the contraction from ``r°`` (or ``start``) until the step drops below ``tol``.

    Each trace row is ``(iteration, ||r_{m+1} - r_m||_inf, max_k |h(s_k)|)``.
    """
    if check_sparseness:
        rep = sparseness_report(sch)
        if not rep.passed:
            raise SparsenessError(f"sparseness surrogates fail: {rep.violations()}")
    r_star = map_Dinv(target_y_star(sch).y).r
    r = BlockState.center(sch.K).r if start is None else _as_r(start).copy()
    trace = []
    for it in range(1, max_iter + 1):
        nxt = contraction_map(r, sch, r_star)
        step = float(np.max(np.abs(nxt - r))) if r.size else 0.0
        r = nxt
        if r.size and np.max(np.abs(r - 1.0)) > BALL_RADIUS:
            raise ConvergenceError(f"iterate {it} left the ball", it)
        trace.append((it, step, _max_vanishing(sch, r)))
        if step <= tol:
            return FixedPoint(BlockState(r), it, trace)
    raise ConvergenceError(f"no convergence within {max_iter} iterations", max_iter)


def newton_solve(sch: Schedule, tol: float = 1e-15, max_iter: int = 50) -> BlockState:
    """Newton's method on ``D(r) + W(r) = y*`` with the analytic Jacobian."""
    y = target_y_star(sch).y
    r = BlockState.center(sch.K).r
    for _ in range(max_iter):
        F = map_D(r) + map_W(r, sch) - y
        dr = np.linalg.solve(jacobian(r, sch), F) if r.size else r
        r = r - dr
        if not r.size or np.max(np.abs(dr)) <= tol:
            return BlockState(r)
    return BlockState(r)


@dataclass(frozen=True)
class VanishingReport:
    s: np.ndarray
    h_abs: np.ndarray
    S_abs: np.ndarray
    tail_bound: np.ndarray
    tol: float = 1e-9

    @property
    def passed(self) -> bool:
        lim = self.tail_bound + self.tol
        return bool(np.all(self.h_abs <= lim) and np.all(self.S_abs <= lim))

    def to_dict(self) -> dict:
        return {
            "s_k": [float(v) for v in self.s],
            "h_abs": [float(v) for v in self.h_abs],
            "S_abs": [float(v) for v in self.S_abs],
            "tail_bound": [float(v) for v in self.tail_bound],
            "residual_sup": float(max(np.max(self.h_abs), np.max(self.S_abs))) if self.s.size else 0.0,
            "passed": self.passed,
        }


def verify_vanishing(sch: Schedule, r) -> VanishingReport:
    """``|h(s_k)|`` and ``|S(s_k)|`` for ``h = sin(pi z) sum a_n/(z-n)`` and ``S`` with ``a_n**2``."""
    if sch.K == 0:
        z = np.zeros(0)
        return VanishingReport(z, z, z, z)
    a = base_coefficients(sch, r)
    a2 = squared_coefficients(a)
    s = sch.s.astype(complex)
    h = SampledEntire(a)(s)
    S = SampledEntire(a2)(s)
    bh = cauchy_sum(a, s).tail_bound
    bS = cauchy_sum(a2, s).tail_bound
    return VanishingReport(sch.s.copy(), np.abs(h), np.abs(S), np.maximum(bh, bS))
