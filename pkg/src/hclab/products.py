"""Canonical products from zero lists, evaluated in log scale."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np


@dataclass(frozen=True, eq=False)
class ProductFunction:
    """Canonical product ``scale * z**m * prod_j E_g(z / z_j)``.

    Zeros equal to 0 contribute the monomial factor; the remaining zeros
    enter through ``1 - z/z_j`` (genus 0) or ``(1 - z/z_j) exp(z/z_j)``
    (genus 1).

    Parameters
    ----------
    zeros : array_like
        Zeros listed explicitly.
    genus : {0, 1}
    tail_zero_law : callable, optional
        ``j -> z_j`` for ``j >= tail_start``; terms are added until
        ``|z/z_j|`` drops below ``1e-17``. Intended for rapidly growing
        zero sequences such as ``M 2**j + 1/2``.
    tail_start : int
    scale : complex
        Constant prefactor.
    """

    zeros: np.ndarray
    genus: int = 0
    tail_zero_law: Callable[[np.ndarray], np.ndarray] | None = None
    tail_start: int = 0
    scale: complex = 1.0

    def __post_init__(self):
        if self.genus not in (0, 1):
            raise ValueError("genus must be 0 or 1")
        zs = np.asarray(self.zeros, dtype=complex).ravel()
        object.__setattr__(self, "zeros", zs)
        object.__setattr__(self, "_m0", int(np.sum(zs == 0)))
        object.__setattr__(self, "_nz", zs[zs != 0])

    def _tail_zeros(self, zmax: float) -> np.ndarray:
        if self.tail_zero_law is None:
            return np.zeros(0, complex)
        out = []
        j = self.tail_start
        while True:
            block = np.asarray(self.tail_zero_law(np.arange(j, j + 64)), dtype=complex)
            out.append(block)
            if np.all(zmax / np.abs(block) < 1e-17) or j > 100_000:
                break
            j += 64
        return np.concatenate(out)

    def log(self, z) -> np.ndarray:
        """Complex logarithm of the product (branch irrelevant after exponentiation)."""
        z = np.atleast_1d(np.asarray(z, dtype=complex))
        zs = np.concatenate([self._nz, self._tail_zeros(float(np.max(np.abs(z)) if z.size else 0.0))])
        out = np.full(z.shape, np.log(complex(self.scale)) if self.scale != 0 else -np.inf, dtype=complex)
        if self._m0:
            with np.errstate(divide="ignore"):
                lz = np.log(z)
            # real multiply: avoids nan from complex inf arithmetic at z = 0
            out += self._m0 * lz.real + 1j * (self._m0 * lz.imag)
        chunk = max(1, 4_000_000 // max(zs.size, 1))
        for s in range(0, z.size, chunk):
            zz = z[s:s + chunk, None]
            ratio = (zs[None, :] - zz) / zs[None, :]
            with np.errstate(divide="ignore"):
                terms = np.log(ratio)
            if self.genus == 1:
                terms = terms + zz / zs[None, :]
            out[s:s + chunk] += terms.sum(axis=1)
        return out

    def log_abs(self, z) -> np.ndarray:
        return self.log(z).real

    def __call__(self, z):
        v = np.exp(self.log(z))
        return v if np.ndim(z) else complex(v[0])

    def direct(self, z):
        """Plain multiplication of the factors; reference route for small windows."""
        z = np.atleast_1d(np.asarray(z, dtype=complex))
        zs = np.concatenate([self._nz, self._tail_zeros(float(np.max(np.abs(z))))])
        f = (1.0 - z[:, None] / zs[None, :])
        if self.genus == 1:
            f = f * np.exp(z[:, None] / zs[None, :])
        v = self.scale * z ** self._m0 * np.prod(f, axis=1)
        return v if v.size > 1 else complex(v[0])

    def log_derivative(self, z) -> np.ndarray:
        """``P'(z)/P(z)`` away from the zeros."""
        z = np.atleast_1d(np.asarray(z, dtype=complex))
        zs = np.concatenate([self._nz, self._tail_zeros(float(np.max(np.abs(z))))])
        out = self._m0 / z if self._m0 else np.zeros(z.shape, complex)
        out = out + np.sum(1.0 / (z[:, None] - zs[None, :]), axis=1)
        if self.genus == 1:
            out = out + np.sum(1.0 / zs)
        return out

    def log_derivative_at_zero(self, j: int) -> complex:
        """Log of ``P'(z_j)`` at the explicit nonzero zero with index ``j`` (in ``self.zeros`` order)."""
        zj = self.zeros[j]
        if zj == 0:
            raise ValueError("use a nonzero zero")
        others = np.delete(self.zeros, j)
        sub = ProductFunction(others, self.genus, self.tail_zero_law, self.tail_start, self.scale)
        lg = sub.log(zj)[0] + np.log(-1.0 / zj)
        if self.genus == 1:
            lg += 1.0
        return complex(lg)

    def derivative_at_zero(self, j: int) -> complex:
        return complex(np.exp(self.log_derivative_at_zero(j)))

    def derivative(self, z, step: float) -> complex:
        """Central difference with one Richardson step, ``O(step**4)`` accurate."""
        z = complex(z)

        def cd(h):
            return (self(z + h) - self(z - h)) / (2 * h)

        return (4 * cd(step / 2) - cd(step)) / 3


def ratio_log(num: ProductFunction, den: ProductFunction, z) -> np.ndarray:
    """``log(num(z)/den(z))`` with factors paired so that large products cancel termwise."""
    return num.log(z) - den.log(z)
