"""Even Clifford algebras in the Jordan-Wigner (Pauli tensor) representation."""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import reduce

import numpy as np

from .errors import ValidationError
from .skew import SkewMatrix

__all__ = ["CliffordAlgebra", "CurvatureForm", "clifford_build", "curvature_form"]

_I2 = np.eye(2, dtype=complex)
_X = np.array([[0, 1], [1, 0]], dtype=complex)
_Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
_Z = np.array([[1, 0], [0, -1]], dtype=complex)


def _kron_all(mats) -> np.ndarray:
    return reduce(np.kron, mats, np.eye(1, dtype=complex))


@dataclass(frozen=True, eq=False)
class CliffordAlgebra:
    """Generators ``c_1..c_d`` of ``Cl^d`` and the grading ``gamma``.

    For ``d = 2`` this is ``c_1 = sigma_x``, ``c_2 = sigma_y`` and
    ``gamma = -i c_1 c_2 = sigma_z``.
    """

    d: int
    gens: tuple = field(repr=False)
    gamma: np.ndarray = field(repr=False)

    @property
    def size(self) -> int:
        return self.gamma.shape[0]

    def identity(self) -> np.ndarray:
        return np.eye(self.size, dtype=complex)

    def word(self, letters) -> np.ndarray:
        """``c_{l_1} c_{l_2} ...`` for 0-based letters."""
        out = self.identity()
        for l in letters:
            out = out @ self.gens[l]
        return out

    def supertrace(self, m: np.ndarray) -> complex:
        """``str(m) = tr(gamma m)``."""
        return complex(np.trace(self.gamma @ m))


def clifford_build(d: int) -> CliffordAlgebra:
    """Pauli-tensor generators for even ``d <= 8``.

    Examples
    --------
    >>> cl = clifford_build(2)
    >>> cl.supertrace(cl.word([0, 1]))
    2j
    """
    if d <= 0 or d % 2 or d > 8:
        raise ValidationError("clifford_build supports even d with 2 <= d <= 8")
    h = d // 2
    gens = []
    for k in range(h):
        left = [_Z] * k
        right = [_I2] * (h - k - 1)
        gens.append(_kron_all(left + [_X] + right))
        gens.append(_kron_all(left + [_Y] + right))
    prod = np.eye(2**h, dtype=complex)
    for g in gens:
        prod = prod @ g
    gamma = (-1j) ** h * prod
    return CliffordAlgebra(d, tuple(gens), gamma)


@dataclass(frozen=True, eq=False)
class CurvatureForm:
    """``omega = (i/2) sum_{j,k} theta'_jk c_j c_k``."""

    omega: np.ndarray = field(repr=False)


def curvature_form(cl: CliffordAlgebra, theta_prime) -> CurvatureForm:
    tp = theta_prime if isinstance(theta_prime, SkewMatrix) else None
    if tp is None:
        arr = np.asarray(theta_prime, dtype=float)
        tp = SkewMatrix.scalar(float(arr)) if arr.ndim == 0 else SkewMatrix(arr)
    if tp.dim != cl.d:
        raise ValidationError("theta' dimension does not match the Clifford algebra")
    om = np.zeros((cl.size, cl.size), dtype=complex)
    for j in range(cl.d):
        for k in range(cl.d):
            if tp.entries[j, k]:
                om += tp.entries[j, k] * (cl.gens[j] @ cl.gens[k])
    return CurvatureForm(0.5j * om)
