"""Skew-symmetric deformation matrices and their canonical form.

A real skew matrix ``theta`` of rank ``2n`` can be brought to

    T theta T^t = [[0, -I_n], [I_n, 0]] (+) 0_{d-2n}

by a real invertible ``T``.  We get there from the real Schur form, which for
a normal matrix is block diagonal with 2x2 rotation-like blocks, followed by a
per-block rescaling and a permutation that collects the pairs.
"""

from __future__ import annotations

from dataclasses import dataclass, field
import json
from pathlib import Path

import numpy as np
from scipy import linalg

from .errors import ValidationError

__all__ = [
    "SkewMatrix",
    "NormalForm",
    "standard_form",
    "standard_block",
    "assemble_big_theta",
    "pfaffian_modulus",
    "load_matrix",
]

SKEW_TOL = 1e-12
RANK_RTOL = 1e-9


@dataclass(frozen=True, eq=False)
class SkewMatrix:
    """Real skew-symmetric ``d x d`` matrix.

    The stored entries are exactly antisymmetrized, so ``entries.T == -entries``
    holds bit for bit even when the input was only skew up to rounding.
    """

    entries: np.ndarray

    def __post_init__(self):
        a = np.asarray(self.entries, dtype=float)
        if a.ndim == 0:
            a = a.reshape(1, 1)
        if a.ndim != 2 or a.shape[0] != a.shape[1]:
            raise ValidationError(f"theta must be a square matrix, got shape {a.shape}")
        if not np.all(np.isfinite(a)):
            raise ValidationError("theta has non-finite entries")
        scale = max(1.0, float(np.max(np.abs(a)))) if a.size else 1.0
        if a.size and np.max(np.abs(a + a.T)) > SKEW_TOL * scale:
            raise ValidationError("theta is not skew-symmetric")
        a = 0.5 * (a - a.T)
        a.setflags(write=False)
        object.__setattr__(self, "entries", a)

    @classmethod
    def scalar(cls, value: float) -> "SkewMatrix":
        """The 2x2 matrix ``[[0, value], [-value, 0]]``, i.e. ``[x1, x2] = -i value``."""
        return cls(np.array([[0.0, value], [-value, 0.0]]))

    @classmethod
    def zeros(cls, d: int) -> "SkewMatrix":
        return cls(np.zeros((d, d)))

    @property
    def dim(self) -> int:
        return self.entries.shape[0]

    @property
    def rank(self) -> int:
        if self.dim == 0:
            return 0
        s = linalg.svdvals(self.entries)
        if s[0] == 0.0:
            return 0
        return int(np.sum(s > RANK_RTOL * s[0]))

    def __array__(self, dtype=None, copy=None):
        return np.asarray(self.entries, dtype=dtype)

    def __eq__(self, other):
        if not isinstance(other, SkewMatrix):
            return NotImplemented
        return self.entries.shape == other.entries.shape and np.array_equal(
            self.entries, other.entries
        )

    def __hash__(self):
        return hash((self.entries.shape, self.entries.tobytes()))

    def __repr__(self):
        return f"SkewMatrix({self.entries.tolist()!r})"

    def tolist(self) -> list:
        return self.entries.tolist()


@dataclass(frozen=True, eq=False)
class NormalForm:
    """Result of :func:`standard_form`.

    Attributes
    ----------
    T : ndarray
        Real invertible matrix with ``T @ theta @ T.T`` in standard form.
    rank2n : int
        Rank of theta.
    mus : tuple of float
        Positive imaginary parts of the eigenvalues of theta, descending.
    """

    T: np.ndarray
    rank2n: int
    mus: tuple = field(default_factory=tuple)

    @property
    def n(self) -> int:
        return self.rank2n // 2

    def residual(self, theta) -> float:
        theta = np.asarray(theta, dtype=float)
        target = standard_block(theta.shape[0], self.rank2n)
        return float(np.max(np.abs(self.T @ theta @ self.T.T - target), initial=0.0))

    def to_json(self) -> dict:
        return {"T": self.T.tolist(), "rank2n": self.rank2n, "mu": list(self.mus)}


def standard_block(d: int, rank2n: int) -> np.ndarray:
    """``[[0, -I_n], [I_n, 0]] (+) 0_{d-2n}``."""
    n = rank2n // 2
    out = np.zeros((d, d))
    out[:n, n : 2 * n] = -np.eye(n)
    out[n : 2 * n, :n] = np.eye(n)
    return out


def _as_skew(theta) -> SkewMatrix:
    return theta if isinstance(theta, SkewMatrix) else SkewMatrix(theta)


def _schur_pairs(a: np.ndarray):
    """Walk the real Schur form and return (Z, [(i, b)]) for each 2x2 block.

    ``b`` is the (0, 1) entry of the block after symmetrizing out rounding,
    so the block reads ``[[0, b], [-b, 0]]`` in the Schur basis columns
    ``Z[:, i], Z[:, i+1]``.
    """
    s, z = linalg.schur(a, output="real")
    d = a.shape[0]
    blocks = []
    i = 0
    while i < d:
        if i + 1 < d and s[i + 1, i] != 0.0:
            blocks.append((i, 0.5 * (s[i, i + 1] - s[i + 1, i])))
            i += 2
        else:
            i += 1
    return z, blocks


def standard_form(theta) -> NormalForm:
    """Canonical form of a skew matrix.

    Returns ``T``, the rank ``2n`` and the ``mu_j`` (positive imaginary parts
    of the eigenvalues, sorted descending).  Rank is decided by thresholding
    the singular values at ``1e-9 * ||theta||``.

    Examples
    --------
    >>> nf = standard_form([[0.0, 2.0], [-2.0, 0.0]])
    >>> nf.rank2n, nf.mus
    (2, (2.0,))
    """
    theta = _as_skew(theta)
    a = theta.entries
    d = theta.dim
    rank2n = theta.rank
    if rank2n == 0:
        return NormalForm(np.eye(d), 0, ())
    n = rank2n // 2
    z, blocks = _schur_pairs(a)
    # strongest n blocks carry the rank; any leftover tiny block is null space
    blocks.sort(key=lambda ib: -abs(ib[1]))
    live = blocks[:n]
    used = set()
    T = np.zeros((d, d))
    mus = []
    for k, (i, b) in enumerate(live):
        mu = abs(b)
        s = 1.0 / np.sqrt(mu)
        # rows k and n+k: e_i/sqrt(mu), -sign(b) e_{i+1}/sqrt(mu) gives [[0,-1],[1,0]]
        T[k] = s * z[:, i]
        T[n + k] = -np.sign(b) * s * z[:, i + 1]
        used.update((i, i + 1))
        mus.append(float(mu))
    rest = [c for c in range(d) if c not in used]
    for k, c in enumerate(rest):
        T[2 * n + k] = z[:, c]
    return NormalForm(T, rank2n, tuple(mus))


def assemble_big_theta(theta, theta_prime) -> SkewMatrix:
    """Doubled parameter ``[[theta, -I], [I, theta']]`` for generators (x, xi).

    With this block layout ``[xi_j, x_k] = -i delta_jk``.
    """
    theta = _as_skew(theta)
    theta_prime = _as_skew(theta_prime)
    if theta.dim != theta_prime.dim:
        raise ValidationError(
            f"dimension mismatch: theta is {theta.dim}, theta' is {theta_prime.dim}"
        )
    d = theta.dim
    eye = np.eye(d)
    big = np.block([[theta.entries, -eye], [eye, theta_prime.entries]])
    return SkewMatrix(big)


def pfaffian_modulus(theta) -> float:
    """``prod mu_j = |det theta|^{1/2}`` on the nondegenerate part (1 if rank 0)."""
    return float(np.prod(standard_form(theta).mus)) if _as_skew(theta).rank else 1.0


def load_matrix(path) -> SkewMatrix:
    """Read a skew matrix from a JSON file holding an array of rows (or a scalar).

    A bare number ``t`` is read as the 2x2 matrix with ``theta_12 = t``.
    """
    try:
        raw = json.loads(Path(path).read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise ValidationError(f"cannot read matrix from {path}: {exc}") from exc
    if isinstance(raw, (int, float)):
        return SkewMatrix.scalar(float(raw))
    try:
        arr = np.array(raw, dtype=float)
    except (TypeError, ValueError) as exc:
        raise ValidationError(f"{path}: not a numeric array of rows") from exc
    return SkewMatrix(arr)
