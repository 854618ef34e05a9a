"""Truncated Fock-space matrices for the generators of a quantum Euclidean space.

After ``T theta T^t = [[0,-I_n],[I_n,0]] (+) 0`` the standard generators are
``n`` position/derivative pairs ``(y_j, D_j)`` with ``[y_j, D_j] = i`` plus
``d-2n`` commuting coordinates.  On a single oscillator mode we use the ladder
normalization ``a*|k> = sqrt(2k+2)|k+1>``, so ``[a, a*] = 2`` and

    y = (a* - a) / (2i),    D = (a + a*) / 2,    y^2 + D^2 = (a a* + a* a) / 2

has eigenvalues ``1, 3, 5, ...``.  Commuting coordinates are sampled at scaled
Gauss-Hermite nodes, so traces against them are Gaussian quadratures.  The
physical generators are ``X = T^{-1} X~`` and the trace is normalized so that
``tau(lambda(f)) = integral of f``, which gives the factor
``(2 pi)^n prod mu_j``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
import math

import numpy as np
from numpy.polynomial.hermite import hermgauss
from scipy import linalg
from scipy.special import eval_genlaguerre, gammaln

from .errors import ValidationError
from .skew import NormalForm, SkewMatrix, standard_form

__all__ = [
    "FockRep",
    "FockOperator",
    "ladder",
    "build_generators",
    "heat_trace_numeric",
    "heat_trace_closed",
    "HeatTrace",
    "trace",
    "spectral_count",
    "displacement",
    "weyl_transform",
    "compressed_square_sum",
    "laplacian",
]


def ladder(cutoff: int) -> np.ndarray:
    """Creation operator ``a*`` on levels ``0..cutoff`` (paper normalization)."""
    k = np.arange(cutoff)
    return np.diag(np.sqrt(2.0 * k + 2.0), -1)


def _as_skew(theta) -> SkewMatrix:
    if isinstance(theta, SkewMatrix):
        return theta
    arr = np.asarray(theta, dtype=float)
    return SkewMatrix.scalar(float(arr)) if arr.ndim == 0 else SkewMatrix(arr)


class FockRep:
    """Truncated representation of ``R_theta``.

    Parameters
    ----------
    theta : array_like or SkewMatrix
        Deformation matrix; a scalar ``t`` means ``[[0, t], [-t, 0]]``.
    cutoff : int
        Highest occupation level ``N_max`` kept in every oscillator mode.
    grid_points : int
        Gauss-Hermite nodes per commuting direction.
    half_width : float
        Outermost node position for commuting directions.
    """

    def __init__(self, theta, cutoff: int, grid_points: int = 48, half_width: float = 8.0):
        if int(cutoff) < 1:
            raise ValidationError("cutoff must be at least 1")
        if grid_points < 1 or half_width <= 0:
            raise ValidationError("grid_points and half_width must be positive")
        self.theta = _as_skew(theta)
        self.d = self.theta.dim
        self.cutoff = int(cutoff)
        self.normal_form: NormalForm = standard_form(self.theta)
        self.n = self.normal_form.n
        self.n_comm = self.d - 2 * self.n
        self.grid_points = int(grid_points) if self.n_comm else 1
        self.half_width = float(half_width)
        u, w = hermgauss(self.grid_points) if self.n_comm else (np.zeros(1), np.ones(1))
        scale = self.half_width / max(float(np.max(np.abs(u))), 1.0) if self.n_comm else 1.0
        self.nodes = scale * u
        # integral of f ~ sum w_k e^{u_k^2} scale f(scale u_k)
        self.node_weights = w * np.exp(u**2) * scale if self.n_comm else np.ones(1)
        self.trace_scale = (2 * np.pi) ** self.n * float(np.prod(self.normal_form.mus))

    @property
    def levels(self) -> int:
        return self.cutoff + 1

    @property
    def dim(self) -> int:
        return self.levels**self.n * self.grid_points**self.n_comm

    def _embed(self, mats: dict) -> np.ndarray:
        """Kronecker product with ``mats[slot]`` in the given tensor slots."""
        out = np.ones((1, 1))
        for slot in range(self.n + self.n_comm):
            size = self.levels if slot < self.n else self.grid_points
            out = np.kron(out, mats.get(slot, np.eye(size)))
        return out

    @cached_property
    def weights(self) -> np.ndarray:
        """Diagonal quadrature weights (all ones on oscillator factors)."""
        w = np.ones(1)
        for slot in range(self.n + self.n_comm):
            w = np.kron(w, np.ones(self.levels) if slot < self.n else self.node_weights)
        return w

    @cached_property
    def level_index(self) -> np.ndarray:
        """Per-basis-vector maximal oscillator occupation."""
        top = np.zeros(1, dtype=int)
        for slot in range(self.n + self.n_comm):
            if slot < self.n:
                lv = np.arange(self.levels)
                top = np.maximum.outer(top, lv).ravel()
            else:
                top = np.repeat(top, self.grid_points)
        return top

    def interior(self, margin: int = 2) -> np.ndarray:
        """Boolean mask of basis vectors at least ``margin`` levels below the edge."""
        return self.level_index <= self.cutoff - margin

    @cached_property
    def standard_generators(self) -> list:
        """``X~_1..X~_d`` with ``[X~_j, X~_k] = -i J_jk`` away from the edge."""
        ad = ladder(self.cutoff)
        a = ad.T
        y = (ad - a) / 2j
        D = (a + ad) / 2
        out = [None] * self.d
        for j in range(self.n):
            out[j] = self._embed({j: y})
            out[self.n + j] = self._embed({j: D})
        for c in range(self.n_comm):
            out[2 * self.n + c] = self._embed({self.n + c: np.diag(self.nodes).astype(complex)})
        return out

    def __repr__(self):
        return f"FockRep(d={self.d}, n={self.n}, cutoff={self.cutoff}, dim={self.dim})"


@dataclass(frozen=True, eq=False)
class FockOperator:
    """Dense matrix on the truncated space of ``rep``."""

    rep: FockRep
    matrix: np.ndarray = field(repr=False)

    def __post_init__(self):
        m = np.asarray(self.matrix, dtype=complex)
        if m.shape != (self.rep.dim, self.rep.dim):
            raise ValidationError(f"matrix shape {m.shape} does not match rep dim {self.rep.dim}")
        object.__setattr__(self, "matrix", m)

    def _other(self, other):
        if isinstance(other, FockOperator):
            if other.rep is not self.rep:
                raise ValidationError("operators live on different representations")
            return other.matrix
        return other * np.eye(self.rep.dim)

    def __add__(self, other):
        return FockOperator(self.rep, self.matrix + self._other(other))

    __radd__ = __add__

    def __sub__(self, other):
        return FockOperator(self.rep, self.matrix - self._other(other))

    def __neg__(self):
        return FockOperator(self.rep, -self.matrix)

    def __matmul__(self, other):
        return FockOperator(self.rep, self.matrix @ self._other(other))

    def __mul__(self, c):
        if isinstance(c, FockOperator):
            return self @ c
        return FockOperator(self.rep, self.matrix * c)

    __rmul__ = __mul__

    def adjoint(self) -> "FockOperator":
        return FockOperator(self.rep, self.matrix.conj().T)

    def interior_norm(self, margin: int = 2) -> float:
        """Max-abs entry on the interior block."""
        m = self.rep.interior(margin)
        block = self.matrix[np.ix_(m, m)]
        return float(np.max(np.abs(block), initial=0.0))


def build_generators(rep: FockRep) -> list:
    """Physical generators ``X_1..X_d`` with ``[X_j, X_k] = -i theta_jk`` off the edge."""
    tinv = np.linalg.inv(rep.normal_form.T)
    std = rep.standard_generators
    out = []
    for a in range(rep.d):
        m = np.zeros((rep.dim, rep.dim), dtype=complex)
        for b in range(rep.d):
            if tinv[a, b] != 0.0:
                m += tinv[a, b] * std[b]
        out.append(FockOperator(rep, m))
    return out


def compressed_square_sum(rep: FockRep, coeffs=None) -> FockOperator:
    """``P (sum_a c_a X_a^2) P`` computed without truncation error.

    Products of truncated generators lose the ``a a*`` entry on the top level.
    Building the squares one level higher and cutting back gives the exact
    compression of the quadratic form onto the kept levels.
    """
    coeffs = np.ones(rep.d) if coeffs is None else np.asarray(coeffs, dtype=float)
    big = FockRep(rep.theta, rep.cutoff + 1, rep.grid_points or 1, rep.half_width)
    gens = build_generators(big)
    m = sum(c * (g.matrix @ g.matrix) for c, g in zip(coeffs, gens) if c)
    keep = big.level_index <= rep.cutoff
    return FockOperator(rep, m[np.ix_(keep, keep)])


def trace(op: FockOperator) -> complex:
    """``trace_scale * sum_i w_i op_ii``; diverges with the cutoff for non-trace-class ops."""
    rep = op.rep
    return complex(rep.trace_scale * np.dot(rep.weights, np.diag(op.matrix)))


def heat_trace_closed(theta, t: float) -> float:
    """``t^{-d/2} prod_j (pi t mu_j / sinh(t mu_j)) pi^{(d-2n)/2}``.

    Examples
    --------
    >>> round(heat_trace_closed(1.0, 0.5), 6)
    6.028825
    """
    if t <= 0:
        raise ValidationError("t must be positive")
    theta = _as_skew(theta)
    nf = standard_form(theta)
    d = theta.dim
    val = t ** (-d / 2) * np.pi ** ((d - 2 * nf.n) / 2)
    for mu in nf.mus:
        val *= np.pi * t * mu / np.sinh(t * mu)
    return float(val)


@dataclass(frozen=True)
class HeatTrace:
    value: float
    tail_bound: float


def _laplacian(rep: FockRep) -> np.ndarray:
    """``sum_j X_j^2``.  Cross terms of ``T^{-1}`` cancel exactly, so this is diagonal."""
    mus = rep.normal_form.mus
    ad = ladder(rep.cutoff)
    osc = (ad.T @ ad + ad @ ad.T) / 2
    h = np.zeros((rep.dim, rep.dim), dtype=complex)
    for j, mu in enumerate(mus):
        h += mu * rep._embed({j: osc})
    for c in range(rep.n_comm):
        h += rep._embed({rep.n + c: np.diag(rep.nodes**2).astype(complex)})
    return h


def laplacian(rep: FockRep) -> FockOperator:
    """``X_1^2 + ... + X_d^2`` built from the physical generators."""
    gens = build_generators(rep)
    m = sum(g.matrix @ g.matrix for g in gens)
    return FockOperator(rep, m)


def heat_trace_numeric(rep: FockRep, t: float) -> HeatTrace:
    """``tau(exp(-t |X|^2))`` by eigendecomposition of the truncated Laplacian.

    The tail bound covers both the discarded levels above the cutoff and the
    distorted top level of each oscillator factor (where the truncated
    ``a a*`` loses its last entry).
    """
    if t <= 0:
        raise ValidationError("t must be positive")
    h = laplacian(rep).matrix
    h = 0.5 * (h + h.conj().T)
    evals, vecs = linalg.eigh(h)
    wdiag = np.einsum("i,ik,ik->k", rep.weights, vecs.conj(), vecs).real
    value = rep.trace_scale * float(np.sum(np.exp(-t * evals) * wdiag))
    # per mode: kept exact part sum_{k<N} e^{-t mu (2k+1)}; tail and top level bounded
    # together by e^{-t mu N} / (1 - e^{-2 t mu})
    comm = 1.0
    if rep.n_comm:
        comm = float(np.sum(rep.node_weights * np.exp(-t * rep.nodes**2))) ** rep.n_comm
    kept, loose = 1.0, 1.0
    N = rep.cutoff
    for mu in rep.normal_form.mus:
        q = np.exp(-2 * t * mu)
        exact_kept = np.exp(-t * mu) * (1 - q**N) / (1 - q)
        kept *= exact_kept
        loose *= exact_kept + np.exp(-t * mu * N) / (1 - q)
    tail = rep.trace_scale * comm * (loose - kept)
    return HeatTrace(value, float(tail))


def spectral_count(rep: FockRep, lam: float) -> float:
    """``tau(1_{|X|^2 <= lam})`` on a full-rank representation.

    The oscillator spectrum ``sum_j mu_j (2k_j + 1)`` is enumerated exactly
    for levels below the cutoff; the result is exact when ``lam`` stays below
    ``min_j mu_j (2 N_max + 1)``.
    """
    if rep.n_comm:
        raise ValidationError("spectral counting needs a full-rank theta")
    mus = np.array(rep.normal_form.mus)
    if lam >= float(np.min(mus)) * (2 * rep.cutoff + 1):
        raise ValidationError("lam reaches the truncation edge; raise the cutoff")
    grids = np.meshgrid(*[mu * (2 * np.arange(rep.cutoff) + 1) for mu in mus], indexing="ij")
    total = sum(grids)
    return rep.trace_scale * float(np.count_nonzero(total <= lam))


def _displacement_1mode(beta: complex, levels: int) -> np.ndarray:
    """``<m| exp(beta b* - conj(beta) b) |n>`` for ``[b, b*] = 1``."""
    r = abs(beta) ** 2
    m, n = np.meshgrid(np.arange(levels), np.arange(levels), indexing="ij")
    lo = np.minimum(m, n)
    hi = np.maximum(m, n)
    diff = hi - lo
    lag = eval_genlaguerre(lo, diff, r)
    pref = np.exp(0.5 * (gammaln(lo + 1) - gammaln(hi + 1)) - r / 2)
    # m >= n: beta^{m-n}; m < n: (-conj beta)^{n-m}
    phase = np.where(m >= n, beta ** diff.astype(float), (-np.conj(beta)) ** diff.astype(float))
    return pref * lag * phase


def displacement(rep: FockRep, xi) -> np.ndarray:
    """Matrix of ``lambda_theta(xi) = exp(i xi . X)``.

    With ``xi~ = T^{-t} xi`` the exponent on mode ``j`` is
    ``i(p y + q D) = beta b* - conj(beta) b`` for ``b = a/sqrt 2`` and
    ``beta = (p + i q)/sqrt 2``, ``p = xi~_j``, ``q = xi~_{n+j}``.
    """
    xi = np.asarray(xi, dtype=float)
    xt = np.linalg.solve(rep.normal_form.T, np.eye(rep.d)).T @ xi
    mats = {}
    for j in range(rep.n):
        beta = (xt[j] + 1j * xt[rep.n + j]) / math.sqrt(2)
        mats[j] = _displacement_1mode(beta, rep.levels)
    for c in range(rep.n_comm):
        mats[rep.n + c] = np.diag(np.exp(1j * xt[2 * rep.n + c] * rep.nodes))
    return rep._embed(mats)


def weyl_transform(rep: FockRep, f) -> FockOperator:
    """Matrix of ``lambda_theta(f) = (2 pi)^{-d} integral f^(xi) lambda_theta(xi) d xi``.

    ``f`` is a grid function (anything with ``fourier``, ``freq_axis()``,
    ``dfreq`` and ``d``); the integral becomes a sum over its frequency lattice.
    """
    if f.d != rep.d:
        raise ValidationError("grid dimension does not match the representation")
    axis = f.freq_axis()
    fh = np.asarray(f.fourier).reshape(-1)
    grids = np.meshgrid(*([axis] * rep.d), indexing="ij")
    xis = np.stack([g.reshape(-1) for g in grids], axis=1)
    out = np.zeros((rep.dim, rep.dim), dtype=complex)
    scale = (f.dfreq / (2 * np.pi)) ** rep.d
    for c, xi in zip(fh, xis):
        if abs(c) * scale > 1e-18:
            out += c * displacement(rep, xi)
    return FockOperator(rep, scale * out)
