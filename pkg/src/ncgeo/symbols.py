"""Quantization and composition of polynomial symbols.

Symbols live in the commuting algebra ``R_{theta,theta'}`` (x's and xi's
commute with each other), operators in ``R_Theta``.  ``quantize`` keeps the
normal-ordered term map and reads each monomial ``x^alpha xi^beta`` as the
operator product ``x^alpha . xi^beta``.

For polynomial symbols the composition expansion

    c = sum_alpha  i^{|alpha|} / alpha!  D_xi^alpha(a) D_x^alpha(b)

terminates once ``|alpha| > deg_xi(a)`` and then ``Op(c) = Op(a) Op(b)``
holds exactly.  With ``D_xi(xi) = -i`` the sign ``i^{+|alpha|}`` is the one
that reproduces ``xi x = x xi - i``.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import product as iproduct
import math

import numpy as np
from scipy import linalg

from .errors import IncompatibleAlgebraError, TruncationError, ValidationError
from .fock import FockRep, build_generators, compressed_square_sum
from .skew import assemble_big_theta
from .weyl import OPERATOR, SYMBOL, WeylAlgebra, WeylElement, bidegree, derive_multi, weyl_mul

__all__ = [
    "SymbolExpansion",
    "quantize",
    "compose",
    "verify_composition",
    "symbol_trace",
    "SymbolTrace",
    "quantized_norm",
]


def _require(a: WeylElement, kind: str):
    if a.algebra.kind != kind:
        raise IncompatibleAlgebraError(f"expected an element of the {kind} algebra")


def quantize(a: WeylElement) -> WeylElement:
    """``Op(a)``: the same normal-ordered term map read in ``R_Theta``."""
    _require(a, SYMBOL)
    return a.with_algebra(a.algebra.partner(OPERATOR))


def dequantize(op: WeylElement) -> WeylElement:
    """Inverse of :func:`quantize` on normal-ordered polynomials."""
    _require(op, OPERATOR)
    return op.with_algebra(op.algebra.partner(SYMBOL))


@dataclass(frozen=True)
class SymbolExpansion:
    """Graded pieces of a composition, ``terms[k] = (order_bound, c_k)``.

    ``c_k`` collects every ``|alpha| = k`` contribution and has
    ``deg_xi(c_k) <= order_bound``.
    """

    terms: tuple

    def total(self) -> WeylElement:
        out = self.terms[0][1]
        for _, t in self.terms[1:]:
            out = out + t
        return out

    def __iter__(self):
        return iter(self.terms)

    def __len__(self):
        return len(self.terms)


def _multi_indices(d: int, k: int):
    for alpha in iproduct(range(k + 1), repeat=d):
        if sum(alpha) == k:
            yield alpha


def _deg_xi(a: WeylElement) -> int:
    deg = bidegree(a).deg_xi
    return 0 if deg == float("-inf") else int(deg)


def compose(a: WeylElement, b: WeylElement, N: int) -> SymbolExpansion:
    """Truncated composition expansion of two symbols through ``|alpha| = N``.

    Examples
    --------
    >>> from ncgeo.weyl import WeylAlgebra
    >>> S = WeylAlgebra([[0.0]], kind="symbol", exact=True)
    >>> str(compose(S.xi(0), S.x(0), 1).total())
    'x1*xi1 - i'
    """
    _require(a, SYMBOL)
    _require(b, SYMBOL)
    if a.algebra != b.algebra:
        raise IncompatibleAlgebraError("symbols belong to different algebras")
    if N < 0:
        raise ValidationError("N must be non-negative")
    alg = a.algebra
    ring = alg.ring
    d = alg.d
    top = _deg_xi(a) + _deg_xi(b)
    pieces = []
    for k in range(N + 1):
        ck = alg.zero()
        ik = ring.imag**k if k else ring.one
        for alpha in _multi_indices(d, k):
            da = derive_multi(a, beta=alpha)
            if not da:
                continue
            db = derive_multi(b, alpha=alpha)
            if not db:
                continue
            fact = math.prod(math.factorial(p) for p in alpha)
            ck = ck + weyl_mul(da, db) * (ik * ring.real(1) / fact if fact != 1 else ik)
        pieces.append((top - k, ck))
    return SymbolExpansion(tuple(pieces))


def verify_composition(a: WeylElement, b: WeylElement, tol: float = 1e-12):
    """Check ``Op(compose(a, b, deg_xi a)) == Op(a) Op(b)``.

    Returns
    -------
    ok : bool
    residual : float
        Largest coefficient modulus of the difference (exactly 0 in exact mode
        when the identity holds).
    """
    c = compose(a, b, _deg_xi(a)).total()
    lhs = quantize(c)
    rhs = weyl_mul(quantize(a), quantize(b))
    diff = lhs - rhs
    res = diff.max_abs_coeff()
    if a.algebra.exact:
        return (not diff.terms), res
    scale = max(1.0, lhs.max_abs_coeff(), rhs.max_abs_coeff())
    return res <= tol * scale, res


# --- Gaussian-regulated trace check -----------------------------------------


@dataclass(frozen=True)
class SymbolTrace:
    """Both sides of ``tau_Theta(Op(a) G) = tau_{theta,theta'}(a G')``."""

    operator_side: complex
    symbol_side: complex
    tail_estimate: float

    @property
    def difference(self) -> float:
        return abs(self.operator_side - self.symbol_side)


def _gauss(rep: FockRep, coeffs) -> np.ndarray:
    h = compressed_square_sum(rep, coeffs).matrix
    h = 0.5 * (h + h.conj().T)
    w, v = linalg.eigh(h)
    return (v * np.exp(-w)) @ v.conj().T


def _word(gens, exps, dim) -> np.ndarray:
    out = np.eye(dim, dtype=complex)
    for g, p in zip(gens, exps):
        for _ in range(p):
            out = out @ g.matrix
    return out


class _Words:
    """Compressions ``P x^alpha P`` taken from a representation with spare levels."""

    def __init__(self, rep: FockRep, spare: int):
        self.rep = rep
        big = FockRep(rep.theta, rep.cutoff + spare, rep.grid_points, rep.half_width)
        self.gens = build_generators(big)
        self.dim = big.dim
        self.keep = big.level_index <= rep.cutoff
        self.cache: dict = {}

    def __call__(self, offset: int, exps) -> np.ndarray:
        key = (offset, tuple(exps))
        if key not in self.cache:
            m = _word(self.gens[offset:], exps, self.dim)
            self.cache[key] = m[np.ix_(self.keep, self.keep)]
        return self.cache[key]


def _regulated_pair(a: WeylElement, cutoff: int, grid_points: int):
    alg = a.algebra
    d = alg.d
    ring = alg.ring
    big = assemble_big_theta(alg.theta, alg.theta_prime)
    rep_op = FockRep(big, cutoff, grid_points)
    rep_x = FockRep(alg.theta, cutoff, grid_points)
    rep_xi = FockRep(alg.theta_prime, cutoff, grid_points)

    spare = 1 + max(sum(k) for k in a.terms)
    w_op, w_x, w_xi = _Words(rep_op, spare), _Words(rep_x, spare), _Words(rep_xi, spare)
    Gx = _gauss(rep_op, [1.0] * d + [0.0] * d)
    Gxi = _gauss(rep_op, [0.0] * d + [1.0] * d)
    Hx, Hxi = _gauss(rep_x, None), _gauss(rep_xi, None)

    def tr(rep, m):
        return rep.trace_scale * np.dot(rep.weights, np.diag(m))

    op_side = 0j
    sym_side = 0j
    for key, c in a.terms.items():
        cc = ring.to_complex(c)
        al, be = key[:d], key[d:]
        op_side += cc * tr(rep_op, w_op(0, al) @ Gx @ w_op(d, be) @ Gxi)
        sym_side += cc * tr(rep_x, w_x(0, al) @ Hx) * tr(rep_xi, w_xi(0, be) @ Hxi)
    return complex(op_side), complex(sym_side)


def symbol_trace(
    a: WeylElement,
    cutoff: int = 36,
    grid_points: int = 48,
    tol: float = 1e-6,
) -> SymbolTrace:
    """Evaluate the trace formula against the regulator ``e^{-|x|^2} e^{-|xi|^2}``.

    The operator side is ``sum_c c tau_Theta(x^alpha e^{-|x|^2} xi^beta e^{-|xi|^2})``
    in a truncated representation of ``R_Theta``; the symbol side is
    ``sum_c c tau_theta(x^alpha e^{-|x|^2}) tau_theta'(xi^beta e^{-|xi|^2})`` in
    separate representations of ``R_theta`` and ``R_theta'``.  Both are
    repeated at three quarters of the cutoff and the larger change is reported
    as the truncation estimate.

    Raises
    ------
    TruncationError
        If the truncation estimate exceeds ``tol``.
    """
    _require(a, SYMBOL)
    if cutoff < 8:
        raise ValidationError("cutoff must be at least 8")
    if not a.terms:
        return SymbolTrace(0j, 0j, 0.0)
    op_hi, sym_hi = _regulated_pair(a, cutoff, grid_points)
    op_lo, sym_lo = _regulated_pair(a, (3 * cutoff) // 4, grid_points)
    tail = max(abs(op_hi - op_lo), abs(sym_hi - sym_lo))
    if tail > tol:
        raise TruncationError(
            f"traces still move by {tail:.3g} between cutoffs; raise the cutoff"
        )
    return SymbolTrace(op_hi, sym_hi, tail)


def quantized_norm(a: WeylElement, cutoff: int, margin: int = 2) -> float:
    """Spectral norm of the interior block of ``Op(a)`` in a truncated ``R_Theta`` rep.

    Only bounded symbols (constants, among polynomials) give a cutoff-independent
    value; this is the numerical stand-in for the L2-boundedness statement.
    """
    _require(a, SYMBOL)
    alg = a.algebra
    rep = FockRep(assemble_big_theta(alg.theta, alg.theta_prime), cutoff)
    gens = build_generators(rep)
    m = np.zeros((rep.dim, rep.dim), dtype=complex)
    for key, c in a.terms.items():
        m += alg.ring.to_complex(c) * _word(gens, key, rep.dim)
    mask = rep.interior(margin)
    return float(np.linalg.norm(m[np.ix_(mask, mask)], 2))
