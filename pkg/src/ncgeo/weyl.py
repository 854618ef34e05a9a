"""Normal-ordered polynomials in x_1..x_d, xi_1..xi_d with central commutators.

Generators are indexed ``0..2d-1`` in the order ``(x_1..x_d, xi_1..xi_d)`` and
satisfy ``[g_a, g_b] = -i Theta_ab`` with

* ``Theta = [[theta, -I], [I, theta']]`` in the operator algebra, so that
  ``[xi_j, x_k] = -i delta_jk``;
* ``Theta = theta (+) theta'`` in the symbol algebra, where x and xi commute.

A monomial is an exponent tuple ``e`` of length ``2d`` and stands for
``g_0^e_0 g_1^e_1 ... g_{2d-1}^e_{2d-1}`` (x factors left of xi factors, each
group by ascending index).  Because every commutator is a scalar, right
multiplication of a monomial by one generator closes on two kinds of terms:

    m g_a = m[e_a + 1] + sum_{b > a} e_b [g_b, g_a] m[e_b - 1]

which is all the rewriting the algebra needs.  Each correction term has
strictly lower degree, so the expansion terminates.
"""

from __future__ import annotations

from dataclasses import dataclass
import math
from typing import Iterable, Mapping

import numpy as np

from .coeffs import ring_for
from .errors import IncompatibleAlgebraError, ValidationError
from .skew import SkewMatrix, assemble_big_theta

__all__ = [
    "WeylAlgebra",
    "WeylElement",
    "BiDegree",
    "weyl_mul",
    "adjoint",
    "derive_x",
    "derive_xi",
    "transference",
    "bidegree",
    "commutator",
]

OPERATOR = "operator"
SYMBOL = "symbol"

NEG_INF = float("-inf")


def _skew(m, d=None) -> SkewMatrix:
    if m is None:
        return SkewMatrix.zeros(d)
    if isinstance(m, SkewMatrix):
        return m
    m = np.asarray(m, dtype=float)
    if m.ndim == 0:
        return SkewMatrix.scalar(float(m))
    return SkewMatrix(m)


class WeylAlgebra:
    """Structure constants plus coefficient ring for a family of elements.

    Parameters
    ----------
    theta, theta_prime : array_like or SkewMatrix
        ``[x_j, x_k] = -i theta_jk`` and ``[xi_j, xi_k] = -i theta'_jk``.
        ``theta_prime`` defaults to zero.
    kind : {"operator", "symbol"}
        Whether ``[xi_j, x_k] = -i delta_jk`` (operator algebra) or 0.
    exact : bool
        Use exact Gaussian-rational coefficients instead of complex doubles.
    """

    def __init__(self, theta, theta_prime=None, kind: str = OPERATOR, exact: bool = False):
        if kind not in (OPERATOR, SYMBOL):
            raise ValidationError(f"unknown algebra kind {kind!r}")
        self.theta = _skew(theta)
        self.theta_prime = _skew(theta_prime, self.theta.dim)
        if self.theta.dim != self.theta_prime.dim:
            raise ValidationError("theta and theta' must have the same dimension")
        self.d = self.theta.dim
        self.kind = kind
        self.exact = exact
        self.ring = ring_for(exact)
        if kind == OPERATOR:
            big = assemble_big_theta(self.theta, self.theta_prime).entries
        else:
            d = self.d
            big = np.zeros((2 * d, 2 * d))
            big[:d, :d] = self.theta.entries
            big[d:, d:] = self.theta_prime.entries
        self.structure = big
        r = self.ring
        # comm[b][a] = [g_b, g_a] = -i Theta_ba
        self._comm = [
            [r.imag * r.real(-big[b, a]) for a in range(2 * self.d)] for b in range(2 * self.d)
        ]
        self._mono_cache: dict = {}

    # identity -----------------------------------------------------------
    def _key(self):
        return (self.kind, self.exact, self.theta, self.theta_prime)

    def __eq__(self, other):
        if not isinstance(other, WeylAlgebra):
            return NotImplemented
        return self is other or self._key() == other._key()

    def __hash__(self):
        return hash(self._key())

    def __repr__(self):
        return (
            f"WeylAlgebra(d={self.d}, kind={self.kind!r}, exact={self.exact}, "
            f"theta={self.theta.tolist()}, theta_prime={self.theta_prime.tolist()})"
        )

    def partner(self, kind: str) -> "WeylAlgebra":
        """Same structure constants and ring, other commutation flag."""
        if kind == self.kind:
            return self
        return WeylAlgebra(self.theta, self.theta_prime, kind=kind, exact=self.exact)

    # constructors -------------------------------------------------------
    @property
    def ngens(self) -> int:
        return 2 * self.d

    def _unit_key(self, a=None):
        e = [0] * self.ngens
        if a is not None:
            e[a] = 1
        return tuple(e)

    def scalar(self, c) -> "WeylElement":
        c = self.ring.convert(c)
        return WeylElement(self, {} if self.ring.is_zero(c) else {self._unit_key(): c})

    def zero(self) -> "WeylElement":
        return WeylElement(self, {})

    def one(self) -> "WeylElement":
        return self.scalar(1)

    def gen(self, a: int) -> "WeylElement":
        if not 0 <= a < self.ngens:
            raise ValidationError(f"generator index {a} out of range")
        return WeylElement(self, {self._unit_key(a): self.ring.one})

    def x(self, j: int) -> "WeylElement":
        """Generator ``x_{j+1}`` (0-based ``j``)."""
        self._check_index(j)
        return self.gen(j)

    def xi(self, j: int) -> "WeylElement":
        """Generator ``xi_{j+1}`` (0-based ``j``)."""
        self._check_index(j)
        return self.gen(self.d + j)

    def monomial(self, alpha: Iterable[int], beta: Iterable[int], coeff=1) -> "WeylElement":
        """``coeff * x^alpha xi^beta`` in normal order."""
        key = tuple(alpha) + tuple(beta)
        if len(key) != self.ngens or any(k < 0 for k in key):
            raise ValidationError("bad multi-index")
        c = self.ring.convert(coeff)
        return WeylElement(self, {} if self.ring.is_zero(c) else {key: c})

    def word(self, letters: Iterable[int]) -> "WeylElement":
        """Product of generators in the given (possibly unordered) sequence."""
        out = self.one()
        for a in letters:
            out = out * self.gen(a)
        return out

    def _check_index(self, j):
        if not 0 <= j < self.d:
            raise ValidationError(f"index {j} out of range for d={self.d}")

    # core rewriting ------------------------------------------------------
    def _mono_times_gen(self, e: tuple, a: int) -> list:
        up = list(e)
        up[a] += 1
        out = [(tuple(up), None)]
        for b in range(a + 1, self.ngens):
            if e[b]:
                c = self._comm[b][a]
                if not self.ring.is_zero(c):
                    down = list(e)
                    down[b] -= 1
                    out.append((tuple(down), e[b] * c))
        return out

    def mono_mul(self, e1: tuple, e2: tuple) -> dict:
        """Normal-ordered expansion of ``m(e1) * m(e2)`` (memoized)."""
        key = (e1, e2)
        hit = self._mono_cache.get(key)
        if hit is not None:
            return hit
        ring = self.ring
        cur = {e1: ring.one}
        for a, k in enumerate(e2):
            for _ in range(k):
                nxt: dict = {}
                for mono, coeff in cur.items():
                    for m2, c in self._mono_times_gen(mono, a):
                        val = coeff if c is None else coeff * c
                        nxt[m2] = nxt.get(m2, ring.zero) + val
                cur = {m: c for m, c in nxt.items() if not ring.is_zero(c)}
        self._mono_cache[key] = cur
        return cur


class WeylElement:
    """Immutable normal-ordered polynomial with coefficients in the algebra's ring."""

    __slots__ = ("algebra", "terms")

    def __init__(self, algebra: WeylAlgebra, terms: Mapping[tuple, object]):
        ring = algebra.ring
        clean = {}
        for k, v in terms.items():
            if len(k) != algebra.ngens:
                raise ValidationError("monomial length does not match algebra")
            if not ring.is_zero(v):
                clean[tuple(k)] = v
        object.__setattr__(self, "algebra", algebra)
        object.__setattr__(self, "terms", clean)

    def __setattr__(self, name, value):
        raise AttributeError("WeylElement is immutable")

    # arithmetic ----------------------------------------------------------
    def _lift(self, other) -> "WeylElement":
        if isinstance(other, WeylElement):
            if other.algebra != self.algebra:
                raise IncompatibleAlgebraError("elements belong to different algebras")
            return other
        return self.algebra.scalar(other)

    def __add__(self, other):
        other = self._lift(other)
        ring = self.algebra.ring
        out = dict(self.terms)
        for k, v in other.terms.items():
            out[k] = out.get(k, ring.zero) + v
        return WeylElement(self.algebra, out)

    __radd__ = __add__

    def __neg__(self):
        return WeylElement(self.algebra, {k: -v for k, v in self.terms.items()})

    def __sub__(self, other):
        return self + (-self._lift(other))

    def __rsub__(self, other):
        return self._lift(other) - self

    def __mul__(self, other):
        if isinstance(other, WeylElement):
            return weyl_mul(self, other)
        c = self.algebra.ring.convert(other)
        return WeylElement(self.algebra, {k: v * c for k, v in self.terms.items()})

    def __rmul__(self, other):
        c = self.algebra.ring.convert(other)
        return WeylElement(self.algebra, {k: c * v for k, v in self.terms.items()})

    def __pow__(self, n: int):
        if n < 0:
            raise ValidationError("negative powers are not polynomial")
        out = self.algebra.one()
        for _ in range(n):
            out = out * self
        return out

    def __eq__(self, other):
        if isinstance(other, WeylElement):
            return self.algebra == other.algebra and self.terms == other.terms
        if isinstance(other, (int, float, complex)):
            return self == self.algebra.scalar(other)
        return NotImplemented

    def __hash__(self):
        return hash((self.algebra, frozenset(self.terms.items())))

    def __bool__(self):
        return bool(self.terms)

    # inspection ----------------------------------------------------------
    @property
    def d(self) -> int:
        return self.algebra.d

    def coeff(self, alpha, beta):
        return self.terms.get(tuple(alpha) + tuple(beta), self.algebra.ring.zero)

    def max_abs_coeff(self) -> float:
        ring = self.algebra.ring
        return max((abs(ring.to_complex(v)) for v in self.terms.values()), default=0.0)

    def chop(self, tol: float = 1e-14) -> "WeylElement":
        ring = self.algebra.ring
        return WeylElement(
            self.algebra, {k: v for k, v in self.terms.items() if abs(ring.to_complex(v)) > tol}
        )

    def with_algebra(self, algebra: WeylAlgebra) -> "WeylElement":
        """Reinterpret the same normal-ordered term map in another algebra."""
        if algebra.d != self.algebra.d or algebra.ring is not self.algebra.ring:
            raise IncompatibleAlgebraError("target algebra has different shape or ring")
        return WeylElement(algebra, self.terms)

    def __repr__(self):
        return f"WeylElement({self})"

    def __str__(self):
        if not self.terms:
            return "0"
        d = self.algebra.d
        ring = self.algebra.ring

        def sort_key(k):
            return (-sum(k), k)

        parts = []
        for k in sorted(self.terms, key=sort_key):
            factors = []
            for a, p in enumerate(k):
                if p:
                    name = f"x{a + 1}" if a < d else f"xi{a - d + 1}"
                    factors.append(name if p == 1 else f"{name}^{p}")
            c = self.terms[k]
            cs = ring.format(c)
            if not factors:
                parts.append(cs)
            elif cs in ("1", "1.0"):
                parts.append("*".join(factors))
            elif cs in ("-1", "-1.0"):
                parts.append("-" + "*".join(factors))
            else:
                parts.append(cs + "*" + "*".join(factors))
        return " + ".join(parts).replace("+ -", "- ")

    def to_complex_terms(self) -> dict:
        ring = self.algebra.ring
        return {k: ring.to_complex(v) for k, v in self.terms.items()}


def _check_same(a: WeylElement, b: WeylElement):
    if a.algebra != b.algebra:
        raise IncompatibleAlgebraError("elements belong to different algebras")


def weyl_mul(a: WeylElement, b: WeylElement) -> WeylElement:
    """Normal-ordered product ``a b``."""
    _check_same(a, b)
    alg = a.algebra
    ring = alg.ring
    out: dict = {}
    for k1, c1 in a.terms.items():
        for k2, c2 in b.terms.items():
            c12 = c1 * c2
            for k, c in alg.mono_mul(k1, k2).items():
                out[k] = out.get(k, ring.zero) + c12 * c
    return WeylElement(alg, out)


def commutator(a: WeylElement, b: WeylElement) -> WeylElement:
    return weyl_mul(a, b) - weyl_mul(b, a)


def adjoint(a: WeylElement) -> WeylElement:
    """Conjugate-linear anti-automorphism fixing every generator."""
    alg = a.algebra
    ring = alg.ring
    out = alg.zero()
    for k, c in a.terms.items():
        rev = alg.one()
        for g in reversed(range(alg.ngens)):
            if k[g]:
                e = [0] * alg.ngens
                e[g] = k[g]
                rev = rev * WeylElement(alg, {tuple(e): ring.one})
        out = out + rev * ring.conj(c)
    return out


def _derive(a: WeylElement, gen: int) -> WeylElement:
    # D(g_gen) = -i, D(other generators) = 0; exponents only drop, order is kept
    alg = a.algebra
    ring = alg.ring
    minus_i = -ring.imag
    out: dict = {}
    for k, c in a.terms.items():
        p = k[gen]
        if p:
            low = list(k)
            low[gen] -= 1
            low = tuple(low)
            out[low] = out.get(low, ring.zero) + c * p * minus_i
    return WeylElement(alg, out)


def derive_x(j: int, a: WeylElement) -> WeylElement:
    """Derivation with ``D_{x_j}(x_k) = -i delta_jk`` and ``D_{x_j}(xi_k) = 0``."""
    a.algebra._check_index(j)
    return _derive(a, j)


def derive_xi(j: int, a: WeylElement) -> WeylElement:
    """Derivation with ``D_{xi_j}(xi_k) = -i delta_jk`` and ``D_{xi_j}(x_k) = 0``."""
    a.algebra._check_index(j)
    return _derive(a, a.algebra.d + j)


def derive_multi(a: WeylElement, alpha=None, beta=None) -> WeylElement:
    """``D_x^alpha D_xi^beta (a)``; derivations commute so order is irrelevant."""
    d = a.algebra.d
    out = a
    for j, p in enumerate(alpha or ()):
        for _ in range(p):
            out = _derive(out, j)
    for j, p in enumerate(beta or ()):
        for _ in range(p):
            out = _derive(out, d + j)
    return out


def transference(y, a: WeylElement) -> WeylElement:
    """Shift automorphism ``x_j -> x_j + y_j`` (and ``xi_j -> xi_j + y_{d+j}``).

    ``y`` of length ``d`` acts on the x generators only; length ``2d`` acts on
    both groups.
    """
    alg = a.algebra
    ring = alg.ring
    y = list(y)
    if len(y) == alg.d:
        y = y + [0.0] * alg.d
    elif len(y) != alg.ngens:
        raise ValidationError(f"shift vector must have length {alg.d} or {alg.ngens}")
    shifts = [ring.real(v) for v in y]
    out: dict = {(0,) * alg.ngens: ring.one}
    terms_out: dict = {}
    for k, c in a.terms.items():
        # (g + y)^p = sum_q C(p, q) y^(p-q) g^q, factors stay in normal order
        partial = {(): c}
        for g, p in enumerate(k):
            nxt = {}
            for prefix, cc in partial.items():
                for q in range(p + 1):
                    if q < p and ring.is_zero(shifts[g]):
                        continue
                    w = cc * math.comb(p, q) * shifts[g] ** (p - q) if q < p else cc
                    key = prefix + (q,)
                    nxt[key] = nxt.get(key, ring.zero) + w
            partial = nxt
        for key, cc in partial.items():
            terms_out[key] = terms_out.get(key, ring.zero) + cc
    del out
    return WeylElement(alg, terms_out)


@dataclass(frozen=True)
class BiDegree:
    """Polynomial bi-degree (max x-degree, max xi-degree); ``-inf`` for zero."""

    deg_x: float
    deg_xi: float

    def __le__(self, other: "BiDegree") -> bool:
        return self.deg_x <= other.deg_x and self.deg_xi <= other.deg_xi

    def __ge__(self, other: "BiDegree") -> bool:
        return other <= self

    def __iter__(self):
        return iter((self.deg_x, self.deg_xi))


def bidegree(a: WeylElement) -> BiDegree:
    if not a.terms:
        return BiDegree(NEG_INF, NEG_INF)
    d = a.algebra.d
    return BiDegree(
        max(sum(k[:d]) for k in a.terms),
        max(sum(k[d:]) for k in a.terms),
    )
