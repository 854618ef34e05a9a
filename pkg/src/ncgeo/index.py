"""Residue-cocycle constants, the simplified even cocycle and the d=2 Bott index.

The Bott projector over ``R_theta`` (d = 2, scalar ``theta > 0``) is

    e = [[R, R z*], [z R, z R z*]],    z = sqrt(theta) a*,  R = (1 + z* z)^{-1}

with ``R`` diagonal, ``R_kk = 1 / (1 + theta (2k + 2))``.  Derivatives follow
from ``D_1 z = -i``, ``D_2 z = 1``, ``D_1 z* = -i``, ``D_2 z* = -1`` and the
Leibniz rule, so ``da`` is always an exact matrix expression.

Grading convention.  With ``gamma = -i c_1 c_2`` one gets ``str(c_1 c_2) = 2i``
and ``str(omega) = -2 theta'``.  The Chern pairing
``phi_0(e - 1_e) - 2 phi_2(e - 1/2, e, e)`` then comes out as
``-4 pi^2 (1 - theta theta')``; the sign is an orientation choice and we fix
it with ``ORIENTATION = -1`` so that ``theta' = 0`` gives ``+4 pi^2``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
import math

import numpy as np
from scipy import sparse

from .clifford import CliffordAlgebra, clifford_build, curvature_form
from .errors import NumericalGateError, ValidationError
from .fock import FockRep, build_generators

__all__ = [
    "CocycleConstants",
    "cocycle_constants",
    "alpha_constant",
    "stirling_row",
    "chern_coefficient",
    "Jet",
    "BlockSpace",
    "simplified_cocycle",
    "bott_projector",
    "projector_residual",
    "bott_matrix",
    "BottIndex",
    "bott_index",
    "bott_series",
    "dirac_square_check",
    "dirac_square_symbolic",
    "ORIENTATION",
]

ORIENTATION = -1


# --- constants -----------------------------------------------------------------


def alpha_constant(k) -> Fraction:
    """``k_1! ... k_m! / ((k_1 + 1)(k_1 + k_2 + 2) ... (|k| + m))``."""
    k = [int(v) for v in k]
    if any(v < 0 for v in k):
        raise ValidationError("multi-index entries must be non-negative")
    num = math.prod(math.factorial(v) for v in k)
    den = 1
    partial = 0
    for i, v in enumerate(k, start=1):
        partial += v
        den *= partial + i
    return Fraction(num, den)


def stirling_row(n: int) -> dict:
    """Unsigned Stirling numbers of the first kind: ``prod_{j<n}(z + j) = sum_j s_{n,j} z^j``."""
    if n < 0:
        raise ValidationError("n must be non-negative")
    row = [1]  # coefficients of the empty product
    for j in range(n):
        nxt = [0] * (len(row) + 1)
        for p, c in enumerate(row):
            nxt[p + 1] += c  # times z
            nxt[p] += j * c  # times j
        row = nxt
    return {p: c for p, c in enumerate(row) if c}


def chern_coefficient(k: int) -> Fraction:
    """Coefficient ``(-1)^k (2k)!/k!`` of ``Ch^{2k}``."""
    if k < 0:
        raise ValidationError("k must be non-negative")
    return Fraction((-1) ** k * math.factorial(2 * k), math.factorial(k))


@dataclass(frozen=True)
class CocycleConstants:
    m: int
    k: tuple
    alpha: Fraction
    sigma: dict

    def to_json(self) -> dict:
        return {
            "m": self.m,
            "k": list(self.k),
            "alpha": str(self.alpha),
            "sigma": {str(n): {str(j): c for j, c in row.items()} for n, row in self.sigma.items()},
        }


def cocycle_constants(m: int, k) -> CocycleConstants:
    """``alpha(k)`` and the table ``sigma_{n,j}`` for ``n <= max(m, 1)``.

    Examples
    --------
    >>> cocycle_constants(2, (0, 0)).alpha
    Fraction(1, 2)
    """
    if m < 0:
        raise ValidationError("m must be non-negative")
    k = tuple(int(v) for v in k)
    if len(k) != m:
        raise ValidationError(f"multi-index must have m={m} entries, got {len(k)}")
    sigma = {n: stirling_row(n) for n in range(1, max(m, 1) + 1)}
    return CocycleConstants(m, k, alpha_constant(k), sigma)


# --- jets: operators together with their derivatives ---------------------------


@dataclass(frozen=True, eq=False)
class Jet:
    """Sparse matrix ``value`` with ``derivs[j] = D_j(value)``."""

    value: sparse.csr_matrix
    derivs: tuple = field(default_factory=tuple)

    @classmethod
    def constant(cls, m, d: int) -> "Jet":
        m = sparse.csr_matrix(m)
        zero = sparse.csr_matrix(m.shape, dtype=complex)
        return cls(m, tuple(zero for _ in range(d)))

    @property
    def d(self) -> int:
        return len(self.derivs)

    def __add__(self, other: "Jet") -> "Jet":
        return Jet(self.value + other.value, tuple(a + b for a, b in zip(self.derivs, other.derivs)))

    def __sub__(self, other: "Jet") -> "Jet":
        return Jet(self.value - other.value, tuple(a - b for a, b in zip(self.derivs, other.derivs)))

    def __mul__(self, c) -> "Jet":
        return Jet(self.value * c, tuple(a * c for a in self.derivs))

    __rmul__ = __mul__

    def __matmul__(self, other: "Jet") -> "Jet":
        v = (self.value @ other.value).tocsr()
        ds = tuple(
            (da @ other.value + self.value @ db).tocsr() for da, db in zip(self.derivs, other.derivs)
        )
        return Jet(v, ds)

    @staticmethod
    def block(rows) -> "Jet":
        d = rows[0][0].d
        v = sparse.bmat([[j.value for j in r] for r in rows], format="csr")
        ds = tuple(sparse.bmat([[j.derivs[i] for j in r] for r in rows], format="csr") for i in range(d))
        return Jet(v, ds)


@dataclass(frozen=True)
class BlockSpace:
    """Layout ``M_r (x) Fock`` with per-level trace weights.

    Basis index ``b * levels + k`` for matrix block ``b`` and Fock level ``k``.
    """

    levels: int
    blocks: int
    trace_scale: float

    def interior(self, margin: int) -> np.ndarray:
        k = np.tile(np.arange(self.levels), self.blocks)
        return k < self.levels - margin

    def level_of(self) -> np.ndarray:
        return np.tile(np.arange(self.levels), self.blocks)


def _level_supertrace(space: BlockSpace, cl: CliffordAlgebra, m: sparse.spmatrix) -> np.ndarray:
    """``tr_{M_r} str_Cl`` of the diagonal blocks, one value per Fock level."""
    s = cl.size
    g = sparse.kron(sparse.identity(space.levels * space.blocks, format="csr"), sparse.csr_matrix(cl.gamma))
    diag = (m @ g).diagonal().reshape(space.blocks * space.levels, s).sum(axis=1)
    return diag.reshape(space.blocks, space.levels).sum(axis=0)


def _cocycle_levels(m: int, jets, cl: CliffordAlgebra, omega: np.ndarray, space: BlockSpace):
    if m % 2:
        raise ValidationError("phi_m vanishes for odd m; only even m is evaluated")
    if not 0 <= m <= cl.d:
        raise ValidationError(f"m must lie in [0, {cl.d}]")
    if len(jets) != m + 1:
        raise ValidationError(f"phi_{m} takes {m + 1} arguments")
    s = cl.size
    eye_cl = sparse.identity(s, format="csr")
    prod = sparse.kron(jets[0].value, eye_cl, format="csr")
    for a in jets[1:]:
        da = sum(sparse.kron(a.derivs[j], sparse.csr_matrix(cl.gens[j]), format="csr") for j in range(cl.d))
        prod = (prod @ da).tocsr()
    p = (cl.d - m) // 2
    om = np.linalg.matrix_power(omega, p) / math.factorial(p)
    prod = prod @ sparse.kron(sparse.identity(space.levels * space.blocks), sparse.csr_matrix(om))
    pref = np.pi ** (cl.d / 2) / math.factorial(m)
    return pref * space.trace_scale * _level_supertrace(space, cl, prod)


def simplified_cocycle(m: int, jets, cl: CliffordAlgebra, theta_prime, space: BlockSpace, margin: int = 8) -> complex:
    """``(pi^{d/2}/m!) Str(a_0 da_1 ... da_m omega^{(d-m)/2} / ((d-m)/2)!)``.

    ``da = sum_j D_j(a) (x) c_j``.  The trace runs over Fock levels at least
    ``margin`` below the cutoff.
    """
    omega = curvature_form(cl, theta_prime).omega
    per_level = _cocycle_levels(m, jets, cl, omega, space)
    return complex(np.sum(per_level[: space.levels - margin]))


# --- the Bott projector ---------------------------------------------------------


def bott_projector(theta: float, cutoff: int) -> tuple:
    """``(e, 1_e, space)`` as jets on ``M_2 (x) Fock`` truncated at ``cutoff``."""
    if not theta > 0:
        raise ValidationError("theta must be positive")
    N = int(cutoff)
    levels = N + 1
    k = np.arange(levels)
    ad = sparse.diags(np.sqrt(2.0 * k[:-1] + 2.0), -1, shape=(levels, levels), format="csr", dtype=complex)
    a = ad.T.tocsr()
    eye = sparse.identity(levels, format="csr", dtype=complex)
    rt = math.sqrt(theta)
    z = Jet(rt * ad, (-1j * eye, 1.0 * eye))
    zs = Jet(rt * a, (-1j * eye, -1.0 * eye))
    r_val = sparse.diags(1.0 / (1.0 + theta * (2.0 * k + 2.0)), 0, format="csr", dtype=complex)
    # D_j(R) = -R D_j(z* z) R
    zsz_d = [(zs.derivs[j] @ z.value + zs.value @ z.derivs[j]) for j in range(2)]
    R = Jet(r_val, tuple((-r_val @ zsz_d[j] @ r_val).tocsr() for j in range(2)))
    Rzs = R @ zs
    zR = z @ R
    e = Jet.block([[R, Rzs], [zR, zR @ zs]])
    zero = sparse.csr_matrix((levels, levels), dtype=complex)
    unit = Jet.block(
        [[Jet.constant(zero, 2), Jet.constant(zero, 2)], [Jet.constant(zero, 2), Jet.constant(eye, 2)]]
    )
    space = BlockSpace(levels, 2, 2 * np.pi * theta)
    return e, unit, space


def projector_residual(e: Jet, space: BlockSpace, margin: int = 2) -> float:
    """``max(|e^2 - e|, |e* - e|)`` on the interior block."""
    mask = space.interior(margin)
    v = e.value
    sq = (v @ v - v).tocsr()[mask][:, mask]
    herm = (v.conj().T - v).tocsr()[mask][:, mask]
    vals = [abs(sq).max() if sq.nnz else 0.0, abs(herm).max() if herm.nnz else 0.0]
    return float(max(vals))


@dataclass(frozen=True)
class BottIndex:
    """Index pairing for the Bott projector by two routes."""

    theta: float
    theta_prime: float
    closed_form: float
    matrix: float | None = None
    matrix_tail: float | None = None
    matrix_pieces: dict | None = None
    series: float | None = None
    series_tail: float | None = None

    def to_json(self) -> dict:
        out = {
            "theta": self.theta,
            "theta_prime": self.theta_prime,
            "closed_form": self.closed_form,
            "matrix": self.matrix,
            "series": self.series,
            "tails": {"matrix": self.matrix_tail, "series": self.series_tail},
        }
        if self.matrix_pieces is not None:
            out["matrix_pieces"] = self.matrix_pieces
        return out


def bott_series(theta: float, theta_prime: float, cutoff: int) -> tuple:
    """``-4 pi^2 theta theta' + 8 theta pi^2 sum_{k<=K} 1/((1+2k theta)(1+2 theta+2k theta))``.

    Returns ``(value, tail_bound)`` with the bound ``8 theta pi^2 / (4 theta^2 K)``.
    """
    k = np.arange(int(cutoff) + 1, dtype=float)
    terms = 1.0 / ((1 + 2 * k * theta) * (1 + 2 * theta + 2 * k * theta))
    s = math.fsum(terms)
    value = -4 * np.pi**2 * theta * theta_prime + np.pi * 8 * theta * np.pi * s
    tail = 8 * theta * np.pi**2 / (4 * theta**2 * cutoff)
    return float(value), float(tail)


def _bott_levels(theta: float, theta_prime: float, cutoff: int):
    """Per-level contributions of ``phi_0(e - 1_e)`` and ``-2 phi_2(e - 1/2, e, e)``."""
    cl = clifford_build(2)
    tp = np.array([[0.0, theta_prime], [-theta_prime, 0.0]])
    omega = curvature_form(cl, tp).omega
    e, unit, space = bott_projector(theta, cutoff)
    half = Jet.constant(0.5 * sparse.identity(e.value.shape[0], format="csr", dtype=complex), 2)
    c2 = float(chern_coefficient(1))
    phi0 = _cocycle_levels(0, [e - unit], cl, omega, space)
    phi2 = c2 * _cocycle_levels(2, [e - half, e, e], cl, omega, space)
    return ORIENTATION * phi0, ORIENTATION * phi2


def bott_matrix(theta: float, theta_prime: float, cutoff: int, margin: int = 8) -> tuple:
    """Matrix route: level sums of the two cocycle terms, Richardson-extrapolated.

    Both level sums converge like ``1/K``; ``2 S(K) - S(K/2)`` removes that term
    and ``|S(K) - S(K/2)|`` is reported as a (conservative) tail bound.
    """
    p0, p2 = _bott_levels(theta, theta_prime, cutoff)
    K = cutoff + 1 - margin
    total = (p0 + p2).real

    def S(n):
        return math.fsum(total[:n])

    value = 2 * S(K) - S(K // 2)
    tail = abs(S(K) - S(K // 2))
    pieces = {
        "phi0": float(2 * math.fsum(p0.real[:K]) - math.fsum(p0.real[: K // 2])),
        "phi2": float(2 * math.fsum(p2.real[:K]) - math.fsum(p2.real[: K // 2])),
        "raw": float(S(K)),
    }
    return float(value), float(tail), pieces


def bott_index(
    theta: float,
    theta_prime: float,
    cutoff: int = 100000,
    method: str = "both",
    matrix_cutoff: int | None = None,
) -> BottIndex:
    """Index pairing of the Bott projector with the curved d=2 spectral triple.

    Parameters
    ----------
    theta, theta_prime : float
        ``theta > 0``.
    cutoff : int
        Series cutoff (and matrix cutoff unless ``matrix_cutoff`` is given).
    method : {"matrix", "series", "both"}

    Raises
    ------
    NumericalGateError
        If both methods run and differ by more than the sum of their tails.
    """
    if not theta > 0:
        raise ValidationError("theta must be positive")
    if int(cutoff) < 100:
        raise ValidationError("cutoff must be at least 100")
    if method not in ("matrix", "series", "both"):
        raise ValidationError(f"unknown method {method!r}")
    closed = 4 * np.pi**2 * (1 - theta * theta_prime)
    out = dict(theta=float(theta), theta_prime=float(theta_prime), closed_form=float(closed))
    if method in ("series", "both"):
        out["series"], out["series_tail"] = bott_series(theta, theta_prime, int(cutoff))
    if method in ("matrix", "both"):
        mc = int(matrix_cutoff or cutoff)
        if mc < 100:
            raise ValidationError("matrix cutoff must be at least 100")
        out["matrix"], out["matrix_tail"], out["matrix_pieces"] = bott_matrix(theta, theta_prime, mc)
    res = BottIndex(**out)
    if method == "both":
        gap = abs(res.matrix - res.series)
        if gap > res.matrix_tail + res.series_tail:
            raise NumericalGateError(
                f"matrix and series disagree by {gap:.3g} "
                f"(tails {res.matrix_tail:.3g} + {res.series_tail:.3g})"
            )
    return res


# --- D^2 = |xi|^2 - omega --------------------------------------------------------


def dirac_square_check(d: int, theta_prime, rep: FockRep | None = None, cutoff: int = 20) -> float:
    """Interior residual of ``D^2 - (sum X_j^2 (x) 1 - 1 (x) omega)`` for ``D = sum X_j (x) c_j``.

    ``rep`` is a truncated representation of ``R_{theta'}``; one is built with
    ``cutoff`` when omitted.
    """
    cl = clifford_build(d)
    if rep is None:
        rep = FockRep(theta_prime, cutoff)
    if rep.d != d:
        raise ValidationError("representation dimension does not match d")
    omega = curvature_form(cl, rep.theta).omega
    gens = build_generators(rep)
    D = sum(np.kron(g.matrix, c) for g, c in zip(gens, cl.gens))
    lap = sum(g.matrix @ g.matrix for g in gens)
    target = np.kron(lap, cl.identity()) - np.kron(np.eye(rep.dim), omega)
    diff = D @ D - target
    mask = np.repeat(rep.interior(2), cl.size)
    return float(np.max(np.abs(diff[np.ix_(mask, mask)]), initial=0.0))


def dirac_square_symbolic(d: int, theta_prime, exact: bool = True) -> bool:
    """Exact check of ``D^2 = |xi|^2 - omega`` with Weyl-algebra matrix entries."""
    from .weyl import WeylAlgebra

    cl = clifford_build(d)
    alg = WeylAlgebra(np.zeros((d, d)), theta_prime, exact=exact)
    ring = alg.ring
    s = cl.size

    def conv(z):
        return ring.convert(complex(z))

    D = [[alg.zero() for _ in range(s)] for _ in range(s)]
    for j in range(d):
        c = cl.gens[j]
        for r in range(s):
            for t in range(s):
                if c[r, t] != 0:
                    D[r][t] = D[r][t] + alg.xi(j) * conv(c[r, t])
    tp = alg.theta_prime.entries
    lap = alg.zero()
    for j in range(d):
        lap = lap + alg.xi(j) * alg.xi(j)
    ok = True
    half_i = ring.imag * ring.real(Fraction(1, 2))
    for r in range(s):
        for t in range(s):
            lhs = alg.zero()
            for u in range(s):
                lhs = lhs + D[r][u] * D[u][t]
            om = ring.zero
            for j in range(d):
                for k in range(d):
                    if tp[j, k]:
                        ck = (cl.gens[j] @ cl.gens[k])[r, t]
                        if ck != 0:
                            om = om + ring.real(tp[j, k]) * conv(ck)
            om = om * half_i
            rhs = (lap if r == t else alg.zero()) - alg.scalar(om)
            ok = ok and (lhs == rhs)
    return ok
