"""Acceptance criteria, shared by the ``verify-suite`` command and the test suite.

Each ``criterion_*`` function returns a :class:`CriterionResult`; nothing here
raises on a failed check.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from itertools import accumulate, product
import math
import time

import numpy as np

from .clifford import clifford_build
from .errors import NumericalGateError
from .fock import FockRep, heat_trace_closed, heat_trace_numeric
from .index import alpha_constant, bott_index, dirac_square_check, dirac_square_symbolic, stirling_row
from .moyal import GridFunction, associativity_residual, integral, star, star_adjoint_check
from .skew import SkewMatrix, standard_form
from .symbols import verify_composition
from .weyl import SYMBOL, WeylAlgebra, WeylElement

__all__ = ["CriterionResult", "CRITERIA", "run_suite", "random_symbol_pair", "random_skew"]


@dataclass
class CriterionResult:
    number: int
    name: str
    passed: bool
    residual: float
    detail: dict = field(default_factory=dict)
    seconds: float = 0.0

    def line(self) -> str:
        flag = "PASS" if self.passed else "FAIL"
        return f"criterion {self.number} [{flag}] {self.name}: residual={self.residual:.3e} ({self.seconds:.2f}s)"

    def to_json(self, timings: bool = False) -> dict:
        out = {
            "criterion": self.number,
            "name": self.name,
            "passed": self.passed,
            "residual": self.residual,
            "detail": self.detail,
        }
        if timings:
            out["seconds"] = self.seconds
        return out


# --- random inputs ----------------------------------------------------------------


def random_skew(rng: np.random.Generator, d: int, low: float = -1.0, high: float = 1.0) -> np.ndarray:
    a = np.triu(rng.uniform(low, high, size=(d, d)), 1)
    return a - a.T


def _random_poly(rng, alg: WeylAlgebra, max_deg: int) -> WeylElement:
    d = alg.d
    terms = {}
    for _ in range(int(rng.integers(1, 5))):
        ex = [0] * (2 * d)
        for half in (0, 1):
            deg = int(rng.integers(0, max_deg + 1))
            for _ in range(deg):
                ex[half * d + int(rng.integers(0, d))] += 1
        re_, im_ = rng.integers(-4, 5, size=2)
        den = int(rng.integers(1, 4))
        terms[tuple(ex)] = alg.ring.convert(complex(0, 0)) + alg.ring.real(Fraction(int(re_), den)) + alg.ring.imag * alg.ring.real(Fraction(int(im_), den))
    return WeylElement(alg, terms)


def random_symbol_pair(rng: np.random.Generator, exact: bool = True, max_deg: int = 3):
    """Seeded symbol pair with ``d`` in {1, 2} and theta entries uniform in [-1, 1]."""
    d = int(rng.integers(1, 3))
    th, thp = random_skew(rng, d), random_skew(rng, d)
    alg = WeylAlgebra(th, thp, kind=SYMBOL, exact=exact)
    return _random_poly(rng, alg, max_deg), _random_poly(rng, alg, max_deg)


# --- criteria ---------------------------------------------------------------------


def criterion_composition(seed: int = 0, pairs: int = 100) -> CriterionResult:
    t0 = time.perf_counter()
    rng = np.random.default_rng(seed)
    worst = 0.0
    failures = 0
    for _ in range(pairs):
        a, b = random_symbol_pair(rng)
        ok, res = verify_composition(a, b)
        worst = max(worst, res)
        failures += not ok
    secs = time.perf_counter() - t0
    passed = failures == 0 and worst == 0.0 and secs < 10.0
    return CriterionResult(
        1, "composition exactness", passed, worst, {"pairs": pairs, "failures": failures, "seed": seed}, secs
    )


def criterion_heat_trace(nmax: int = 400) -> CriterionResult:
    t0 = time.perf_counter()
    worst = 0.0
    worst_closed = 0.0
    for th, t in product((0.5, 1.0, 2.0), (0.25, 0.5, 1.0)):
        closed = heat_trace_closed(th, t)
        num = heat_trace_numeric(FockRep(th, nmax), t).value
        worst = max(worst, abs(num - closed))
        ref = np.pi * th / np.sinh(t * th)
        worst_closed = max(worst_closed, abs(closed - ref) / ref)
    secs = time.perf_counter() - t0
    passed = worst < 1e-8 and worst_closed < 1e-13 and secs < 30.0
    return CriterionResult(
        2, "heat-trace agreement", passed, worst, {"nmax": nmax, "closed_form_rel_error": worst_closed}, secs
    )


def criterion_bott(series_cutoff: int = 100000, matrix_cutoff: int = 2000) -> CriterionResult:
    t0 = time.perf_counter()
    detail = {}
    passed = True
    worst = 0.0
    for th, thp in ((0.2, 0.3), (0.2, 0.0)):
        target = 4 * np.pi**2 * (1 - th * thp)
        try:
            r = bott_index(th, thp, series_cutoff, "both", matrix_cutoff)
        except NumericalGateError as exc:
            detail[f"{th},{thp}"] = {"error": str(exc)}
            passed = False
            continue
        rel = max(abs(r.matrix - target), abs(r.series - target)) / abs(target)
        worst = max(worst, rel)
        passed &= rel < 5e-3
        detail[f"{th},{thp}"] = {"matrix": r.matrix, "series": r.series, "closed_form": target}
    secs = time.perf_counter() - t0
    passed &= secs < 120.0
    return CriterionResult(3, "Bott index reproduction", passed, worst, detail, secs)


INTEGRALITY_PAIRS = ((0.2, 0.3), (0.5, 0.0), (1.0, 0.5), (0.3, -1.0), (2.0, 0.25))


def criterion_integrality(series_cutoff: int = 100000, matrix_cutoff: int = 2000) -> CriterionResult:
    t0 = time.perf_counter()
    ratios = {}
    worst = 0.0
    passed = True
    for th, thp in INTEGRALITY_PAIRS:
        try:
            r = bott_index(th, thp, series_cutoff, "both", matrix_cutoff)
        except NumericalGateError:
            passed = False
            continue
        norm = (2 * np.pi) ** 2 * abs(1 - th * thp)
        qs = (r.matrix / norm, r.series / norm)
        ratios[f"{th},{thp}"] = list(qs)
        for q in qs:
            worst = max(worst, abs(abs(q) - 1))
            passed &= 0.999 <= q <= 1.001
    return CriterionResult(4, "index integrality", passed, worst, {"ratios": ratios}, time.perf_counter() - t0)


def gaussian_test_set(L: float = 8.0, M: int = 64) -> list:
    """Shifted, anisotropic and modulated Gaussians on the ``M x M`` grid."""
    specs = [
        lambda x, y: np.exp(-((x - 0.3) ** 2 + (y + 0.2) ** 2)),
        lambda x, y: np.exp(-(x**2) / 2 - (y - 0.4) ** 2 / 1.5),
        lambda x, y: (1 + 0.5j * x - y * y / 3) * np.exp(-(x * x + y * y) / 1.2),
    ]
    return [GridFunction.from_function(f, 2, L, M) for f in specs]


def criterion_moyal() -> CriterionResult:
    t0 = time.perf_counter()
    fs = gaussian_test_set()
    f, g, h = fs
    pointwise = max((star(a, b, 0.0) - a * b).sup_norm() for a, b in ((f, g), (g, h), (f, h)))
    assoc = associativity_residual(f, g, h, 0.5)
    conj = max(star_adjoint_check(a, b, 0.7) for a, b in ((f, h), (h, g)))
    integ = max(
        abs(integral(star(a, b, th)) - integral(a * b)) for (a, b), th in (((f, g), 0.5), ((g, h), 1.3))
    )
    secs = time.perf_counter() - t0
    detail = {"pointwise": pointwise, "associativity": assoc, "conjugation": conj, "integral": integ}
    passed = pointwise < 1e-8 and assoc < 1e-6 and conj < 1e-8 and integ < 1e-6 and secs < 60.0
    return CriterionResult(5, "Moyal property suite", passed, max(pointwise, assoc, conj, integ), detail, secs)


def _brute_rising(n: int) -> list:
    coeffs = np.array([1], dtype=object)
    for j in range(n):
        coeffs = np.convolve(coeffs, np.array([j, 1], dtype=object))
    return [int(c) for c in coeffs]


def criterion_structural() -> CriterionResult:
    t0 = time.perf_counter()
    detail = {}
    ok_cliff = True
    for d in (2, 4, 6, 8):
        cl = clifford_build(d)
        eye = cl.identity()
        for j, k in product(range(d), repeat=2):
            ok_cliff &= np.array_equal(cl.gens[j] @ cl.gens[k] + cl.gens[k] @ cl.gens[j], 2 * (j == k) * eye)
        ok_cliff &= np.array_equal(cl.gamma @ cl.gamma, eye)
        ok_cliff &= all(np.array_equal(cl.gamma @ c, -c @ cl.gamma) for c in cl.gens)
        ok_cliff &= cl.supertrace(eye) == 0
    detail["clifford"] = bool(ok_cliff)

    tp4 = np.array([[0, 0.3, 0.1, 0], [-0.3, 0, 0, 0.2], [-0.1, 0, 0, 0.5], [0, -0.2, -0.5, 0]])
    dirac_matrix = max(dirac_square_check(2, 0.3, cutoff=20), dirac_square_check(4, tp4, cutoff=6))
    dirac_sym = dirac_square_symbolic(2, SkewMatrix.scalar(0.3)) and dirac_square_symbolic(4, tp4)
    detail["dirac_matrix_residual"] = dirac_matrix
    detail["dirac_symbolic"] = bool(dirac_sym)

    ok_sigma = True
    for n in range(1, 9):
        row = stirling_row(n)
        brute = _brute_rising(n)
        ok_sigma &= all(row.get(j, 0) == c for j, c in enumerate(brute))
        ok_sigma &= row[1] == math.factorial(n - 1)
    detail["sigma"] = bool(ok_sigma)

    ok_alpha = True
    for m in range(0, 5):
        for k in product(range(5), repeat=m):
            if sum(k) > 4:
                continue
            parts = list(accumulate(k))
            direct = Fraction(1)
            for i, (kv, s) in enumerate(zip(k, parts), start=1):
                direct *= Fraction(math.factorial(kv), s + i)
            ok_alpha &= alpha_constant(k) == direct
    detail["alpha"] = bool(ok_alpha)

    passed = ok_cliff and dirac_sym and ok_sigma and ok_alpha and dirac_matrix < 1e-10
    return CriterionResult(6, "structural identities", passed, dirac_matrix, detail, time.perf_counter() - t0)


def criterion_normal_form(seed: int = 0, count: int = 50) -> CriterionResult:
    t0 = time.perf_counter()
    rng = np.random.default_rng(seed + 7)
    worst = 0.0
    for i in range(count):
        d = int(rng.integers(1, 7))
        th = random_skew(rng, d, -2.0, 2.0)
        if i % 5 == 4 and d >= 3:
            # force a rank drop through a congruence with a singular matrix
            p = rng.normal(size=(d, d))
            p[:, -1] = 0.0
            th = p @ th @ p.T
        nf = standard_form(th)
        worst = max(worst, nf.residual(SkewMatrix(th).entries))
    return CriterionResult(
        7, "normal-form residual", worst < 1e-10, worst, {"matrices": count, "seed": seed}, time.perf_counter() - t0
    )


CRITERIA = {
    1: lambda seed: criterion_composition(seed),
    2: lambda seed: criterion_heat_trace(),
    3: lambda seed: criterion_bott(),
    4: lambda seed: criterion_integrality(),
    5: lambda seed: criterion_moyal(),
    6: lambda seed: criterion_structural(),
    7: lambda seed: criterion_normal_form(seed),
}


def run_suite(seed: int = 0, which=None) -> list:
    which = sorted(CRITERIA) if which is None else list(which)
    return [CRITERIA[k](seed) for k in which]
