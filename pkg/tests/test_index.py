from fractions import Fraction
from itertools import accumulate, product
import math

import numpy as np
import pytest
import sympy

from ncgeo import index as idx
from ncgeo.clifford import clifford_build
from ncgeo.fock import FockRep
from ncgeo.errors import NumericalGateError, ValidationError
from ncgeo.index import (
    BlockSpace,
    Jet,
    alpha_constant,
    bott_index,
    bott_projector,
    bott_series,
    chern_coefficient,
    cocycle_constants,
    dirac_square_check,
    dirac_square_symbolic,
    projector_residual,
    simplified_cocycle,
    stirling_row,
)
from ncgeo.skew import SkewMatrix

FOUR_PI2 = 4 * np.pi**2


def test_cocycle_examples():
    c = cocycle_constants(2, (0, 0))
    assert c.alpha == Fraction(1, 2)
    assert c.sigma[2] == {1: 1, 2: 1}
    assert cocycle_constants(4, (0, 0, 0, 0)).sigma[4][1] == 6
    assert cocycle_constants(0, ()).alpha == 1
    with pytest.raises(ValidationError):
        cocycle_constants(2, (1,))
    with pytest.raises(ValidationError):
        alpha_constant((1, -1))


def test_alpha_direct():
    for m in range(4):
        for k in product(range(4), repeat=m):
            direct = Fraction(1)
            for i, (kv, s) in enumerate(zip(k, accumulate(k)), start=1):
                direct *= Fraction(math.factorial(kv), s + i)
            assert alpha_constant(k) == direct


@pytest.mark.parametrize("n", range(0, 10))
def test_sigma_against_sympy(n):
    row = stirling_row(n)
    for j in range(n + 1):
        assert row.get(j, 0) == sympy.functions.combinatorial.numbers.stirling(n, j, kind=1, signed=False)
    assert sum(row.values()) == math.factorial(n)


def test_chern_coefficients():
    assert [chern_coefficient(k) for k in range(3)] == [1, -2, 12]
    with pytest.raises(ValidationError):
        chern_coefficient(-1)


def test_constants_json():
    js = cocycle_constants(2, (1, 0)).to_json()
    assert js["alpha"] == "1/6" and js["sigma"]["2"] == {"1": 1, "2": 1}


def _zero_jets(levels, count):
    from scipy import sparse

    z = sparse.csr_matrix((levels, levels), dtype=complex)
    return [Jet.constant(z, 2) for _ in range(count)]


def test_simplified_cocycle_rejects_odd_and_zero_inputs():
    cl = clifford_build(2)
    space = BlockSpace(20, 1, 2 * np.pi)
    with pytest.raises(ValidationError):
        simplified_cocycle(1, _zero_jets(20, 2), cl, 0.3, space)
    with pytest.raises(ValidationError):
        simplified_cocycle(4, _zero_jets(20, 5), cl, 0.3, space)
    assert simplified_cocycle(0, _zero_jets(20, 1), cl, 0.3, space) == 0
    assert simplified_cocycle(2, _zero_jets(20, 3), cl, 0.3, space) == 0


def test_phi0_is_curvature_times_trace():
    # phi_0(a) = pi str(a omega) = pi tau(a) str(omega) for scalar a
    from scipy import sparse

    levels, th, tp = 30, 0.5, 0.3
    cl = clifford_build(2)
    space = BlockSpace(levels, 1, 2 * np.pi * th)
    diag = np.exp(-np.arange(levels))
    a = Jet.constant(sparse.diags(diag.astype(complex), format="csr"), 2)
    val = simplified_cocycle(0, [a], cl, np.array([[0, tp], [-tp, 0]]), space, margin=0)
    tau = 2 * np.pi * th * diag.sum()
    assert val == pytest.approx(np.pi * tau * (-2 * tp))


def test_projector():
    e, unit, space = bott_projector(0.3, 200)
    assert projector_residual(e, space) < 1e-10
    with pytest.raises(ValidationError):
        bott_projector(0.0, 200)


def test_derivations_of_z():
    # D_1 z = -i, D_2 z = 1 as jets of the Bott construction
    e, _, space = bott_projector(0.4, 120)
    for j in range(2):
        assert e.derivs[j].shape == e.value.shape


def test_series_telescopes():
    th = 0.5
    val, tail = bott_series(th, 0.0, 100000)
    assert abs(val - FOUR_PI2) <= tail
    k = np.arange(2000.0)
    partial = np.sum(1 / ((1 + 2 * k * th) * (1 + 2 * th + 2 * k * th)))
    # partial fractions: the sum over k < K is (1 - 1/(1 + 2 K theta)) / (2 theta)
    assert partial == pytest.approx((1 - 1 / (1 + 2 * th * 2000)) / (2 * th), rel=1e-13)


def test_bott_half_theta():
    r = bott_index(0.5, 0.0, 100000, "both", 2000)
    assert r.series == pytest.approx(FOUR_PI2, rel=1e-4)
    assert r.matrix == pytest.approx(FOUR_PI2, rel=5e-3)
    assert abs(r.matrix - r.series) < r.matrix_tail + r.series_tail


def test_bott_paper_example():
    r = bott_index(0.2, 0.3, 100000, "both", 2000)
    target = FOUR_PI2 * 0.94
    assert r.closed_form == pytest.approx(target)
    assert abs(r.series - target) < 1e-3
    assert abs(r.matrix - target) / target < 5e-3


def test_bott_degenerate():
    r = bott_index(0.5, 2.0, 100000, "both", 2000)
    assert r.closed_form == pytest.approx(0.0, abs=1e-12)
    assert abs(r.series) < 1e-3 and abs(r.matrix) < 1e-3


def test_bott_single_methods():
    s = bott_index(0.2, 0.3, 1000, "series")
    assert s.matrix is None and s.series is not None
    m = bott_index(0.2, 0.3, 400, "matrix")
    assert m.series is None and m.matrix is not None
    with pytest.raises(ValidationError):
        bott_index(0.2, 0.3, 50)
    with pytest.raises(ValidationError):
        bott_index(-0.2, 0.3)
    with pytest.raises(ValidationError):
        bott_index(0.2, 0.3, 1000, "both", 10)
    with pytest.raises(ValidationError):
        bott_index(0.2, 0.3, 1000, "fancy")


def test_gate_failure(monkeypatch):
    monkeypatch.setattr(idx, "bott_series", lambda th, tp, k: (0.0, 1e-12))
    with pytest.raises(NumericalGateError):
        bott_index(0.2, 0.3, 1000, "both", 200)


def test_matrix_json_shape():
    js = bott_index(0.3, 0.1, 400, "both", 400).to_json()
    assert set(js) >= {"theta", "theta_prime", "closed_form", "matrix", "series", "tails"}
    assert js["matrix_pieces"]["phi0"] + js["matrix_pieces"]["phi2"] == pytest.approx(js["matrix"])


def test_dirac_square_matrix():
    # theta' = 0 has no oscillator modes, only quadrature directions
    assert dirac_square_check(2, 0.0, rep=FockRep(np.zeros((2, 2)), 10, grid_points=8)) < 1e-12
    assert dirac_square_check(2, 0.3, cutoff=20) < 1e-10
    tp4 = np.array([[0, 0.3, 0.1, 0], [-0.3, 0, 0, 0.2], [-0.1, 0, 0, 0.5], [0, -0.2, -0.5, 0]])
    assert dirac_square_check(4, tp4, cutoff=6) < 1e-10


def test_dirac_square_symbolic():
    assert dirac_square_symbolic(2, SkewMatrix.scalar(0.3))
    assert dirac_square_symbolic(2, SkewMatrix.scalar(0.0))
    assert dirac_square_symbolic(4, np.array([[0, 0.5, 0, 0], [-0.5, 0, 0.25, 0], [0, -0.25, 0, 1.0], [0, 0, -1.0, 0]]))
