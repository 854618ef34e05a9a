import numpy as np
import pytest

from ncgeo.errors import IncompatibleAlgebraError, TruncationError, ValidationError
from ncgeo.fock import heat_trace_closed
from ncgeo.symbols import compose, dequantize, quantize, quantized_norm, symbol_trace, verify_composition
from ncgeo.verify import random_symbol_pair
from ncgeo.weyl import SYMBOL, WeylAlgebra, adjoint, bidegree, weyl_mul


@pytest.fixture
def S1():
    return WeylAlgebra(np.zeros((1, 1)), kind=SYMBOL, exact=True)


def test_xi_then_x(S1):
    exp = compose(S1.xi(0), S1.x(0), 1)
    assert exp.total() == S1.x(0) * S1.xi(0) - 1j
    assert quantize(exp.total()) == weyl_mul(quantize(S1.xi(0)), quantize(S1.x(0)))


def test_x_then_xi_has_no_correction(S1):
    exp = compose(S1.x(0), S1.xi(0), 3)
    assert exp.total() == S1.x(0) * S1.xi(0)


def test_order_bounds(rng):
    for _ in range(30):
        a, b = random_symbol_pair(rng)
        exp = compose(a, b, 4)
        for bound, piece in exp:
            if piece.terms:
                assert bidegree(piece).deg_xi <= bound


@pytest.mark.parametrize("seed", [0, 1, 2])
def test_composition_exact(seed):
    rng = np.random.default_rng(seed)
    for _ in range(30):
        a, b = random_symbol_pair(rng)
        ok, res = verify_composition(a, b)
        assert ok and res == 0.0


def test_composition_float(rng):
    for _ in range(20):
        a, b = random_symbol_pair(rng, exact=False)
        ok, res = verify_composition(a, b)
        assert ok and res < 1e-10


def test_adjoint_compatibility(rng):
    # Op(a)^* = Op(b) where b is the symbol of the adjoint
    for _ in range(20):
        a, _ = random_symbol_pair(rng)
        op_adj = adjoint(quantize(a))
        sym = dequantize(op_adj)
        assert quantize(sym) == op_adj
        assert adjoint(adjoint(quantize(a))) == quantize(a)


def test_quantize_linear_injective(rng):
    for _ in range(20):
        a, b = random_symbol_pair(rng)
        assert quantize(a + b * 3) == quantize(a) + quantize(b) * 3
        assert dequantize(quantize(a)) == a
    a, _ = random_symbol_pair(rng)
    assert (not quantize(a).terms) == (not a.terms)


def test_wrong_algebra(S1):
    op = S1.partner("operator")
    with pytest.raises(IncompatibleAlgebraError):
        quantize(op.x(0))
    with pytest.raises(IncompatibleAlgebraError):
        compose(op.x(0), op.x(0), 1)
    other = WeylAlgebra([[0.0]], [[0.0]], kind=SYMBOL, exact=False)
    with pytest.raises(IncompatibleAlgebraError):
        compose(S1.x(0), other.x(0), 1)
    with pytest.raises(ValidationError):
        compose(S1.x(0), S1.x(0), -1)


def test_symbol_trace_unit_commutative(S1):
    r = symbol_trace(S1.one())
    assert abs(r.symbol_side - np.pi) < 1e-12
    assert r.difference < 1e-6


def test_symbol_trace_quadratic(S1):
    r = symbol_trace(S1.x(0) ** 2)
    assert abs(r.symbol_side - np.pi / 2) < 1e-10
    assert r.difference < 1e-6


def test_symbol_trace_zero(S1):
    r = symbol_trace(S1.zero())
    assert r.operator_side == 0 and r.symbol_side == 0


def test_symbol_trace_noncommutative_unit():
    S = WeylAlgebra([[0, 0.5], [-0.5, 0]], [[0, 0.3], [-0.3, 0]], kind=SYMBOL, exact=True)
    r = symbol_trace(S.one())
    closed = heat_trace_closed(0.5, 1.0) * heat_trace_closed(0.3, 1.0)
    assert abs(r.symbol_side - closed) < 1e-6
    assert r.difference < 1e-6


def test_symbol_trace_truncation():
    S = WeylAlgebra([[0, 0.5], [-0.5, 0]], [[0, 0.3], [-0.3, 0]], kind=SYMBOL, exact=True)
    with pytest.raises(TruncationError):
        symbol_trace(S.one(), cutoff=12)
    with pytest.raises(ValidationError):
        symbol_trace(S.one(), cutoff=4)


def test_quantized_norm_constant():
    S = WeylAlgebra([[0, 0.5], [-0.5, 0]], [[0, 0.3], [-0.3, 0]], kind=SYMBOL, exact=True)
    a = S.one() * (2 - 1j)
    values = [quantized_norm(a, n) for n in (4, 6, 8)]
    np.testing.assert_allclose(values, abs(2 - 1j), rtol=1e-12)


def test_symbol_trace_quadratic_plane():
    S = WeylAlgebra([[0, 0.5], [-0.5, 0]], [[0, 0.3], [-0.3, 0]], kind=SYMBOL, exact=True)
    r = symbol_trace(S.x(0) ** 2)
    assert r.difference < 1e-6
    assert r.tail_estimate < 1e-6
