from itertools import product

import numpy as np
import pytest
from scipy import linalg

from ncgeo.errors import ValidationError
from ncgeo.fock import (
    FockOperator,
    FockRep,
    build_generators,
    displacement,
    heat_trace_closed,
    heat_trace_numeric,
    ladder,
    laplacian,
    spectral_count,
    trace,
    weyl_transform,
)
from ncgeo.moyal import GridFunction, star
from ncgeo.skew import standard_form

from conftest import skew


def ccr_residual(rep, margin=2):
    gens = build_generators(rep)
    mask = rep.interior(margin)
    eye = np.eye(mask.sum())
    worst = 0.0
    for j, k in product(range(rep.d), repeat=2):
        c = gens[j].matrix @ gens[k].matrix - gens[k].matrix @ gens[j].matrix
        block = c[np.ix_(mask, mask)] + 1j * rep.theta.entries[j, k] * eye
        worst = max(worst, float(np.max(np.abs(block))))
    return worst


def test_standard_block_commutator():
    rep = FockRep([[0, -1.0], [1.0, 0]], 3)
    x1, x2 = (g.matrix for g in build_generators(rep))
    c = x1 @ x2 - x2 @ x1
    # [X_j, X_k] = -i theta_jk, and theta_12 = -1
    np.testing.assert_allclose(c[:3, :3], 1j * np.eye(3), atol=1e-14)
    assert abs(c[3, 3] - 1j) > 0.5


@pytest.mark.parametrize("d", [2, 3, 4])
def test_ccr_interior(rng, d):
    th = skew(rng, d)
    rep = FockRep(th, 5 if d < 4 else 4, grid_points=6)
    assert rep.dim == (rep.cutoff + 1) ** rep.n * rep.grid_points ** (d - 2 * rep.n)
    assert ccr_residual(rep) < 1e-10


def test_rank_deficient_ccr():
    th = np.zeros((3, 3))
    th[0, 1], th[1, 0] = 0.7, -0.7
    rep = FockRep(th, 6, grid_points=5)
    assert rep.n == 1 and rep.n_comm == 1
    assert ccr_residual(rep) < 1e-10


def test_commutative_line():
    rep = FockRep(np.zeros((1, 1)), 3, grid_points=7, half_width=4.0)
    (x,) = build_generators(rep)
    np.testing.assert_allclose(x.matrix, np.diag(np.diag(x.matrix)), atol=0)
    assert np.isclose(np.max(np.abs(np.diag(x.matrix))), 4.0)


def test_ladder_number_spectrum():
    ad = ladder(6)
    evals = np.sort(np.linalg.eigvalsh(ad @ ad.T))
    np.testing.assert_allclose(evals, 2 * np.arange(7), atol=1e-12)
    a = ad.T
    comm = a @ ad - ad @ a
    np.testing.assert_allclose(np.diag(comm)[:-1], 2.0)


def test_cutoff_validation():
    with pytest.raises(ValidationError):
        FockRep(1.0, 0)
    with pytest.raises(ValidationError):
        heat_trace_numeric(FockRep(1.0, 4), 0.0)


def test_adjoint_is_conjugate_transpose(rng):
    rep = FockRep(skew(rng, 2), 4)
    g = build_generators(rep)[0]
    np.testing.assert_allclose(g.adjoint().matrix, g.matrix.conj().T)
    np.testing.assert_allclose(g.matrix, g.matrix.conj().T, atol=1e-14)


def test_closed_form_examples():
    assert np.isclose(heat_trace_closed(1.0, 0.5), np.pi / np.sinh(0.5), rtol=1e-15)
    assert np.isclose(heat_trace_closed(np.zeros((2, 2)), 0.7), np.pi / 0.7, rtol=1e-15)
    # geometric series of the oscillator spectrum
    th, t = 0.8, 0.6
    series = 2 * np.pi * th * sum(np.exp(-t * th * (2 * k + 1)) for k in range(400))
    assert np.isclose(heat_trace_closed(th, t), series, rtol=1e-13)


def test_closed_form_scaling(rng):
    for _ in range(10):
        th, t, s = rng.uniform(0.1, 2), rng.uniform(0.1, 2), rng.uniform(0.2, 3)
        # t^{-1} f(t mu): scaling t by s and mu by 1/s multiplies by 1/s
        assert np.isclose(heat_trace_closed(th / s, t * s), heat_trace_closed(th, t) / s, rtol=1e-12)


def test_closed_form_depends_on_mus_only(rng):
    for _ in range(5):
        th = skew(rng, 4)
        q, _ = np.linalg.qr(rng.normal(size=(4, 4)))
        assert np.isclose(heat_trace_closed(q @ th @ q.T, 0.7), heat_trace_closed(th, 0.7), rtol=1e-12)


def test_change_of_variables_n1():
    # tau_theta o Phi_T = |det T|^{-1} tau_{T theta T^t}: with T = diag(s, s),
    # Phi_T maps Gaussians e^{-t|x|^2} to e^{-t s^2 |x|^2}
    th, t, s = 0.6, 0.9, 1.7
    lhs = heat_trace_closed(th, t * s * s)
    rhs = heat_trace_closed(s * s * th, t) / s**2
    assert np.isclose(lhs, rhs, rtol=1e-13)


def test_heat_trace_numeric_example():
    r = heat_trace_numeric(FockRep(1.0, 200), 0.5)
    assert abs(r.value - np.pi / np.sinh(0.5)) < 1e-8
    assert r.tail_bound < 1e-8


def test_heat_trace_large_t():
    th, t = 1.0, 12.0
    r = heat_trace_numeric(FockRep(th, 10), t)
    lead = 2 * np.pi * th * np.exp(-t * th)
    assert abs(r.value / lead - 1) < 1e-9


def test_heat_trace_error_halves():
    th, t = 0.5, 0.2
    closed = heat_trace_closed(th, t)
    errs = [abs(heat_trace_numeric(FockRep(th, n), t).value - closed) for n in (10, 20, 40)]
    assert errs[1] <= errs[0] / 2 and errs[2] <= errs[1] / 2
    for n, e in zip((10, 20, 40), errs):
        assert e <= heat_trace_numeric(FockRep(th, n), t).tail_bound * (1 + 1e-9)


def test_heat_trace_rank_deficient():
    th = np.zeros((3, 3))
    th[0, 1], th[1, 0] = 0.5, -0.5
    rep = FockRep(th, 60, grid_points=32)
    r = heat_trace_numeric(rep, 1.0)
    err = abs(r.value - heat_trace_closed(th, 1.0))
    assert err < 1e-8 and err <= r.tail_bound + 1e-12


def test_laplacian_is_diagonal_in_oscillator_basis(rng):
    rep = FockRep(skew(rng, 2), 6)
    h = laplacian(rep).matrix
    mask = rep.interior(1)
    block = h[np.ix_(mask, mask)]
    np.testing.assert_allclose(block, np.diag(np.diag(block)), atol=1e-12)


def test_trace_identity_and_cyclicity(rng):
    K = 7
    rep = FockRep(1.0, K)
    assert np.isclose(trace(FockOperator(rep, np.eye(rep.dim))), 2 * np.pi * (K + 1))
    a = rng.normal(size=(rep.dim, rep.dim)) + 1j * rng.normal(size=(rep.dim, rep.dim))
    b = rng.normal(size=(rep.dim, rep.dim)) + 1j * rng.normal(size=(rep.dim, rep.dim))
    tab = trace(FockOperator(rep, a @ b))
    tba = trace(FockOperator(rep, b @ a))
    assert abs(tab - tba) < 1e-10 * max(1, abs(tab))


def test_trace_of_heat_operator():
    rep = FockRep(0.7, 120)
    h = laplacian(rep).matrix
    op = FockOperator(rep, linalg.expm(-0.8 * h))
    assert abs(trace(op) - heat_trace_closed(0.7, 0.8)) < 1e-8


def test_spectral_count():
    rep = FockRep(0.5, 30)
    # eigenvalues 0.5 (2k+1) <= 4.2 for k = 0..3
    assert np.isclose(spectral_count(rep, 4.2), 2 * np.pi * 0.5 * 4)
    with pytest.raises(ValidationError):
        spectral_count(rep, 100.0)


def test_displacement_matches_expm(rng):
    th = skew(rng, 2)
    rep = FockRep(th, 60)
    xi = np.array([0.4, -0.3])
    gens = build_generators(rep)
    gen = sum(x * g.matrix for x, g in zip(xi, gens))
    # exponentiate on a larger space and cut back to keep truncation effects away
    big = FockRep(th, 120)
    gbig = sum(x * g.matrix for x, g in zip(xi, build_generators(big)))
    ref = linalg.expm(1j * gbig)[: rep.dim, : rep.dim]
    got = displacement(rep, xi)
    mask = rep.interior(30)
    np.testing.assert_allclose(got[np.ix_(mask, mask)], ref[np.ix_(mask, mask)], atol=1e-10)
    assert gen.shape == got.shape


def test_weyl_transform_is_multiplicative():
    th = 0.5
    f = GridFunction.from_function(lambda x, y: np.exp(-((x - 0.3) ** 2 + y**2)), 2, 8.0, 64)
    g = GridFunction.from_function(lambda x, y: np.exp(-(x**2 + (y + 0.2) ** 2) / 1.5), 2, 8.0, 64)
    rep = FockRep(th, 40)
    lf = weyl_transform(rep, f).matrix
    lg = weyl_transform(rep, g).matrix
    lfg = weyl_transform(rep, star(f, g, th)).matrix
    mask = rep.interior(20)
    diff = (lfg - lf @ lg)[np.ix_(mask, mask)]
    assert np.max(np.abs(diff)) < 1e-10
    # the trace of lambda(f) is the integral of f
    assert abs(trace(weyl_transform(rep, f)) - np.pi) < 1e-6


def test_standard_generators_normal_form(rng):
    th = skew(rng, 4)
    nf = standard_form(th)
    rep = FockRep(th, 3)
    assert rep.trace_scale == pytest.approx((2 * np.pi) ** nf.n * np.prod(nf.mus))
