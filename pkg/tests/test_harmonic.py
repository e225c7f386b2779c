"""Unitary/Chern decompositions, moment maps, harmonicity, Higgs data."""

from fractions import Fraction

import pytest

from hslab.scalars import Scalar
from hslab.algebroid import QDIM, QFrame, connection_DG, curvature
from hslab.harmonic import (CompatibleMetricH, decompose_unitary,
                            decompose_chern, moment_residuals,
                            harmonic_residual, harmonic_criteria,
                            harmonic_vs_moment_gap, higgs_field, higgs_dbar,
                            higgs_equation_residuals, matrix_is_zero)

from conftest import make_params, random_pair


@pytest.fixture(scope="module")
def std(model, h0, Omega):
    return make_params(model, h0, Omega, (1, 2, 2), (2, -1, 0))


def _metric(std):
    return CompatibleMetricH(QFrame(std.h, std.alpha))


def test_unitary_decomposition(model, h0, Omega, rng):
    for _ in range(10):
        t0, t1 = random_pair(rng)
        s = make_params(model, h0, Omega, t0, t1)
        H = _metric(s)
        A = connection_DG(s)
        B, Psi = decompose_unitary(A, H)
        assert (A - B - Psi).is_zero()
        assert (H.adjoint(B) + B).is_zero()
        assert (H.adjoint(Psi) - Psi).is_zero()


def test_adjoint_involution(std, rng, model, h0, Omega):
    H = _metric(std)
    A = connection_DG(std)
    assert (H.adjoint(H.adjoint(A)) - A).is_zero()


def test_selfadjoint_block_localization(model, h0, Omega):
    # for positive coupling the self-adjoint part couples the tangent
    # directions to the first End block only; for negative coupling to the
    # second
    for pair, block in ((((1, 2, 2), (2, -1, 0)), 6),
                        (((2, -1, 0), (1, 2, 2)), 7)):
        s = make_params(model, h0, Omega, *pair)
        assert (s.alpha.evalf().real > 0) == (block == 6)
        H = _metric(s)
        _, Psi = decompose_unitary(connection_DG(s), H)
        for i in range(QDIM):
            for j in range(QDIM):
                if Psi.entries[i][j].is_zero():
                    continue
                assert block in (i, j)
                assert (i < 6) != (j < 6)


def test_chern_decomposition(model, h0, Omega, rng):
    for _ in range(10):
        t0, t1 = random_pair(rng)
        s = make_params(model, h0, Omega, t0, t1)
        H = _metric(s)
        A = connection_DG(s)
        C, phi = decompose_chern(A, H)
        assert (A - C - phi).is_zero()
        assert (phi - phi.part(1, 0)).is_zero()
        assert (H.adjoint(C) + C).is_zero()
        # the field is twice the (1,0)-part of the self-adjoint block
        _, Psi = decompose_unitary(A, H)
        assert (phi - Psi.part(1, 0).scale(Scalar.of(2))).is_zero()


def test_curvature_decomposition(model, h0, Omega, rng):
    # F(A) = F(B) + Psi ^ Psi + (d Psi + B ^ Psi + Psi ^ B)
    for _ in range(6):
        t0, t1 = random_pair(rng)
        s = make_params(model, h0, Omega, t0, t1)
        H = _metric(s)
        A = connection_DG(s)
        B, Psi = decompose_unitary(A, H)
        rhs = (B.d() + B.wedge(B) + Psi.wedge(Psi)
               + Psi.d() + B.wedge(Psi) + Psi.wedge(B))
        assert (curvature(A) - rhs).is_zero()


def test_moment_residuals_on_solution(std):
    res = moment_residuals(std)
    assert res["I"].is_zero()
    assert matrix_is_zero(res["J"])
    assert matrix_is_zero(res["K"])


def test_harmonic_three_way_equivalence(model, h0, Omega, rng):
    for _ in range(12):
        t0, t1 = random_pair(rng)
        s = make_params(model, h0, Omega, t0, t1)
        dot = sum(a * b for a, b in zip(t0, t1))
        K = harmonic_residual(s)
        crit = harmonic_criteria(s)
        assert crit["torsion_pairing"].is_zero()
        assert matrix_is_zero(K) == (dot == 0)
        assert crit["cross"].is_zero() == (dot == 0)


def test_cross_term_closed_form(model, h0, Omega, rng):
    # the only nonzero entries of the K residual are the End off-diagonals,
    # equal to |alpha| times the frame contraction of the two curvatures
    for _ in range(8):
        t0, t1 = random_pair(rng)
        s = make_params(model, h0, Omega, t0, t1)
        K = harmonic_residual(s)
        cross = s.alpha * h0.frame_contraction(s.F1, s.F0)
        if s.alpha.evalf().real < 0:
            cross = -cross
        for i in range(QDIM):
            for j in range(QDIM):
                expect = cross if (i, j) in ((6, 7), (7, 6)) else Scalar.zero()
                assert K[i][j] == expect


def test_codifferential_identity(model, h0, Omega, rng):
    for _ in range(8):
        t0, t1 = random_pair(rng)
        s = make_params(model, h0, Omega, t0, t1)
        assert matrix_is_zero(harmonic_vs_moment_gap(s))


def test_higgs_field_closed_form(std, model, h0):
    C, phi = higgs_field(std)
    Z = [model.basis_vector(a) for a in range(6)]
    two = Scalar.of(2)
    for b in range(6):
        expect = std.F0.contract(Z[b]).part(1, 0).scale(two)
        assert (phi.entries[6][b] - expect).is_zero()
        assert phi.entries[7][b].is_zero()
    for a in range(6):
        acc = model.zero()
        for b in range(6):
            g = h0.Ginv6[a][b]
            if not g.is_zero():
                acc = acc + std.F0.contract(Z[b]).part(1, 0).scale(g)
        expect = acc.scale(-two * std.alpha)
        assert (phi.entries[a][6] - expect).is_zero()
        assert phi.entries[a][7].is_zero()


def _dbar_phi_closed_form(model, t0, t1, alpha):
    def mmat(t):
        m, n, p = t
        return ((Fraction(m), Fraction(0), Fraction(n), Fraction(p)),
                (Fraction(n), Fraction(-p), Fraction(-m), Fraction(0)))

    def cmul(a, b):
        return (a[0] * b[0] - a[1] * b[1], a[0] * b[1] + a[1] * b[0])

    m0 = [[(r[0], r[1]), (r[2], r[3])] for r in mmat(t0)]
    m1 = [[(r[0], r[1]), (r[2], r[3])] for r in mmat(t1)]
    # the product order follows the sign of the coupling: the heavier
    # curvature factor acts first, with overall weight -4 pi^2 |alpha|
    if alpha.evalf().real > 0:
        left, right, factor = m0, m1, Scalar.pi(2, -4) * alpha
    else:
        left, right, factor = m1, m0, Scalar.pi(2, 4) * alpha
    out = model.zero()
    for j in range(2):
        for k in range(2):
            acc = (Fraction(0), Fraction(0))
            for l in range(2):
                prod = cmul(left[j][l], right[l][k])
                acc = (acc[0] + prod[0], acc[1] + prod[1])
            coef = factor * Scalar.of(acc[0], acc[1])
            if not coef.is_zero():
                out = out + model.basis_form((j, k + 3), coef)
    return out


def test_dbar_phi_end_block_closed_form(model, h0, Omega, rng):
    for _ in range(10):
        t0, t1 = random_pair(rng)
        s = make_params(model, h0, Omega, t0, t1)
        dphi = higgs_dbar(s)
        expect = _dbar_phi_closed_form(model, t0, t1, s.alpha)
        assert (dphi.entries[6][7] - expect).is_zero()
        assert (dphi.entries[7][6] - expect).is_zero()
        assert not expect.is_zero()


def test_higgs_equation_residuals(std):
    res = higgs_equation_residuals(std)
    assert res["K"].is_zero()
    assert res["IJ_curvature"].is_zero()
    assert res["IJ_mixed"].is_zero()
    assert res["integrability"].is_zero()
    assert not res["holomorphicity_obstruction"].is_zero()
