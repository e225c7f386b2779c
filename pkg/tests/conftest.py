"""Shared fixtures: the standard model, metric, and family builders."""

import random
from fractions import Fraction

import pytest

from hslab.scalars import Scalar
from hslab.cealg import build_iwasawa_model, NilmanifoldModel
from hslab.hermitian import HermitianStructure
from hslab.bundles import (LineBundleTriple, curvature_from_triple,
                           alpha_solve, SystemParams)


@pytest.fixture(scope="session")
def model():
    return build_iwasawa_model()


@pytest.fixture(scope="session")
def h0(model):
    half_i = Scalar.of(0, Fraction(1, 2))
    omega0 = (model.basis_form((0, 3)) + model.basis_form((1, 4))
              + model.basis_form((2, 5))).scale(half_i)
    return HermitianStructure(model, omega0)


@pytest.fixture(scope="session")
def Omega(model):
    return model.basis_form((0, 1, 2))


@pytest.fixture(scope="session")
def abelian_model():
    return NilmanifoldModel.from_json({"n": 3, "d": {}})


@pytest.fixture(scope="session")
def kt_model():
    # Kodaira-Thurston-style model: one torus (1,1) differential
    return NilmanifoldModel.from_json({"n": 3, "d": {"w3": [["w1", "w1'", "1"]]}})


def make_params(model, h, Omega, t0, t1, alpha=None):
    tt0 = LineBundleTriple(*t0, role="V0")
    tt1 = LineBundleTriple(*t1, role="V1")
    F0 = curvature_from_triple(model, tt0)
    F1 = curvature_from_triple(model, tt1)
    if alpha is None:
        alpha = alpha_solve(F0, F1, h)
    return SystemParams(model=model, h=h, triple0=tt0, triple1=tt1,
                        F0=F0, F1=F1, alpha=alpha, Omega=Omega)


def random_triple(rng, lo=-5, hi=5):
    while True:
        t = tuple(rng.randint(lo, hi) for _ in range(3))
        if t != (0, 0, 0):
            return t


def random_pair(rng, lo=-5, hi=5):
    """Random non-degenerate pair (distinct squared norms)."""
    while True:
        t0 = random_triple(rng, lo, hi)
        t1 = random_triple(rng, lo, hi)
        if sum(x * x for x in t0) != sum(x * x for x in t1):
            return t0, t1


def random_scalar(rng, allow_pi=True):
    k = rng.choice((-2, -1, 0, 1, 2)) if allow_pi else 0
    re = Fraction(rng.randint(-9, 9), rng.randint(1, 7))
    im = Fraction(rng.randint(-9, 9), rng.randint(1, 7))
    return Scalar.pi(k, re, im)


def random_form(model, rng, degree, nterms=3):
    import itertools
    out = model.zero()
    indices = list(itertools.combinations(range(6), degree))
    for _ in range(nterms):
        out = out + model.basis_form(rng.choice(indices), random_scalar(rng))
    return out


@pytest.fixture
def rng():
    return random.Random(20260826)
