"""Metric-dependent operators on invariant forms.

Everything is driven by a Hermitian fundamental form omega: the complexified
Gram matrix, its exact inverse, a C-bilinear Hodge star, the codifferential
d^* = -*d*, the Lee form J d^* omega, double metric contractions of 2-forms,
and the Levi-Civita / Bismut connection coefficients on the invariant frame.

All operations stay in exact scalars; frame orthonormalization (which would
need square roots) is never performed.  Positivity of Gram data is certified
by evaluating leading principal minors as floats at pi, which affects no
exact verdict.
"""

from __future__ import annotations

from fractions import Fraction
from itertools import combinations

from .scalars import Scalar
from .cealg import InvariantForm, InvariantVector, _merge_sign


def matrix_inverse(rows):
    """Exact inverse of a square Scalar matrix by Gauss-Jordan.

    Pivots must be invertible scalars (monomials q pi^k); this covers every
    Gram matrix the engine builds, whose entries are Gaussian rationals.
    """
    n = len(rows)
    a = [[rows[i][j] for j in range(n)] for i in range(n)]
    inv = [[Scalar.one() if i == j else Scalar.zero() for j in range(n)]
           for i in range(n)]
    for col in range(n):
        piv = None
        for r in range(col, n):
            if not a[r][col].is_zero() and a[r][col].is_monomial():
                piv = r
                break
        if piv is None:
            raise ValueError("matrix is singular or has non-monomial pivots")
        if piv != col:
            a[col], a[piv] = a[piv], a[col]
            inv[col], inv[piv] = inv[piv], inv[col]
        s = a[col][col].inverse()
        a[col] = [x * s for x in a[col]]
        inv[col] = [x * s for x in inv[col]]
        for r in range(n):
            if r == col or a[r][col].is_zero():
                continue
            f = a[r][col]
            a[r] = [x - f * y for x, y in zip(a[r], a[col])]
            inv[r] = [x - f * y for x, y in zip(inv[r], inv[col])]
    return inv


def matrix_det(rows):
    """Exact determinant by fraction-free-ish elimination on Scalars."""
    n = len(rows)
    a = [[rows[i][j] for j in range(n)] for i in range(n)]
    det = Scalar.one()
    for col in range(n):
        piv = None
        for r in range(col, n):
            if not a[r][col].is_zero() and a[r][col].is_monomial():
                piv = r
                break
        if piv is None:
            if all(a[r][col].is_zero() for r in range(col, n)):
                return Scalar.zero()
            raise ValueError("determinant needs monomial pivots")
        if piv != col:
            a[col], a[piv] = a[piv], a[col]
            det = -det
        det = det * a[col][col]
        s = a[col][col].inverse()
        for r in range(col + 1, n):
            if a[r][col].is_zero():
                continue
            f = a[r][col] * s
            a[r] = [x - f * y for x, y in zip(a[r], a[col])]
    return det


class HermitianStructure:
    """A Hermitian metric on an invariant complex model, given by omega."""

    def __init__(self, model, omega, check_positive=True):
        self.model = model
        self.omega = omega
        if omega.conjugate() != omega:
            raise ValueError("fundamental form is not real")
        for pq in omega.bigrade():
            if pq != (1, 1):
                raise ValueError("fundamental form is not of bidegree (1,1)")
        n = model.n
        mi = Scalar.of(0, -1)
        Z = [model.basis_vector(a) for a in range(2 * n)]
        # g(Z_j, Z_k') = -i omega(Z_j, Z_k')
        self.g = [[mi * omega.apply(Z[j], Z[k + n]) for k in range(n)]
                  for j in range(n)]
        zero = Scalar.zero()
        self.G6 = [[zero for _ in range(2 * n)] for _ in range(2 * n)]
        for j in range(n):
            for k in range(n):
                self.G6[j][k + n] = self.g[j][k]
                self.G6[k + n][j] = self.g[j][k]
        self.Ginv6 = matrix_inverse(self.G6)
        self.volume = omega.wedge(omega).wedge(omega).scale(Fraction(1, 6))
        self.c_vol = self.volume.top_coeff()
        if self.c_vol.is_zero():
            raise ValueError("degenerate fundamental form: omega^3 = 0")
        self._star_cache = {}
        if check_positive:
            self._certify_positive()

    def _certify_positive(self):
        """Float certificate that the Hermitian Gram matrix is positive."""
        n = self.model.n
        for k in range(1, n + 1):
            minor = matrix_det([[self.g[i][j] for j in range(k)] for i in range(k)])
            val = minor.evalf()
            if abs(val.imag) > 1e-9 or val.real <= 0:
                raise ValueError("Gram matrix is not positive definite "
                                 "(leading minor %d evaluates to %s)" % (k, val))

    # -- frame pairing helpers -----------------------------------------------

    def dual_pairing(self, I, J):
        """C-bilinear dual metric <e_I, e_J> = det of generator pairings."""
        if len(I) != len(J):
            return Scalar.zero()
        if not I:
            return Scalar.one()
        rows = [[self.Ginv6[a][b] for b in J] for a in I]
        return matrix_det(rows)

    def form_values(self, F):
        """Matrix F(Z_a, Z_b) of a 2-form over the complexified frame."""
        dim = self.model.dim
        zero = Scalar.zero()
        out = [[zero for _ in range(dim)] for _ in range(dim)]
        for (a, b), v in F.terms.items():
            out[a][b] = v
            out[b][a] = -v
        return out

    # -- star, codifferential, Lee form ----------------------------------------

    def star(self, form):
        """C-linear Hodge star with volume omega^3/3!."""
        model = self.model
        out = model.zero()
        dim = model.dim
        for J, v in form.terms.items():
            key = J
            image = self._star_cache.get(key)
            if image is None:
                k = len(J)
                image = model.zero()
                for I in combinations(range(dim), k):
                    pairing = self.dual_pairing(I, J)
                    if pairing.is_zero():
                        continue
                    Ic = tuple(x for x in range(dim) if x not in I)
                    merged, sign = _merge_sign(I, Ic)
                    s = pairing * self.c_vol
                    if sign < 0:
                        s = -s
                    image = image + InvariantForm(model, {Ic: s})
                self._star_cache[key] = image
            out = out + image.scale(v)
        return out

    def codifferential(self, form):
        """d^* = -*d* in real dimension six."""
        return -self.star(self.star(form).d())

    def j_form(self, form):
        """(J a)(X,..) = a(JX,..): multiplies a (p,q) term by i^(p-q)."""
        n = self.model.n
        t = {}
        for k, v in form.terms.items():
            p = sum(1 for a in k if a < n)
            q = len(k) - p
            r = (p - q) % 4
            if r == 1:
                v = v * Scalar.i()
            elif r == 2:
                v = -v
            elif r == 3:
                v = v * Scalar.of(0, -1)
            t[k] = v
        return InvariantForm(self.model, t)

    def lee_form(self):
        """theta = J d^* omega; vanishes iff d(omega^2) = 0."""
        return self.j_form(self.codifferential(self.omega))

    def sharp(self, oneform):
        """Metric dual vector of a 1-form."""
        dim = self.model.dim
        coeffs = [Scalar.zero()] * dim
        for (a,), v in oneform.terms.items():
            for b in range(dim):
                gi = self.Ginv6[b][a]
                if not gi.is_zero():
                    coeffs[b] = coeffs[b] + gi * v
        return InvariantVector(self.model, coeffs)

    def integrate(self, form):
        """lambda: top coefficient normalized so the total volume is 1."""
        return form.top_coeff() * self.c_vol.inverse()

    def frame_contraction(self, F, G):
        """Double metric contraction g^{ac} g^{bd} F_{ab} G_{cd}.

        Equals the orthonormal-frame sum sum_{ij} F(e_i,e_j) G(e_i,e_j)
        without leaving exact arithmetic.
        """
        dim = self.model.dim
        Fv = self.form_values(F)
        Gv = self.form_values(G)
        gi = self.Ginv6
        # M = Ginv * Fv * Ginv, then contract with Gv
        out = Scalar.zero()
        for a in range(dim):
            for b in range(dim):
                fab = Fv[a][b]
                if fab.is_zero():
                    continue
                for c in range(dim):
                    gac = gi[a][c]
                    if gac.is_zero():
                        continue
                    for d in range(dim):
                        gbd = gi[b][d]
                        if gbd.is_zero() or Gv[c][d].is_zero():
                            continue
                        out = out + gac * gbd * fab * Gv[c][d]
        return out

    # -- connections --------------------------------------------------------

    def brackets(self):
        """Lie brackets [Z_a, Z_b] from the Maurer-Cartan equations."""
        model = self.model
        dim = model.dim
        Z = [model.basis_vector(a) for a in range(dim)]
        out = [[None] * dim for _ in range(dim)]
        for a in range(dim):
            for b in range(dim):
                coeffs = [-(model.diff[c].apply(Z[a], Z[b])) for c in range(dim)]
                out[a][b] = InvariantVector(model, coeffs)
        return out

    def levi_civita(self):
        """Koszul formula on invariant fields (derivative terms vanish)."""
        model = self.model
        dim = model.dim
        br = self.brackets()

        def gv(vec, c):
            # g(vec, Z_c)
            out = Scalar.zero()
            for a, coef in enumerate(vec.coeffs):
                if not coef.is_zero() and not self.G6[a][c].is_zero():
                    out = out + coef * self.G6[a][c]
            return out

        half = Scalar.of(Fraction(1, 2))
        gamma = [[[Scalar.zero()] * dim for _ in range(dim)] for _ in range(dim)]
        for a in range(dim):
            for b in range(dim):
                kvals = [half * (gv(br[a][b], c) - gv(br[b][c], a) + gv(br[c][a], b))
                         for c in range(dim)]
                for d in range(dim):
                    acc = Scalar.zero()
                    for c in range(dim):
                        if not kvals[c].is_zero() and not self.Ginv6[c][d].is_zero():
                            acc = acc + kvals[c] * self.Ginv6[c][d]
                    gamma[a][b][d] = acc
        return ConnectionCoefficients(self, gamma, "levi-civita")

    def bismut(self):
        """nabla^- = nabla + (1/2) g^{-1} d^c omega (totally skew torsion)."""
        lc = self.levi_civita()
        model = self.model
        dim = model.dim
        T = self.omega.dc()
        Z = [model.basis_vector(a) for a in range(dim)]
        half = Scalar.of(Fraction(1, 2))
        gamma = [[[Scalar.zero()] * dim for _ in range(dim)] for _ in range(dim)]
        for a in range(dim):
            for b in range(dim):
                tvals = [half * T.apply(Z[a], Z[b], Z[c]) for c in range(dim)]
                for d in range(dim):
                    acc = lc.gamma[a][b][d]
                    for c in range(dim):
                        if not tvals[c].is_zero() and not self.Ginv6[c][d].is_zero():
                            acc = acc + tvals[c] * self.Ginv6[c][d]
                    gamma[a][b][d] = acc
        return ConnectionCoefficients(self, gamma, "bismut")


class ConnectionCoefficients:
    """Invariant connection coefficients: nabla_{Z_a} Z_b = Gamma^d_{ab} Z_d."""

    def __init__(self, structure, gamma, torsion_tag):
        self.structure = structure
        self.gamma = gamma
        self.torsion_tag = torsion_tag

    @property
    def model(self):
        return self.structure.model

    def nabla(self, a, b):
        """The vector nabla_{Z_a} Z_b."""
        return InvariantVector(self.model, list(self.gamma[a][b]))

    def torsion(self, a, b):
        """T(Z_a, Z_b) = nabla_a Z_b - nabla_b Z_a - [Z_a, Z_b]."""
        br = self.structure.brackets()
        return self.nabla(a, b) - self.nabla(b, a) - br[a][b]
