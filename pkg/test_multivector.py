"""
Tests for multiderivations and the Schouten bracket
"""
import itertools

import pytest

from algebra.multivector import (
    MultiDer, Vec3, _wedge, cross, curl, div, dot, euler_field, grad, is_poisson, jacobi_defect,
    multider_weight, poisson_from_poly, schouten, schouten_by_shuffles, schouten_gradpair, split_by_weight,
    triple,
)
from algebra.poly_core import Poly, WeightSystem, parse_poly
from services import sampling
from services.cohomology import delta2
from utils.errors import SchoutenDegreeError

W1 = WeightSystem((1, 1, 1))


def vec(*components: str) -> Vec3:
    return Vec3(*(parse_poly(c) for c in components))


def random_vec(rng, max_degree=3) -> Vec3:
    return Vec3(*(sampling.random_poly(rng, max_degree=max_degree) for _ in range(3)))


class TestMultiDer:
    """Construction and evaluation of k-derivations"""

    def test_bivector_evaluation(self):
        """A bivector evaluates through the cross product of gradients"""
        P = MultiDer.bivector(vec("0", "x", "0"))
        # P[F, G] = p . (grad F x grad G)
        assert P(parse_poly("z"), parse_poly("x")) == parse_poly("x")

    def test_wrong_argument_count(self):
        """A vector field takes one argument"""
        with pytest.raises(SchoutenDegreeError):
            MultiDer.vector_field(vec("1", "0", "0"))(parse_poly("x"), parse_poly("y"))

    def test_poisson_bivector_is_poisson(self):
        """The bracket of a polynomial satisfies Jacobi"""
        pi0 = poisson_from_poly(parse_poly("x^3 + y^3 + z^3"))
        assert is_poisson(pi0)

    def test_non_poisson_bivector(self):
        """x dx^dy + y dy^dz fails Jacobi"""
        assert not is_poisson(MultiDer.bivector(vec("0", "0", "x")) + MultiDer.bivector(vec("y", "0", "0")))

    def test_split_by_weight(self):
        """Pieces are keyed by multiderivation weight"""
        P = MultiDer.bivector(vec("x", "1", "0"))
        pieces = split_by_weight(P, W1)
        # component i of a bivector sits at weight degree - (|w| - w_i)
        assert sorted(pieces) == [-2, -1]
        assert multider_weight(pieces[-1], W1) == -1


class TestSchoutenClosedForms:
    """Closed formulas in three variables"""

    def test_gradient_pair(self):
        """[x dz^dx, dx^dy] is the unit trivector"""
        P = MultiDer.bivector(vec("0", "x", "0"))
        Q = MultiDer.bivector(vec("0", "0", "1"))
        assert schouten(P, Q) == MultiDer.trivector(parse_poly("1"))

    def test_function_with_vector_field(self):
        """[V, f] = V(f) and [f, V] = -V(f)"""
        v = MultiDer.vector_field(vec("y", "0", "0"))
        f = MultiDer.function(parse_poly("x^2"))
        assert schouten(v, f).body == parse_poly("2*x*y")
        assert schouten(f, v).body == parse_poly("-2*x*y")

    def test_commutator_of_vector_fields(self):
        """[d_x, x d_y] = d_y"""
        X = MultiDer.vector_field(vec("1", "0", "0"))
        Y = MultiDer.vector_field(vec("0", "x", "0"))
        assert schouten(X, Y) == MultiDer.vector_field(vec("0", "1", "0"))

    def test_euler_field_scales_by_weight(self):
        """The Euler field acts on pi_0 by its weight"""
        w = WeightSystem((5, 5, 2))
        pi0 = poisson_from_poly(parse_poly("x^2 + y^2 + z^5"))
        # pi_0 has weight w(phi) - |w| = -2
        assert schouten(euler_field(w), pi0) == pi0.scale(-2)

    def test_degree_out_of_range(self):
        """Brackets landing outside degrees 0..3 raise"""
        f = MultiDer.function(parse_poly("x"))
        with pytest.raises(SchoutenDegreeError):
            schouten(f, f)
        t = MultiDer.trivector(parse_poly("x"))
        with pytest.raises(SchoutenDegreeError):
            schouten(t, MultiDer.bivector(vec("1", "0", "0")))

    @pytest.mark.parametrize("p,q", [(0, 1), (1, 0), (0, 2), (2, 0), (0, 3), (3, 0),
                                     (1, 1), (1, 2), (2, 1), (1, 3), (3, 1), (2, 2)])
    def test_matches_shuffle_formula(self, p, q):
        """Closed formulas agree with the shuffle sum"""
        rng = sampling.make_rng(100 + 10 * p + q)
        for _ in range(8):
            P = sampling.random_multider(rng, p, W1, 3)
            Q = sampling.random_multider(rng, q, W1, 3)
            assert schouten(P, Q) == schouten_by_shuffles(P, Q)

    @pytest.mark.parametrize("p,q", [(1, 1), (1, 2), (2, 2), (0, 2), (1, 3)])
    def test_graded_antisymmetry(self, p, q):
        """[Q, P] = -(-1)^((p-1)(q-1)) [P, Q]"""
        rng = sampling.make_rng(7 * p + q)
        P = sampling.random_multider(rng, p, W1, 3)
        Q = sampling.random_multider(rng, q, W1, 3)
        sign = -((-1) ** abs((p - 1) * (q - 1)))
        assert schouten(Q, P) == schouten(P, Q).scale(sign)


class TestSchoutenIdentities:
    """Graded Jacobi and Leibniz rules"""

    def test_graded_jacobi_on_vector_fields_and_bivector(self):
        """[X, [Y, P]] = [[X, Y], P] + [Y, [X, P]]"""
        rng = sampling.make_rng(3)
        for _ in range(5):
            X = sampling.random_multider(rng, 1, W1, 2)
            Y = sampling.random_multider(rng, 1, W1, 2)
            P = sampling.random_multider(rng, 2, W1, 2)
            lhs = schouten(X, schouten(Y, P))
            rhs = schouten(schouten(X, Y), P) + schouten(Y, schouten(X, P))
            assert lhs == rhs

    def test_leibniz_for_vector_field_over_wedge(self):
        """A vector field acts as a derivation of the wedge product"""
        rng = sampling.make_rng(5)
        for _ in range(5):
            X = sampling.random_multider(rng, 1, W1, 2)
            Q = sampling.random_multider(rng, 1, W1, 2)
            R = sampling.random_multider(rng, 1, W1, 2)
            lhs = schouten(X, _wedge(Q, R))
            rhs = _wedge(schouten(X, Q), R) + _wedge(Q, schouten(X, R))
            assert lhs == rhs

    def test_wedge_of_vector_fields_is_cross_product(self):
        """In the A^3 picture a wedge of vector fields is a cross product"""
        a, b = vec("x", "0", "0"), vec("0", "y", "0")
        assert _wedge(MultiDer.vector_field(a), MultiDer.vector_field(b)).body == cross(a, b)

    def test_all_pairs_of_coordinate_fields_commute(self):
        """Constant coordinate fields commute"""
        units = [MultiDer.vector_field(Vec3(*(parse_poly("1" if i == k else "0") for i in range(3)))) for k in range(3)]
        for X, Y in itertools.combinations(units, 2):
            assert schouten(X, Y).is_zero()

    def test_function_times_gradient_is_poisson(self):
        """chi grad(phi) satisfies Jacobi for random chi and phi"""
        rng = sampling.make_rng(21)
        for _ in range(30):
            chi = sampling.random_poly(rng, max_degree=3)
            phi = sampling.random_poly(rng, max_degree=4)
            P = MultiDer.bivector(grad(phi) * chi)
            assert jacobi_defect(P).is_zero()


class TestVectorCalculus:
    """Identities of grad, curl, div and the triple product"""

    def test_curl_of_gradient_vanishes(self):
        """curl(grad p) = 0"""
        rng = sampling.make_rng(31)
        for _ in range(30):
            assert curl(grad(sampling.random_poly(rng, max_degree=5))).is_zero()

    def test_divergence_of_curl_vanishes(self):
        """div(curl v) = 0"""
        rng = sampling.make_rng(32)
        for _ in range(30):
            assert div(curl(random_vec(rng, 4))).is_zero()

    def test_cross_of_gradients_is_divergence_free(self):
        """div(grad p x grad q) = 0"""
        rng = sampling.make_rng(33)
        for _ in range(30):
            p = sampling.random_poly(rng, max_degree=4)
            q = sampling.random_poly(rng, max_degree=4)
            assert div(cross(grad(p), grad(q))).is_zero()

    def test_triple_product_is_alternating(self):
        """Swapping two arguments flips the sign and cyclic shifts keep it"""
        rng = sampling.make_rng(34)
        for _ in range(20):
            a, b, c = random_vec(rng), random_vec(rng), random_vec(rng)
            value = triple(a, b, c)
            assert triple(b, a, c) == -value
            assert triple(a, c, b) == -value
            assert triple(c, b, a) == -value
            assert triple(b, c, a) == value
            assert triple(a, a, c).is_zero()

    def test_cross_is_orthogonal(self):
        """a . (a x b) = 0"""
        rng = sampling.make_rng(35)
        for _ in range(20):
            a, b = random_vec(rng), random_vec(rng)
            assert dot(a, cross(a, b)).is_zero()


class TestGradientPairs:
    """[F grad L, G grad H] as a single polynomial"""

    def test_matches_schouten_of_bivectors(self):
        """The shortcut agrees with the full bracket of the two bivectors"""
        rng = sampling.make_rng(41)
        for _ in range(40):
            F, L, G, H = (sampling.random_poly(rng, max_degree=4) for _ in range(4))
            P = MultiDer.bivector(grad(L) * F)
            Q = MultiDer.bivector(grad(H) * G)
            assert schouten(P, Q) == MultiDer.trivector(schouten_gradpair(F, L, G, H))

    def test_coordinate_gradients_commute(self):
        """[grad x, grad y] = 0"""
        one = Poly.constant(1)
        assert schouten_gradpair(one, parse_poly("x"), one, parse_poly("y")).is_zero()

    @pytest.mark.parametrize("name", ["a4", "fermat3"])
    def test_phi_gradient_multiples_commute(self, request, name):
        """[phi^l u_i grad phi, phi^m u_j grad phi] = 0 for l, m <= 2"""
        ctx, data = request.getfixturevalue(name)
        powers = [ctx.phi ** l for l in range(3)]
        for i, j in itertools.product(range(data.mu), repeat=2):
            for l, m in itertools.product(range(3), repeat=2):
                F = powers[l] * data.u(i)
                G = powers[m] * data.u(j)
                assert schouten_gradpair(F, ctx.phi, G, ctx.phi).is_zero()

    @pytest.mark.parametrize("name", ["a4", "fermat3"])
    def test_bracket_with_basis_gradient_is_a_coboundary(self, request, name):
        """[phi^l u_i grad phi, grad u_j] = delta2(phi^l u_i grad u_j) for l <= 2"""
        ctx, data = request.getfixturevalue(name)
        one = Poly.constant(1)
        for l in range(3):
            for i, j in itertools.product(range(data.mu), repeat=2):
                F = ctx.phi ** l * data.u(i)
                expected = delta2(MultiDer.bivector(grad(data.u(j)) * F), ctx)
                assert MultiDer.trivector(schouten_gradpair(F, ctx.phi, one, data.u(j))) == expected
