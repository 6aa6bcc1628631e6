"""
Tests for coboundary operators, Milnor algebras, second cohomology bases
and the graded decomposition solver
"""
import itertools
from fractions import Fraction

import pytest

from algebra.multivector import MultiDer, Vec3, euler_field, grad, multider_weight, schouten
from algebra.poly_core import Poly, WeightSystem, parse_poly
from services import sampling
from services.cohomology import (
    H2Kind, PhiContext, cocycle_decompose, delta, delta0, delta0_kernel, delta1, delta1_euler_identity, delta2,
    delta_via_schouten, h1_is_zero, h2_basis, h2_dim_plane, h2_plane_basis, make_context, milnor, solve_delta0,
)
from utils.errors import (
    ArityMismatch, NotACocycle, NotHomogeneous, NotInSpan, NotIsolatedSingularity, NotSquareFree,
    SchoutenDegreeError,
)

CORPUS = ["a1", "a4", "fermat3", "fermat5", "d4"]


def vec(*components: str) -> Vec3:
    return Vec3(*(parse_poly(c) for c in components))


def permute_variables(p: Poly, order) -> Poly:
    """Variable k of the result is variable order[k] of p"""
    return Poly(3, {tuple(mono[order[k]] for k in range(3)): coeff for mono, coeff in p.items()})


class TestMilnorAlgebra:
    """Milnor numbers, monomial bases and the index set E_phi"""

    @pytest.mark.parametrize("fixture,mu", [("a1", 1), ("a4", 4), ("fermat3", 8), ("fermat5", 64), ("d4", 4)])
    def test_milnor_numbers(self, request, fixture, mu):
        """Milnor numbers of the corpus polynomials"""
        _, milnor_data = request.getfixturevalue(fixture)
        assert milnor_data.mu == mu

    def test_a4_basis_and_index_set(self, a4):
        """A4 basis, degrees and E_phi"""
        _, milnor_data = a4
        assert milnor_data.labels() == ["1", "z", "z^2", "z^3"]
        assert milnor_data.degrees == (0, 2, 4, 6)
        # w(phi) = 10 differs from |w| = 12, so u_0 = 1 is left out
        assert milnor_data.e_phi == (1, 2, 3)

    def test_fermat3_basis_order(self, fermat3):
        """Fermat cubic basis in printing order, E_phi is everything"""
        _, milnor_data = fermat3
        assert milnor_data.labels() == ["1", "x", "y", "z", "x*y", "x*z", "y*z", "x*y*z"]
        assert milnor_data.e_phi == tuple(range(8))

    @pytest.mark.parametrize("phi,weights,mu", [
        ("x^2 + y^2 + z^5", (5, 5, 2), 4),
        ("x^3 + x*y^2 + z^2", (2, 2, 3), 4),
    ])
    def test_mu_is_invariant_under_variable_permutation(self, phi, weights, mu):
        """Permuting variables together with their weights keeps mu"""
        p = parse_poly(phi)
        for order in itertools.permutations(range(3)):
            permuted = make_context(permute_variables(p, order), WeightSystem(tuple(weights[k] for k in order)))
            data = milnor(permuted)
            assert data.mu == mu
            assert sorted(data.degrees) == sorted(milnor(make_context(p, WeightSystem(weights))).degrees)

    def test_non_isolated_singularity(self):
        """x^2 + y^2 is singular along the z axis"""
        with pytest.raises(NotIsolatedSingularity):
            make_context(parse_poly("x^2 + y^2"), WeightSystem((1, 1, 1)))

    def test_non_homogeneous_phi(self):
        """phi must be weight homogeneous"""
        with pytest.raises(NotHomogeneous):
            PhiContext(parse_poly("x^2 + y^3 + z^2"), WeightSystem((1, 1, 1)))

    def test_h1_flag(self, a4, fermat3):
        """First cohomology vanishes exactly when w(phi) differs from |w|"""
        assert h1_is_zero(a4[0])
        assert not h1_is_zero(fermat3[0])


class TestCoboundaries:
    """delta0, delta1, delta2 and their agreement with the Schouten bracket"""

    def test_delta0_on_a1(self, a1):
        """delta0(x) = grad x cross grad phi"""
        ctx, _ = a1
        assert delta0(parse_poly("x"), ctx) == MultiDer.vector_field(vec("0", "-2*z", "2*y"))

    def test_delta2_on_a1(self, a1):
        """delta2 of y dy^dz"""
        ctx, _ = a1
        assert delta2(MultiDer.bivector(vec("y", "0", "0")), ctx) == MultiDer.trivector(parse_poly("2*z"))

    def test_phi_is_a_casimir(self, a4):
        """phi spans the Casimirs of degree w(phi)"""
        ctx, _ = a4
        assert delta0(ctx.phi, ctx).is_zero()
        (casimir,) = delta0_kernel(ctx, ctx.phi_degree)
        assert casimir.scale(1 / casimir.coefficient((2, 0, 0))) == ctx.phi

    @pytest.mark.parametrize("fixture", ["a1", "a4", "fermat3", "d4"])
    def test_casimirs_are_powers_of_phi(self, request, fixture):
        """Up to twice w(phi), the kernel of delta0 is phi^k in degree k w(phi) and zero elsewhere"""
        ctx, _ = request.getfixturevalue(fixture)
        for degree in range(2 * ctx.phi_degree + 1):
            kernel = delta0_kernel(ctx, degree)
            if degree % ctx.phi_degree:
                assert kernel == [], degree
                continue
            (casimir,) = kernel
            power = ctx.phi ** (degree // ctx.phi_degree)
            mono = next(iter(power.monomials()))
            assert casimir.scale(power.coefficient(mono) / casimir.coefficient(mono)) == power

    @pytest.mark.parametrize("fixture", ["a1", "a4", "fermat3", "d4"])
    def test_delta_squared_vanishes(self, request, fixture):
        """delta1 delta0 = 0 and delta2 delta1 = 0 on a quick sample"""
        ctx, _ = request.getfixturevalue(fixture)
        rng = sampling.make_rng(21)
        for _ in range(20):
            F = sampling.random_multider(rng, 0, ctx.weights, 8)
            V = sampling.random_multider(rng, 1, ctx.weights, 8)
            assert delta1(delta0(F.body, ctx), ctx).is_zero()
            assert delta2(delta1(V, ctx), ctx).is_zero()

    @pytest.mark.slow
    @pytest.mark.parametrize("fixture", CORPUS)
    def test_delta_squared_vanishes_on_many_inputs(self, request, fixture):
        """delta1 delta0 = 0 and delta2 delta1 = 0 on 200 inputs each"""
        ctx, _ = request.getfixturevalue(fixture)
        rng = sampling.make_rng(2000 + ctx.phi_degree)
        for _ in range(200):
            F = sampling.random_multider(rng, 0, ctx.weights, 8)
            V = sampling.random_multider(rng, 1, ctx.weights, 8)
            assert delta1(delta0(F.body, ctx), ctx).is_zero()
            assert delta2(delta1(V, ctx), ctx).is_zero()

    @pytest.mark.parametrize("degree", [0, 1, 2])
    def test_componentwise_formulas_match_schouten(self, fermat3, degree):
        """delta^k agrees with -[., pi_0] on a quick sample"""
        ctx, _ = fermat3
        rng = sampling.make_rng(40 + degree)
        for _ in range(10):
            V = sampling.random_multider(rng, degree, ctx.weights, 4)
            assert delta(V, ctx) == delta_via_schouten(V, ctx)

    @pytest.mark.slow
    @pytest.mark.parametrize("fixture", CORPUS)
    @pytest.mark.parametrize("degree", [0, 1, 2])
    def test_componentwise_formulas_match_schouten_on_many_inputs(self, request, fixture, degree):
        """delta^k agrees with -[., pi_0] on 100 inputs per degree"""
        ctx, _ = request.getfixturevalue(fixture)
        rng = sampling.make_rng(4000 + 10 * ctx.phi_degree + degree)
        for _ in range(100):
            V = sampling.random_multider(rng, degree, ctx.weights, 6)
            assert delta(V, ctx) == delta_via_schouten(V, ctx)

    def test_delta_of_trivector(self, a1):
        """There is no delta3 in three variables"""
        ctx, _ = a1
        with pytest.raises(SchoutenDegreeError):
            delta(MultiDer.trivector(parse_poly("1")), ctx)

    def test_coboundaries_shift_weight(self, a4):
        """delta raises weight by w(phi) - |w|"""
        ctx, _ = a4
        V = MultiDer.vector_field(vec("0", "0", "z"))
        assert multider_weight(V, ctx.weights) == 0
        assert multider_weight(delta1(V, ctx), ctx.weights) == ctx.shift == -2


class TestSecondCohomology:
    """H2 bases and cocycle decomposition"""

    def test_basis_sizes(self, a4, fermat3):
        """Basis sizes for the default and zero phi-power bounds"""
        assert len(h2_basis(*a4, phi_power_bound=1)) == 9
        assert len(h2_basis(*fermat3, phi_power_bound=0)) == 15

    def test_basis_kinds(self, a4):
        """phi-power elements come first, then the gradients of u_r"""
        basis = h2_basis(*a4, phi_power_bound=0)
        assert [e.kind for e in basis].count(H2Kind.PHI_POW) == 3
        assert [e.label for e in basis if e.kind == H2Kind.GRAD_U] == ["grad(u_1)", "grad(u_2)", "grad(u_3)"]

    def test_every_element_is_a_cocycle(self, fermat3):
        """delta2 kills every basis element"""
        for element in h2_basis(*fermat3, phi_power_bound=1):
            assert delta2(element.realized, fermat3[0]).is_zero()

    def test_decomposes_basis_elements_to_unit_vectors(self, a4):
        """Each basis element decomposes to its own unit vector"""
        ctx, milnor_data = a4
        basis = h2_basis(ctx, milnor_data, 1)
        for k, element in enumerate(basis):
            result = cocycle_decompose(element.realized, ctx, milnor_data, basis)
            assert result.nonzero() == {k: 1}

    def test_zero_decomposes_uniquely(self, fermat3):
        """Zero has only the zero decomposition"""
        ctx, milnor_data = fermat3
        basis = h2_basis(ctx, milnor_data, 0)
        result = cocycle_decompose(MultiDer.zero(2), ctx, milnor_data, basis)
        assert result.nonzero() == {}
        assert result.xi.is_zero()

    def test_decomposes_mixed_cocycle(self, a4):
        """Coefficients and a witness xi come back for a combination plus a coboundary"""
        ctx, milnor_data = a4
        basis = h2_basis(ctx, milnor_data, 1)
        xi = MultiDer.vector_field(vec("z^2", "x", "y*z"))
        target = basis[0].realized.scale(3) + basis[-1].realized.scale(Fraction(-1, 2)) + delta1(xi, ctx)
        result = cocycle_decompose(target, ctx, milnor_data, basis)
        assert result.nonzero() == {0: 3, len(basis) - 1: Fraction(-1, 2)}
        rebuilt = basis[0].realized.scale(3) + basis[-1].realized.scale(Fraction(-1, 2)) + delta1(result.xi, ctx)
        assert rebuilt == target

    def test_rejects_non_cocycle(self, a1):
        """A bivector with nonzero delta2 is refused"""
        ctx, milnor_data = a1
        with pytest.raises(NotACocycle):
            cocycle_decompose(MultiDer.bivector(vec("y", "0", "0")), ctx, milnor_data, [])

    def test_reports_missing_phi_power(self, a4):
        """NotInSpan names the phi power the basis lacks"""
        ctx, milnor_data = a4
        basis = h2_basis(ctx, milnor_data, 0)
        # phi^2 u_1 grad(phi) sits at index 2 * |E_phi| of the bound-2 basis
        target = h2_basis(ctx, milnor_data, 2)[6].realized
        with pytest.raises(NotInSpan) as info:
            cocycle_decompose(target, ctx, milnor_data, basis)
        assert info.value.details["required_phi_power"] == 2

    @pytest.mark.parametrize("i,j", [(0, 1), (1, 2), (2, 3)])
    def test_euler_coboundary_identity(self, a4, i, j):
        """delta1(phi^i u_j e_w) in closed form"""
        assert delta1_euler_identity(*a4, i=i, j=j)

    def test_euler_coboundary_coefficients(self, a4):
        """delta1(z e_w) = 4 z grad(phi) - 10 phi grad(z) on A4"""
        ctx, _ = a4
        z = parse_poly("z")
        lhs = delta1(euler_field(ctx.weights).scale(z), ctx)
        rhs = MultiDer.bivector(grad(ctx.phi) * z.scale(4) - grad(z) * ctx.phi.scale(10))
        assert lhs == rhs


class TestFirstCohomology:
    """Hamiltonian fields and the Euler class"""

    def test_solve_delta0_recovers_hamiltonian(self, a4):
        """solve_delta0 finds a primitive of a Hamiltonian field"""
        ctx, _ = a4
        h = parse_poly("x*z + y^2")
        found = solve_delta0(delta0(h, ctx), ctx)
        assert delta0(found, ctx) == delta0(h, ctx)

    def test_euler_field_is_not_hamiltonian(self, fermat3):
        """The Euler field is a Poisson field with no Hamiltonian when w(phi) = |w|"""
        ctx, _ = fermat3
        euler = MultiDer.vector_field(vec("x", "y", "z"))
        assert schouten(euler, ctx.pi0).is_zero()
        assert solve_delta0(euler, ctx) is None


class TestPlaneCase:
    """Square-free plane curves"""

    def test_node(self):
        """xy gives dimensions (1, 1)"""
        assert h2_dim_plane(parse_poly("x*y", 2), WeightSystem((1, 1))) == (1, 1)

    def test_cusp(self):
        """The cusp has second part spanned by 1 and y"""
        basis = h2_plane_basis(parse_poly("x^2 - y^3", 2), WeightSystem((3, 2)))
        assert basis.dims == (0, 2)
        assert basis.second == ((0, 0), (0, 1))

    def test_repeated_factor(self):
        """x^2 y is not square free"""
        with pytest.raises(NotSquareFree):
            h2_dim_plane(parse_poly("x^2*y", 2), WeightSystem((1, 1)))

    def test_needs_two_variables(self):
        """The plane formula takes a polynomial in x and y"""
        with pytest.raises(ArityMismatch):
            h2_dim_plane(parse_poly("x*y"), WeightSystem((1, 1, 1)))
