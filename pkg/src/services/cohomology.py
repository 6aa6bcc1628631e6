"""
Poisson cohomology of (Q[x,y,z], {.,.}_phi)
Coboundary operators, the Milnor algebra, second cohomology bases and the
graded cocycle decomposition solver
"""
from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction
from functools import lru_cache
from typing import Dict, List, Optional, Sequence, Tuple

import sympy

from algebra.groebner import quotient_basis
from algebra.linear_solver import LinearSystem
from algebra.multivector import (
    MultiDer, Vec3, component_shift, cross, curl, div, dot, euler_field, grad,
    poisson_from_poly, schouten, split_by_weight,
)
from algebra.poly_core import (
    Monomial, Poly, WeightSystem, format_monomial, homogeneous_degree, monomials_of_degree, partial,
)
from utils.computation_logger import ComputationAction, log_computation, log_precondition_failure
from utils.errors import (
    ArityMismatch, InfiniteQuotient, NotACocycle, NotHomogeneous, NotInSpan,
    NotIsolatedSingularity, NotSquareFree, SchoutenDegreeError, SmoothAtOrigin,
)

RowKey = Tuple[int, Monomial]


@dataclass(frozen=True)
class PhiContext:
    """A weight-homogeneous phi with an isolated singularity at the origin"""

    phi: Poly
    weights: WeightSystem
    phi_degree: int = field(init=False)
    balanced: bool = field(init=False)

    def __post_init__(self):
        if self.phi.arity != 3 or self.weights.arity != 3:
            raise ArityMismatch("phi must be a polynomial in x, y, z with three weights")
        if self.phi.is_zero() or self.phi.is_constant():
            raise NotHomogeneous("phi must be a nonconstant polynomial")
        object.__setattr__(self, "phi_degree", homogeneous_degree(self.phi, self.weights))
        object.__setattr__(self, "balanced", self.phi_degree == self.weights.weight_sum)

    @property
    def weight_sum(self) -> int:
        return self.weights.weight_sum

    @property
    def shift(self) -> int:
        """Weight of pi_0; every delta^k raises weight by this amount"""
        return self.phi_degree - self.weight_sum

    @property
    def pi0(self) -> MultiDer:
        return poisson_from_poly(self.phi)


@dataclass(frozen=True)
class MilnorData:
    groebner_basis: Tuple[Poly, ...]
    basis_monomials: Tuple[Monomial, ...]
    mu: int
    degrees: Tuple[int, ...]
    e_phi: Tuple[int, ...]

    @property
    def basis(self) -> Tuple[Poly, ...]:
        return tuple(Poly.monomial(m, 1, 3) for m in self.basis_monomials)

    def u(self, index: int) -> Poly:
        return Poly.monomial(self.basis_monomials[index], 1, 3)

    def labels(self) -> List[str]:
        return [format_monomial(m) for m in self.basis_monomials]


class H2Kind(Enum):
    PHI_POW = "phi_pow"
    GRAD_U = "grad_u"


@dataclass(frozen=True)
class H2BasisElem:
    """phi^l u_j grad(phi) (PHI_POW) or grad(u_r) (GRAD_U)"""

    kind: H2Kind
    index: int
    realized: MultiDer
    weight: int
    power: int = 0

    @property
    def label(self) -> str:
        if self.kind == H2Kind.GRAD_U:
            return f"grad(u_{self.index})"
        return f"phi^{self.power}*u_{self.index}*grad(phi)"


@dataclass
class Decomposition:
    coefficients: List[Fraction]
    xi: MultiDer

    def nonzero(self) -> Dict[int, Fraction]:
        return {k: c for k, c in enumerate(self.coefficients) if c}


def make_context(phi: Poly, weights: WeightSystem) -> PhiContext:
    """Build a context and verify the isolated singularity precondition"""
    ctx = PhiContext(phi, weights)
    milnor(ctx)
    log_computation(ComputationAction.CONTEXT_BUILT, phi=str(phi), weights=list(weights.weights))
    return ctx


# -- coboundary operators ---------------------------------------------


def delta0(F: Poly, ctx: PhiContext) -> MultiDer:
    return MultiDer.vector_field(cross(grad(F), grad(ctx.phi)))


def delta1(V: MultiDer, ctx: PhiContext) -> MultiDer:
    grad_phi = grad(ctx.phi)
    return MultiDer.bivector(grad_phi * div(V.body) - grad(dot(V.body, grad_phi)))


def delta2(V: MultiDer, ctx: PhiContext) -> MultiDer:
    return MultiDer.trivector(-dot(grad(ctx.phi), curl(V.body)))


def delta(V: MultiDer, ctx: PhiContext) -> MultiDer:
    """delta^k for the degree k of V"""
    if V.degree == 0:
        return delta0(V.body, ctx)
    if V.degree == 1:
        return delta1(V, ctx)
    if V.degree == 2:
        return delta2(V, ctx)
    raise SchoutenDegreeError("delta^3 lands in degree 4, which vanishes in three variables")


def delta_via_schouten(V: MultiDer, ctx: PhiContext) -> MultiDer:
    return -schouten(V, ctx.pi0)


# -- Milnor algebra -----------------------------------------------------


@lru_cache(maxsize=64)
def _milnor_cached(phi: Poly, weights: WeightSystem) -> MilnorData:
    ctx_weights = weights
    jacobian = [partial(phi, i) for i in range(3)]
    try:
        groebner_basis, standard = quotient_basis(jacobian, ctx_weights)
    except InfiniteQuotient as exc:
        raise NotIsolatedSingularity(
            f"{phi} does not have an isolated singularity: the Milnor algebra is infinite dimensional",
            exc.details,
        )
    if not standard:
        raise SmoothAtOrigin(f"{phi} is smooth at the origin (Milnor number 0)")
    degrees = tuple(weights.degree_of(m) for m in standard)
    phi_degree = homogeneous_degree(phi, weights)
    start = 0 if phi_degree == weights.weight_sum else 1
    data = MilnorData(
        groebner_basis=tuple(groebner_basis),
        basis_monomials=tuple(standard),
        mu=len(standard),
        degrees=degrees,
        e_phi=tuple(range(start, len(standard))),
    )
    log_computation(ComputationAction.GROEBNER_COMPUTED, phi=str(phi), mu=data.mu, basis_size=len(groebner_basis))
    return data


def milnor(ctx: PhiContext) -> MilnorData:
    return _milnor_cached(ctx.phi, ctx.weights)


# -- second cohomology ----------------------------------------------------


def h1_is_zero(ctx: PhiContext) -> bool:
    return ctx.phi_degree != ctx.weight_sum


def phi_pow_weight(ctx: PhiContext, milnor_data: MilnorData, power: int, j: int) -> int:
    return (power + 1) * ctx.phi_degree + milnor_data.degrees[j] - ctx.weight_sum


def grad_u_weight(ctx: PhiContext, milnor_data: MilnorData, r: int) -> int:
    return milnor_data.degrees[r] - ctx.weight_sum


def h2_basis(ctx: PhiContext, milnor_data: MilnorData, phi_power_bound: int) -> List[H2BasisElem]:
    if phi_power_bound < 0:
        raise ValueError("phi_power_bound must be non-negative")
    grad_phi = grad(ctx.phi)
    elements: List[H2BasisElem] = []
    phi_power = Poly.constant(1, 3)
    for power in range(phi_power_bound + 1):
        for j in milnor_data.e_phi:
            realized = MultiDer.bivector(grad_phi * (phi_power * milnor_data.u(j)))
            elements.append(H2BasisElem(H2Kind.PHI_POW, j, realized, phi_pow_weight(ctx, milnor_data, power, j), power))
        phi_power = phi_power * ctx.phi
    for r in range(1, milnor_data.mu):
        realized = MultiDer.bivector(grad(milnor_data.u(r)))
        elements.append(H2BasisElem(H2Kind.GRAD_U, r, realized, grad_u_weight(ctx, milnor_data, r)))
    for element in elements:
        if not delta2(element.realized, ctx).is_zero():
            raise NotACocycle(f"basis element {element.label} is not a cocycle")
    return elements


# -- graded linear algebra ------------------------------------------------


def multider_entries(P: MultiDer) -> Dict[RowKey, Fraction]:
    entries: Dict[RowKey, Fraction] = {}
    for index, comp in enumerate(P.polys()):
        for mono, coeff in comp.items():
            entries[(index, mono)] = coeff
    return entries


def graded_monomial_fields(degree: int, weight: int, w: WeightSystem) -> List[Tuple[int, Monomial]]:
    """(component, monomial) pairs spanning the weight-`weight` part of X^degree"""
    count = 1 if degree in (0, 3) else 3
    cells = []
    for index in range(count):
        for mono in monomials_of_degree(weight + component_shift(degree, index, w), w):
            cells.append((index, mono))
    return cells


def unit_multider(degree: int, index: int, mono: Monomial) -> MultiDer:
    term = Poly.monomial(mono, 1, 3)
    if degree in (0, 3):
        return MultiDer(degree, term)
    comps = [Poly.zero(3)] * 3
    comps[index] = term
    return MultiDer(degree, Vec3(*comps))


def assemble(degree: int, cells: Sequence[Tuple[int, Monomial]], values: Sequence[Fraction]) -> MultiDer:
    result = MultiDer.zero(degree)
    for (index, mono), value in zip(cells, values):
        if value:
            result = result + unit_multider(degree, index, mono).scale(value)
    return result


@lru_cache(maxsize=100_000)
def _delta1_unit(ctx: PhiContext, index: int, mono: Monomial) -> MultiDer:
    return delta1(unit_multider(1, index, mono), ctx)


@lru_cache(maxsize=100_000)
def _delta0_unit(ctx: PhiContext, mono: Monomial) -> MultiDer:
    return delta0(Poly.monomial(mono, 1, 3), ctx)


def _required_phi_power(ctx: PhiContext, milnor_data: MilnorData, weight: int) -> Optional[int]:
    for j in milnor_data.e_phi:
        numerator = weight + ctx.weight_sum - milnor_data.degrees[j]
        if numerator > 0 and numerator % ctx.phi_degree == 0:
            return numerator // ctx.phi_degree - 1
    return None


def cocycle_decompose(
    P: MultiDer,
    ctx: PhiContext,
    milnor_data: MilnorData,
    basis: Sequence[H2BasisElem],
) -> Decomposition:
    """Write a 2-cocycle P as sum a_k basis_k + delta1(xi)

    Each weight-graded piece is solved separately; the unknowns are the
    monomial vector fields of the matching weight followed by the basis
    elements of that weight.
    """
    if P.degree != 2:
        raise NotACocycle("only bivectors can be decomposed")
    if not delta2(P, ctx).is_zero():
        log_precondition_failure("cocycle_decompose", "delta2 of input is nonzero")
        raise NotACocycle("delta2(P) is not zero")

    coefficients = [Fraction(0)] * len(basis)
    xi = MultiDer.zero(1)
    w = ctx.weights

    for weight, piece in sorted(split_by_weight(P, w).items()):
        cells = graded_monomial_fields(1, weight - ctx.shift, w)
        system = LinearSystem()
        for index, mono in cells:
            system.add_column(multider_entries(_delta1_unit(ctx, index, mono)))
        basis_columns = [k for k, elem in enumerate(basis) if elem.weight == weight]
        for k in basis_columns:
            system.add_column(multider_entries(basis[k].realized))

        solution = system.solve(multider_entries(piece))
        if solution is None:
            required = _required_phi_power(ctx, milnor_data, weight)
            raise NotInSpan(
                f"weight {weight} component is not in the span of the supplied basis",
                {"weight": weight, "required_phi_power": required},
            )
        xi = xi + assemble(1, cells, solution[:len(cells)])
        for k, value in zip(basis_columns, solution[len(cells):]):
            coefficients[k] = value

    return Decomposition(coefficients, xi)


def delta0_kernel(ctx: PhiContext, degree: int) -> List[Poly]:
    """Basis of the weighted-degree `degree` Casimirs found by linear algebra"""
    monos = monomials_of_degree(degree, ctx.weights)
    system = LinearSystem()
    for mono in monos:
        system.add_column(multider_entries(_delta0_unit(ctx, mono)))
    return [
        sum((Poly.monomial(m, v, 3) for m, v in zip(monos, vector) if v), Poly.zero(3))
        for vector in system.nullspace()
    ]


def solve_delta0(target: MultiDer, ctx: PhiContext) -> Optional[Poly]:
    """Some h with delta0(h) = target, or None"""
    h = Poly.zero(3)
    for weight, piece in sorted(split_by_weight(target, ctx.weights).items()):
        monos = monomials_of_degree(weight - ctx.shift, ctx.weights)
        system = LinearSystem()
        for mono in monos:
            system.add_column(multider_entries(_delta0_unit(ctx, mono)))
        solution = system.solve(multider_entries(piece))
        if solution is None:
            return None
        for mono, value in zip(monos, solution):
            if value:
                h = h + Poly.monomial(mono, value, 3)
    return h


def delta1_euler_identity(ctx: PhiContext, milnor_data: MilnorData, i: int, j: int) -> bool:
    """delta1(phi^i u_j e_w) against (w(u_j) - w(phi) + |w|) phi^i u_j grad(phi) - w(phi) phi^(i+1) grad(u_j)"""
    u_j = milnor_data.u(j)
    phi_i = ctx.phi ** i
    lhs = delta1(euler_field(ctx.weights).scale(phi_i * u_j), ctx)
    factor = milnor_data.degrees[j] - ctx.phi_degree + ctx.weight_sum
    rhs = MultiDer.bivector(
        grad(ctx.phi) * (phi_i * u_j).scale(factor) - grad(u_j) * (phi_i * ctx.phi).scale(ctx.phi_degree)
    )
    return lhs == rhs


# -- the plane case --------------------------------------------------------


@dataclass(frozen=True)
class PlaneH2Basis:
    """Monomials of weighted degree N(psi) and standard monomials of the Jacobian quotient"""

    first: Tuple[Monomial, ...]
    second: Tuple[Monomial, ...]

    @property
    def dims(self) -> Tuple[int, int]:
        return len(self.first), len(self.second)


def _to_sympy(p: Poly) -> sympy.Poly:
    x, y = sympy.symbols("x y")
    return sympy.Poly.from_dict(
        {mono: sympy.Rational(c.numerator, c.denominator) for mono, c in p.items()}, x, y, domain="QQ"
    )


def is_square_free_plane(psi: Poly) -> bool:
    """gcd(psi, psi_x, psi_y) is a constant"""
    polys = [_to_sympy(psi), _to_sympy(partial(psi, 0)), _to_sympy(partial(psi, 1))]
    common = sympy.gcd_list([p for p in polys if not p.is_zero])
    return common.total_degree() == 0


def h2_plane_basis(psi: Poly, w2: WeightSystem) -> PlaneH2Basis:
    if psi.arity != 2 or w2.arity != 2:
        raise ArityMismatch("the plane case needs a polynomial in x, y and two weights")
    if psi.is_zero() or psi.is_constant():
        raise NotHomogeneous("psi must be a nonconstant polynomial")
    degree = homogeneous_degree(psi, w2)
    if not is_square_free_plane(psi):
        raise NotSquareFree(f"{psi} has a repeated factor")
    n_psi = degree - w2.weight_sum
    first = tuple(monomials_of_degree(n_psi, w2))
    _, standard = quotient_basis([partial(psi, 0), partial(psi, 1)], w2)
    return PlaneH2Basis(first=first, second=tuple(standard))


def h2_dim_plane(psi: Poly, w2: WeightSystem) -> Tuple[int, int]:
    return h2_plane_basis(psi, w2).dims
