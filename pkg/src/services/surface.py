"""
The quotient Poisson algebra A_phi = Q[x,y,z]/<phi> of the singular surface
Induced bracket, second cohomology basis, canonical deformations, rigidity
and normalization of surface deformations
"""
from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction
from typing import Dict, List, Optional, Tuple

from algebra.groebner import normal_form, weighted_grevlex
from algebra.linear_solver import LinearSystem
from algebra.multivector import MultiDer, Vec3, cross, dot, euler_field, grad, schouten, split_by_weight
from algebra.poly_core import Poly, monomials_of_degree
from services.cohomology import (
    MilnorData, PhiContext, assemble, delta1, graded_monomial_fields, multider_entries, unit_multider,
)
from services.deformation import GaugeElement, exp_ad
from utils.computation_logger import ComputationAction, log_computation
from utils.errors import IndexOutOfRange, SurfaceNormalizeUnsupported


class RigidityVerdict(Enum):
    RIGID = "Rigid"
    RIGID_VIA_GAUGE = "RigidViaGauge"
    NOT_RIGID_CANDIDATE = "NotRigidCandidate"


@dataclass(frozen=True)
class QuotientCtx:
    """Reduction modulo the principal ideal <phi>"""

    ctx: PhiContext

    def reduce(self, p: Poly) -> Poly:
        return normal_form(p, [self.ctx.phi], weighted_grevlex(self.ctx.weights))

    def reduce_vec(self, v: Vec3) -> Vec3:
        return v.map(self.reduce)

    def reduce_multider(self, P: MultiDer) -> MultiDer:
        return P.map(self.reduce)


@dataclass(frozen=True)
class SurfaceBasisElem:
    index: int
    vector: Vec3

    @property
    def label(self) -> str:
        return f"u_{self.index}*grad(phi)"


@dataclass
class SurfaceCoeffTable:
    """alpha[(n, j)] for u_j of weighted degree w(phi) - |w|"""

    alpha: Dict[Tuple[int, int], Fraction] = field(default_factory=dict)

    def __post_init__(self):
        self.alpha = {tuple(k): Fraction(v) for k, v in self.alpha.items() if v}

    def validate(self, ctx: PhiContext, milnor_data: MilnorData):
        for (n, j) in self.alpha:
            if n < 1 or not 0 <= j < milnor_data.mu:
                raise IndexOutOfRange(f"alpha index (n={n}, j={j}) is out of range", {"mu": milnor_data.mu})
            if milnor_data.degrees[j] != ctx.shift:
                raise IndexOutOfRange(
                    f"u_{j} has weighted degree {milnor_data.degrees[j]}, expected {ctx.shift}",
                    {"index": j},
                )

    def truncated(self, order: int) -> "SurfaceCoeffTable":
        return SurfaceCoeffTable({k: v for k, v in self.alpha.items() if k[0] <= order})

    def __eq__(self, other) -> bool:
        if not isinstance(other, SurfaceCoeffTable):
            return NotImplemented
        return self.alpha == other.alpha


@dataclass(frozen=True)
class SurfaceDeformation:
    """Reduced bivector terms pi_1..pi_N of a deformation of {.,.}_{A_phi}"""

    order: int
    terms: Tuple[Vec3, ...]
    qctx: QuotientCtx
    provenance: Optional[SurfaceCoeffTable] = None

    def series(self) -> List[Vec3]:
        return [self.qctx.reduce_vec(grad(self.qctx.ctx.phi)), *self.terms]


@dataclass
class RigidityReport:
    verdict: RigidityVerdict
    basis: List[SurfaceBasisElem]
    witness_verified: Optional[bool] = None


@dataclass
class SurfaceNormalization:
    alpha: SurfaceCoeffTable
    gauge: GaugeElement


def induced_bracket(f: Poly, g: Poly, qctx: QuotientCtx) -> Poly:
    return qctx.reduce(dot(grad(qctx.ctx.phi), cross(grad(f), grad(g))))


def _bracket(p: Vec3, f: Poly, g: Poly, qctx: QuotientCtx) -> Poly:
    return qctx.reduce(dot(p, cross(grad(f), grad(g))))


def h2_surface_basis(qctx: QuotientCtx, milnor_data: MilnorData) -> List[SurfaceBasisElem]:
    ctx = qctx.ctx
    grad_phi = grad(ctx.phi)
    return [
        SurfaceBasisElem(j, qctx.reduce_vec(grad_phi * milnor_data.u(j)))
        for j in range(milnor_data.mu)
        if milnor_data.degrees[j] == ctx.shift
    ]


def build_surface_deformation(
    alpha: SurfaceCoeffTable, order: int, qctx: QuotientCtx, milnor_data: MilnorData
) -> SurfaceDeformation:
    alpha.validate(qctx.ctx, milnor_data)
    grad_phi = grad(qctx.ctx.phi)
    terms = []
    for n in range(1, order + 1):
        factor = Poly.zero(3)
        for (level, j), value in alpha.alpha.items():
            if level == n:
                factor = factor + milnor_data.u(j).scale(value)
        terms.append(qctx.reduce_vec(grad_phi * factor))
    return SurfaceDeformation(order, tuple(terms), qctx, alpha.truncated(order))


def verify_surface(pi: SurfaceDeformation) -> List[Poly]:
    """nu-coefficients 0..N of the reduced Jacobi sum on (x, y, z)"""
    qctx = pi.qctx
    series = pi.series()
    x, y, z = (Poly.variable(i, 3) for i in range(3))
    cyclic = ((x, y, z), (y, z, x), (z, x, y))

    inner: Dict[Tuple[int, int], Poly] = {}
    for b, p in enumerate(series):
        for k, (f, g, _) in enumerate(cyclic):
            inner[(b, k)] = _bracket(p, f, g, qctx)

    defects = []
    for m in range(pi.order + 1):
        acc = Poly.zero(3)
        for a in range(m + 1):
            for k, (_, _, h) in enumerate(cyclic):
                acc = acc + _bracket(series[a], inner[(m - a, k)], h, qctx)
        defects.append(qctx.reduce(acc))
    log_computation(
        ComputationAction.SURFACE_CHECKED, order=pi.order, valid=all(d.is_zero() for d in defects)
    )
    return defects


def rigidity_check(qctx: QuotientCtx, milnor_data: MilnorData) -> RigidityReport:
    ctx = qctx.ctx
    basis = h2_surface_basis(qctx, milnor_data)
    if not basis:
        return RigidityReport(RigidityVerdict.RIGID, basis)
    if ctx.balanced:
        witness = schouten(euler_field(ctx.weights), ctx.pi0)
        return RigidityReport(RigidityVerdict.RIGID_VIA_GAUGE, basis, witness.is_zero())
    return RigidityReport(RigidityVerdict.NOT_RIGID_CANDIDATE, basis)


def surface_h1_dimension(qctx: QuotientCtx, milnor_data: MilnorData) -> int:
    """dim H^1(A_phi) equals dim H^2(A_phi)"""
    return len(h2_surface_basis(qctx, milnor_data))


# -- normalization ----------------------------------------------------------


def _decompose_surface(
    remainder: MultiDer, qctx: QuotientCtx, milnor_data: MilnorData
) -> Tuple[Dict[int, Fraction], MultiDer]:
    """remainder = sum alpha_j [u_j grad(phi)] + [delta1(eta)] with eta tangent to <phi>"""
    ctx = qctx.ctx
    w = ctx.weights
    grad_phi = grad(ctx.phi)
    alpha: Dict[int, Fraction] = {}
    eta = MultiDer.zero(1)

    for weight, piece in sorted(split_by_weight(remainder, w).items()):
        cells = graded_monomial_fields(1, weight - ctx.shift, w)
        function_monos = monomials_of_degree(weight - ctx.shift, w)
        indices = [j for j in range(milnor_data.mu) if milnor_data.degrees[j] == ctx.shift
                   and ctx.phi_degree + milnor_data.degrees[j] - ctx.weight_sum == weight]

        system = LinearSystem()
        for index, mono in cells:
            unit = unit_multider(1, index, mono)
            column = {("b",) + key: v for key, v in multider_entries(qctx.reduce_multider(delta1(unit, ctx))).items()}
            for mono_t, v in dot(unit.body, grad_phi).items():
                column[("t", mono_t)] = v
            system.add_column(column)
        for mono in function_monos:
            product = Poly.monomial(mono, 1, 3) * ctx.phi
            system.add_column({("t", m): -v for m, v in product.items()})
        for j in indices:
            realized = MultiDer.bivector(qctx.reduce_vec(grad_phi * milnor_data.u(j)))
            system.add_column({("b",) + key: v for key, v in multider_entries(realized).items()})

        target = {("b",) + key: v for key, v in multider_entries(piece).items()}
        solution = system.solve(target)
        if solution is None:
            raise SurfaceNormalizeUnsupported(
                f"weight {weight} part is not a basis combination plus a tangent coboundary",
                {"weight": weight},
            )
        eta = eta + assemble(1, cells, solution[:len(cells)])
        offset = len(cells) + len(function_monos)
        for j, value in zip(indices, solution[offset:]):
            if value:
                alpha[j] = value
    return alpha, eta


def normalize_surface(pi: SurfaceDeformation, milnor_data: MilnorData) -> SurfaceNormalization:
    qctx = pi.qctx
    table = SurfaceCoeffTable()
    xis: List[MultiDer] = []

    for n in range(1, pi.order + 1):
        canonical = build_surface_deformation(table, n, qctx, milnor_data)
        gauge = GaugeElement(tuple(xis) + (MultiDer.zero(1),))
        series = [MultiDer.bivector(v) for v in canonical.series()]
        current = qctx.reduce_multider(exp_ad(gauge, series, n)[n])
        remainder = MultiDer.bivector(pi.terms[n - 1]) - current

        alpha, eta = _decompose_surface(remainder, qctx, milnor_data)
        for j, value in alpha.items():
            table.alpha[(n, j)] = value
        xis.append(-eta)

    log_computation(ComputationAction.NORMALIZED, order=pi.order, surface=True, entries=len(table.alpha))
    return SurfaceNormalization(SurfaceCoeffTable(table.alpha), GaugeElement(tuple(xis)))


def surface_gauge_exp(gauge: GaugeElement, pi: SurfaceDeformation) -> SurfaceDeformation:
    """Gauge action by derivations tangent to <phi>, reduced afterwards"""
    series = [MultiDer.bivector(v) for v in pi.series()]
    result = exp_ad(gauge.padded(pi.order), series, pi.order)
    return SurfaceDeformation(pi.order, tuple(pi.qctx.reduce_vec(t.body) for t in result[1:]), pi.qctx)
