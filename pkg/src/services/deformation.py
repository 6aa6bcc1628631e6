"""
Truncated formal deformations of {.,.}_phi
Canonical family, order-by-order verification, gauge action, normalization,
extension, 1-cocycle trivialization and formal Casimirs
"""
from dataclasses import dataclass, field
from fractions import Fraction
from math import factorial
from typing import Dict, List, Optional, Sequence, Tuple

from algebra.multivector import MultiDer, Vec3, cross, euler_field, grad, schouten
from algebra.poly_core import Poly, weighted_degree
from services.cohomology import (
    H2Kind, MilnorData, PhiContext, cocycle_decompose, delta2, h1_is_zero, h2_basis, solve_delta0,
)
from utils import config
from utils.computation_logger import ComputationAction, log_computation, log_precondition_failure
from utils.errors import (
    DegreeCapExceeded, H1Obstruction, InconsistentBracket, IndexOutOfRange, NotACocycle,
    NotADeformation, NotInSpan, WrongWeightClass,
)

CKey = Tuple[int, int, int]
CbarKey = Tuple[int, int]


@dataclass
class CoeffTable:
    """Finite-support tables c[(k, l, i)] and cbar[(k, r)]"""

    c: Dict[CKey, Fraction] = field(default_factory=dict)
    cbar: Dict[CbarKey, Fraction] = field(default_factory=dict)

    def __post_init__(self):
        self.c = {tuple(k): Fraction(v) for k, v in self.c.items() if v}
        self.cbar = {tuple(k): Fraction(v) for k, v in self.cbar.items() if v}

    def is_zero(self) -> bool:
        return not self.c and not self.cbar

    def max_order(self) -> int:
        orders = [k[0] for k in self.c] + [k[0] for k in self.cbar]
        return max(orders, default=0)

    def truncated(self, order: int) -> "CoeffTable":
        return CoeffTable(
            {k: v for k, v in self.c.items() if k[0] <= order},
            {k: v for k, v in self.cbar.items() if k[0] <= order},
        )

    def validate(self, milnor_data: MilnorData):
        for (k, l, i) in self.c:
            if k < 1 or l < 0 or i not in milnor_data.e_phi:
                raise IndexOutOfRange(f"c index (k={k}, l={l}, i={i}) is out of range", {"e_phi": list(milnor_data.e_phi)})
        for (k, r) in self.cbar:
            if k < 1 or not 1 <= r <= milnor_data.mu - 1:
                raise IndexOutOfRange(f"cbar index (k={k}, r={r}) is out of range", {"mu": milnor_data.mu})

    def __eq__(self, other) -> bool:
        if not isinstance(other, CoeffTable):
            return NotImplemented
        return self.c == other.c and self.cbar == other.cbar


@dataclass(frozen=True)
class FormalDeformation:
    """pi_0 + pi_1 nu + ... + pi_N nu^N with pi_0 the bivector of phi"""

    order: int
    terms: Tuple[MultiDer, ...]
    ctx: PhiContext
    provenance: Optional[CoeffTable] = None

    def __post_init__(self):
        if len(self.terms) != self.order:
            raise NotADeformation(f"expected {self.order} terms, got {len(self.terms)}")
        if any(t.degree != 2 for t in self.terms):
            raise NotADeformation("deformation terms must be bivectors")

    def term(self, n: int) -> MultiDer:
        return self.ctx.pi0 if n == 0 else self.terms[n - 1]

    def series(self) -> List[MultiDer]:
        return [self.ctx.pi0, *self.terms]

    def same_terms(self, other: "FormalDeformation") -> bool:
        return self.order == other.order and self.terms == other.terms

    @classmethod
    def trivial(cls, ctx: PhiContext, order: int) -> "FormalDeformation":
        return cls(order, tuple(MultiDer.zero(2) for _ in range(order)), ctx)


@dataclass(frozen=True)
class GaugeElement:
    """xi_1 nu + ... + xi_N nu^N"""

    xis: Tuple[MultiDer, ...]

    def __post_init__(self):
        if any(x.degree != 1 for x in self.xis):
            raise ValueError("gauge components must be vector fields")

    @property
    def order(self) -> int:
        return len(self.xis)

    @classmethod
    def zero(cls, order: int) -> "GaugeElement":
        return cls(tuple(MultiDer.zero(1) for _ in range(order)))

    def padded(self, order: int) -> "GaugeElement":
        if order < self.order:
            return GaugeElement(self.xis[:order])
        return GaugeElement(self.xis + tuple(MultiDer.zero(1) for _ in range(order - self.order)))

    def __neg__(self) -> "GaugeElement":
        return GaugeElement(tuple(-x for x in self.xis))

    def is_zero(self) -> bool:
        return all(x.is_zero() for x in self.xis)


@dataclass(frozen=True)
class CasimirPair:
    """chi^nu (constant term 1) and phi^nu (constant term phi), coefficients of nu^0..nu^N"""

    chi: Tuple[Poly, ...]
    phinu: Tuple[Poly, ...]

    @property
    def order(self) -> int:
        return len(self.chi) - 1


@dataclass
class VerificationReport:
    defects: List[MultiDer]
    series_coefficients: List[MultiDer]

    @property
    def valid(self) -> bool:
        return all(d.is_zero() for d in self.defects)

    def first_failure(self) -> Optional[int]:
        for n, d in enumerate(self.defects, start=1):
            if not d.is_zero():
                return n
        return None


@dataclass
class NormalizationResult:
    coeffs: CoeffTable
    gauge: GaugeElement
    phi_power_bound: int


@dataclass
class ClosedFormResult:
    """Primed tables under each summation convention and which one matches e^{ad}"""

    table: CoeffTable
    convention: str
    candidates: Dict[str, CoeffTable]
    matches: Dict[str, bool]
    printed_base_matches: bool


# -- resource caps ------------------------------------------------------


def enforce_degree_cap(P: MultiDer, ctx: PhiContext):
    cap = config.settings.max_degree
    if cap is None:
        return
    for comp in P.polys():
        degree = weighted_degree(comp, ctx.weights)
        if degree is not None and degree > cap:
            raise DegreeCapExceeded(
                f"intermediate weighted degree {degree} exceeds POISSON_DEFORM_MAX_DEGREE={cap}",
                {"degree": degree, "cap": cap},
            )


# -- the canonical family -------------------------------------------------


def _chi_terms(coeffs: CoeffTable, order: int, ctx: PhiContext, milnor_data: MilnorData) -> List[Poly]:
    chi = [Poly.zero(3) for _ in range(order + 1)]
    for (k, l, i), value in coeffs.c.items():
        if k <= order:
            chi[k] = chi[k] + (ctx.phi ** l * milnor_data.u(i)).scale(value)
    return chi


def _phinu_terms(coeffs: CoeffTable, order: int, milnor_data: MilnorData) -> List[Poly]:
    phinu = [Poly.zero(3) for _ in range(order + 1)]
    for (k, r), value in coeffs.cbar.items():
        if k <= order:
            phinu[k] = phinu[k] + milnor_data.u(r).scale(value)
    return phinu


def build_pi(coeffs: CoeffTable, order: int, ctx: PhiContext, milnor_data: MilnorData) -> FormalDeformation:
    """pi_n = sum_{a+b=n} chi_a grad(Phi_b) + chi_n grad(phi) + grad(Phi_n)"""
    coeffs.validate(milnor_data)
    chi = _chi_terms(coeffs, order, ctx, milnor_data)
    phinu = _phinu_terms(coeffs, order, milnor_data)
    grad_phi = grad(ctx.phi)
    grads = [grad(p) for p in phinu]

    terms = []
    for n in range(1, order + 1):
        body = grad_phi * chi[n] + grads[n]
        for a in range(1, n):
            if chi[a] and phinu[n - a]:
                body = body + grads[n - a] * chi[a]
        term = MultiDer.bivector(body)
        enforce_degree_cap(term, ctx)
        terms.append(term)

    log_computation(ComputationAction.DEFORMATION_BUILT, order=order, c_entries=len(coeffs.c), cbar_entries=len(coeffs.cbar))
    return FormalDeformation(order, tuple(terms), ctx, coeffs.truncated(order))


# -- verification -----------------------------------------------------------


def verify(pi: FormalDeformation) -> VerificationReport:
    """Defects D_n = delta2(pi_n) - 1/2 sum_{i+j=n, i,j>=1} [pi_i, pi_j]_S for n = 1..N

    The full series [pi_*, pi_*]_S is evaluated separately through the
    Schouten bracket; its nu^n coefficient must equal -2 D_n.
    """
    series = pi.series()
    brackets: Dict[Tuple[int, int], MultiDer] = {}

    def bracket(i: int, j: int) -> MultiDer:
        key = (min(i, j), max(i, j))
        if key not in brackets:
            brackets[key] = schouten(series[key[0]], series[key[1]])
        return brackets[key]

    defects = []
    coefficients = [bracket(0, 0)]
    for n in range(1, pi.order + 1):
        quadratic = MultiDer.zero(3)
        for i in range(1, n):
            quadratic = quadratic + bracket(i, n - i)
        defect = delta2(series[n], pi.ctx) - quadratic.scale(Fraction(1, 2))
        full = quadratic + bracket(0, n).scale(2)
        if full != defect.scale(-2):
            raise InconsistentBracket(f"Schouten series and coboundary defect disagree at order {n}")
        defects.append(defect)
        coefficients.append(full)

    report = VerificationReport(defects, coefficients)
    log_computation(ComputationAction.DEFORMATION_VERIFIED, order=pi.order, valid=report.valid, first_failure=report.first_failure())
    return report


# -- gauge action -----------------------------------------------------------


def _ad(gauge: GaugeElement, series: Sequence[MultiDer], order: int) -> List[MultiDer]:
    result = []
    for n in range(order + 1):
        acc = MultiDer.zero(series[0].degree)
        for k in range(1, min(n, gauge.order) + 1):
            if not gauge.xis[k - 1].is_zero() and not series[n - k].is_zero():
                acc = acc + schouten(gauge.xis[k - 1], series[n - k])
        result.append(acc)
    return result


def exp_ad(gauge: GaugeElement, series: Sequence[MultiDer], order: int) -> List[MultiDer]:
    """e^{ad_xi} applied to a multiderivation series, truncated at nu^order"""
    result = list(series)
    term = list(series)
    # ad_xi raises nu-valuation by one, so k <= order
    for k in range(1, order + 1):
        term = [t.scale(Fraction(1, k)) for t in _ad(gauge, term, order)]
        if all(t.is_zero() for t in term):
            break
        result = [r + t for r, t in zip(result, term)]
    return result


def gauge_exp(gauge: GaugeElement, pi: FormalDeformation) -> FormalDeformation:
    if gauge.order > pi.order:
        gauge = gauge.padded(pi.order)
    series = exp_ad(gauge, pi.series(), pi.order)
    for term in series[1:]:
        enforce_degree_cap(term, pi.ctx)
    log_computation(ComputationAction.GAUGE_APPLIED, order=pi.order, trivial=gauge.is_zero())
    return FormalDeformation(pi.order, tuple(series[1:]), pi.ctx)


def function_exp(gauge: GaugeElement, values: Sequence[Poly]) -> List[Poly]:
    """e^{xi} acting on a function series F_0 + F_1 nu + ..."""
    order = len(values) - 1
    wrapped = [MultiDer.function(v) for v in values]
    return [m.body for m in exp_ad(gauge.padded(order), wrapped, order)]


# -- normalization -----------------------------------------------------------


def _basis_to_table(level: int, basis, coefficients, table: CoeffTable):
    for element, value in zip(basis, coefficients):
        if not value:
            continue
        if element.kind == H2Kind.PHI_POW:
            table.c[(level, element.power, element.index)] = Fraction(value)
        else:
            table.cbar[(level, element.index)] = Fraction(value)


def normalize(pi: FormalDeformation, phi_power_bound: int, milnor_data: MilnorData) -> NormalizationResult:
    """Find coeffs and xi with gauge_exp(xi, build_pi(coeffs, N)) = pi"""
    ctx = pi.ctx
    report = verify(pi)
    if not report.valid:
        log_precondition_failure("normalize", "input is not a deformation", order=report.first_failure())
        raise NotADeformation(f"deformation equation fails at order {report.first_failure()}")

    bound = phi_power_bound
    basis = h2_basis(ctx, milnor_data, bound)
    table = CoeffTable()
    xis: List[MultiDer] = []

    for n in range(1, pi.order + 1):
        canonical = build_pi(table, n, ctx, milnor_data)
        current = gauge_exp(GaugeElement(tuple(xis) + (MultiDer.zero(1),)), canonical)
        remainder = pi.term(n) - current.term(n)

        while True:
            try:
                decomposition = cocycle_decompose(remainder, ctx, milnor_data, basis)
                break
            except NotInSpan as exc:
                required = exc.details.get("required_phi_power")
                new_bound = max(bound + 1, required or 0)
                if new_bound > config.settings.max_phi_power:
                    raise
                log_computation(ComputationAction.BOUND_GROWN, order=n, old_bound=bound, new_bound=new_bound)
                bound = new_bound
                basis = h2_basis(ctx, milnor_data, bound)

        _basis_to_table(n, basis, decomposition.coefficients, table)
        xis.append(-decomposition.xi)

    log_computation(ComputationAction.NORMALIZED, order=pi.order, phi_power_bound=bound, entries=len(table.c) + len(table.cbar))
    return NormalizationResult(table, GaugeElement(tuple(xis)), bound)


def extend_order(pi: FormalDeformation, phi_power_bound: int, milnor_data: MilnorData) -> FormalDeformation:
    """An order N+1 deformation agreeing with pi through nu^N"""
    result = normalize(pi, phi_power_bound, milnor_data)
    canonical = build_pi(result.coeffs, pi.order + 1, pi.ctx, milnor_data)
    return gauge_exp(result.gauge.padded(pi.order + 1), canonical)


# -- Casimirs -----------------------------------------------------------------


def casimir_pair(coeffs: CoeffTable, order: int, ctx: PhiContext, milnor_data: MilnorData) -> CasimirPair:
    coeffs.validate(milnor_data)
    chi = _chi_terms(coeffs, order, ctx, milnor_data)
    phinu = _phinu_terms(coeffs, order, milnor_data)
    chi[0] = Poly.constant(1, 3)
    phinu[0] = ctx.phi
    return CasimirPair(tuple(chi), tuple(phinu))


def casimir_defect(values: Sequence[Poly], pi: FormalDeformation) -> List[Vec3]:
    """nu-coefficients of (pi_*[C, x], pi_*[C, y], pi_*[C, z])"""
    series = pi.series()
    grads = [grad(v) for v in values]
    defects = []
    for m in range(pi.order + 1):
        acc = Vec3.zero()
        for n in range(0, m + 1):
            if n < len(series) and m - n < len(grads):
                acc = acc + cross(series[n].body, grads[m - n])
        defects.append(acc)
    return defects


def verify_casimir(pair: CasimirPair, pi: FormalDeformation) -> bool:
    ok = all(d.is_zero() for d in casimir_defect(pair.phinu, pi))
    log_computation(ComputationAction.CASIMIR_CHECKED, order=pi.order, ok=ok)
    return ok


def pair_bivector_series(pair: CasimirPair) -> List[Vec3]:
    """nu-coefficients of chi^nu grad(phi^nu)"""
    grads = [grad(p) for p in pair.phinu]
    return [
        sum((grads[n - a] * pair.chi[a] for a in range(n + 1)), Vec3.zero())
        for n in range(pair.order + 1)
    ]


def chi_grad_cross_vanishes(pair: CasimirPair) -> bool:
    """(chi^nu grad phi^nu) x grad phi^nu = 0 mod nu^(N+1)"""
    bivectors = pair_bivector_series(pair)
    grads = [grad(p) for p in pair.phinu]
    for m in range(pair.order + 1):
        acc = Vec3.zero()
        for n in range(m + 1):
            acc = acc + cross(bivectors[n], grads[m - n])
        if not acc.is_zero():
            return False
    return True


def formal_casimir(pi: FormalDeformation, phi_power_bound: int, milnor_data: MilnorData) -> List[Poly]:
    """A formal Casimir of an arbitrary deformation, transported from its canonical form"""
    result = normalize(pi, phi_power_bound, milnor_data)
    pair = casimir_pair(result.coeffs, pi.order, pi.ctx, milnor_data)
    return function_exp(result.gauge, pair.phinu)


# -- the Euler gauge when w(phi) = |w| ------------------------------------------


def _closed_form_table(coeffs: CoeffTable, order: int, c_base, cbar_base, r_min: int) -> CoeffTable:
    table = CoeffTable()
    for (k, l, i), value in coeffs.c.items():
        base = c_base(l, i)
        for n in range(k + r_min, order + 1):
            r = n - k
            contribution = value * Fraction(base) ** r / factorial(r)
            table.c[(n, l, i)] = table.c.get((n, l, i), Fraction(0)) + contribution
    for (k, s), value in coeffs.cbar.items():
        base = cbar_base(s)
        for n in range(k + r_min, order + 1):
            r = n - k
            contribution = value * Fraction(base) ** r / factorial(r)
            table.cbar[(n, s)] = table.cbar.get((n, s), Fraction(0)) + contribution
    return CoeffTable(table.c, table.cbar)


def weighted_gauge_closed_form(
    coeffs: CoeffTable, order: int, ctx: PhiContext, milnor_data: MilnorData
) -> ClosedFormResult:
    """Primed tables for the gauge xi = e_w nu, checked against e^{ad_xi} directly

    ad_{e_w} multiplies a weight-d bivector by d. The weight of
    phi^l u_i grad(phi) is l|w| + w(u_i) and that of grad(u_s) is w(u_s) - |w|.
    The alternative base |w|(l-1) - w(u_i) is evaluated as well and reported.
    """
    if not ctx.balanced:
        raise WrongWeightClass("the Euler gauge closed form needs w(phi) = |w|")
    coeffs = coeffs.truncated(order)
    coeffs.validate(milnor_data)
    ws = ctx.weight_sum
    weight_c = lambda l, i: l * ws + milnor_data.degrees[i]
    printed_c = lambda l, i: ws * (l - 1) - milnor_data.degrees[i]
    base_cbar = lambda s: milnor_data.degrees[s] - ws

    gauge = GaugeElement((euler_field(ctx.weights),) + tuple(MultiDer.zero(1) for _ in range(order - 1)))
    direct = gauge_exp(gauge, build_pi(coeffs, order, ctx, milnor_data))

    candidates = {
        "r>=0": _closed_form_table(coeffs, order, weight_c, base_cbar, 0),
        "r>=1": _closed_form_table(coeffs, order, weight_c, base_cbar, 1),
    }
    matches = {
        name: build_pi(table, order, ctx, milnor_data).same_terms(direct)
        for name, table in candidates.items()
    }
    printed = _closed_form_table(coeffs, order, printed_c, base_cbar, 0)
    printed_matches = build_pi(printed, order, ctx, milnor_data).same_terms(direct)

    matching = [name for name, ok in matches.items() if ok]
    if not matching:
        raise InconsistentBracket("no closed-form convention reproduces the Euler gauge")
    convention = matching[0]
    return ClosedFormResult(candidates[convention], convention, candidates, matches, printed_matches)


# -- 1-cocycles of the deformed structure --------------------------------------


def trivialize_1cocycle(psi: Sequence[MultiDer], pi: FormalDeformation) -> List[Poly]:
    """h_0..h_N with psi + [h_0 + ... + h_N nu^N, pi_*]_S = 0 mod nu^(N+1)"""
    ctx = pi.ctx
    order = pi.order
    psi = list(psi) + [MultiDer.zero(1)] * (order + 1 - len(psi))
    series = pi.series()

    for m in range(order + 1):
        total = MultiDer.zero(2)
        for i in range(m + 1):
            if not psi[i].is_zero():
                total = total + schouten(psi[i], series[m - i])
        if not total.is_zero():
            raise NotACocycle(f"[psi, pi_*]_S does not vanish at order {m}")

    if not h1_is_zero(ctx):
        log_precondition_failure("trivialize_1cocycle", "first cohomology of pi_0 is nonzero")

    hs: List[Poly] = []
    for m in range(order + 1):
        target = psi[m].body
        for i in range(m):
            target = target + cross(series[m - i].body, grad(hs[i]))
        h = solve_delta0(MultiDer.vector_field(target), ctx)
        if h is None:
            raise H1Obstruction(f"order {m} component is not a coboundary of pi_0")
        hs.append(h)
    return hs
