"""
Command handlers for the poisson-deform CLI
Each cmd_* takes a validated ProblemSpec and returns a ResultDoc
"""
from typing import Any, Callable, Dict, List, Tuple

from algebra.multivector import schouten, schouten_by_shuffles
from algebra.poly_core import format_monomial
from cli.serialization import (
    coeff_table_doc, coeff_table_from_spec, context_summary, deformation_from_spec, deformation_terms_doc,
    gauge_doc, gauge_from_spec, multider_doc, multider_from_spec, phi_of, poly_str, surface_table_doc,
    surface_table_from_spec, vec_from_strings, vec_strs, weights_of,
)
from models.problem_models import CommandName, ProblemSpec, ResultDoc
from services import sampling
from services.cohomology import (
    MilnorData, PhiContext, delta, delta_via_schouten, h2_basis, h2_plane_basis, make_context, milnor,
)
from services.deformation import (
    FormalDeformation, build_pi, casimir_pair, chi_grad_cross_vanishes, extend_order, formal_casimir,
    gauge_exp, normalize, verify, verify_casimir,
)
from services.surface import (
    QuotientCtx, SurfaceDeformation, build_surface_deformation, h2_surface_basis, normalize_surface,
    rigidity_check, surface_h1_dimension, verify_surface,
)
from utils.errors import ArityMismatch, PoissonDeformError, SpecValidationError

Handler = Callable[[ProblemSpec], ResultDoc]


def _context(spec: ProblemSpec) -> Tuple[PhiContext, MilnorData]:
    if spec.arity != 3:
        raise ArityMismatch("this command needs phi in x, y, z with three weights")
    ctx = make_context(phi_of(spec), weights_of(spec))
    return ctx, milnor(ctx)


def _result(command: CommandName, spec: ProblemSpec, payload: Dict[str, Any], ctx=None, milnor_data=None) -> ResultDoc:
    return ResultDoc(
        command=command.value,
        spec=spec.model_dump(exclude_none=True),
        context=context_summary(ctx, milnor_data) if ctx is not None else None,
        payload=payload,
    )


def _input_deformation(spec: ProblemSpec, ctx: PhiContext, milnor_data: MilnorData) -> FormalDeformation:
    """Explicit terms if given, else build_pi of the coefficients pushed through the optional gauge"""
    explicit = deformation_from_spec(spec, ctx)
    if explicit is not None:
        return explicit
    pi = build_pi(coeff_table_from_spec(spec), spec.truncation_order, ctx, milnor_data)
    if spec.gauge:
        pi = gauge_exp(gauge_from_spec(spec, pi.order), pi)
    return pi


# -- Milnor algebra and cohomology ----------------------------------------------


def cmd_milnor(spec: ProblemSpec) -> ResultDoc:
    ctx, milnor_data = _context(spec)
    payload = {
        "mu": milnor_data.mu,
        "basis": milnor_data.labels(),
        "degrees": list(milnor_data.degrees),
        "e_phi": list(milnor_data.e_phi),
    }
    return _result(CommandName.MILNOR, spec, payload, ctx, milnor_data)


def cmd_h2(spec: ProblemSpec) -> ResultDoc:
    ctx, milnor_data = _context(spec)
    basis = h2_basis(ctx, milnor_data, spec.phi_power_bound)
    elements = [
        {
            "label": e.label,
            "kind": e.kind.value,
            "index": e.index,
            "power": e.power,
            "weight": e.weight,
            "bivector": vec_strs(e.realized.body, ctx.weights),
        }
        for e in basis
    ]
    payload = {"phi_power_bound": spec.phi_power_bound, "count": len(elements), "elements": elements}
    return _result(CommandName.H2, spec, payload, ctx, milnor_data)


def cmd_schouten(spec: ProblemSpec) -> ResultDoc:
    if not spec.operands or len(spec.operands) != 2:
        raise SpecValidationError("schouten needs exactly two operands")
    P, Q = (multider_from_spec(o.degree, o.components) for o in spec.operands)
    value = schouten(P, Q)
    payload = {
        "result": multider_doc(value, weights_of(spec)),
        "matches_shuffle_formula": value == schouten_by_shuffles(P, Q),
    }
    return _result(CommandName.SCHOUTEN, spec, payload)


def cmd_delta(spec: ProblemSpec) -> ResultDoc:
    if spec.multider is None:
        raise SpecValidationError("delta needs a multider")
    ctx, milnor_data = _context(spec)
    V = multider_from_spec(spec.multider.degree, spec.multider.components)
    value = delta(V, ctx)
    payload = {
        "k": V.degree,
        "result": multider_doc(value, ctx.weights),
        "matches_schouten": value == delta_via_schouten(V, ctx),
        "delta_squared_zero": V.degree >= 2 or delta(value, ctx).is_zero(),
    }
    return _result(CommandName.DELTA, spec, payload, ctx, milnor_data)


# -- deformations of pi_0 -----------------------------------------------------


def cmd_deform_build(spec: ProblemSpec) -> ResultDoc:
    ctx, milnor_data = _context(spec)
    pi = build_pi(coeff_table_from_spec(spec), spec.truncation_order, ctx, milnor_data)
    payload = {
        "order": pi.order,
        "coefficients": coeff_table_doc(pi.provenance),
        "terms": deformation_terms_doc(pi),
    }
    return _result(CommandName.DEFORM_BUILD, spec, payload, ctx, milnor_data)


def cmd_deform_verify(spec: ProblemSpec) -> ResultDoc:
    ctx, milnor_data = _context(spec)
    report = verify(_input_deformation(spec, ctx, milnor_data))
    payload = {
        "valid": report.valid,
        "defects": [poly_str(d.body, ctx.weights) for d in report.defects],
        "first_failure": report.first_failure(),
    }
    return _result(CommandName.DEFORM_VERIFY, spec, payload, ctx, milnor_data)


def cmd_deform_normalize(spec: ProblemSpec) -> ResultDoc:
    ctx, milnor_data = _context(spec)
    result = normalize(_input_deformation(spec, ctx, milnor_data), spec.phi_power_bound, milnor_data)
    payload = {
        "coefficients": coeff_table_doc(result.coeffs),
        "gauge": gauge_doc(result.gauge, ctx.weights),
        "phi_power_bound": result.phi_power_bound,
    }
    return _result(CommandName.DEFORM_NORMALIZE, spec, payload, ctx, milnor_data)


def cmd_deform_extend(spec: ProblemSpec) -> ResultDoc:
    ctx, milnor_data = _context(spec)
    extended = extend_order(_input_deformation(spec, ctx, milnor_data), spec.phi_power_bound, milnor_data)
    payload = {
        "order": extended.order,
        "valid": verify(extended).valid,
        "terms": deformation_terms_doc(extended),
    }
    return _result(CommandName.DEFORM_EXTEND, spec, payload, ctx, milnor_data)


def cmd_deform_casimir(spec: ProblemSpec) -> ResultDoc:
    ctx, milnor_data = _context(spec)
    w = ctx.weights
    if spec.deformation is None and not spec.gauge:
        coeffs = coeff_table_from_spec(spec)
        pi = build_pi(coeffs, spec.truncation_order, ctx, milnor_data)
        pair = casimir_pair(coeffs, pi.order, ctx, milnor_data)
        payload = {
            "chi": [poly_str(p, w) for p in pair.chi],
            "casimir": [poly_str(p, w) for p in pair.phinu],
            "verified": verify_casimir(pair, pi),
            "cross_identity": chi_grad_cross_vanishes(pair),
        }
    else:
        casimir = formal_casimir(_input_deformation(spec, ctx, milnor_data), spec.phi_power_bound, milnor_data)
        payload = {"casimir": [poly_str(p, w) for p in casimir]}
    return _result(CommandName.DEFORM_CASIMIR, spec, payload, ctx, milnor_data)


# -- the singular surface -------------------------------------------------------


def _surface_input(spec: ProblemSpec, qctx: QuotientCtx, milnor_data: MilnorData) -> SurfaceDeformation:
    if spec.deformation is not None:
        terms = tuple(qctx.reduce_vec(vec_from_strings(t)) for t in spec.deformation)
        return SurfaceDeformation(len(terms), terms, qctx)
    return build_surface_deformation(surface_table_from_spec(spec), spec.truncation_order, qctx, milnor_data)


def cmd_surface_h2(spec: ProblemSpec) -> ResultDoc:
    ctx, milnor_data = _context(spec)
    qctx = QuotientCtx(ctx)
    basis = h2_surface_basis(qctx, milnor_data)
    payload = {
        "dimension": len(basis),
        "basis": [{"label": b.label, "index": b.index, "bivector": vec_strs(b.vector, ctx.weights)} for b in basis],
        "h1_dim_equals_h2_dim": surface_h1_dimension(qctx, milnor_data),
    }
    return _result(CommandName.SURFACE_H2, spec, payload, ctx, milnor_data)


def cmd_surface_deform(spec: ProblemSpec) -> ResultDoc:
    ctx, milnor_data = _context(spec)
    pi = build_surface_deformation(surface_table_from_spec(spec), spec.truncation_order, QuotientCtx(ctx), milnor_data)
    payload = {
        "order": pi.order,
        "surface_coefficients": surface_table_doc(pi.provenance),
        "terms": [vec_strs(t, ctx.weights) for t in pi.terms],
    }
    return _result(CommandName.SURFACE_DEFORM, spec, payload, ctx, milnor_data)


def cmd_surface_verify(spec: ProblemSpec) -> ResultDoc:
    ctx, milnor_data = _context(spec)
    defects = verify_surface(_surface_input(spec, QuotientCtx(ctx), milnor_data))
    payload = {
        "valid": all(d.is_zero() for d in defects),
        "defects": [poly_str(d, ctx.weights) for d in defects],
    }
    return _result(CommandName.SURFACE_VERIFY, spec, payload, ctx, milnor_data)


def cmd_surface_rigidity(spec: ProblemSpec) -> ResultDoc:
    ctx, milnor_data = _context(spec)
    qctx = QuotientCtx(ctx)
    report = rigidity_check(qctx, milnor_data)
    payload = {
        "verdict": report.verdict.value,
        "basis_size": len(report.basis),
        "witness_verified": report.witness_verified,
        "h1_dim_equals_h2_dim": surface_h1_dimension(qctx, milnor_data),
    }
    return _result(CommandName.SURFACE_RIGIDITY, spec, payload, ctx, milnor_data)


def cmd_surface_normalize(spec: ProblemSpec) -> ResultDoc:
    ctx, milnor_data = _context(spec)
    result = normalize_surface(_surface_input(spec, QuotientCtx(ctx), milnor_data), milnor_data)
    payload = {
        "surface_coefficients": surface_table_doc(result.alpha),
        "gauge": gauge_doc(result.gauge, ctx.weights),
    }
    return _result(CommandName.SURFACE_NORMALIZE, spec, payload, ctx, milnor_data)


# -- the plane ---------------------------------------------------------------------


def cmd_plane_h2dim(spec: ProblemSpec) -> ResultDoc:
    if spec.arity != 2:
        raise ArityMismatch("plane h2dim needs psi in x, y with two weights")
    basis = h2_plane_basis(phi_of(spec), weights_of(spec))
    payload = {
        "dims": list(basis.dims),
        "first": [format_monomial(m) for m in basis.first],
        "second": [format_monomial(m) for m in basis.second],
    }
    return _result(CommandName.PLANE_H2DIM, spec, payload)


# -- randomized invariant checks ---------------------------------------------------

_SCHOUTEN_DEGREES = ((0, 1), (0, 2), (1, 1), (1, 2), (2, 1), (2, 2), (1, 3), (0, 3))


class _Tally:
    def __init__(self):
        self.counts: Dict[str, Dict[str, int]] = {}
        self.failures: List[Dict[str, Any]] = []

    def record(self, check: str, ok: bool, sample: int):
        bucket = self.counts.setdefault(check, {"passed": 0, "failed": 0})
        bucket["passed" if ok else "failed"] += 1
        if not ok:
            self.failures.append({"check": check, "sample": sample})


def cmd_properties(spec: ProblemSpec) -> ResultDoc:
    ctx, milnor_data = _context(spec)
    w = ctx.weights
    rng = sampling.make_rng(spec.seed)
    order = spec.truncation_order
    tally = _Tally()

    for sample in range(spec.samples):
        F = sampling.random_multider(rng, 0, w)
        V = sampling.random_multider(rng, 1, w)
        tally.record("delta1_delta0", delta(delta(F, ctx), ctx).is_zero(), sample)
        tally.record("delta2_delta1", delta(delta(V, ctx), ctx).is_zero(), sample)

        p, q = _SCHOUTEN_DEGREES[int(rng.integers(len(_SCHOUTEN_DEGREES)))]
        P, Q = sampling.random_multider(rng, p, w, 3), sampling.random_multider(rng, q, w, 3)
        tally.record("schouten_shuffle", schouten(P, Q) == schouten_by_shuffles(P, Q), sample)

        if order >= 1:
            coeffs = sampling.random_coeff_table(rng, milnor_data, order)
            pi = build_pi(coeffs, order, ctx, milnor_data)
            tally.record("build_pi_valid", verify(pi).valid, sample)
            tally.record("casimir", verify_casimir(casimir_pair(coeffs, order, ctx, milnor_data), pi), sample)

    payload = {"seed": spec.seed, "samples": spec.samples, "checks": tally.counts, "failures": tally.failures}
    return _result(CommandName.PROPERTIES, spec, payload, ctx, milnor_data)


COMMANDS: Dict[CommandName, Handler] = {
    CommandName.MILNOR: cmd_milnor,
    CommandName.H2: cmd_h2,
    CommandName.SCHOUTEN: cmd_schouten,
    CommandName.DELTA: cmd_delta,
    CommandName.DEFORM_BUILD: cmd_deform_build,
    CommandName.DEFORM_VERIFY: cmd_deform_verify,
    CommandName.DEFORM_NORMALIZE: cmd_deform_normalize,
    CommandName.DEFORM_EXTEND: cmd_deform_extend,
    CommandName.DEFORM_CASIMIR: cmd_deform_casimir,
    CommandName.SURFACE_H2: cmd_surface_h2,
    CommandName.SURFACE_DEFORM: cmd_surface_deform,
    CommandName.SURFACE_VERIFY: cmd_surface_verify,
    CommandName.SURFACE_RIGIDITY: cmd_surface_rigidity,
    CommandName.SURFACE_NORMALIZE: cmd_surface_normalize,
    CommandName.PLANE_H2DIM: cmd_plane_h2dim,
    CommandName.PROPERTIES: cmd_properties,
}


def run_command(command: CommandName, spec: ProblemSpec) -> ResultDoc:
    try:
        handler = COMMANDS[command]
    except KeyError:
        raise PoissonDeformError(f"unknown command {command}")
    return handler(spec)
