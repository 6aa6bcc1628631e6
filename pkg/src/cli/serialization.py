"""
JSON codecs between problem files / result documents and the algebra types
Rationals travel as "p/q" strings, polynomials in the canonical text grammar
"""
import json
import sys
from fractions import Fraction
from typing import Any, Dict, List, Optional, Sequence

from pydantic import ValidationError

from algebra.multivector import MultiDer, Vec3
from algebra.poly_core import Poly, WeightSystem, format_rational, parse_poly
from models.problem_models import ContextSummary, ProblemSpec
from services.cohomology import MilnorData, PhiContext, h1_is_zero
from services.deformation import CoeffTable, FormalDeformation, GaugeElement
from services.surface import SurfaceCoeffTable
from utils.errors import SpecIOError, SpecValidationError


# -- reading ------------------------------------------------------------------


def read_document(path: str) -> Dict[str, Any]:
    """Load JSON from a path, or from stdin when path is "-" """
    try:
        if path == "-":
            text = sys.stdin.read()
        else:
            with open(path, "r", encoding="utf-8") as handle:
                text = handle.read()
    except OSError as exc:
        raise SpecIOError(f"cannot read {path}: {exc.strerror}", {"path": path})
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise SpecIOError(f"{path} is not valid JSON: {exc.msg}", {"path": path, "line": exc.lineno})


def spec_from_document(document: Dict[str, Any]) -> ProblemSpec:
    """Accept a problem file or the ResultDoc of `deform build` / `surface deform`"""
    raw = document
    if "schema_version" in document and "spec" in document:
        raw = dict(document.get("spec") or {})
        payload = document.get("payload") or {}
        if "terms" in payload:
            raw["deformation"] = payload["terms"]
            raw["truncation_order"] = payload.get("order", len(payload["terms"]))
    try:
        return ProblemSpec.model_validate(raw)
    except ValidationError as exc:
        problems = [{"loc": list(e["loc"]), "msg": e["msg"]} for e in exc.errors()]
        raise SpecValidationError(f"invalid problem file: {problems[0]['msg']}", {"errors": problems})


def load_spec(path: str) -> ProblemSpec:
    return spec_from_document(read_document(path))


# -- decoding -----------------------------------------------------------------


def weights_of(spec: ProblemSpec) -> WeightSystem:
    return WeightSystem(tuple(spec.weights))


def phi_of(spec: ProblemSpec) -> Poly:
    return parse_poly(spec.phi, spec.arity)


def vec_from_strings(components: Sequence[str]) -> Vec3:
    return Vec3(*(parse_poly(c, 3) for c in components))


def multider_from_spec(degree: int, components: Sequence[str]) -> MultiDer:
    if degree in (0, 3):
        return MultiDer(degree, parse_poly(components[0], 3))
    return MultiDer(degree, vec_from_strings(components))


def coeff_table_from_spec(spec: ProblemSpec) -> CoeffTable:
    if spec.coefficients is None:
        return CoeffTable()
    return CoeffTable(
        {(e.k, e.l, e.i): Fraction(e.value) for e in spec.coefficients.c},
        {(e.k, e.r): Fraction(e.value) for e in spec.coefficients.cbar},
    )


def surface_table_from_spec(spec: ProblemSpec) -> SurfaceCoeffTable:
    entries = spec.surface_coefficients or []
    return SurfaceCoeffTable({(e.n, e.j): Fraction(e.value) for e in entries})


def gauge_from_spec(spec: ProblemSpec, order: int) -> GaugeElement:
    xis = [MultiDer.zero(1) for _ in range(order)]
    for entry in spec.gauge or []:
        if entry.order <= order:
            xis[entry.order - 1] = xis[entry.order - 1] + MultiDer.vector_field(vec_from_strings(entry.vector))
    return GaugeElement(tuple(xis))


def deformation_from_spec(spec: ProblemSpec, ctx: PhiContext) -> Optional[FormalDeformation]:
    if spec.deformation is None:
        return None
    terms = tuple(MultiDer.bivector(vec_from_strings(t)) for t in spec.deformation)
    return FormalDeformation(len(terms), terms, ctx)


# -- encoding -----------------------------------------------------------------


def rational_str(value: Fraction) -> str:
    return format_rational(value)


def poly_str(p: Poly, w: Optional[WeightSystem] = None) -> str:
    return p.to_string(tuple(w) if w is not None else None)


def vec_strs(v: Vec3, w: Optional[WeightSystem] = None) -> List[str]:
    return [poly_str(p, w) for p in v]


def multider_doc(P: MultiDer, w: Optional[WeightSystem] = None) -> Dict[str, Any]:
    return {"degree": P.degree, "components": [poly_str(p, w) for p in P.polys()]}


def coeff_table_doc(table: CoeffTable) -> Dict[str, List[Dict[str, Any]]]:
    return {
        "c": [{"k": k, "l": l, "i": i, "value": rational_str(v)} for (k, l, i), v in sorted(table.c.items())],
        "cbar": [{"k": k, "r": r, "value": rational_str(v)} for (k, r), v in sorted(table.cbar.items())],
    }


def surface_table_doc(table: SurfaceCoeffTable) -> List[Dict[str, Any]]:
    return [{"n": n, "j": j, "value": rational_str(v)} for (n, j), v in sorted(table.alpha.items())]


def gauge_doc(gauge: GaugeElement, w: Optional[WeightSystem] = None) -> List[Dict[str, Any]]:
    return [
        {"order": k, "vector": vec_strs(xi.body, w)}
        for k, xi in enumerate(gauge.xis, start=1)
        if not xi.is_zero()
    ]


def deformation_terms_doc(pi: FormalDeformation) -> List[List[str]]:
    return [vec_strs(t.body, pi.ctx.weights) for t in pi.terms]


def context_summary(ctx: PhiContext, milnor_data: MilnorData) -> ContextSummary:
    return ContextSummary(
        phi=poly_str(ctx.phi, ctx.weights),
        weights=list(ctx.weights),
        phi_degree=ctx.phi_degree,
        weight_sum=ctx.weight_sum,
        mu=milnor_data.mu,
        e_phi=list(milnor_data.e_phi),
        h1_is_zero=h1_is_zero(ctx),
    )


def render_table(document: Dict[str, Any]) -> str:
    """Plain two-column rendering of a result document"""
    lines = [f"command: {document.get('command')}"]
    context = document.get("context")
    if context:
        for key, value in context.items():
            lines.append(f"  {key:<16} {_cell(value)}")
    payload = document.get("payload") or document.get("error") or {}
    for key, value in payload.items():
        if isinstance(value, list) and value and isinstance(value[0], (dict, list)):
            lines.append(f"{key}:")
            lines.extend(f"  - {_cell(item)}" for item in value)
        else:
            lines.append(f"{key:<18} {_cell(value)}")
    return "\n".join(lines)


def _cell(value: Any) -> str:
    if isinstance(value, (dict, list)):
        return json.dumps(value, separators=(", ", ": "))
    return str(value)
