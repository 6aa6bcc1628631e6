"""
Seeded random generators for property checks
All draws go through numpy's Generator so a seed fixes every output
"""
from fractions import Fraction
from typing import List, Optional

import numpy as np

from algebra.multivector import MultiDer, Vec3
from algebra.poly_core import Poly, WeightSystem, monomials_of_degree
from services.cohomology import MilnorData, PhiContext
from services.deformation import CoeffTable, GaugeElement
from services.surface import SurfaceCoeffTable


def make_rng(seed: Optional[int]) -> np.random.Generator:
    return np.random.default_rng(seed)


def random_rational(rng: np.random.Generator, bound: int = 5, max_denominator: int = 3) -> Fraction:
    numerator = int(rng.integers(-bound, bound + 1))
    denominator = int(rng.integers(1, max_denominator + 1))
    return Fraction(numerator, denominator)


def random_nonzero_rational(rng: np.random.Generator, bound: int = 5, max_denominator: int = 3) -> Fraction:
    value = Fraction(0)
    while not value:
        value = random_rational(rng, bound, max_denominator)
    return value


def random_poly(rng: np.random.Generator, arity: int = 3, max_degree: int = 3, n_terms: int = 4) -> Poly:
    """Dense-ish random polynomial of total degree at most max_degree"""
    terms = {}
    for _ in range(n_terms):
        mono = tuple(int(e) for e in rng.integers(0, max_degree + 1, size=arity))
        if sum(mono) > max_degree:
            continue
        terms[mono] = terms.get(mono, Fraction(0)) + random_rational(rng)
    return Poly(arity, terms)


def random_homogeneous(rng: np.random.Generator, w: WeightSystem, degree: int, n_terms: int = 3) -> Poly:
    monos = monomials_of_degree(degree, w)
    if not monos:
        return Poly.zero(w.arity)
    picks = rng.choice(len(monos), size=min(n_terms, len(monos)), replace=False)
    return Poly(w.arity, {monos[int(k)]: random_nonzero_rational(rng) for k in picks})


def random_bounded(rng: np.random.Generator, w: WeightSystem, max_degree: int, n_terms: int = 3) -> Poly:
    """Sum of random homogeneous pieces of weighted degree 0..max_degree"""
    result = Poly.zero(w.arity)
    for _ in range(n_terms):
        degree = int(rng.integers(0, max_degree + 1))
        result = result + random_homogeneous(rng, w, degree, 1)
    return result


def random_multider(rng: np.random.Generator, degree: int, w: WeightSystem, max_degree: int = 4) -> MultiDer:
    if degree in (0, 3):
        return MultiDer(degree, random_bounded(rng, w, max_degree))
    return MultiDer(degree, Vec3(*(random_bounded(rng, w, max_degree) for _ in range(3))))


def random_coeff_table(
    rng: np.random.Generator,
    milnor_data: MilnorData,
    order: int,
    max_power: int = 1,
    entries: int = 3,
) -> CoeffTable:
    c, cbar = {}, {}
    for _ in range(entries):
        k = int(rng.integers(1, order + 1))
        if milnor_data.e_phi and (milnor_data.mu < 2 or rng.random() < 0.5):
            l = int(rng.integers(0, max_power + 1))
            i = int(rng.choice(milnor_data.e_phi))
            c[(k, l, i)] = random_nonzero_rational(rng)
        elif milnor_data.mu > 1:
            r = int(rng.integers(1, milnor_data.mu))
            cbar[(k, r)] = random_nonzero_rational(rng)
    return CoeffTable(c, cbar)


def random_single_entry_table(
    rng: np.random.Generator, milnor_data: MilnorData, order: int, max_power: int = 1
) -> CoeffTable:
    table = CoeffTable()
    while table.is_zero():
        table = random_coeff_table(rng, milnor_data, order, max_power, entries=1)
    return table


def random_gauge(rng: np.random.Generator, w: WeightSystem, order: int, max_degree: int = 6) -> GaugeElement:
    xis = tuple(
        MultiDer.vector_field(Vec3(*(random_bounded(rng, w, max_degree, 2) for _ in range(3))))
        for _ in range(order)
    )
    return GaugeElement(xis)


def random_surface_table(
    rng: np.random.Generator, ctx: PhiContext, milnor_data: MilnorData, order: int, entries: int = 3
) -> SurfaceCoeffTable:
    admissible: List[int] = [j for j in range(milnor_data.mu) if milnor_data.degrees[j] == ctx.shift]
    if not admissible:
        return SurfaceCoeffTable()
    alpha = {}
    for _ in range(entries):
        n = int(rng.integers(1, order + 1))
        j = int(rng.choice(admissible))
        alpha[(n, j)] = random_nonzero_rational(rng)
    return SurfaceCoeffTable(alpha)
