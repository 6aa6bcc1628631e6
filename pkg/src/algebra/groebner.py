"""
Buchberger's algorithm over the rationals under a weighted monomial order
Used for Jacobian ideals (Milnor algebras) and for reduction modulo a principal ideal
"""
from fractions import Fraction
from itertools import product
from typing import Callable, Dict, List, Optional, Sequence, Tuple

from algebra.poly_core import Monomial, Poly, WeightSystem
from utils.errors import InfiniteQuotient

OrderKey = Callable[[Monomial], tuple]


def weighted_grevlex(w: WeightSystem) -> OrderKey:
    """Weighted degree first, then graded reverse lexicographic with x > y > z"""

    def key(mono: Monomial) -> tuple:
        return (w.degree_of(mono), sum(mono), tuple(-e for e in reversed(mono)))

    return key


def leading_monomial(p: Poly, order: OrderKey) -> Monomial:
    return max(p.monomials(), key=order)


def leading_term(p: Poly, order: OrderKey) -> Tuple[Monomial, Fraction]:
    mono = leading_monomial(p, order)
    return mono, p.coefficient(mono)


def monic(p: Poly, order: OrderKey) -> Poly:
    _, lc = leading_term(p, order)
    return p.scale(1 / lc)


def divides(a: Monomial, b: Monomial) -> bool:
    return all(x <= y for x, y in zip(a, b))


def _quotient(b: Monomial, a: Monomial) -> Monomial:
    return tuple(y - x for x, y in zip(a, b))


def _lcm(a: Monomial, b: Monomial) -> Monomial:
    return tuple(max(x, y) for x, y in zip(a, b))


def normal_form(p: Poly, basis: Sequence[Poly], order: OrderKey) -> Poly:
    """Fully reduced remainder of p under multivariate division by basis"""
    leads = [leading_term(g, order) for g in basis]
    remainder: Dict[Monomial, Fraction] = {}
    current = p
    while current:
        mono, coeff = leading_term(current, order)
        for g, (g_mono, g_coeff) in zip(basis, leads):
            if divides(g_mono, mono):
                current = current - g.mul_monomial(_quotient(mono, g_mono), coeff / g_coeff)
                break
        else:
            remainder[mono] = coeff
            current = current - Poly.monomial(mono, coeff, p.arity)
    return Poly(p.arity, remainder)


def s_polynomial(f: Poly, g: Poly, order: OrderKey) -> Poly:
    f_mono, f_coeff = leading_term(f, order)
    g_mono, g_coeff = leading_term(g, order)
    lcm = _lcm(f_mono, g_mono)
    return f.mul_monomial(_quotient(lcm, f_mono), 1 / f_coeff) - g.mul_monomial(_quotient(lcm, g_mono), 1 / g_coeff)


def buchberger(generators: Sequence[Poly], order: OrderKey) -> List[Poly]:
    """Reduced, monic Gröbner basis of the ideal spanned by generators"""
    basis = [monic(g, order) for g in generators if g]
    pairs = [(i, j) for j in range(len(basis)) for i in range(j)]

    while pairs:
        i, j = pairs.pop(0)
        f_mono = leading_monomial(basis[i], order)
        g_mono = leading_monomial(basis[j], order)
        # coprime leading monomials reduce to zero
        if all(a == 0 or b == 0 for a, b in zip(f_mono, g_mono)):
            continue
        remainder = normal_form(s_polynomial(basis[i], basis[j], order), basis, order)
        if remainder:
            basis.append(monic(remainder, order))
            new_index = len(basis) - 1
            pairs.extend((k, new_index) for k in range(new_index))

    return _reduce_basis(basis, order)


def _reduce_basis(basis: List[Poly], order: OrderKey) -> List[Poly]:
    minimal: List[Poly] = []
    leads = [leading_monomial(g, order) for g in basis]
    for index, g in enumerate(basis):
        redundant = any(
            divides(leads[other], leads[index]) and (leads[other] != leads[index] or other < index)
            for other in range(len(basis))
            if other != index
        )
        if not redundant:
            minimal.append(g)

    reduced = []
    for index, g in enumerate(minimal):
        others = minimal[:index] + minimal[index + 1:]
        lead = leading_term(g, order)
        tail = normal_form(g - Poly.monomial(lead[0], lead[1], g.arity), others, order)
        reduced.append(monic(Poly.monomial(lead[0], lead[1], g.arity) + tail, order))
    return sorted(reduced, key=lambda g: order(leading_monomial(g, order)))


def standard_monomials(leads: Sequence[Monomial], arity: int) -> List[Monomial]:
    """Monomials not divisible by any leading monomial; raises if there are infinitely many"""
    if any(not any(m) for m in leads):
        return []
    bounds: List[Optional[int]] = []
    for var in range(arity):
        pure = [m[var] for m in leads if m[var] > 0 and all(e == 0 for k, e in enumerate(m) if k != var)]
        bounds.append(min(pure) if pure else None)
    missing = [var for var, bound in enumerate(bounds) if bound is None]
    if missing:
        raise InfiniteQuotient(
            "quotient ring is infinite dimensional",
            {"variables_without_pure_power": missing},
        )
    return [
        mono
        for mono in product(*(range(bound) for bound in bounds))
        if not any(divides(lead, mono) for lead in leads)
    ]


def quotient_basis(generators: Sequence[Poly], w: WeightSystem) -> Tuple[List[Poly], List[Monomial]]:
    """Gröbner basis and sorted standard monomials of the quotient ring

    Standard monomials are ordered by weighted degree, then decreasing grevlex
    """
    order = weighted_grevlex(w)
    basis = buchberger(generators, order)
    leads = [leading_monomial(g, order) for g in basis]
    standard = standard_monomials(leads, w.arity)
    standard = sorted(standard, key=order, reverse=True)
    standard = sorted(standard, key=w.degree_of)
    return basis, standard
