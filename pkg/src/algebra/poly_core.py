"""
Exact sparse polynomials over the rationals in two or three variables
Weighted grading, formal partial derivatives and the text grammar
"""
from dataclasses import dataclass, field
from fractions import Fraction
from functools import reduce
from math import gcd
from typing import Dict, Iterable, Iterator, Mapping, Optional, Tuple, Union

from utils import config
from utils.errors import ArityMismatch, ExponentOverflow, InvalidWeights, NotHomogeneous, PolySyntaxError

Rational = Fraction
Monomial = Tuple[int, ...]
Scalar = Union[int, Fraction]

VARIABLES = ("x", "y", "z")
DIGITS = "0123456789"


def _check_exponents(exps: Monomial) -> Monomial:
    cap = config.settings.exponent_cap
    for e in exps:
        if e > cap:
            raise ExponentOverflow(f"exponent {e} exceeds the cap {cap}", {"exponents": list(exps)})
    return exps


class Poly:
    """Immutable sparse polynomial: a map monomial -> nonzero Fraction"""

    __slots__ = ("arity", "_terms", "_hash")

    def __init__(self, arity: int, terms: Optional[Mapping[Monomial, Scalar]] = None):
        if arity not in (2, 3):
            raise ArityMismatch(f"arity must be 2 or 3, got {arity}")
        self.arity = arity
        clean: Dict[Monomial, Fraction] = {}
        for mono, coeff in (terms or {}).items():
            if len(mono) != arity:
                raise ArityMismatch(f"monomial {mono} does not have arity {arity}")
            if coeff:
                clean[tuple(mono)] = Fraction(coeff)
        self._terms = clean
        self._hash = None

    @classmethod
    def _from_clean(cls, arity: int, terms: Dict[Monomial, Fraction]) -> "Poly":
        poly = cls.__new__(cls)
        poly.arity = arity
        poly._terms = terms
        poly._hash = None
        return poly

    @classmethod
    def zero(cls, arity: int = 3) -> "Poly":
        return cls._from_clean(arity, {})

    @classmethod
    def constant(cls, value: Scalar, arity: int = 3) -> "Poly":
        return cls(arity, {(0,) * arity: value})

    @classmethod
    def monomial(cls, exponents: Monomial, coeff: Scalar = 1, arity: Optional[int] = None) -> "Poly":
        arity = arity or len(exponents)
        return cls(arity, {_check_exponents(tuple(exponents)): coeff})

    @classmethod
    def variable(cls, index: int, arity: int = 3) -> "Poly":
        exps = [0] * arity
        exps[index] = 1
        return cls._from_clean(arity, {tuple(exps): Fraction(1)})

    # -- access ---------------------------------------------------------

    @property
    def terms(self) -> Dict[Monomial, Fraction]:
        return dict(self._terms)

    def items(self) -> Iterator[Tuple[Monomial, Fraction]]:
        return iter(self._terms.items())

    def monomials(self) -> Iterable[Monomial]:
        return self._terms.keys()

    def coefficient(self, mono: Monomial) -> Fraction:
        return self._terms.get(tuple(mono), Fraction(0))

    def __len__(self) -> int:
        return len(self._terms)

    def is_zero(self) -> bool:
        return not self._terms

    def __bool__(self) -> bool:
        return bool(self._terms)

    def is_constant(self) -> bool:
        return all(not any(m) for m in self._terms)

    def total_degree(self) -> Optional[int]:
        if not self._terms:
            return None
        return max(sum(m) for m in self._terms)

    # -- arithmetic -----------------------------------------------------

    def _coerce(self, other) -> "Poly":
        if isinstance(other, Poly):
            if other.arity != self.arity:
                raise ArityMismatch(f"cannot combine arity {self.arity} with arity {other.arity}")
            return other
        if isinstance(other, (int, Fraction)):
            return Poly.constant(other, self.arity)
        return NotImplemented

    def __add__(self, other) -> "Poly":
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        terms = dict(self._terms)
        for mono, coeff in other._terms.items():
            value = terms.get(mono, 0) + coeff
            if value:
                terms[mono] = value
            else:
                terms.pop(mono, None)
        return Poly._from_clean(self.arity, terms)

    __radd__ = __add__

    def __neg__(self) -> "Poly":
        return Poly._from_clean(self.arity, {m: -c for m, c in self._terms.items()})

    def __sub__(self, other) -> "Poly":
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other) -> "Poly":
        return (-self) + other

    def scale(self, factor: Scalar) -> "Poly":
        factor = Fraction(factor)
        if not factor:
            return Poly.zero(self.arity)
        return Poly._from_clean(self.arity, {m: c * factor for m, c in self._terms.items()})

    def __mul__(self, other) -> "Poly":
        if isinstance(other, (int, Fraction)):
            return self.scale(other)
        if not isinstance(other, Poly):
            return NotImplemented
        other = self._coerce(other)
        cap = config.settings.exponent_cap
        terms: Dict[Monomial, Fraction] = {}
        for m1, c1 in self._terms.items():
            for m2, c2 in other._terms.items():
                mono = tuple(a + b for a, b in zip(m1, m2))
                if max(mono, default=0) > cap:
                    _check_exponents(mono)
                value = terms.get(mono, 0) + c1 * c2
                if value:
                    terms[mono] = value
                else:
                    del terms[mono]
        return Poly._from_clean(self.arity, terms)

    def __rmul__(self, other) -> "Poly":
        if isinstance(other, (int, Fraction)):
            return self.scale(other)
        return NotImplemented

    def __pow__(self, exponent: int) -> "Poly":
        if exponent < 0:
            raise ValueError("negative powers are not polynomials")
        result = Poly.constant(1, self.arity)
        base = self
        while exponent:
            if exponent & 1:
                result = result * base
            exponent >>= 1
            if exponent:
                base = base * base
        return result

    def mul_monomial(self, mono: Monomial, coeff: Scalar = 1) -> "Poly":
        coeff = Fraction(coeff)
        if not coeff:
            return Poly.zero(self.arity)
        return Poly._from_clean(
            self.arity,
            {_check_exponents(tuple(a + b for a, b in zip(m, mono))): c * coeff for m, c in self._terms.items()},
        )

    # -- comparison -----------------------------------------------------

    def __eq__(self, other) -> bool:
        if isinstance(other, (int, Fraction)):
            other = Poly.constant(other, self.arity)
        if not isinstance(other, Poly):
            return NotImplemented
        return self.arity == other.arity and self._terms == other._terms

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash((self.arity, frozenset(self._terms.items())))
        return self._hash

    # -- printing -------------------------------------------------------

    def to_string(self, weights: Optional[Tuple[int, ...]] = None) -> str:
        if not self._terms:
            return "0"
        weights = weights or (1,) * self.arity
        ordered = sorted(
            self._terms.items(),
            key=lambda item: (sum(w * e for w, e in zip(weights, item[0])), tuple(-e for e in item[0])),
        )
        pieces = []
        for index, (mono, coeff) in enumerate(ordered):
            body = _format_term(mono, abs(coeff))
            if index == 0:
                pieces.append(("-" if coeff < 0 else "") + body)
            else:
                pieces.append((" - " if coeff < 0 else " + ") + body)
        return "".join(pieces)

    def __str__(self) -> str:
        return self.to_string()

    def __repr__(self) -> str:
        return f"Poly({self.to_string()!r}, arity={self.arity})"


def format_rational(value: Fraction) -> str:
    value = Fraction(value)
    if value.denominator == 1:
        return str(value.numerator)
    return f"{value.numerator}/{value.denominator}"


def format_monomial(mono: Monomial) -> str:
    factors = []
    for var, exp in zip(VARIABLES, mono):
        if exp == 1:
            factors.append(var)
        elif exp > 1:
            factors.append(f"{var}^{exp}")
    return "*".join(factors) if factors else "1"


def _format_term(mono: Monomial, magnitude: Fraction) -> str:
    if not any(mono):
        return format_rational(magnitude)
    if magnitude == 1:
        return format_monomial(mono)
    return f"{format_rational(magnitude)}*{format_monomial(mono)}"


@dataclass(frozen=True)
class WeightSystem:
    """Positive, coprime weights of the variables"""

    weights: Tuple[int, ...]
    weight_sum: int = field(init=False)

    def __post_init__(self):
        weights = tuple(int(w) for w in self.weights)
        if len(weights) not in (2, 3):
            raise InvalidWeights(f"expected 2 or 3 weights, got {len(weights)}")
        if any(w <= 0 for w in weights):
            raise InvalidWeights(f"weights must be positive, got {list(weights)}")
        if reduce(gcd, weights) != 1:
            raise InvalidWeights(f"weights {list(weights)} have a common divisor")
        object.__setattr__(self, "weights", weights)
        object.__setattr__(self, "weight_sum", sum(weights))

    @property
    def arity(self) -> int:
        return len(self.weights)

    def degree_of(self, mono: Monomial) -> int:
        return sum(w * e for w, e in zip(self.weights, mono))

    def __iter__(self):
        return iter(self.weights)

    def __getitem__(self, index: int) -> int:
        return self.weights[index]


def _check_arity(p: Poly, w: WeightSystem):
    if p.arity != w.arity:
        raise ArityMismatch(f"polynomial arity {p.arity} does not match {w.arity} weights")


def weighted_degree(p: Poly, w: WeightSystem) -> Optional[int]:
    """Largest weighted degree among the terms of p, None for p = 0"""
    _check_arity(p, w)
    if p.is_zero():
        return None
    return max(w.degree_of(m) for m in p.monomials())


def is_weight_homogeneous(p: Poly, w: WeightSystem) -> Tuple[bool, Optional[int]]:
    _check_arity(p, w)
    degrees = {w.degree_of(m) for m in p.monomials()}
    if not degrees:
        return True, None
    if len(degrees) == 1:
        return True, degrees.pop()
    return False, None


def homogeneous_degree(p: Poly, w: WeightSystem) -> Optional[int]:
    """Weighted degree of a weight-homogeneous p, raising NotHomogeneous otherwise"""
    homogeneous, degree = is_weight_homogeneous(p, w)
    if not homogeneous:
        raise NotHomogeneous(f"{p} is not weight homogeneous for weights {list(w.weights)}")
    return degree


def split_homogeneous(p: Poly, w: WeightSystem) -> Dict[int, Poly]:
    """Decompose p into its weight-homogeneous components"""
    _check_arity(p, w)
    parts: Dict[int, Dict[Monomial, Fraction]] = {}
    for mono, coeff in p.items():
        parts.setdefault(w.degree_of(mono), {})[mono] = coeff
    return {d: Poly._from_clean(p.arity, terms) for d, terms in parts.items()}


def monomials_of_degree(degree: int, w: WeightSystem) -> list:
    """All monomials of the given weighted degree, in printing order"""
    if degree < 0:
        return []
    result = []

    def extend(prefix, index, remaining):
        if index == w.arity - 1:
            if remaining % w[index] == 0:
                result.append(tuple(prefix) + (remaining // w[index],))
            return
        for e in range(remaining // w[index], -1, -1):
            extend(prefix + [e], index + 1, remaining - e * w[index])

    extend([], 0, degree)
    return result


def partial(p: Poly, var_index: int) -> Poly:
    """Formal partial derivative with respect to the variable at var_index"""
    terms: Dict[Monomial, Fraction] = {}
    for mono, coeff in p.items():
        exp = mono[var_index]
        if exp:
            lowered = mono[:var_index] + (exp - 1,) + mono[var_index + 1:]
            terms[lowered] = coeff * exp
    return Poly._from_clean(p.arity, terms)


def grad(p: Poly) -> Tuple[Poly, ...]:
    return tuple(partial(p, i) for i in range(p.arity))


def euler_check(p: Poly, w: WeightSystem) -> bool:
    """Check the Euler formula grad(p) . e_w = w(p) p"""
    degree = homogeneous_degree(p, w)
    if degree is None:
        return True
    lhs = Poly.zero(p.arity)
    for i, d in enumerate(grad(p)):
        lhs = lhs + d * Poly.variable(i, p.arity).scale(w[i])
    return lhs == p.scale(degree)


class _PolyParser:
    """Recursive-descent parser for the polynomial grammar"""

    def __init__(self, text: str, arity: int):
        self.text = text
        self.arity = arity
        self.pos = 0
        self.variables = VARIABLES[:arity]

    def _skip(self):
        while self.pos < len(self.text) and self.text[self.pos].isspace():
            self.pos += 1

    def _peek(self) -> str:
        self._skip()
        return self.text[self.pos] if self.pos < len(self.text) else ""

    def _error(self, message: str):
        raise PolySyntaxError(message, self.pos)

    def parse(self) -> Poly:
        if self._peek() == "":
            self._error("empty polynomial")
        terms: Dict[Monomial, Fraction] = {}
        first = True
        while self._peek() != "":
            sign = 1
            char = self._peek()
            if char in "+-":
                sign = -1 if char == "-" else 1
                self.pos += 1
            elif not first:
                self._error(f"expected '+' or '-' but found {char!r}")
            mono, coeff = self._term()
            value = terms.get(mono, 0) + sign * coeff
            if value:
                terms[mono] = value
            else:
                terms.pop(mono, None)
            first = False
        return Poly._from_clean(self.arity, terms)

    def _term(self) -> Tuple[Monomial, Fraction]:
        char = self._peek()
        if char == "":
            self._error("unexpected end of input")
        if char in DIGITS:
            coeff = self._rational()
            if self._peek() == "*":
                self.pos += 1
                return self._monomial(), coeff
            return (0,) * self.arity, coeff
        if char.isalpha():
            return self._monomial(), Fraction(1)
        self._error(f"unexpected character {char!r}")

    def _integer(self) -> int:
        self._skip()
        start = self.pos
        while self.pos < len(self.text) and self.text[self.pos] in DIGITS:
            self.pos += 1
        if start == self.pos:
            self._error("expected an integer")
        return int(self.text[start:self.pos])

    def _rational(self) -> Fraction:
        numerator = self._integer()
        if self._peek() == "/":
            self.pos += 1
            denominator = self._integer()
            if denominator == 0:
                self._error("zero denominator")
            return Fraction(numerator, denominator)
        return Fraction(numerator)

    def _monomial(self) -> Monomial:
        exps = [0] * self.arity
        while True:
            char = self._peek()
            if not char.isalpha():
                self._error("expected a variable")
            if char not in self.variables:
                self._error(f"variable {char!r} is not allowed in arity {self.arity}")
            index = self.variables.index(char)
            self.pos += 1
            power = 1
            if self._peek() == "^":
                self.pos += 1
                power = self._integer()
                if power == 0:
                    self._error("exponent must be positive")
            exps[index] += power
            if self._peek() == "*":
                self.pos += 1
                continue
            break
        return _check_exponents(tuple(exps))


def parse_poly(text: str, arity: int = 3) -> Poly:
    """Parse the canonical text form, e.g. "-1/2*z^4 + 3*x*y" """
    if arity not in (2, 3):
        raise ArityMismatch(f"arity must be 2 or 3, got {arity}")
    return _PolyParser(text, arity).parse()
