"""
Skew-symmetric multiderivations of Q[x,y,z] and the Schouten bracket
Degree 0 and 3 are stored as a Poly, degree 1 and 2 as a Vec3
"""
from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations
from typing import Callable, Dict, Iterator, List, Optional, Sequence, Tuple, Union

from algebra.poly_core import Poly, WeightSystem, partial, split_homogeneous
from algebra.poly_core import grad as _grad_tuple
from utils.errors import ArityMismatch, NotHomogeneous, SchoutenDegreeError

Scalar = Union[int, Fraction]


class Vec3:
    """Triple of polynomials with exact componentwise arithmetic"""

    __slots__ = ("components",)

    def __init__(self, a: Poly, b: Poly, c: Poly):
        for comp in (a, b, c):
            if comp.arity != 3:
                raise ArityMismatch("vector components must have arity 3")
        self.components: Tuple[Poly, Poly, Poly] = (a, b, c)

    @classmethod
    def zero(cls) -> "Vec3":
        z = Poly.zero(3)
        return cls(z, z, z)

    @classmethod
    def of(cls, items: Sequence[Poly]) -> "Vec3":
        return cls(*items)

    def __iter__(self) -> Iterator[Poly]:
        return iter(self.components)

    def __getitem__(self, index: int) -> Poly:
        return self.components[index]

    def __add__(self, other: "Vec3") -> "Vec3":
        return Vec3(*(a + b for a, b in zip(self, other)))

    def __sub__(self, other: "Vec3") -> "Vec3":
        return Vec3(*(a - b for a, b in zip(self, other)))

    def __neg__(self) -> "Vec3":
        return Vec3(*(-a for a in self))

    def __mul__(self, factor: Union[Poly, Scalar]) -> "Vec3":
        return Vec3(*(a * factor for a in self))

    __rmul__ = __mul__

    def map(self, fn: Callable[[Poly], Poly]) -> "Vec3":
        return Vec3(*(fn(a) for a in self))

    def is_zero(self) -> bool:
        return all(a.is_zero() for a in self)

    def __eq__(self, other) -> bool:
        if not isinstance(other, Vec3):
            return NotImplemented
        return self.components == other.components

    def __hash__(self) -> int:
        return hash(self.components)

    def __repr__(self) -> str:
        return "Vec3(" + ", ".join(str(a) for a in self) + ")"


def grad(p: Poly) -> Vec3:
    return Vec3(*_grad_tuple(p))


def dot(a: Vec3, b: Vec3) -> Poly:
    return a[0] * b[0] + a[1] * b[1] + a[2] * b[2]


def cross(a: Vec3, b: Vec3) -> Vec3:
    return Vec3(
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    )


def curl(a: Vec3) -> Vec3:
    return Vec3(
        partial(a[2], 1) - partial(a[1], 2),
        partial(a[0], 2) - partial(a[2], 0),
        partial(a[1], 0) - partial(a[0], 1),
    )


def div(a: Vec3) -> Poly:
    return partial(a[0], 0) + partial(a[1], 1) + partial(a[2], 2)


def directional(v: Vec3, f: Poly) -> Poly:
    """(v . grad) f"""
    return dot(v, grad(f))


def directional_vec(v: Vec3, a: Vec3) -> Vec3:
    return a.map(lambda comp: directional(v, comp))


def transpose_jacobian_apply(v: Vec3, p: Vec3) -> Vec3:
    """Component k is sum_j p_j d_k v_j"""
    return Vec3(*(sum((p[j] * partial(v[j], k) for j in range(3)), Poly.zero(3)) for k in range(3)))


def triple(a: Vec3, b: Vec3, c: Vec3) -> Poly:
    return dot(a, cross(b, c))


@dataclass(frozen=True)
class MultiDer:
    """A k-derivation, k = 0..3, in the A / A^3 / A^3 / A picture

    degree 1: (V[x], V[y], V[z]); degree 2: (V[y,z], V[z,x], V[x,y]);
    degree 3: V[x,y,z].
    """

    degree: int
    body: Union[Poly, Vec3]

    def __post_init__(self):
        if self.degree not in (0, 1, 2, 3):
            raise SchoutenDegreeError(f"multiderivation degree must be 0..3, got {self.degree}")
        expects_vector = self.degree in (1, 2)
        if expects_vector != isinstance(self.body, Vec3):
            raise TypeError(f"degree {self.degree} multiderivation needs a {'Vec3' if expects_vector else 'Poly'} body")
        if not expects_vector and self.body.arity != 3:
            raise ArityMismatch("multiderivations live in three variables")

    @classmethod
    def zero(cls, degree: int) -> "MultiDer":
        return cls(degree, Vec3.zero() if degree in (1, 2) else Poly.zero(3))

    @classmethod
    def function(cls, f: Poly) -> "MultiDer":
        return cls(0, f)

    @classmethod
    def vector_field(cls, v: Vec3) -> "MultiDer":
        return cls(1, v)

    @classmethod
    def bivector(cls, p: Vec3) -> "MultiDer":
        return cls(2, p)

    @classmethod
    def trivector(cls, t: Poly) -> "MultiDer":
        return cls(3, t)

    def _check(self, other: "MultiDer"):
        if other.degree != self.degree:
            raise SchoutenDegreeError(f"cannot add degree {self.degree} and degree {other.degree}")

    def __add__(self, other: "MultiDer") -> "MultiDer":
        self._check(other)
        return MultiDer(self.degree, self.body + other.body)

    def __sub__(self, other: "MultiDer") -> "MultiDer":
        self._check(other)
        return MultiDer(self.degree, self.body - other.body)

    def __neg__(self) -> "MultiDer":
        return MultiDer(self.degree, -self.body)

    def scale(self, factor: Union[Poly, Scalar]) -> "MultiDer":
        return MultiDer(self.degree, self.body * factor)

    def is_zero(self) -> bool:
        return self.body.is_zero()

    def polys(self) -> Tuple[Poly, ...]:
        return tuple(self.body) if isinstance(self.body, Vec3) else (self.body,)

    def map(self, fn: Callable[[Poly], Poly]) -> "MultiDer":
        if isinstance(self.body, Vec3):
            return MultiDer(self.degree, self.body.map(fn))
        return MultiDer(self.degree, fn(self.body))

    def __call__(self, *args: Poly) -> Poly:
        """Evaluate on arguments, e.g. P[F, G] for a bivector"""
        if len(args) != self.degree:
            raise SchoutenDegreeError(f"degree {self.degree} multiderivation takes {self.degree} arguments")
        if self.degree == 0:
            return self.body
        grads = [grad(f) for f in args]
        if self.degree == 1:
            return dot(self.body, grads[0])
        if self.degree == 2:
            return dot(self.body, cross(grads[0], grads[1]))
        return self.body * triple(grads[0], grads[1], grads[2])


def euler_field(w: WeightSystem) -> MultiDer:
    """The Euler derivation e_w = (w1 x, w2 y, w3 z)"""
    if w.arity != 3:
        raise ArityMismatch("the Euler derivation here is three dimensional")
    return MultiDer.vector_field(Vec3(*(Poly.variable(i, 3).scale(w[i]) for i in range(3))))


def poisson_from_poly(phi: Poly) -> MultiDer:
    """The bivector of {x,y} = phi_z, {y,z} = phi_x, {z,x} = phi_y"""
    return MultiDer.bivector(grad(phi))


# -- weighted grading ---------------------------------------------------


def component_shift(degree: int, index: int, w: WeightSystem) -> int:
    """Polynomial degree of component `index` minus the multiderivation weight"""
    if degree == 0:
        return 0
    if degree == 1:
        return w[index]
    if degree == 2:
        return w.weight_sum - w[index]
    return w.weight_sum


def split_by_weight(P: MultiDer, w: WeightSystem) -> Dict[int, MultiDer]:
    """Decompose P into weight-homogeneous pieces keyed by their weight"""
    pieces: Dict[int, List[Poly]] = {}
    polys = P.polys()
    for index, comp in enumerate(polys):
        for degree, part in split_homogeneous(comp, w).items():
            weight = degree - component_shift(P.degree, index, w)
            slot = pieces.setdefault(weight, [Poly.zero(3) for _ in polys])
            slot[index] = part
    result = {}
    for weight, comps in pieces.items():
        body = Vec3(*comps) if P.degree in (1, 2) else comps[0]
        result[weight] = MultiDer(P.degree, body)
    return result


def multider_weight(P: MultiDer, w: WeightSystem) -> Optional[int]:
    """Weight of a weight-homogeneous P (None for zero)"""
    pieces = split_by_weight(P, w)
    if not pieces:
        return None
    if len(pieces) > 1:
        raise NotHomogeneous(f"multiderivation mixes weights {sorted(pieces)}")
    return next(iter(pieces))


# -- Schouten bracket ---------------------------------------------------


def schouten(P: MultiDer, Q: MultiDer) -> MultiDer:
    """Schouten bracket through closed componentwise formulas"""
    p, q = P.degree, Q.degree
    result_degree = p + q - 1
    if result_degree < 0 or result_degree > 3:
        raise SchoutenDegreeError(
            f"[{p}-vector, {q}-vector] has degree {result_degree}, outside 0..3",
            {"left_degree": p, "right_degree": q},
        )

    if (p, q) == (0, 1):
        return MultiDer.function(-directional(Q.body, P.body))
    if (p, q) == (1, 0):
        return MultiDer.function(directional(P.body, Q.body))
    if (p, q) == (0, 2):
        return MultiDer.vector_field(cross(Q.body, grad(P.body)))
    if (p, q) == (2, 0):
        return MultiDer.vector_field(cross(P.body, grad(Q.body)))
    if (p, q) == (0, 3):
        return MultiDer.bivector(grad(P.body) * (-Q.body))
    if (p, q) == (3, 0):
        return MultiDer.bivector(grad(Q.body) * P.body)
    if (p, q) == (1, 1):
        return MultiDer.vector_field(directional_vec(P.body, Q.body) - directional_vec(Q.body, P.body))
    if (p, q) == (1, 2):
        return MultiDer.bivector(_lie_derivative_bivector(P.body, Q.body))
    if (p, q) == (2, 1):
        return MultiDer.bivector(-_lie_derivative_bivector(Q.body, P.body))
    if (p, q) == (1, 3):
        return MultiDer.trivector(directional(P.body, Q.body) - Q.body * div(P.body))
    if (p, q) == (3, 1):
        return MultiDer.trivector(P.body * div(Q.body) - directional(Q.body, P.body))
    # (2, 2)
    return MultiDer.trivector(dot(P.body, curl(Q.body)) + dot(Q.body, curl(P.body)))


def _lie_derivative_bivector(v: Vec3, p: Vec3) -> Vec3:
    return directional_vec(v, p) + transpose_jacobian_apply(v, p) - p * div(v)


def schouten_gradpair(F: Poly, L: Poly, G: Poly, H: Poly) -> Poly:
    """[F grad L, G grad H]_S as a polynomial"""
    return F * triple(grad(L), grad(G), grad(H)) + G * triple(grad(H), grad(F), grad(L))


def jacobi_defect(pi: MultiDer) -> MultiDer:
    if pi.degree != 2:
        raise SchoutenDegreeError("Jacobi defect is defined for bivectors")
    return schouten(pi, pi)


def is_poisson(pi: MultiDer) -> bool:
    return jacobi_defect(pi).is_zero()


# -- shuffle-sum evaluation, used to cross-check the closed formulas -----

_COORDINATES = None


def _coordinates() -> Tuple[Poly, Poly, Poly]:
    global _COORDINATES
    if _COORDINATES is None:
        _COORDINATES = tuple(Poly.variable(i, 3) for i in range(3))
    return _COORDINATES


def _shuffles(k: int, l: int) -> Iterator[Tuple[Tuple[int, ...], int]]:
    """(k, l)-shuffles of range(k + l) with their signatures"""
    if k < 0 or l < 0:
        return
    for head in combinations(range(k + l), k):
        tail = tuple(i for i in range(k + l) if i not in head)
        perm = head + tail
        inversions = sum(1 for i in range(len(perm)) for j in range(i + 1, len(perm)) if perm[i] > perm[j])
        yield perm, (-1) ** inversions


def schouten_value_by_shuffles(P: MultiDer, Q: MultiDer, args: Sequence[Poly]) -> Poly:
    """[P, Q]_S[F_1, ..., F_{p+q-1}] from the defining double shuffle sum"""
    p, q = P.degree, Q.degree
    total = Poly.zero(3)
    for perm, sign in _shuffles(q, p - 1):
        inner = Q(*(args[i] for i in perm[:q]))
        total = total + P(inner, *(args[i] for i in perm[q:])).scale(sign)
    outer_sign = -((-1) ** ((p - 1) * (q - 1)))
    for perm, sign in _shuffles(p, q - 1):
        inner = P(*(args[i] for i in perm[:p]))
        total = total + Q(inner, *(args[i] for i in perm[p:])).scale(sign * outer_sign)
    return total


def schouten_by_shuffles(P: MultiDer, Q: MultiDer) -> MultiDer:
    """Schouten bracket repackaged from its values on coordinate functions"""
    result_degree = P.degree + Q.degree - 1
    if result_degree < 0 or result_degree > 3:
        raise SchoutenDegreeError(f"result degree {result_degree} outside 0..3")
    x, y, z = _coordinates()
    value = lambda *args: schouten_value_by_shuffles(P, Q, args)
    if result_degree == 0:
        return MultiDer.function(value())
    if result_degree == 1:
        return MultiDer.vector_field(Vec3(value(x), value(y), value(z)))
    if result_degree == 2:
        return MultiDer.bivector(Vec3(value(y, z), value(z, x), value(x, y)))
    return MultiDer.trivector(value(x, y, z))


# -- wedge products used by the graded Leibniz checks -------------------


def _wedge(P: MultiDer, Q: MultiDer) -> MultiDer:
    p, q = P.degree, Q.degree
    if p + q > 3:
        raise SchoutenDegreeError(f"wedge of degrees {p} and {q} exceeds 3")
    if p == 0:
        return Q.scale(P.body)
    if q == 0:
        return P.scale(Q.body)
    if (p, q) == (1, 1):
        return MultiDer.bivector(cross(P.body, Q.body))
    # (1, 2) and (2, 1)
    return MultiDer.trivector(dot(P.body, Q.body))
