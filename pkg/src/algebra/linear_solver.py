"""
Sparse exact linear algebra over the rationals
Fraction-free integer row elimination with deterministic pivot order
"""
from fractions import Fraction
from functools import reduce
from math import gcd
from typing import Dict, Hashable, List, Mapping, Optional

IntRow = Dict[int, int]

RHS = -1


def _lcm(a: int, b: int) -> int:
    return a * b // gcd(a, b)


def _integer_row(row: Mapping[int, Fraction]) -> IntRow:
    denominators = [Fraction(v).denominator for v in row.values()]
    scale = reduce(_lcm, denominators, 1)
    return _primitive({k: int(Fraction(v) * scale) for k, v in row.items() if v})


def _primitive(row: IntRow) -> IntRow:
    divisor = reduce(gcd, (abs(v) for v in row.values()), 0)
    if divisor > 1:
        return {k: v // divisor for k, v in row.items()}
    return row


def _eliminate(row: IntRow, pivot_row: IntRow, col: int) -> IntRow:
    a = pivot_row[col]
    b = row[col]
    result: IntRow = {}
    for key in set(row) | set(pivot_row):
        value = a * row.get(key, 0) - b * pivot_row.get(key, 0)
        if value:
            result[key] = value
    return _primitive(result)


def _unknowns(row: IntRow) -> List[int]:
    return sorted(k for k in row if k != RHS)


class LinearSystem:
    """System A x = b assembled column by column

    Row keys are arbitrary hashables (component index, monomial); unknowns are
    the columns in insertion order, which is also the pivot order.
    """

    def __init__(self):
        self.columns: List[Dict[Hashable, Fraction]] = []

    def add_column(self, entries: Mapping[Hashable, Fraction]) -> int:
        self.columns.append({k: Fraction(v) for k, v in entries.items() if v})
        return len(self.columns) - 1

    @property
    def n_unknowns(self) -> int:
        return len(self.columns)

    def _rows(self, rhs: Mapping[Hashable, Fraction]) -> List[IntRow]:
        rows: Dict[Hashable, Dict[int, Fraction]] = {}
        for index, column in enumerate(self.columns):
            for key, value in column.items():
                rows.setdefault(key, {})[index] = value
        for key, value in rhs.items():
            if value:
                rows.setdefault(key, {})[RHS] = Fraction(value)
        ordered = sorted(rows.items(), key=lambda item: repr(item[0]))
        return [_integer_row(row) for _, row in ordered]

    def _echelon(self, rhs: Mapping[Hashable, Fraction]) -> Optional[Dict[int, IntRow]]:
        pivots: Dict[int, IntRow] = {}
        for row in self._rows(rhs):
            while True:
                reducible = [k for k in _unknowns(row) if k in pivots]
                if not reducible:
                    break
                col = reducible[0]
                row = _eliminate(row, pivots[col], col)
            unknowns = _unknowns(row)
            if not unknowns:
                if row.get(RHS):
                    return None
                continue
            pivots[unknowns[0]] = row
        return pivots

    def _back_substitute(self, pivots: Dict[int, IntRow], free_values: Mapping[int, Fraction]) -> List[Fraction]:
        solution = [Fraction(0)] * self.n_unknowns
        for col, value in free_values.items():
            solution[col] = Fraction(value)
        for col in sorted(pivots, reverse=True):
            row = pivots[col]
            acc = Fraction(row.get(RHS, 0))
            for key, value in row.items():
                if key != RHS and key != col:
                    acc -= value * solution[key]
            solution[col] = acc / row[col]
        return solution

    def solve(self, rhs: Mapping[Hashable, Fraction]) -> Optional[List[Fraction]]:
        """One solution with all free unknowns set to zero, or None if inconsistent"""
        pivots = self._echelon(rhs)
        if pivots is None:
            return None
        return self._back_substitute(pivots, {})

    def rank(self) -> int:
        return len(self._echelon({}))

    def nullspace(self) -> List[List[Fraction]]:
        pivots = self._echelon({})
        free = [col for col in range(self.n_unknowns) if col not in pivots]
        return [self._back_substitute(pivots, {col: Fraction(1)}) for col in free]
