"""
Multivariable integer Laurent polynomials and matrices over them.

Covers ring arithmetic, the bar involution ``t_i -> t_i^-1``, evaluation on
the torus at exact rational angles, rank over the fraction field by
fraction-free elimination, and the one-variable test for ``d = f * bar(f)``.
"""
from __future__ import annotations

import logging
import math
import re
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from itertools import product
from typing import Dict, Iterable, List, Mapping, Optional, Sequence, Tuple

import numpy as np
from sympy import Poly, symbols
from sympy.polys.domains import ZZ
from sympy.polys.rings import ring

from src.config import Config
from src.services.algebra import IntMatrix, is_perfect_square

logger = logging.getLogger(__name__)

Exponent = Tuple[int, ...]


class LaurentParseError(ValueError):
    """Raised for malformed Laurent polynomial text; ``position`` is 0-based."""

    def __init__(self, message: str, position: int) -> None:
        super().__init__(f'{message} (at position {position})')
        self.position = position


class VariableCountError(ValueError):
    """Raised when operands live in rings with different numbers of variables."""


# Polynomials ------------------------------------------------------------------

@dataclass(frozen=True)
class LaurentPoly:
    """Element of Z[t_1^+-1, ..., t_mu^+-1]; terms are kept sorted and non-zero."""

    num_vars: int
    terms: Tuple[Tuple[Exponent, int], ...] = ()

    def __post_init__(self) -> None:
        if self.num_vars < 1:
            raise ValueError('a Laurent polynomial needs at least one variable')
        combined: Dict[Exponent, int] = {}
        for exponent, coefficient in self.terms:
            exponent = tuple(int(e) for e in exponent)
            if len(exponent) != self.num_vars:
                raise VariableCountError(
                    f'exponent {exponent} does not have {self.num_vars} entries'
                )
            combined[exponent] = combined.get(exponent, 0) + int(coefficient)
        object.__setattr__(self, 'terms', tuple(sorted(
            (exponent, coefficient) for exponent, coefficient in combined.items() if coefficient
        )))

    # Construction -----------------------------------------------------------

    @classmethod
    def from_dict(cls, num_vars: int, mapping: Mapping[Exponent, int]) -> 'LaurentPoly':
        return cls(num_vars, tuple(mapping.items()))

    @classmethod
    def constant(cls, value: int, num_vars: int = 1) -> 'LaurentPoly':
        return cls(num_vars, (((0,) * num_vars, value),))

    @classmethod
    def zero(cls, num_vars: int = 1) -> 'LaurentPoly':
        return cls(num_vars)

    @classmethod
    def monomial(cls, exponent: Sequence[int], coefficient: int = 1) -> 'LaurentPoly':
        return cls(len(exponent), ((tuple(exponent), coefficient),))

    @classmethod
    def variable(cls, index: int, num_vars: int = 1, power: int = 1) -> 'LaurentPoly':
        """``t_{index+1}^power`` (0-based index)."""
        exponent = [0] * num_vars
        exponent[index] = power
        return cls.monomial(exponent)

    # Inspection -------------------------------------------------------------

    @property
    def coefficients(self) -> Dict[Exponent, int]:
        return dict(self.terms)

    def is_zero(self) -> bool:
        return not self.terms

    def min_exponents(self) -> Exponent:
        return tuple(min(exp[i] for exp, _ in self.terms) for i in range(self.num_vars))

    def max_exponents(self) -> Exponent:
        return tuple(max(exp[i] for exp, _ in self.terms) for i in range(self.num_vars))

    # Arithmetic -------------------------------------------------------------

    def _coerce(self, other) -> 'LaurentPoly':
        if isinstance(other, int):
            return LaurentPoly.constant(other, self.num_vars)
        if not isinstance(other, LaurentPoly):
            return NotImplemented
        if other.num_vars != self.num_vars:
            raise VariableCountError(f'{self.num_vars} vs {other.num_vars} variables')
        return other

    def __add__(self, other) -> 'LaurentPoly':
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return LaurentPoly(self.num_vars, self.terms + other.terms)

    __radd__ = __add__

    def __neg__(self) -> 'LaurentPoly':
        return LaurentPoly(self.num_vars, tuple((e, -c) for e, c in self.terms))

    def __sub__(self, other) -> 'LaurentPoly':
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other) -> 'LaurentPoly':
        return (-self) + other

    def __mul__(self, other) -> 'LaurentPoly':
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        product_terms: Dict[Exponent, int] = {}
        for e1, c1 in self.terms:
            for e2, c2 in other.terms:
                key = tuple(a + b for a, b in zip(e1, e2))
                product_terms[key] = product_terms.get(key, 0) + c1 * c2
        return LaurentPoly.from_dict(self.num_vars, product_terms)

    __rmul__ = __mul__

    def __pow__(self, power: int) -> 'LaurentPoly':
        if power < 0:
            raise ValueError('negative powers are only defined for monomials')
        result = LaurentPoly.constant(1, self.num_vars)
        for _ in range(power):
            result = result * self
        return result

    def bar(self) -> 'LaurentPoly':
        """Negate every exponent vector."""
        return LaurentPoly(self.num_vars, tuple((tuple(-e for e in exp), c) for exp, c in self.terms))

    def shift(self, exponent: Sequence[int]) -> 'LaurentPoly':
        """Multiply by the monomial ``t^exponent``."""
        return LaurentPoly(self.num_vars, tuple(
            (tuple(a + b for a, b in zip(exp, exponent)), c) for exp, c in self.terms
        ))

    def normalized(self) -> 'LaurentPoly':
        """Representative up to +-t^k: lowest exponents 0, positive leading coefficient."""
        if self.is_zero():
            return self
        shifted = self.shift([-e for e in self.min_exponents()])
        return -shifted if shifted.terms[-1][1] < 0 else shifted

    def is_associate(self, other: 'LaurentPoly') -> bool:
        """Equality up to multiplication by a unit +-t^k."""
        return self.normalized() == other.normalized()

    # Evaluation -------------------------------------------------------------

    def evaluate_signs(self, signs: Sequence[int]) -> int:
        """Exact value at a point whose coordinates are all +1 or -1."""
        total = 0
        for exponent, coefficient in self.terms:
            value = coefficient
            for s, e in zip(signs, exponent):
                if s == -1 and e % 2:
                    value = -value
            total += value
        return total

    def evaluate(self, point: 'TorusPoint') -> complex:
        if point.num_vars != self.num_vars:
            raise VariableCountError('torus point and polynomial disagree on variable count')
        total = 0j
        for exponent, coefficient in self.terms:
            phase = sum((e * a for e, a in zip(exponent, point.angles)), Fraction(0)) % 1
            total += coefficient * np.exp(2j * np.pi * float(phase))
        return complex(total)

    # Text form --------------------------------------------------------------

    def _variable_name(self, index: int) -> str:
        return 't' if self.num_vars == 1 else f't{index + 1}'

    def __str__(self) -> str:
        if self.is_zero():
            return '0'
        pieces: List[str] = []
        for exponent, coefficient in reversed(self.terms):
            factors = []
            for index, power in enumerate(exponent):
                if power == 0:
                    continue
                name = self._variable_name(index)
                factors.append(name if power == 1 else f'{name}^{power}')
            magnitude = abs(coefficient)
            if not factors:
                body = str(magnitude)
            elif magnitude == 1:
                body = '*'.join(factors)
            else:
                body = f'{magnitude}*' + '*'.join(factors)
            if not pieces:
                pieces.append(body if coefficient > 0 else f'-{body}')
            else:
                pieces.append(f'+ {body}' if coefficient > 0 else f'- {body}')
        return ' '.join(pieces)

    @classmethod
    def parse(cls, text: str, num_vars: Optional[int] = None) -> 'LaurentPoly':
        """
        Parse text such as ``2 - t1 - t1^-1`` or ``t^2 - t + 1``.

        A bare ``t`` means ``t1``. ``num_vars`` defaults to the largest
        variable index that occurs (at least 1).
        """
        raw_terms = _scan_terms(text)
        seen = max((index for _, exps in raw_terms for index in exps), default=1)
        num_vars = num_vars or seen
        if seen > num_vars:
            raise LaurentParseError(f'variable t{seen} exceeds {num_vars} variables', 0)
        terms = []
        for coefficient, exps in raw_terms:
            exponent = [0] * num_vars
            for index, power in exps.items():
                exponent[index - 1] += power
            terms.append((tuple(exponent), coefficient))
        return cls(num_vars, tuple(terms))

    # sympy bridge (one variable) -------------------------------------------------

    def to_poly(self, symbol) -> Tuple[Poly, int]:
        """Integer polynomial ``t^-k * self`` with non-zero constant term, and ``k``."""
        if self.num_vars != 1:
            raise VariableCountError('sympy conversion is only used for one variable')
        low = self.min_exponents()[0]
        mapping = {(exp[0] - low,): c for exp, c in self.terms}
        return Poly.from_dict(mapping, symbol, domain='ZZ'), low

    @classmethod
    def from_poly(cls, poly: Poly, shift: int = 0) -> 'LaurentPoly':
        return cls(1, tuple(((monom[0] + shift,), int(c)) for monom, c in poly.terms()))


_VARIABLE = re.compile(r't(\d*)(?:\s*\^\s*(-?\d+))?')
_INTEGER = re.compile(r'\d+')


def _scan_terms(text: str) -> List[Tuple[int, Dict[int, int]]]:
    """Tokenize into ``(coefficient, {variable index: power})`` pairs."""
    terms: List[Tuple[int, Dict[int, int]]] = []
    pos, n = 0, len(text)

    def skip(p: int) -> int:
        while p < n and text[p].isspace():
            p += 1
        return p

    pos = skip(pos)
    if pos == n:
        return terms
    while pos < n:
        sign = 1
        if text[pos] in '+-':
            sign = -1 if text[pos] == '-' else 1
            pos = skip(pos + 1)
        elif terms:
            raise LaurentParseError("expected '+' or '-' between terms", pos)
        start = pos
        coefficient = None
        match = _INTEGER.match(text, pos)
        if match:
            coefficient = int(match.group())
            pos = skip(match.end())
            if pos < n and text[pos] == '*':
                pos = skip(pos + 1)
                if pos >= n or text[pos] != 't':
                    raise LaurentParseError("expected a variable after '*'", pos)
        powers: Dict[int, int] = {}
        while pos < n and text[pos] == 't':
            match = _VARIABLE.match(text, pos)
            index = int(match.group(1)) if match.group(1) else 1
            if index < 1:
                raise LaurentParseError('variables are numbered from t1', pos)
            powers[index] = powers.get(index, 0) + (int(match.group(2)) if match.group(2) else 1)
            pos = skip(match.end())
            if pos < n and text[pos] == '*':
                pos = skip(pos + 1)
                if pos >= n or text[pos] != 't':
                    raise LaurentParseError("expected a variable after '*'", pos)
        if coefficient is None and not powers:
            raise LaurentParseError('expected a term', start)
        terms.append((sign * (1 if coefficient is None else coefficient), powers))
    return terms


def laurent_arith(a: LaurentPoly, b: Optional[LaurentPoly], op: str) -> LaurentPoly:
    """Dispatch ``add``, ``mul`` or ``neg`` (``b`` is ignored for ``neg``)."""
    if op == 'add':
        return a + b
    if op == 'mul':
        return a * b
    if op == 'neg':
        return -a
    raise ValueError(f'unknown operation {op!r}')


def bar_involution(p: LaurentPoly) -> LaurentPoly:
    return p.bar()


# Torus points -----------------------------------------------------------------

@dataclass(frozen=True)
class TorusPoint:
    """Point of the mu-torus given by exact angles, as fractions of a full turn."""

    angles: Tuple[Fraction, ...]

    def __post_init__(self) -> None:
        if not self.angles:
            raise ValueError('a torus point needs at least one coordinate')
        object.__setattr__(self, 'angles', tuple(Fraction(a) % 1 for a in self.angles))

    @classmethod
    def from_turns(cls, *turns) -> 'TorusPoint':
        return cls(tuple(Fraction(t) for t in turns))

    @classmethod
    def parse(cls, text: str) -> 'TorusPoint':
        """Parse ``p1/q1,p2/q2,...``."""
        try:
            return cls(tuple(Fraction(part.strip()) for part in text.split(',')))
        except (ValueError, ZeroDivisionError) as exc:
            raise ValueError(f'invalid torus point {text!r}: expected fractions like 1/2,1/3') from exc

    @classmethod
    def minus_one(cls, num_vars: int) -> 'TorusPoint':
        return cls((Fraction(1, 2),) * num_vars)

    @staticmethod
    def grid(num_vars: int, order: int, include_unit: bool = True) -> List['TorusPoint']:
        """
        Points ``(k_1/q, ..., k_mu/q)`` in lexicographic order.

        The half-turn 1/2 is always an axis value, also for odd ``q``.
        """
        if order < 1:
            raise ValueError('grid order must be positive')
        axis = {Fraction(k, order) for k in range(order)}
        axis.add(Fraction(1, 2))
        if not include_unit:
            axis.discard(Fraction(0))
        values = sorted(axis)
        return [TorusPoint(coords) for coords in product(values, repeat=num_vars)]

    @property
    def num_vars(self) -> int:
        return len(self.angles)

    @property
    def values(self) -> np.ndarray:
        return np.exp(2j * np.pi * np.array([float(a) for a in self.angles]))

    @property
    def unit_coordinates(self) -> Tuple[bool, ...]:
        return tuple(a == 0 for a in self.angles)

    @property
    def has_unit_coordinate(self) -> bool:
        return any(self.unit_coordinates)

    @property
    def is_half_turn(self) -> bool:
        return all(a in (0, Fraction(1, 2)) for a in self.angles)

    def signs(self) -> Tuple[int, ...]:
        if not self.is_half_turn:
            raise ValueError(f'{self} is not a half-turn point')
        return tuple(-1 if a else 1 for a in self.angles)

    def conjugate(self) -> 'TorusPoint':
        return TorusPoint(tuple(-a for a in self.angles))

    def power(self, k: int) -> 'TorusPoint':
        return TorusPoint(tuple(k * a for a in self.angles))

    def __str__(self) -> str:
        return ','.join(str(a) for a in self.angles)

    def to_dict(self) -> Dict[str, object]:
        return {'angles': [str(a) for a in self.angles]}


# Matrices ---------------------------------------------------------------------

@dataclass(frozen=True)
class LaurentMatrix:
    """Matrix of Laurent polynomials sharing one variable count."""

    num_vars: int
    rows: int
    cols: int
    entries: Tuple[LaurentPoly, ...] = ()

    def __post_init__(self) -> None:
        if len(self.entries) != self.rows * self.cols:
            raise ValueError('entry count does not match shape')
        if any(p.num_vars != self.num_vars for p in self.entries):
            raise VariableCountError('all entries must share the same variables')
        object.__setattr__(self, 'entries', tuple(self.entries))

    @classmethod
    def from_rows(cls, num_vars: int, rows: Sequence[Sequence[LaurentPoly]], cols: Optional[int] = None) -> 'LaurentMatrix':
        rows = [list(r) for r in rows]
        width = len(rows[0]) if rows else (cols or 0)
        return cls(num_vars, len(rows), width, tuple(p for r in rows for p in r))

    @classmethod
    def zeros(cls, num_vars: int, rows: int, cols: Optional[int] = None) -> 'LaurentMatrix':
        cols = rows if cols is None else cols
        return cls(num_vars, rows, cols, tuple(LaurentPoly.zero(num_vars) for _ in range(rows * cols)))

    @classmethod
    def from_int(cls, matrix: IntMatrix, num_vars: int = 1) -> 'LaurentMatrix':
        return cls(num_vars, matrix.rows, matrix.cols, tuple(
            LaurentPoly.constant(v, num_vars) for v in matrix.entries
        ))

    @classmethod
    def parse(cls, rows: Sequence[Sequence[str]], num_vars: int) -> 'LaurentMatrix':
        return cls.from_rows(num_vars, [[LaurentPoly.parse(s, num_vars) for s in row] for row in rows])

    def __getitem__(self, index: Tuple[int, int]) -> LaurentPoly:
        i, j = index
        return self.entries[i * self.cols + j]

    def to_rows(self) -> List[List[LaurentPoly]]:
        return [list(self.entries[i * self.cols:(i + 1) * self.cols]) for i in range(self.rows)]

    def to_strings(self) -> List[List[str]]:
        return [[str(p) for p in row] for row in self.to_rows()]

    @property
    def T(self) -> 'LaurentMatrix':
        return LaurentMatrix(self.num_vars, self.cols, self.rows, tuple(
            self[i, j] for j in range(self.cols) for i in range(self.rows)
        ))

    def bar(self) -> 'LaurentMatrix':
        return LaurentMatrix(self.num_vars, self.rows, self.cols, tuple(p.bar() for p in self.entries))

    def is_bar_hermitian(self) -> bool:
        return self.rows == self.cols and self == self.bar().T

    def __add__(self, other: 'LaurentMatrix') -> 'LaurentMatrix':
        if (self.rows, self.cols) != (other.rows, other.cols):
            raise ValueError('shape mismatch')
        return LaurentMatrix(self.num_vars, self.rows, self.cols, tuple(
            a + b for a, b in zip(self.entries, other.entries)
        ))

    def __matmul__(self, other: 'LaurentMatrix') -> 'LaurentMatrix':
        if self.cols != other.rows:
            raise ValueError('shape mismatch')
        result = []
        for i in range(self.rows):
            for j in range(other.cols):
                total = LaurentPoly.zero(self.num_vars)
                for k in range(self.cols):
                    total = total + self[i, k] * other[k, j]
                result.append(total)
        return LaurentMatrix(self.num_vars, self.rows, other.cols, tuple(result))

    def scale(self, factor: LaurentPoly) -> 'LaurentMatrix':
        return LaurentMatrix(self.num_vars, self.rows, self.cols, tuple(factor * p for p in self.entries))

    # Evaluation -------------------------------------------------------------

    @cached_property
    def _term_table(self) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
        exponents, coefficients, slots = [], [], []
        for slot, poly in enumerate(self.entries):
            for exponent, coefficient in poly.terms:
                exponents.append(exponent)
                coefficients.append(coefficient)
                slots.append(slot)
        return (
            np.array(exponents, dtype=float).reshape(len(slots), self.num_vars),
            np.array(coefficients, dtype=float),
            np.array(slots, dtype=int),
        )

    def evaluate(self, point: TorusPoint) -> np.ndarray:
        """Entrywise substitution ``t_i -> exp(2 pi i angle_i)`` in double precision."""
        if point.num_vars != self.num_vars:
            raise VariableCountError(
                f'point has {point.num_vars} coordinates, matrix has {self.num_vars} variables'
            )
        result = np.zeros(self.rows * self.cols, dtype=complex)
        exponents, coefficients, slots = self._term_table
        if slots.size:
            angles = np.array([float(a) for a in point.angles])
            phases = np.exp(2j * np.pi * (exponents @ angles))
            np.add.at(result, slots, coefficients * phases)
        return result.reshape(self.rows, self.cols)

    def evaluate_signs(self, signs: Sequence[int]) -> IntMatrix:
        """Exact integer value at a point with coordinates +-1."""
        return IntMatrix(self.rows, self.cols, tuple(p.evaluate_signs(signs) for p in self.entries))

    # Exact elimination --------------------------------------------------------

    def _polynomial_rows(self):
        """Shift into Z[t] by one global monomial and convert to sympy ring elements."""
        names = ','.join(f't{i + 1}' for i in range(self.num_vars))
        poly_ring, *_ = ring(names, ZZ)
        nonzero = [p for p in self.entries if not p.is_zero()]
        low = tuple(
            min((p.min_exponents()[i] for p in nonzero), default=0) for i in range(self.num_vars)
        )
        rows = []
        for row in self.to_rows():
            rows.append([
                poly_ring.from_dict({
                    tuple(e - l for e, l in zip(exp, low)): c for exp, c in p.terms
                }) if not p.is_zero() else poly_ring.zero
                for p in row
            ])
        return poly_ring, rows, low

    def _bareiss(self) -> Tuple[int, object, object, Tuple[int, ...]]:
        """Fraction-free row echelon: ``(rank, determinant-or-None, ring, shift)``."""
        poly_ring, a, low = self._polynomial_rows()
        n, m = self.rows, self.cols
        rank, sign, previous = 0, 1, poly_ring.one
        for c in range(m):
            if rank == n:
                break
            pivot = next((i for i in range(rank, n) if a[i][c]), None)
            if pivot is None:
                continue
            if pivot != rank:
                a[rank], a[pivot] = a[pivot], a[rank]
                sign = -sign
            for i in range(rank + 1, n):
                for j in range(c + 1, m):
                    a[i][j] = (a[rank][c] * a[i][j] - a[i][c] * a[rank][j]).exquo(previous)
                a[i][c] = poly_ring.zero
            previous = a[rank][c]
            rank += 1
        determinant = None
        if n == m:
            if n == 0:
                determinant = poly_ring.one
            elif rank == n:
                determinant = a[n - 1][n - 1] * sign
            else:
                determinant = poly_ring.zero
        return rank, determinant, poly_ring, low

    def determinant(self) -> LaurentPoly:
        if self.rows != self.cols:
            raise ValueError('determinant of a non-square matrix')
        _, det, _, low = self._bareiss()
        shift = tuple(self.rows * l for l in low)
        terms = tuple((tuple(int(e) + s for e, s in zip(monom, shift)), int(c)) for monom, c in det.items())
        return LaurentPoly(self.num_vars, terms)


def evaluate_at_torus(matrix: LaurentMatrix, point: TorusPoint) -> np.ndarray:
    return matrix.evaluate(point)


def generic_rank(matrix: LaurentMatrix) -> int:
    """Rank over Q(t_1, ..., t_mu) by fraction-free Bareiss elimination."""
    if matrix.rows == 0 or matrix.cols == 0:
        return 0
    rank, _, _, _ = matrix._bareiss()
    return rank


# Norm factorization ---------------------------------------------------------------

@dataclass(frozen=True)
class NormFactorization:
    """
    Outcome of the ``d = unit * f * bar(f)`` test.

    ``status`` is ``found``, ``none`` or ``inconclusive``. When found over Q
    only (integer content not of the form e^2), ``over_integers`` is False and
    ``factor`` is the primitive part.
    """

    status: str
    factor: Optional[LaurentPoly] = None
    over_integers: bool = False
    note: str = ''

    @property
    def found(self) -> bool:
        return self.status == 'found'

    def to_dict(self) -> Dict[str, object]:
        return {
            'status': self.status,
            'factor': str(self.factor) if self.factor is not None else None,
            'over_integers': self.over_integers,
            'note': self.note,
        }


def _reciprocal(poly: Poly) -> Poly:
    coeffs = list(reversed(poly.all_coeffs()))
    while coeffs and coeffs[-1] == 0:
        coeffs.pop()
    result = Poly(coeffs, poly.gen, domain='ZZ')
    return -result if result.LC() < 0 else result


def norm_factorization_check(d: LaurentPoly, degree_cap: Optional[int] = None) -> NormFactorization:
    """
    Decide whether ``d = +-t^k f(t) f(t^-1)`` for some f.

    Irreducible factors are paired against their bars: a self-reciprocal
    factor needs even multiplicity, any other factor needs a bar partner of
    equal multiplicity.
    """
    if d.num_vars != 1:
        raise VariableCountError('norm factorization is a one-variable test')
    if d.is_zero():
        raise ValueError('norm factorization of the zero polynomial')
    degree_cap = Config.NORM_FACTOR_DEGREE_CAP if degree_cap is None else degree_cap

    t = symbols('t')
    poly, _ = d.to_poly(t)
    if poly.degree() > degree_cap:
        logger.warning('Norm factorization skipped: degree %d exceeds cap %d', poly.degree(), degree_cap)
        return NormFactorization('inconclusive', note=f'degree {poly.degree()} exceeds cap {degree_cap}')

    content, factors = poly.factor_list()
    multiplicity: Dict[Tuple[int, ...], int] = {}
    by_key: Dict[Tuple[int, ...], Poly] = {}
    for factor, power in factors:
        if factor.LC() < 0:
            factor = -factor
        key = tuple(int(c) for c in factor.all_coeffs())
        multiplicity[key] = multiplicity.get(key, 0) + power
        by_key[key] = factor

    half = Poly(1, t, domain='ZZ')
    handled = set()
    for key in sorted(multiplicity):
        if key in handled:
            continue
        factor = by_key[key]
        partner = tuple(int(c) for c in _reciprocal(factor).all_coeffs())
        if partner == key:
            if multiplicity[key] % 2:
                return NormFactorization('none', note=f'self-reciprocal factor {factor.as_expr()} has odd multiplicity')
            half = half * factor ** (multiplicity[key] // 2)
        else:
            if multiplicity.get(partner, 0) != multiplicity[key]:
                return NormFactorization('none', note=f'factor {factor.as_expr()} has no matching reciprocal')
            half = half * factor ** multiplicity[key]
            handled.add(partner)
        handled.add(key)

    magnitude = abs(int(content))
    if is_perfect_square(magnitude):
        factor = LaurentPoly.from_poly(half * math.isqrt(magnitude))
        return NormFactorization('found', factor.normalized(), over_integers=True)
    return NormFactorization(
        'found', LaurentPoly.from_poly(half).normalized(), over_integers=False,
        note=f'content {magnitude} is not a square; factor exists over Q only'
    )
