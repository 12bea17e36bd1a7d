"""
Exact integer and rational linear algebra.

Smith normal form, cokernels of integer matrices, exact signatures of
rational symmetric matrices and tolerance-certified signatures of complex
Hermitian matrices. Every value type here is immutable and every function is
pure, so the kernel can be shared freely between worker processes.
"""
from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

import numpy as np
from sympy import factorint
from sympy.polys.domains import ZZ
from sympy.polys.matrices import DomainMatrix
from sympy.polys.matrices.normalforms import invariant_factors, smith_normal_decomp

from src.config import Config


class NotSymmetricError(ValueError):
    """Raised when an exact symmetric routine receives a non-symmetric matrix."""


class NotHermitianError(ValueError):
    """Raised when a numeric matrix is not Hermitian within tolerance."""


# Matrix value types ---------------------------------------------------------

@dataclass(frozen=True)
class IntMatrix:
    """Dense integer matrix stored row-major; 0x0 and empty shapes are legal."""

    rows: int
    cols: int
    entries: Tuple[int, ...] = ()

    def __post_init__(self) -> None:
        if self.rows < 0 or self.cols < 0:
            raise ValueError('matrix dimensions must be non-negative')
        values = tuple(int(value) for value in self.entries)
        if len(values) != self.rows * self.cols:
            raise ValueError(
                f'expected {self.rows * self.cols} entries for a {self.rows}x{self.cols} matrix, '
                f'got {len(values)}'
            )
        object.__setattr__(self, 'entries', values)

    # Construction helpers -------------------------------------------------

    @classmethod
    def from_rows(cls, rows: Sequence[Sequence[int]], cols: Optional[int] = None) -> 'IntMatrix':
        """Build from nested rows; ``cols`` is only needed for matrices with no rows."""
        rows = [list(row) for row in rows]
        width = len(rows[0]) if rows else (cols or 0)
        for row in rows:
            if len(row) != width:
                raise ValueError('ragged rows')
        return cls(len(rows), width, tuple(value for row in rows for value in row))

    @classmethod
    def zeros(cls, rows: int, cols: Optional[int] = None) -> 'IntMatrix':
        cols = rows if cols is None else cols
        return cls(rows, cols, (0,) * (rows * cols))

    @classmethod
    def identity(cls, n: int) -> 'IntMatrix':
        return cls(n, n, tuple(1 if i == j else 0 for i in range(n) for j in range(n)))

    @classmethod
    def diagonal(cls, values: Sequence[int]) -> 'IntMatrix':
        n = len(values)
        return cls(n, n, tuple(values[i] if i == j else 0 for i in range(n) for j in range(n)))

    # Access ---------------------------------------------------------------

    def __getitem__(self, index: Tuple[int, int]) -> int:
        i, j = index
        return self.entries[i * self.cols + j]

    def row(self, i: int) -> Tuple[int, ...]:
        return self.entries[i * self.cols:(i + 1) * self.cols]

    def to_rows(self) -> List[List[int]]:
        return [list(self.row(i)) for i in range(self.rows)]

    @property
    def shape(self) -> Tuple[int, int]:
        return self.rows, self.cols

    @property
    def is_square(self) -> bool:
        return self.rows == self.cols

    def is_zero(self) -> bool:
        return not any(self.entries)

    def is_symmetric(self) -> bool:
        return self.is_square and all(
            self[i, j] == self[j, i] for i in range(self.rows) for j in range(i + 1, self.cols)
        )

    # Arithmetic -----------------------------------------------------------

    @property
    def T(self) -> 'IntMatrix':
        return IntMatrix(self.cols, self.rows, tuple(
            self[i, j] for j in range(self.cols) for i in range(self.rows)
        ))

    def _check_same_shape(self, other: 'IntMatrix') -> None:
        if self.shape != other.shape:
            raise ValueError(f'shape mismatch: {self.shape} vs {other.shape}')

    def __add__(self, other: 'IntMatrix') -> 'IntMatrix':
        self._check_same_shape(other)
        return IntMatrix(self.rows, self.cols, tuple(a + b for a, b in zip(self.entries, other.entries)))

    def __sub__(self, other: 'IntMatrix') -> 'IntMatrix':
        self._check_same_shape(other)
        return IntMatrix(self.rows, self.cols, tuple(a - b for a, b in zip(self.entries, other.entries)))

    def __neg__(self) -> 'IntMatrix':
        return IntMatrix(self.rows, self.cols, tuple(-a for a in self.entries))

    def __matmul__(self, other: 'IntMatrix') -> 'IntMatrix':
        if self.cols != other.rows:
            raise ValueError(f'cannot multiply {self.shape} by {other.shape}')
        result = []
        for i in range(self.rows):
            row = self.row(i)
            for j in range(other.cols):
                result.append(sum(row[k] * other[k, j] for k in range(self.cols)))
        return IntMatrix(self.rows, other.cols, tuple(result))

    def scale(self, factor: int) -> 'IntMatrix':
        return IntMatrix(self.rows, self.cols, tuple(factor * a for a in self.entries))

    def submatrix(self, row_indices: Sequence[int], col_indices: Sequence[int]) -> 'IntMatrix':
        return IntMatrix(len(row_indices), len(col_indices), tuple(
            self[i, j] for i in row_indices for j in col_indices
        ))

    def hstack(self, other: 'IntMatrix') -> 'IntMatrix':
        if self.rows != other.rows:
            raise ValueError('row count mismatch for horizontal stacking')
        return IntMatrix.from_rows(
            [list(self.row(i)) + list(other.row(i)) for i in range(self.rows)],
            cols=self.cols + other.cols
        )

    def direct_sum(self, other: 'IntMatrix') -> 'IntMatrix':
        rows = [list(self.row(i)) + [0] * other.cols for i in range(self.rows)]
        rows += [[0] * self.cols + list(other.row(i)) for i in range(other.rows)]
        return IntMatrix.from_rows(rows, cols=self.cols + other.cols)

    def determinant(self) -> int:
        """Fraction-free (Bareiss) determinant."""
        if not self.is_square:
            raise ValueError('determinant of a non-square matrix')
        n = self.rows
        if n == 0:
            return 1
        a = self.to_rows()
        sign, previous = 1, 1
        for k in range(n - 1):
            if a[k][k] == 0:
                swap = next((i for i in range(k + 1, n) if a[i][k] != 0), None)
                if swap is None:
                    return 0
                a[k], a[swap] = a[swap], a[k]
                sign = -sign
            for i in range(k + 1, n):
                for j in range(k + 1, n):
                    a[i][j] = (a[i][j] * a[k][k] - a[i][k] * a[k][j]) // previous
            previous = a[k][k]
        return sign * a[n - 1][n - 1]

    def to_list(self) -> List[List[int]]:
        return self.to_rows()

    def __repr__(self) -> str:
        return f'IntMatrix({self.to_rows()!r})' if self.rows else f'IntMatrix(0x{self.cols})'


@dataclass(frozen=True)
class RatMatrix:
    """Dense matrix of reduced fractions; intermediate for LDL and inverses."""

    rows: int
    cols: int
    entries: Tuple[Fraction, ...] = ()

    def __post_init__(self) -> None:
        values = tuple(Fraction(value) for value in self.entries)
        if len(values) != self.rows * self.cols:
            raise ValueError('entry count does not match shape')
        object.__setattr__(self, 'entries', values)

    @classmethod
    def from_rows(cls, rows: Sequence[Sequence[object]], cols: Optional[int] = None) -> 'RatMatrix':
        rows = [list(row) for row in rows]
        width = len(rows[0]) if rows else (cols or 0)
        return cls(len(rows), width, tuple(value for row in rows for value in row))

    @classmethod
    def from_int(cls, matrix: IntMatrix) -> 'RatMatrix':
        return cls(matrix.rows, matrix.cols, matrix.entries)

    def __getitem__(self, index: Tuple[int, int]) -> Fraction:
        i, j = index
        return self.entries[i * self.cols + j]

    def to_rows(self) -> List[List[Fraction]]:
        return [list(self.entries[i * self.cols:(i + 1) * self.cols]) for i in range(self.rows)]

    def is_symmetric(self) -> bool:
        return self.rows == self.cols and all(
            self[i, j] == self[j, i] for i in range(self.rows) for j in range(i + 1, self.cols)
        )

    def inverse(self) -> 'RatMatrix':
        """Gauss-Jordan inverse; raises ZeroDivisionError when singular."""
        n = self.rows
        if n != self.cols:
            raise ValueError('inverse of a non-square matrix')
        a = self.to_rows()
        inv = [[Fraction(int(i == j)) for j in range(n)] for i in range(n)]
        for col in range(n):
            pivot = next((r for r in range(col, n) if a[r][col] != 0), None)
            if pivot is None:
                raise ZeroDivisionError('matrix is singular')
            a[col], a[pivot] = a[pivot], a[col]
            inv[col], inv[pivot] = inv[pivot], inv[col]
            scale = a[col][col]
            a[col] = [value / scale for value in a[col]]
            inv[col] = [value / scale for value in inv[col]]
            for r in range(n):
                if r != col and a[r][col] != 0:
                    factor = a[r][col]
                    a[r] = [x - factor * y for x, y in zip(a[r], a[col])]
                    inv[r] = [x - factor * y for x, y in zip(inv[r], inv[col])]
        return RatMatrix.from_rows(inv, cols=n)


# Group and signature value types --------------------------------------------

@dataclass(frozen=True)
class AbelianGroupClass:
    """Finitely generated abelian group in invariant-factor form."""

    free_rank: int = 0
    invariant_factors: Tuple[int, ...] = ()

    def __post_init__(self) -> None:
        factors = tuple(int(d) for d in self.invariant_factors)
        if self.free_rank < 0:
            raise ValueError('free rank must be non-negative')
        if any(d < 2 for d in factors):
            raise ValueError('invariant factors must be at least 2')
        if any(factors[i + 1] % factors[i] for i in range(len(factors) - 1)):
            raise ValueError(f'invariant factors {factors} violate the divisibility chain')
        object.__setattr__(self, 'invariant_factors', factors)

    @classmethod
    def trivial(cls) -> 'AbelianGroupClass':
        return cls()

    @classmethod
    def from_elementary_divisors(cls, prime_powers: Iterable[int], free_rank: int = 0) -> 'AbelianGroupClass':
        """Assemble the canonical form from a multiset of prime powers."""
        by_prime: Dict[int, List[int]] = {}
        for q in prime_powers:
            if q < 2:
                continue
            (p, e), = factorint(q).items()
            by_prime.setdefault(p, []).append(e)
        length = max((len(exps) for exps in by_prime.values()), default=0)
        factors = [1] * length
        for p, exps in by_prime.items():
            for k, e in enumerate(sorted(exps, reverse=True)):
                factors[length - 1 - k] *= p ** e
        return cls(free_rank, tuple(d for d in factors if d > 1))

    @property
    def is_finite(self) -> bool:
        return self.free_rank == 0

    @property
    def order(self) -> Optional[int]:
        return math.prod(self.invariant_factors) if self.is_finite else None

    def elementary_divisors(self) -> List[int]:
        """Prime-power elementary divisors, sorted."""
        powers = []
        for d in self.invariant_factors:
            powers.extend(p ** e for p, e in factorint(d).items())
        return sorted(powers)

    def direct_sum(self, other: 'AbelianGroupClass') -> 'AbelianGroupClass':
        return AbelianGroupClass.from_elementary_divisors(
            self.elementary_divisors() + other.elementary_divisors(),
            free_rank=self.free_rank + other.free_rank
        )

    def __str__(self) -> str:
        parts = [f'Z/{d}' for d in self.invariant_factors]
        if self.free_rank == 1:
            parts.append('Z')
        elif self.free_rank > 1:
            parts.append(f'Z^{self.free_rank}')
        return ' + '.join(parts) if parts else '0'

    def to_dict(self) -> Dict[str, object]:
        return {'free_rank': self.free_rank, 'invariant_factors': list(self.invariant_factors)}


@dataclass(frozen=True)
class SignatureResult:
    """Inertia of a Hermitian form; ``certified`` is False only on the numeric path."""

    positive: int
    negative: int
    zero: int
    certified: bool = field(default=True)

    @property
    def signature(self) -> int:
        return self.positive - self.negative

    @property
    def nullity(self) -> int:
        return self.zero

    @property
    def dimension(self) -> int:
        return self.positive + self.negative + self.zero

    def to_dict(self) -> Dict[str, object]:
        return {
            'positive': self.positive,
            'negative': self.negative,
            'zero': self.zero,
            'signature': self.signature,
            'certified': self.certified,
        }


# Smith normal form ------------------------------------------------------------

def _to_domain(matrix: IntMatrix) -> DomainMatrix:
    return DomainMatrix([[ZZ(x) for x in row] for row in matrix.to_rows()], matrix.shape, ZZ)


def smith_normal_form(matrix: IntMatrix) -> Tuple[List[int], int]:
    """Return the non-zero Smith diagonal (a divisibility chain) and the rank."""
    if not matrix.rows or not matrix.cols:
        return [], 0
    diagonal = [abs(int(d)) for d in invariant_factors(_to_domain(matrix)) if d]
    return diagonal, len(diagonal)


def smith_with_transform(matrix: IntMatrix) -> Tuple[List[int], IntMatrix, IntMatrix]:
    """
    Smith diagonal together with the left transform ``P`` and ``P^-1``, so
    that ``P @ matrix @ Q`` is the Smith form for some unimodular ``Q``.
    Row ``i`` of ``P`` belongs to the ``i``-th diagonal entry; the entries
    are made positive by negating rows of ``P``.
    """
    n = matrix.rows
    if not n or not matrix.cols:
        return [], IntMatrix.identity(n), IntMatrix.identity(n)
    smith, left, _ = smith_normal_decomp(_to_domain(matrix))
    smith_rows = smith.to_list()
    values = [int(smith_rows[i][i]) for i in range(min(smith.shape))]
    order = [i for i, d in enumerate(values) if d] + [i for i, d in enumerate(values) if not d]
    order += list(range(len(values), n))
    signs = [-1 if i < len(values) and values[i] < 0 else 1 for i in order]
    p_rows = [[int(x) for x in row] for row in left.to_list()]
    p_inv_rows = [[int(x) for x in row] for row in left.to_field().inv().convert_to(ZZ).to_list()]
    p = IntMatrix.from_rows([[s * x for x in p_rows[i]] for s, i in zip(signs, order)], cols=n)
    p_inv = IntMatrix.from_rows([[s * row[i] for s, i in zip(signs, order)] for row in p_inv_rows], cols=n)
    diagonal = [abs(values[i]) for i in order if i < len(values) and values[i]]
    return diagonal, p, p_inv


def cokernel_group(matrix: IntMatrix) -> AbelianGroupClass:
    """Group presented by ``matrix`` with rows as relations."""
    diagonal, rank = smith_normal_form(matrix)
    return AbelianGroupClass(
        free_rank=matrix.cols - rank,
        invariant_factors=tuple(d for d in diagonal if d > 1)
    )


# Signatures -------------------------------------------------------------------

def exact_signature_symmetric(matrix) -> SignatureResult:
    """
    Inertia of a rational symmetric matrix by symmetric pivoting.

    Congruence keeps the inertia, so we pivot on a non-zero diagonal entry
    when one exists and otherwise fold an off-diagonal entry onto the
    diagonal with ``row_i += row_j`` and ``col_i += col_j``.
    """
    if isinstance(matrix, IntMatrix):
        matrix = RatMatrix.from_int(matrix)
    if not matrix.is_symmetric():
        raise NotSymmetricError('exact signature requires a symmetric matrix')

    a = matrix.to_rows()
    active = list(range(matrix.rows))
    positive = negative = zero = 0
    while active:
        pivot = next((i for i in active if a[i][i] != 0), None)
        if pivot is None:
            pair = next(((i, j) for i in active for j in active if i != j and a[i][j] != 0), None)
            if pair is None:
                zero += len(active)
                break
            i, j = pair
            for k in active:
                a[i][k] += a[j][k]
            for k in active:
                a[k][i] += a[k][j]
            pivot = i
        d = a[pivot][pivot]
        if d > 0:
            positive += 1
        else:
            negative += 1
        active.remove(pivot)
        for i in active:
            factor = a[i][pivot] / d
            if factor:
                for j in active:
                    a[i][j] -= factor * a[pivot][j]
    return SignatureResult(positive, negative, zero, certified=True)


def hermitian_signature_numeric(matrix, tol: Optional[float] = None) -> SignatureResult:
    """
    Eigenvalue sign counts of a complex Hermitian matrix.

    Eigenvalues with ``|lambda| <= tol * ||m||`` (max row-sum norm) count as
    zero. The result is certified unless some eigenvalue falls within a
    factor 10 of that band edge.
    """
    tol = Config.NUMERIC_TOLERANCE if tol is None else tol
    if tol <= 0:
        raise ValueError('tolerance must be positive')
    arr = np.asarray(matrix, dtype=complex)
    if arr.size == 0:
        n = arr.shape[0] if arr.ndim == 2 else 0
        return SignatureResult(0, 0, n, certified=True)
    if arr.ndim != 2 or arr.shape[0] != arr.shape[1]:
        raise ValueError(f'expected a square matrix, got shape {arr.shape}')

    n = arr.shape[0]
    scale = float(np.abs(arr).sum(axis=1).max())
    if scale == 0.0:
        return SignatureResult(0, 0, n, certified=True)
    asymmetry = float(np.abs(arr - arr.conj().T).max())
    if asymmetry > Config.HERMITIAN_TOLERANCE * scale:
        raise NotHermitianError(f'matrix deviates from Hermitian by {asymmetry:.3e}')

    eigenvalues = np.linalg.eigvalsh((arr + arr.conj().T) / 2)
    band = tol * scale
    positive = int(np.sum(eigenvalues > band))
    negative = int(np.sum(eigenvalues < -band))
    magnitudes = np.abs(eigenvalues)
    ambiguous = (magnitudes > band / 10) & (magnitudes < band * 10)
    return SignatureResult(positive, negative, n - positive - negative, certified=not bool(ambiguous.any()))


# Group predicates -------------------------------------------------------------

def is_perfect_square(value: int) -> bool:
    value = abs(int(value))
    return math.isqrt(value) ** 2 == value


def is_square_group(group: AbelianGroupClass) -> bool:
    """True iff the group is G + G: even free rank and paired prime powers."""
    if group.free_rank % 2:
        return False
    counts = Counter(group.elementary_divisors())
    return all(count % 2 == 0 for count in counts.values())
