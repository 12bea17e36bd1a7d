import math
import random
from fractions import Fraction

import numpy as np
import pytest
from sympy.polys.domains import GF, ZZ
from sympy.polys.matrices import DomainMatrix

from src.services.algebra import (
    AbelianGroupClass,
    IntMatrix,
    NotHermitianError,
    NotSymmetricError,
    RatMatrix,
    cokernel_group,
    exact_signature_symmetric,
    hermitian_signature_numeric,
    is_perfect_square,
    is_square_group,
    smith_normal_form,
    smith_with_transform,
)
from src.services.constructions import random_unimodular


def _random_matrix(rng, rows, cols, bound=4):
    return IntMatrix.from_rows([[rng.randint(-bound, bound) for _ in range(cols)] for _ in range(rows)], cols=cols)


def test_matrix_shape_and_arithmetic():
    """Basic matrix operations keep shapes and values consistent."""
    a = IntMatrix.from_rows([[1, 2], [3, 4]])
    b = IntMatrix.identity(2)
    assert a.shape == (2, 2)
    assert a.is_square
    assert (a @ b) == a
    assert (a + a) == a.scale(2)
    assert a.T.to_list() == [[1, 3], [2, 4]]
    assert a.hstack(b).shape == (2, 4)
    assert a.direct_sum(b).determinant() == a.determinant() == -2


def test_empty_shapes_are_legal():
    """0x0 and 0xn matrices are valid values."""
    empty = IntMatrix.from_rows([])
    assert empty.shape == (0, 0)
    assert empty.determinant() == 1
    assert IntMatrix.zeros(3, 0).shape == (3, 0)
    assert cokernel_group(empty) == AbelianGroupClass.trivial()


def test_ragged_rows_rejected():
    """Rows of different length are refused."""
    with pytest.raises(ValueError):
        IntMatrix.from_rows([[1, 2], [3]])


def test_smith_normal_form_divisibility_chain():
    """The diagonal forms a divisibility chain whose product is |det|."""
    m = IntMatrix.from_rows([[2, 4, 4], [-6, 6, 12], [10, -4, -16]])
    diagonal, rank = smith_normal_form(m)
    assert rank == 3
    assert diagonal == [2, 6, 12]
    assert abs(m.determinant()) == 2 * 6 * 12


def test_smith_transform_is_invertible():
    """The left transform and its stated inverse multiply to the identity."""
    rng = random.Random(7)
    m = _random_matrix(rng, 4, 4)
    _, left, left_inverse = smith_with_transform(m)
    assert left @ left_inverse == IntMatrix.identity(4)


def _rank_mod(m, p):
    return DomainMatrix([[ZZ(x) for x in row] for row in m.to_list()], m.shape, ZZ).convert_to(GF(p)).rank()


def test_cokernel_matches_determinant_and_rank_on_random_matrices():
    """|coker| equals |det| when non-singular, and the free rank is cols - rank."""
    rng = random.Random(2024)
    for _ in range(100):
        rows, cols = rng.randint(1, 6), rng.randint(1, 6)
        m = _random_matrix(rng, rows, cols)
        group = cokernel_group(m)
        rank = int(np.linalg.matrix_rank(np.array(m.to_list(), dtype=float)))
        assert group.free_rank == cols - rank
        if rows == cols and m.determinant() != 0:
            assert group.is_finite
            assert group.order == abs(m.determinant())
        for p in (2, 3, 5):
            divisible = sum(1 for d in group.invariant_factors if d % p == 0)
            assert cols - _rank_mod(m, p) == group.free_rank + divisible


@pytest.mark.parametrize(
    'rows,expected',
    [
        ([[2, 0], [0, 3]], (0, (6,))),
        ([[2, 0], [0, 2]], (0, (2, 2))),
        ([[0, 0], [0, 5]], (1, (5,))),
        ([[1]], (0, ())),
    ],
)
def test_cokernel_group_examples(rows, expected):
    """Hand-computed cokernels."""
    group = cokernel_group(IntMatrix.from_rows(rows))
    assert (group.free_rank, group.invariant_factors) == expected


def test_group_from_elementary_divisors():
    """Prime powers assemble into invariant factors."""
    group = AbelianGroupClass.from_elementary_divisors([2, 4, 3])
    assert group.invariant_factors == (2, 12)
    assert str(group) == 'Z/2 + Z/12'
    assert group.order == 24
    assert group.elementary_divisors() == [2, 3, 4]


def test_group_rejects_broken_chain():
    """Invariant factors must divide each other."""
    with pytest.raises(ValueError):
        AbelianGroupClass(0, (4, 6))


@pytest.mark.parametrize(
    'group,expected',
    [
        (AbelianGroupClass(0, (4, 4)), True),
        (AbelianGroupClass(0, (15, 15)), True),
        (AbelianGroupClass(2, ()), True),
        (AbelianGroupClass(0, (9,)), False),
        (AbelianGroupClass(1, (2, 2)), False),
        (AbelianGroupClass(0, (2, 4)), False),
        (AbelianGroupClass.trivial(), True),
    ],
)
def test_is_square_group(group, expected):
    """G + G detection."""
    assert is_square_group(group) is expected


def test_is_perfect_square():
    assert is_perfect_square(0)
    assert is_perfect_square(16)
    assert is_perfect_square(-9)
    assert not is_perfect_square(3)


@pytest.mark.parametrize(
    'rows,expected',
    [
        ([[0, 1], [1, 0]], (1, 1, 0)),
        ([[1, 2], [2, 1]], (1, 1, 0)),
        ([[-2, 1], [1, -2]], (0, 2, 0)),
        ([[0, 0], [0, 0]], (0, 0, 2)),
        ([[1, 1], [1, 1]], (1, 0, 1)),
    ],
)
def test_exact_signature(rows, expected):
    """Inertia by symmetric pivoting, including zero diagonals."""
    result = exact_signature_symmetric(IntMatrix.from_rows(rows))
    assert (result.positive, result.negative, result.zero) == expected
    assert result.certified


def test_exact_signature_accepts_fractions():
    """Rational entries are handled exactly."""
    m = RatMatrix.from_rows([[Fraction(1, 3), Fraction(1, 2)], [Fraction(1, 2), Fraction(-1, 5)]])
    assert exact_signature_symmetric(m).signature == 0


def test_exact_signature_requires_symmetry():
    with pytest.raises(NotSymmetricError):
        exact_signature_symmetric(IntMatrix.from_rows([[0, 1], [0, 0]]))


def test_numeric_signature_counts_signs():
    """Eigenvalue signs of a Hermitian matrix with a zero eigenvalue."""
    m = np.array([[2, 1j, 0], [-1j, 2, 0], [0, 0, 0]], dtype=complex)
    result = hermitian_signature_numeric(m)
    assert (result.positive, result.negative, result.zero) == (2, 0, 1)
    assert result.certified


def test_numeric_signature_flags_near_zero_eigenvalues():
    """An eigenvalue close to the tolerance band is not certified."""
    m = np.diag([1.0, 1e-9]).astype(complex)
    assert not hermitian_signature_numeric(m, tol=1e-9).certified


def test_numeric_signature_rejects_non_hermitian():
    with pytest.raises(NotHermitianError):
        hermitian_signature_numeric(np.array([[0, 1], [0, 0]], dtype=complex))


def test_numeric_signature_rejects_bad_tolerance():
    with pytest.raises(ValueError):
        hermitian_signature_numeric(np.eye(2), tol=0)


def test_rat_inverse():
    """Gauss-Jordan inverse of a small matrix."""
    m = RatMatrix.from_rows([[2, 1], [1, 1]])
    assert m.inverse().to_rows() == [[1, -1], [-1, 2]]
    with pytest.raises(ZeroDivisionError):
        RatMatrix.from_rows([[1, 2], [2, 4]]).inverse()


def test_smith_transform_rows_carry_the_diagonal():
    """Row i of P M is d_i times a primitive row; rows past the rank vanish."""
    rng = random.Random(31)
    for _ in range(40):
        rows, cols = rng.randint(1, 5), rng.randint(1, 5)
        m = _random_matrix(rng, rows, cols)
        diagonal, left, left_inverse = smith_with_transform(m)
        assert diagonal == smith_normal_form(m)[0]
        assert left @ left_inverse == IntMatrix.identity(rows)
        reduced = (left @ m).to_list()
        for i, row in enumerate(reduced):
            if i < len(diagonal):
                assert math.gcd(*row) == diagonal[i]
            else:
                assert not any(row)


def test_exact_and_numeric_signatures_agree_on_random_matrices():
    """Certified eigenvalue counts match the exact inertia."""
    rng = random.Random(99)
    for _ in range(200):
        n = rng.randint(1, 6)
        a = _random_matrix(rng, n, n)
        s = a + a.T
        exact = exact_signature_symmetric(s)
        numeric = hermitian_signature_numeric(np.array(s.to_list(), dtype=float))
        if numeric.certified:
            assert (numeric.positive, numeric.negative, numeric.zero) == (exact.positive, exact.negative, exact.zero)


def test_cokernel_is_invariant_under_unimodular_change():
    """coker(U M V) = coker(M) for unimodular U and V."""
    rng = random.Random(5)
    for _ in range(50):
        rows, cols = rng.randint(1, 4), rng.randint(1, 4)
        m = _random_matrix(rng, rows, cols)
        u, _ = random_unimodular(rng, rows, steps=8, bound=2)
        v, _ = random_unimodular(rng, cols, steps=8, bound=2)
        assert cokernel_group(u @ m @ v) == cokernel_group(m)


def test_doubled_cokernels_are_squares():
    """G + G is a square for every finitely generated G."""
    rng = random.Random(17)
    for _ in range(50):
        n = rng.randint(1, 4)
        group = cokernel_group(_random_matrix(rng, n, n))
        assert is_square_group(group.direct_sum(group))
