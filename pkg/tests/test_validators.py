from fractions import Fraction

import pytest

from src.services.algebra import IntMatrix
from src.utils.validators import Validator


@pytest.mark.parametrize(
    'value,expected',
    [
        ('L8a19{0,0}', True),
        ('P(2,-2,2)', True),
        ("8_20'", True),
        ('hyperbolic-genus-one', True),
        ('', False),
        (' trefoil', False),
        ('bad name!', False),
        ('x' * 81, False),
        (None, False),
    ],
)
def test_validate_name(value, expected):
    """Record names allow table notation and pretzel parameters only."""
    is_valid, _ = Validator.validate_name(value)
    assert is_valid is expected


def test_validate_integer_bounds():
    assert Validator.validate_integer('7', 1, 10) == (True, 7)
    assert Validator.validate_integer(0, 1, 10, 'Grid order')[1] == 'Grid order must be at least 1'
    assert Validator.validate_integer(11, 1, 10)[0] is False
    assert Validator.validate_integer(2.5)[0] is False
    assert Validator.validate_integer(True)[0] is False
    assert Validator.validate_integer('abc')[0] is False


def test_validate_matrix():
    ok, matrix = Validator.validate_matrix([[1, 2], [3, 4]], square=True)
    assert ok and matrix == IntMatrix.from_rows([[1, 2], [3, 4]])
    assert Validator.validate_matrix([[1, 2]], 'seifert', square=True) == (False, 'seifert must be square, got 1x2')
    assert Validator.validate_matrix([[1], [2, 3]])[0] is False
    assert Validator.validate_matrix([[True]])[0] is False
    assert Validator.validate_matrix('[[1]]')[0] is False
    assert Validator.validate_matrix([]) == (True, IntMatrix.from_rows([]))


@pytest.mark.parametrize(
    'colouring,components,mu,expected',
    [
        ([1, 1, 1], 3, 1, True),
        ([1, 2, 1], 3, 2, True),
        ([1, 1], 2, 2, False),
        ([1, 3], 2, 2, False),
        ([1], 2, 1, False),
        ('1,1', 2, 1, False),
    ],
)
def test_validate_colouring(colouring, components, mu, expected):
    """Every component gets a colour and every colour is used."""
    assert Validator.validate_colouring(colouring, components, mu)[0] is expected


def test_validate_mu_is_at_most_the_component_count():
    assert Validator.validate_mu(2, 3) == (True, 2)
    assert Validator.validate_mu(4, 3)[0] is False
    assert Validator.validate_mu(0, 3)[0] is False


def test_validate_grid_order():
    assert Validator.validate_grid_order(24) == (True, 24)
    assert Validator.validate_grid_order(0)[0] is False
    assert Validator.validate_grid_order(721)[0] is False


def test_validate_point():
    ok, point = Validator.validate_point('1/2,1/3', 2)
    assert ok
    assert point.angles == (Fraction(1, 2), Fraction(1, 3))
    assert Validator.validate_point('1/2', 2)[0] is False
    assert Validator.validate_point('', 1)[0] is False
    assert Validator.validate_point('half', 1)[0] is False


def test_validate_provenance():
    assert Validator.validate_provenance({'seifert': 'braid closure'})[0]
    assert Validator.validate_provenance({})[0]
    assert not Validator.validate_provenance(['pd'])[0]
    assert not Validator.validate_provenance({'pd': 1})[0]
