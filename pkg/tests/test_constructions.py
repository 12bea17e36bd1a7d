import math
import random

import pytest

from src.data_access.catalog_dal import CatalogDAL
from src.models.models import ColouredBoundarySeifertMatrix, PretzelParams
from src.services.algebra import IntMatrix
from src.services.constructions import (
    UnsupportedConstructionError,
    boundary_to_gsm,
    braid_seifert_matrix,
    cable_signature,
    fold_pretzel,
    planted_doubly_isotropic,
    pretzel_even_seifert,
    pretzel_pd,
    pretzel_record,
    random_unimodular,
)
from src.services.diagram import determinant
from src.services.invariants import lt_signature
from src.services.isotropy import is_doubly_isotropic
from src.services.laurent import TorusPoint


def test_fold_inserts_mirrored_pair():
    """a_j becomes a_j, -a_j, a_j and the provenance grows."""
    folded = fold_pretzel(PretzelParams.parse('P(2,-2)'), 1)
    assert folded.twists == (2, -2, 2, -2)
    assert len(folded.provenance) == 1
    assert str(fold_pretzel(PretzelParams((3,)), 1)) == 'P(3,-3,3)'


def test_fold_rejects_bad_position():
    with pytest.raises(UnsupportedConstructionError):
        fold_pretzel(PretzelParams((2, -2)), 3)


@pytest.mark.parametrize(
    'text,crossings,components,det',
    [
        ('P(1,1,1)', 3, 1, 3),
        ('P(2,2,2)', 6, 3, 12),
        ('P(2,-2)', 4, 2, 0),
        ('P(2,-2,2)', 6, 3, 4),
        ('P(2,-2,2,-2)', 8, 4, 0),
    ],
)
def test_pretzel_diagram(text, crossings, components, det):
    """Crossing count, components and determinant of generated diagrams."""
    pd = pretzel_pd(PretzelParams.parse(text))
    assert pd.crossing_count == crossings
    assert pd.num_components == components
    assert determinant(pd) == det


@pytest.mark.parametrize(
    'text,expected',
    [
        ('P(2,-2)', [[0]]),
        ('P(2,2)', [[2]]),
        ('P(2,2,2)', [[2, -1], [-1, 2]]),
    ],
)
def test_even_pretzel_seifert_matrix(text, expected):
    assert pretzel_even_seifert(PretzelParams.parse(text)).to_list() == expected


@pytest.mark.parametrize(
    'text',
    ['P(2,2)', 'P(2,-2,2)', 'P(2,-2,2,-2)', 'P(4,-2,6)', 'P(2,2,2)', 'P(-4,2,2,-6)'],
)
def test_even_pretzel_seifert_matches_goeritz(text):
    """|det(V + V^T)| agrees with the diagram determinant."""
    params = PretzelParams.parse(text)
    v = pretzel_even_seifert(params)
    assert abs((v + v.T).determinant()) == determinant(pretzel_pd(params))


def test_even_pretzel_seifert_rejects_odd_regions():
    with pytest.raises(UnsupportedConstructionError):
        pretzel_even_seifert(PretzelParams((2, 3)))


def test_pretzel_record_carries_folding_orientation():
    """Even pretzels get a Seifert matrix and the folding tag."""
    record = pretzel_record(fold_pretzel(PretzelParams((2, -2)), 2))
    assert record.name == 'P(2,-2,2,-2)'
    assert record.components == 4
    assert record.mu == 1
    assert record.orientation_tag == 'folding'
    assert record.seifert.shape == (3, 3)
    assert 'construction' in record.provenance


def test_odd_pretzel_record_has_no_seifert_matrix():
    record = pretzel_record(PretzelParams((1, 1, 1)))
    assert record.seifert is None
    assert record.orientation_tag == ''


def test_braid_seifert_matrix_for_trefoil():
    """sigma_1^3 gives a genus one surface with determinant 3."""
    v = braid_seifert_matrix([1, 1, 1])
    assert v.shape == (2, 2)
    assert (v - v.T).determinant() in (1, -1)
    assert abs((v + v.T).determinant()) == 3


def test_braid_generators_are_positive_integers():
    with pytest.raises(UnsupportedConstructionError):
        braid_seifert_matrix([0, 1])


def test_boundary_to_gsm_flips_diagonal_blocks():
    """A^eps uses A_ii for eps_i = -1 and its transpose for +1."""
    boundary = ColouredBoundarySeifertMatrix(
        2, (2, 2),
        {
            (0, 0): IntMatrix.from_rows([[0, 1], [0, 0]]),
            (0, 1): IntMatrix.from_rows([[0, 1], [2, 0]]),
            (1, 0): IntMatrix.from_rows([[0, 2], [1, 0]]),
            (1, 1): IntMatrix.from_rows([[0, 2], [1, 0]]),
        },
    )
    gsm = boundary_to_gsm(boundary)
    assert gsm.mu == 2 and gsm.size == 4 and gsm.beta0 == 2
    assert gsm.matrix((-1, -1)) == boundary.as_matrix()
    assert gsm.matrix((1, 1)) == boundary.as_matrix().T
    assert gsm.matrix((1, -1)).to_list()[0][:2] == [0, 0]


def test_cable_signature_of_8_20():
    """sigma of the (2,0)-cable at 1/12 is sigma of 8_20 at 1/6."""
    seifert = CatalogDAL.get_record_by_name('8_20').seifert
    value = cable_signature(lambda w: lt_signature(seifert, w), TorusPoint.parse('1/12'))
    assert value == lt_signature(seifert, TorusPoint.parse('1/6')) == 1


def test_cable_signature_undefined_at_one():
    with pytest.raises(ValueError):
        cable_signature(lambda w: 0, TorusPoint.parse('0'))


def test_random_unimodular_inverse():
    rng = random.Random(11)
    u, u_inv = random_unimodular(rng, 5, steps=20, bound=2)
    assert u @ u_inv == IntMatrix.identity(5)


@pytest.mark.parametrize('half_sizes,mixing', [((1,), 0), ((2,), 6), ((1, 1), 4), ((1, 2, 1), 8)])
def test_planted_pairs_are_doubly_isotropic(half_sizes, mixing):
    """The planted families pass the doubly isotropic predicate."""
    rng = random.Random(sum(half_sizes) * 31 + mixing)
    boundary, plus, minus = planted_doubly_isotropic(rng, half_sizes, mixing_steps=mixing)
    assert boundary.block_sizes == tuple(2 * m for m in half_sizes)
    assert is_doubly_isotropic(boundary, plus, minus)


def test_pretzel_determinants_follow_the_twist_formula():
    """det P(a_1, ..., a_k) = |sum over i of the product of the other twists|."""
    rng = random.Random(6)
    for _ in range(60):
        twists = [rng.choice([-1, 1]) * rng.randint(1, 8) for _ in range(rng.randint(2, 6))]
        params = PretzelParams(tuple(twists))
        expected = abs(sum(math.prod(twists[:i] + twists[i + 1:]) for i in range(len(twists))))
        assert determinant(pretzel_pd(params)) == expected, params
        if all(a % 2 == 0 for a in twists):
            v = pretzel_even_seifert(params)
            assert abs((v + v.T).determinant()) == expected, params
