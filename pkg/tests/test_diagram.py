import random

import pytest

from src.data_access.catalog_dal import CatalogDAL
from src.models.models import PretzelParams
from src.services.algebra import AbelianGroupClass, cokernel_group
from src.services.constructions import pretzel_pd, pretzel_record
from src.services.diagram import (
    DisconnectedDiagramError,
    PDParseError,
    branched_cover_group,
    determinant,
    goeritz_data,
    goeritz_matrix,
    linking_matrix,
    murasugi_signature,
    parse_pd,
)
from tests.conftest import TREFOIL_PD

SPLIT_TREFOILS = TREFOIL_PD + ';X[7,11,8,10];X[9,7,10,12];X[11,9,12,8]'


@pytest.mark.parametrize(
    'text',
    [
        TREFOIL_PD,
        'PD[X[1,5,2,4], X[3,1,4,6], X[5,3,6,2]]',
        '[[1,5,2,4],[3,1,4,6],[5,3,6,2]]',
        'X(1,5,2,4)\nX(3,1,4,6)\nX(5,3,6,2)',
    ],
)
def test_parse_accepts_every_notation(text):
    """Bracket, nested-list and newline forms give the same diagram."""
    pd = parse_pd(text)
    assert pd.crossing_count == 3
    assert pd.num_components == 1
    assert pd == parse_pd(TREFOIL_PD)


def test_empty_code_is_the_unknot():
    """No crossings is the crossingless unknot."""
    pd = parse_pd('PD[]')
    assert pd.crossing_count == 0
    assert pd.num_components == 1
    assert determinant(pd) == 1
    assert branched_cover_group(pd) == AbelianGroupClass.trivial()
    assert murasugi_signature(pd) == 0


@pytest.mark.parametrize('text', ['X[1,2,3]', 'X[1,2,3,4', 'X[1,5,2,4] junk', 'X(1,5,2,4]'])
def test_parse_rejects_malformed_codes(text):
    """Malformed terms raise PDParseError."""
    with pytest.raises(PDParseError):
        parse_pd(text)


def test_printed_form_parses_back(trefoil_pd):
    assert parse_pd(str(trefoil_pd)) == trefoil_pd
    assert str(trefoil_pd) == 'PD[X[1,5,2,4], X[3,1,4,6], X[5,3,6,2]]'


def test_trefoil_invariants(trefoil_pd):
    """Determinant 3, |signature| 2, cover group Z/3."""
    assert determinant(trefoil_pd) == 3
    assert abs(murasugi_signature(trefoil_pd)) == 2
    assert branched_cover_group(trefoil_pd) == AbelianGroupClass(0, (3,))


def test_hopf_link_invariants(hopf_pd):
    """Two components linking once."""
    assert hopf_pd.num_components == 2
    lk = linking_matrix(hopf_pd)
    assert lk[0, 0] == lk[1, 1] == 0
    assert abs(lk[0, 1]) == 1
    assert lk[0, 1] == lk[1, 0]
    assert determinant(hopf_pd) == 2


def test_borromean_rings_invariants(borromean_pd):
    """Pairwise unlinked, determinant 16, cover group Z/4 + Z/4."""
    assert borromean_pd.num_components == 3
    assert linking_matrix(borromean_pd).is_zero()
    assert determinant(borromean_pd) == 16
    assert branched_cover_group(borromean_pd) == AbelianGroupClass(0, (4, 4))
    assert murasugi_signature(borromean_pd) == 0


def test_goeritz_matrix_is_symmetric(borromean_pd):
    g = goeritz_matrix(borromean_pd)
    assert g.is_symmetric()
    assert abs(g.determinant()) == 16


def test_split_diagrams():
    """Split pieces add a free summand and kill the determinant."""
    pd = parse_pd(SPLIT_TREFOILS)
    assert pd.num_components == 2
    assert len(pd.pieces()) == 2
    assert determinant(pd) == 0
    assert branched_cover_group(pd) == AbelianGroupClass(1, (3, 3))
    with pytest.raises(DisconnectedDiagramError):
        goeritz_matrix(pd)


def test_empty_string_is_the_unknot():
    assert parse_pd('') == parse_pd('PD[]')
    assert parse_pd('  ').num_components == 1


def test_arc_used_three_times_is_reported_with_its_position():
    text = 'X[1,5,2,4];X[3,1,4,6];X[5,3,6,1]'
    with pytest.raises(PDParseError, match='arc multiplicity') as excinfo:
        parse_pd(text)
    assert excinfo.value.position == text.index('X[5,3,6,1]')


def test_odd_crossing_count_between_components_is_rejected():
    """Two loops crossing once cannot come from a planar diagram."""
    pd = parse_pd('X[1,2,1,2]')
    assert pd.num_components == 2
    with pytest.raises(PDParseError, match='odd signed crossing count'):
        linking_matrix(pd)


def _random_pretzel(rng, min_twist=1):
    twists = [rng.choice([-1, 1]) * rng.randint(min_twist, 5) for _ in range(rng.randint(2, 4))]
    return PretzelParams(tuple(twists))


def test_goeritz_determinant_ignores_colouring_and_deleted_region():
    """|det G| is the link determinant for either colour class and any deleted region."""
    rng = random.Random(41)
    for _ in range(30):
        pd = pretzel_pd(_random_pretzel(rng))
        expected = determinant(pd)
        for white in (0, 1):
            regions = goeritz_data(pd, white).region_count
            for deleted in range(regions):
                assert abs(goeritz_matrix(pd, white, deleted).determinant()) == expected


@pytest.mark.parametrize('name', ['trefoil', 'hopf', 'borromean'])
def test_mirror_negates_linking_and_signature_on_catalog_diagrams(name):
    pd = CatalogDAL.get_record_by_name(name).pd
    mirror = pd.mirror()
    assert linking_matrix(mirror) == linking_matrix(pd).scale(-1)
    assert murasugi_signature(mirror) == -murasugi_signature(pd)
    assert determinant(mirror) == determinant(pd)


def test_mirror_negates_linking_and_signature_on_pretzels():
    """Twist regions of two or more crossings give every component an under-passage."""
    rng = random.Random(3)
    for _ in range(25):
        pd = pretzel_pd(_random_pretzel(rng, min_twist=2))
        mirror = pd.mirror()
        assert mirror.num_components == pd.num_components
        assert linking_matrix(mirror) == linking_matrix(pd).scale(-1)
        assert murasugi_signature(mirror) == -murasugi_signature(pd)


def test_goeritz_cokernel_matches_seifert_presentation():
    """H_1 of the double cover from the diagram equals coker(A + A^T)."""
    records = [r for r in CatalogDAL.load_records() if r.pd is not None and r.seifert is not None]
    records += [pretzel_record(PretzelParams.parse(text)) for text in ('P(2,2)', 'P(2,-2,2)', 'P(4,-2,6)', 'P(2,2,2)')]
    assert len(records) > 4
    for record in records:
        a = record.seifert
        assert branched_cover_group(record.pd) == cokernel_group(a + a.T), record.name
