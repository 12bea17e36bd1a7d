import pytest

from src.data_access.catalog_dal import CatalogDAL
from src.models.models import (
    STATUS_INCONCLUSIVE,
    STATUS_OBSTRUCTED,
    STATUS_PASSED,
    STATUS_SKIPPED,
    VERDICT_CLEAR,
    VERDICT_OBSTRUCTED,
    LinkRecord,
    PretzelParams,
)
from src.services.algebra import IntMatrix
from src.services.constructions import pretzel_record
from src.services.invariants import MissingDataError
from src.services.obstruct import (
    WEAK_NOTE,
    cover_criterion,
    factorization_criterion,
    genus_lower_bound,
    grid_rows,
    linking_criterion,
    run_obstructions,
    signature_values,
)

TABLE_LINKS = [
    'L8a19{0,0}', 'L8a19{1,1}', 'L8n3{1,0}', 'L8n3{0,1}',
    'L9a46{0,0}', 'L9a46{1,1}', 'L9a48{1,0}', 'L9a48{0,1}',
]


def _record(name):
    return CatalogDAL.get_record_by_name(name)


def test_trefoil_is_obstructed():
    """Signature, cover and norm factorization all obstruct the trefoil."""
    report = run_obstructions(_record('trefoil'), grid_order=24)
    assert report.verdict == VERDICT_OBSTRUCTED
    assert report.obstructing_criteria == ['S', 'D', 'F']
    assert report.genus_lower_bound == 2
    assert report.criterion('S').witness == 'sigma(1/6) = -1'
    assert report.criterion('L').status == STATUS_SKIPPED
    assert report.to_dict()['disclaimer'] is None


def test_trefoil_genus_bound():
    assert genus_lower_bound(_record('trefoil'), 24) == 2


def test_criteria_order_is_fixed():
    report = run_obstructions(_record('trefoil'), grid_order=6)
    assert [c.criterion for c in report.criteria] == ['S', 'N', 'A', 'D', 'F', 'L', "L'"]


def test_borromean_rings_pass_every_abelian_test():
    """Z/4 + Z/4 with a metabolic form and zero linking numbers."""
    report = run_obstructions(_record('borromean'))
    assert report.verdict == VERDICT_CLEAR
    assert report.criterion('D').status == STATUS_PASSED
    assert 'Z/4 + Z/4' in report.criterion('D').witness
    assert report.criterion('L').status == STATUS_PASSED
    assert report.to_dict()['disclaimer'] == report.DISCLAIMER


def test_borromean_strong_colouring():
    """The vanishing linking matrix also passes the strong test."""
    report = run_obstructions(_record('borromean').with_mu(3))
    assert report.criterion("L'").status == STATUS_PASSED
    assert report.verdict == VERDICT_CLEAR


@pytest.mark.parametrize('name', ['L9a45{0,0}', 'L9a45{1,0}', 'L9a45{0,1}'])
def test_l9a45_cover_group_is_not_a_square(name):
    """Z/2 + Z/18 has square order but is not of the form G + G."""
    report = run_obstructions(_record(name))
    assert report.obstructing_criteria == ['D']
    assert 'Z/2 + Z/18' in report.criterion('D').witness
    assert any('finer colouring' in note for note in report.notes)


def test_l11n247_determinant_is_not_a_square():
    report = run_obstructions(_record('L11n247'))
    assert report.obstructing_criteria == ['D']
    assert 'determinant 17' in report.criterion('D').witness
    assert report.criterion('L').status == STATUS_PASSED


@pytest.mark.parametrize('name', TABLE_LINKS)
def test_table_links_fail_the_linking_criterion(name):
    record = _record(name)
    assert not linking_criterion(record.linking)
    report = run_obstructions(record)
    assert report.criterion('L').status == STATUS_OBSTRUCTED


def test_stevedore_is_obstructed_by_its_cover_only():
    """6_1 has vanishing signatures and a norm-factorizable Alexander polynomial."""
    report = run_obstructions(_record('6_1'), grid_order=12)
    assert report.obstructing_criteria == ['D']
    assert report.criterion('F').status == STATUS_PASSED
    assert report.genus_lower_bound == 0


def test_figure_eight_fails_cover_and_factorization():
    report = run_obstructions(_record('4_1'), grid_order=12)
    assert 'D' in report.obstructing_criteria
    assert 'F' in report.obstructing_criteria


@pytest.mark.parametrize('name', ['hyperbolic-genus-one', 'planted-boundary-mu2'])
def test_synthetic_doubly_isotropic_records_are_clear(name):
    report = run_obstructions(_record(name), grid_order=8)
    assert report.verdict == VERDICT_CLEAR
    assert not report.obstructed


def test_coloured_record_uses_the_weak_note():
    """Obstructions to weak double sliceness say so at mu > 1."""
    report = run_obstructions(_record('hopf').with_mu(2))
    assert report.criterion('D').status == STATUS_OBSTRUCTED
    assert WEAK_NOTE in report.criterion('D').witness
    assert report.criterion("L'").status == STATUS_OBSTRUCTED
    assert report.criterion('S').status == STATUS_SKIPPED


def test_hopf_link_at_one_colour():
    report = run_obstructions(_record('hopf'), grid_order=6)
    assert {'S', 'D', 'F', 'L'} <= set(report.obstructing_criteria)


def test_record_without_data_is_refused():
    with pytest.raises(MissingDataError):
        run_obstructions(LinkRecord(name='bare', components=1, mu=1, colouring=(1,)))


def test_signature_values_need_seifert_data():
    with pytest.raises(MissingDataError):
        signature_values(_record('borromean'))


def test_cover_criterion_skips_without_data():
    record = LinkRecord(name='lk-only', components=2, mu=1, colouring=(1, 1), linking=IntMatrix.zeros(2))
    assert cover_criterion(record).status == STATUS_SKIPPED


@pytest.mark.parametrize(
    'values,expected',
    [
        ([0], True),
        ([1], False),
        ([1, -1, 1], True),
        ([2, -2, 2], True),
        ([0, 0, 0], True),
        ([1, 1, 1], False),
        ([-1, 1, 0], False),
        ([0, 0, -1], False),
    ],
)
def test_linking_criterion_on_pairwise_values(values, expected):
    assert linking_criterion(values) is expected


def test_linking_criterion_finds_a_reordering():
    """lk12 = 1, lk13 = 1, lk23 = -1 works after relabelling."""
    lk = IntMatrix.from_rows([[0, 1, 1], [1, 0, -1], [1, -1, 0]])
    assert linking_criterion(lk)


def test_linking_criterion_rejects_other_sizes():
    with pytest.raises(ValueError):
        linking_criterion(IntMatrix.zeros(4))
    with pytest.raises(ValueError):
        linking_criterion([1, 2])


def test_grid_rows(trefoil_seifert):
    record = LinkRecord(name='t', components=1, mu=1, colouring=(1,), seifert=trefoil_seifert)
    rows = grid_rows(signature_values(record, 2))
    assert rows == [['0', 0, '', 1], ['1/2', -2, 0, 1]]


TREFOIL = IntMatrix.from_rows([[-1, 1], [0, -1]])
STEVEDORE = IntMatrix.from_rows([[1, 1], [0, -2]])


def _two_component(name, first, second, mu=2):
    return LinkRecord(
        name=name, components=2, mu=mu, colouring=(1, 2) if mu == 2 else (1, 1),
        linking=IntMatrix.zeros(2), component_seifert=(first, second),
    )


def test_factorization_checks_each_component_at_the_strong_colouring():
    record = _two_component('unknot-and-stevedore', IntMatrix.zeros(0), STEVEDORE)
    result = factorization_criterion(record)
    assert result.status == STATUS_PASSED
    assert 'component 1' in result.witness
    assert 'component 2' in result.witness


def test_knotted_component_with_odd_norm_factor_obstructs():
    """A trefoil component has no f * bar(f) splitting."""
    record = _two_component('trefoil-and-unknot', TREFOIL, IntMatrix.zeros(0))
    result = factorization_criterion(record)
    assert result.status == STATUS_OBSTRUCTED
    assert result.witness.startswith('component 1')
    report = run_obstructions(record)
    assert report.verdict == VERDICT_OBSTRUCTED
    assert WEAK_NOTE in report.criterion('F').witness


def test_component_data_is_ignored_at_one_colour():
    record = _two_component('trefoil-and-unknot', TREFOIL, IntMatrix.zeros(0), mu=1)
    assert factorization_criterion(record).status == STATUS_SKIPPED


def test_l10n36_passes_every_abelian_test():
    """Unlinked unknot and 3_1 # -3_1: weakly doubly slice, nothing obstructs."""
    report = run_obstructions(_record('L10n36'))
    assert report.verdict == VERDICT_CLEAR
    assert report.criterion('F').status == STATUS_PASSED
    assert 'component 2' in report.criterion('F').witness
    assert report.criterion('L').status == STATUS_PASSED
    assert report.criterion("L'").status == STATUS_PASSED


def test_l6n1_folding_orientation_is_clear():
    """L6n1{0,0} is P(-2,2,-2) with the orientation inherited from folding the unknot."""
    record = pretzel_record(PretzelParams.parse('P(-2,2,-2)'))
    assert record.components == 3
    report = run_obstructions(record, grid_order=12)
    assert report.verdict == VERDICT_CLEAR
    assert report.genus_lower_bound == 0
    assert report.criterion('D').status == STATUS_PASSED
    assert report.criterion('L').status == STATUS_PASSED
    assert all(c.status != STATUS_INCONCLUSIVE for c in report.criteria)
