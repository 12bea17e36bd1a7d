"""
Obstruction pipeline.

Runs every abelian criterion whose input data the record carries and
assembles an ObstructionReport. Criteria are evaluated in a fixed order:

    S   signature sigma_L non-zero at a certified grid point
    N   nullity eta_L below mu - 1
    A   Alexander nullity below mu - 1
    D   double branched cover: square determinant, G + G torsion, metabolic form
    F   Fox-Milnor norm factorization of the torsion Alexander polynomial
    L   cross-section linking numbers (2 and 3 component links)
    L'  vanishing linking matrix for the strong colouring
"""
import logging
from itertools import permutations
from typing import List, Optional, Sequence, Tuple, Union

from src.config import Config
from src.models.models import (
    STATUS_INCONCLUSIVE,
    STATUS_OBSTRUCTED,
    STATUS_PASSED,
    STATUS_SKIPPED,
    CriterionResult,
    GeneralizedSeifertCollection,
    LinkingFormOnCoker,
    LinkRecord,
    ObstructionReport,
)
from src.services import diagram
from src.services.algebra import (
    AbelianGroupClass,
    IntMatrix,
    cokernel_group,
    is_perfect_square,
    is_square_group,
)
from src.services.constructions import boundary_to_gsm
from src.services.invariants import (
    GridValue,
    MissingDataError,
    alexander_nullity,
    assemble_cmatrix,
    branched_cover_from_seifert,
    evaluate_grid,
    metaboliser_search,
    torsion_alexander_1var,
)
from src.services.laurent import TorusPoint, norm_factorization_check

logger = logging.getLogger(__name__)

CRITERIA = (
    ('S', 'multivariable signature'),
    ('N', 'multivariable nullity'),
    ('A', 'Alexander nullity'),
    ('D', 'double branched cover'),
    ('F', 'norm factorization'),
    ('L', 'cross-section linking numbers'),
    ("L'", 'strong linking matrix'),
)
_TITLES = dict(CRITERIA)

WEAK_NOTE = 'obstructs weak double sliceness, hence every colouring'


def _result(criterion: str, status: str, witness: str = '') -> CriterionResult:
    return CriterionResult(criterion, _TITLES[criterion], status, witness)


# Data selection -------------------------------------------------------------------------

def record_collection(record: LinkRecord) -> Optional[GeneralizedSeifertCollection]:
    """Generalized Seifert data for the record's colouring, if any is available."""
    if record.gsm is not None:
        return record.gsm
    if record.boundary is not None:
        return boundary_to_gsm(record.boundary)
    if record.mu == 1 and record.seifert is not None:
        return GeneralizedSeifertCollection.from_seifert(record.seifert)
    return None


def cover_presentation(record: LinkRecord) -> Optional[IntMatrix]:
    """A symmetric integer matrix presenting H_1 of the double branched cover."""
    if record.seifert is not None:
        return record.seifert + record.seifert.T
    if record.cover_presentation is not None:
        return record.cover_presentation
    if record.pd is not None and len(record.pd.pieces()) <= 1:
        return diagram.goeritz_matrix(record.pd)
    return None


def cover_group(record: LinkRecord) -> Optional[AbelianGroupClass]:
    if record.seifert is not None:
        return branched_cover_from_seifert(record.seifert)
    if record.cover_presentation is not None:
        return cokernel_group(record.cover_presentation)
    if record.pd is not None:
        return diagram.branched_cover_group(record.pd)
    return None


def record_linking(record: LinkRecord) -> Optional[IntMatrix]:
    if record.linking is not None:
        return record.linking
    if record.pd is not None:
        return diagram.linking_matrix(record.pd)
    return None


def grid_points(mu: int, grid_order: int) -> List[TorusPoint]:
    return TorusPoint.grid(mu, grid_order)


# Individual criteria ----------------------------------------------------------------------

def signature_criterion(values: Sequence[GridValue]) -> CriterionResult:
    for value in values:
        if value.certified and value.signature:
            return _result('S', STATUS_OBSTRUCTED, f'sigma({value.point}) = {value.signature}')
    uncertified = [v for v in values if not v.certified]
    if uncertified:
        return _result('S', STATUS_INCONCLUSIVE, f'{len(uncertified)} uncertified grid points, e.g. {uncertified[0].point}')
    return _result('S', STATUS_PASSED, f'sigma vanishes at {len(values)} grid points')


def nullity_criterion(values: Sequence[GridValue], mu: int) -> CriterionResult:
    defined = [v for v in values if v.nullity is not None]
    for value in defined:
        if value.certified and value.nullity < mu - 1:
            return _result('N', STATUS_OBSTRUCTED, f'eta({value.point}) = {value.nullity} < {mu - 1}')
    if any(not v.certified for v in defined):
        return _result('N', STATUS_INCONCLUSIVE, 'some grid points are uncertified')
    return _result('N', STATUS_PASSED, f'eta >= {mu - 1} at {len(defined)} grid points')


def alexander_criterion(collection: GeneralizedSeifertCollection, mu: int) -> CriterionResult:
    beta = alexander_nullity(assemble_cmatrix(collection), collection.beta0)
    if beta < mu - 1:
        return _result('A', STATUS_OBSTRUCTED, f'beta = {beta} < {mu - 1}')
    return _result('A', STATUS_PASSED, f'beta = {beta}')


def cover_criterion(record: LinkRecord) -> CriterionResult:
    group = cover_group(record)
    if group is None:
        return _result('D', STATUS_SKIPPED, 'needs a Seifert matrix, a PD code or a cover presentation')
    torsion = AbelianGroupClass(0, group.invariant_factors)
    if group.is_finite and not is_perfect_square(group.order):
        return _result('D', STATUS_OBSTRUCTED, f'determinant {group.order} is not a square')
    if not is_square_group(torsion):
        return _result('D', STATUS_OBSTRUCTED, f'torsion of H_1 = {torsion} is not of the form G + G')
    presentation = cover_presentation(record)
    if not group.is_finite or presentation is None or presentation.determinant() == 0:
        return _result('D', STATUS_PASSED, f'H_1 = {group}; linking form not examined')
    search = metaboliser_search(LinkingFormOnCoker.from_presentation(presentation))
    if search.status == 'none':
        return _result('D', STATUS_OBSTRUCTED, f'linking form on {group} has no metaboliser')
    if search.status == 'inconclusive':
        return _result('D', STATUS_INCONCLUSIVE, f'H_1 = {group}; {search.note}')
    return _result('D', STATUS_PASSED, f'H_1 = {group} with a metabolic linking form')


def _norm_check(seifert: IntMatrix) -> Tuple[str, str]:
    delta = torsion_alexander_1var(seifert)
    outcome = norm_factorization_check(delta)
    if outcome.found:
        return STATUS_PASSED, f'{delta} = f * bar(f) with f = {outcome.factor}'
    if outcome.status == 'none':
        return STATUS_OBSTRUCTED, f'{delta}: {outcome.note}'
    return STATUS_INCONCLUSIVE, f'{delta}: {outcome.note}'


def factorization_criterion(record: LinkRecord) -> CriterionResult:
    if record.seifert is None and (record.component_seifert is None or record.mu != record.components):
        return _result('F', STATUS_SKIPPED, 'needs a Seifert matrix')
    witnesses, statuses = [], []
    if record.seifert is not None:
        status, witness = _norm_check(record.seifert)
        statuses.append(status)
        witnesses.append(witness)
    if record.component_seifert is not None and record.mu == record.components:
        for index, seifert in enumerate(record.component_seifert):
            status, witness = _norm_check(seifert)
            statuses.append(status)
            witnesses.append(f'component {index + 1}: {witness}')
    for wanted in (STATUS_OBSTRUCTED, STATUS_INCONCLUSIVE):
        if wanted in statuses:
            return _result('F', wanted, witnesses[statuses.index(wanted)])
    return _result('F', STATUS_PASSED, '; '.join(witnesses))


def linking_criterion(lk: Union[IntMatrix, Sequence[int]], n: Optional[int] = None) -> bool:
    """
    Linking numbers of a weakly doubly slice link with 2 or 3 components.

    ``lk`` is a linking matrix or the pairwise values (lk12) or
    (lk12, lk13, lk23). Two components must not link; three components need
    an ordering with lk(L1,L2) = -lk(L1,L3) = lk(L2,L3).
    """
    if isinstance(lk, IntMatrix):
        if not lk.is_square:
            raise ValueError('linking matrix must be square')
        n = lk.rows if n is None else n
        if lk.rows != n:
            raise ValueError(f'linking matrix is {lk.rows}x{lk.rows}, expected {n} components')
        pair = {(i, j): lk[i, j] for i in range(n) for j in range(n)}
    else:
        values = list(lk)
        n = {1: 2, 3: 3}.get(len(values)) if n is None else n
        if n == 2 and len(values) == 1:
            pair = {(0, 1): values[0], (1, 0): values[0]}
        elif n == 3 and len(values) == 3:
            a, b, c = values
            pair = {(0, 1): a, (1, 0): a, (0, 2): b, (2, 0): b, (1, 2): c, (2, 1): c}
        else:
            raise ValueError(f'expected 1 or 3 pairwise linking numbers, got {len(values)}')
    if n == 2:
        return pair[(0, 1)] == 0
    if n == 3:
        for p in permutations(range(3)):
            x, y, z = pair[(p[0], p[1])], pair[(p[0], p[2])], pair[(p[1], p[2])]
            if x == -y and x == z:
                return True
        return False
    raise ValueError(f'the linking criterion covers 2 or 3 components, not {n}')


def cross_section_criterion(record: LinkRecord) -> CriterionResult:
    if record.components not in (2, 3):
        return _result('L', STATUS_SKIPPED, 'defined for 2 or 3 components')
    lk = record_linking(record)
    if lk is None:
        return _result('L', STATUS_SKIPPED, 'needs a linking matrix or a PD code')
    values = [lk[i, j] for i in range(lk.rows) for j in range(i + 1, lk.rows)]
    if linking_criterion(lk):
        return _result('L', STATUS_PASSED, f'pairwise linking numbers {tuple(values)}')
    return _result('L', STATUS_OBSTRUCTED, f'pairwise linking numbers {tuple(values)} admit no valid ordering')


def strong_linking_criterion(record: LinkRecord) -> CriterionResult:
    if record.components == 1 or record.mu != record.components:
        return _result("L'", STATUS_SKIPPED, 'applies to the strong colouring of a link')
    lk = record_linking(record)
    if lk is None:
        return _result("L'", STATUS_SKIPPED, 'needs a linking matrix or a PD code')
    if lk.is_zero():
        return _result("L'", STATUS_PASSED, 'linking matrix vanishes')
    return _result("L'", STATUS_OBSTRUCTED, f'linking matrix {lk.to_list()} is non-zero')


# Pipeline --------------------------------------------------------------------------------

def _diagram_signature(record: LinkRecord) -> Optional[int]:
    """sigma(-1) from the diagram, for one-coloured records with a connected PD code."""
    if record.mu != 1 or record.pd is None or len(record.pd.pieces()) > 1:
        return None
    return diagram.murasugi_signature(record.pd)


def signature_values(
    record: LinkRecord,
    grid_order: Optional[int] = None,
    workers: Optional[int] = None,
) -> List[GridValue]:
    """sigma and eta over the grid; raises MissingDataError without Seifert-type data."""
    collection = record_collection(record)
    if collection is None:
        raise MissingDataError(f'{record.name}: needs Seifert data for mu={record.mu}')
    grid_order = Config.GRID_ORDER if grid_order is None else grid_order
    h = assemble_cmatrix(collection)
    return evaluate_grid(h, collection.beta0, grid_points(record.mu, grid_order), workers)


def genus_lower_bound(record: LinkRecord, grid_order: Optional[int] = None, workers: Optional[int] = None) -> int:
    """Max of |sigma_L| over the certified points of the grid."""
    values = signature_values(record, grid_order, workers)
    return max((abs(v.signature) for v in values if v.certified), default=0)


def run_obstructions(
    record: LinkRecord,
    grid_order: Optional[int] = None,
    workers: Optional[int] = None,
) -> ObstructionReport:
    grid_order = Config.GRID_ORDER if grid_order is None else grid_order
    if not any(x is not None for x in (
        record.pd, record.seifert, record.gsm, record.boundary, record.linking, record.cover_presentation,
    )):
        raise MissingDataError(f'{record.name}: the record carries no data')
    mu = record.mu
    logger.info('Running obstructions for %s at mu=%d, grid %d', record.name, mu, grid_order)

    criteria: List[CriterionResult] = []
    notes: List[str] = []
    genus_bound = 0
    collection = record_collection(record)
    if collection is not None:
        values = signature_values(record, grid_order, workers)
        genus_bound = max((abs(v.signature) for v in values if v.certified), default=0)
        criteria.append(signature_criterion(values))
        criteria.append(nullity_criterion(values, mu))
        criteria.append(alexander_criterion(collection, mu))
    else:
        sigma = _diagram_signature(record)
        if sigma is None:
            criteria.append(_result('S', STATUS_SKIPPED, f'needs Seifert data for mu={mu}'))
        elif sigma:
            criteria.append(_result('S', STATUS_OBSTRUCTED, f'sigma(1/2) = {sigma} from the diagram'))
        else:
            criteria.append(_result('S', STATUS_PASSED, 'sigma(1/2) = 0 from the diagram; other points need Seifert data'))
        genus_bound = abs(sigma or 0)
        criteria.append(_result('N', STATUS_SKIPPED, f'needs Seifert data for mu={mu}'))
        criteria.append(_result('A', STATUS_SKIPPED, f'needs Seifert data for mu={mu}'))
        notes.append('genus bound uses the diagram signature only' if sigma is not None else 'no signature data')

    weak = [cover_criterion(record), factorization_criterion(record), cross_section_criterion(record)]
    if mu > 1:
        weak = [
            CriterionResult(c.criterion, c.title, c.status, f'{c.witness} ({WEAK_NOTE})')
            if c.status == STATUS_OBSTRUCTED else c
            for c in weak
        ]
    criteria.extend(weak)
    criteria.append(strong_linking_criterion(record))

    report = ObstructionReport(record.name, mu, criteria, genus_bound, grid_order, notes)
    if report.obstructed and mu < record.components:
        notes.append(f'not {mu}-doubly slice, so not doubly slice for any finer colouring')
    if logger.isEnabledFor(logging.DEBUG):
        logger.debug('%s: %s', record.name, [(c.criterion, c.status) for c in criteria])
    return report


def grid_rows(values: Sequence[GridValue]) -> List[List[object]]:
    """CSV rows ``angles, sigma, eta, certified``."""
    return [[str(v.point), v.signature, '' if v.nullity is None else v.nullity, int(v.certified)] for v in values]
