"""
Doubly isotropic families for coloured boundary Seifert matrices.

A family G = (G_1, ..., G_mu) of direct summands G_i of Z^{a_i} is
isotropic when every block A_ij vanishes on G_i x G_j. Two isotropic
families are a doubly isotropic pair when G+_i and G-_i are complementary
for every colour.
"""
from __future__ import annotations

import logging
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from itertools import product
from math import gcd
from typing import Dict, List, Optional, Sequence, Tuple

from src.config import Config
from src.models.models import ColouredBoundarySeifertMatrix, IsotropicFamily
from src.services.algebra import IntMatrix, exact_signature_symmetric, is_perfect_square, smith_normal_form
from src.services.constructions import boundary_to_gsm
from src.services.invariants import assemble_cmatrix
from src.services.laurent import TorusPoint

logger = logging.getLogger(__name__)

STATUS_FOUND = 'found'
STATUS_NONE_WITHIN_BOUND = 'none_within_bound'
STATUS_CERTIFIED_NONE = 'certified_none'


class SearchBoundError(RuntimeError):
    """The search space exceeds the configured size bound."""


@dataclass(frozen=True)
class IsotropyResult:
    """
    Outcome of a doubly isotropic search. ``searched`` describes the space
    that was covered, so a negative answer says what it is relative to.
    """

    status: str
    plus: Optional[IsotropicFamily] = None
    minus: Optional[IsotropicFamily] = None
    searched: str = ''
    note: str = ''

    @property
    def found(self) -> bool:
        return self.status == STATUS_FOUND

    def to_dict(self) -> Dict[str, object]:
        return {
            'status': self.status,
            'plus': self.plus.to_dict() if self.plus is not None else None,
            'minus': self.minus.to_dict() if self.minus is not None else None,
            'searched': self.searched,
            'note': self.note,
        }


# Predicates -----------------------------------------------------------------------

def _bilinear(u: Sequence[int], block: IntMatrix, v: Sequence[int]) -> int:
    total = 0
    for r, ur in enumerate(u):
        if ur:
            total += ur * sum(block[r, c] * vc for c, vc in enumerate(v) if vc)
    return total


def _spans_summand(columns: Sequence[Sequence[int]]) -> bool:
    """Linearly independent and a direct summand: the Smith diagonal is all ones."""
    if not columns:
        return True
    diagonal, rank = smith_normal_form(IntMatrix.from_rows(columns))
    return rank == len(columns) and all(d == 1 for d in diagonal)


def is_isotropic_family(boundary: ColouredBoundarySeifertMatrix, family: IsotropicFamily) -> bool:
    if len(family.bases) != boundary.mu:
        raise ValueError(f'family has {len(family.bases)} colours, boundary data has {boundary.mu}')
    for i, basis in enumerate(family.bases):
        if basis.rows != boundary.block_sizes[i]:
            raise ValueError(f'basis {i + 1} has {basis.rows} rows, block size is {boundary.block_sizes[i]}')
        if not _spans_summand(family.columns(i)):
            return False
    for i in range(boundary.mu):
        for j in range(boundary.mu):
            restricted = family.bases[i].T @ boundary.blocks[(i, j)] @ family.bases[j]
            if not restricted.is_zero():
                return False
    return True


def is_doubly_isotropic(
    boundary: ColouredBoundarySeifertMatrix,
    plus: IsotropicFamily,
    minus: IsotropicFamily,
) -> bool:
    if not (is_isotropic_family(boundary, plus) and is_isotropic_family(boundary, minus)):
        return False
    for i in range(boundary.mu):
        combined = plus.bases[i].hstack(minus.bases[i])
        if not combined.is_square or abs(combined.determinant()) != 1:
            return False
    return True


def knot_block_hyperbolic_check(seifert: IntMatrix, plus: IntMatrix, minus: IntMatrix) -> bool:
    """
    For a Seifert matrix A with A - A^T non-singular: do the columns of
    ``plus`` and ``minus`` span complementary half-rank isotropic summands?
    """
    if (seifert - seifert.T).determinant() == 0:
        raise ValueError('A - A^T is singular; this is not a knot block')
    half = seifert.rows // 2
    if plus.cols != half or minus.cols != half:
        return False
    for basis in (plus, minus):
        if not (basis.T @ seifert @ basis).is_zero():
            return False
    return abs(plus.hstack(minus).determinant()) == 1


# Certificates of non-existence -------------------------------------------------------------

def _certify_none(boundary: ColouredBoundarySeifertMatrix) -> Optional[str]:
    """Reason no doubly isotropic pair can exist, or None."""
    h = assemble_cmatrix(boundary_to_gsm(boundary))
    sigma = exact_signature_symmetric(h.evaluate_signs(TorusPoint.minus_one(boundary.mu).signs())).signature
    if sigma:
        return f'signature {sigma} at (-1,...,-1) is non-zero'
    for i in range(boundary.mu):
        block = boundary.blocks[(i, i)]
        if block.rows and abs((block - block.T).determinant()) == 1:
            det = abs((block + block.T).determinant())
            if not is_perfect_square(det):
                return f'knot block {i + 1} has determinant {det}, not a square'
    return None


# Search -------------------------------------------------------------------------------------

def _candidates(size: int, bound: int) -> List[Tuple[int, ...]]:
    """Primitive vectors with first non-zero entry positive, by max-norm then lexicographically."""
    vectors = []
    for v in product(range(-bound, bound + 1), repeat=size):
        lead = next((x for x in v if x), 0)
        if lead <= 0:
            continue
        g = 0
        for x in v:
            g = gcd(g, x)
        if g == 1:
            vectors.append(v)
    vectors.sort(key=lambda v: (max(abs(x) for x in v), v))
    return vectors


def _is_knot_block(block: IntMatrix) -> bool:
    return block.rows > 0 and (block - block.T).determinant() != 0


def _rank_splits(boundary: ColouredBoundarySeifertMatrix) -> List[Tuple[int, ...]]:
    """
    Plus ranks per colour, half rank first. Knot blocks only allow half
    rank; other blocks allow every split of a_i.
    """
    choices = []
    for i, a in enumerate(boundary.block_sizes):
        if _is_knot_block(boundary.blocks[(i, i)]):
            choices.append([a // 2])
        else:
            choices.append(sorted(range(a + 1), key=lambda r, a=a: (abs(2 * r - a), r)))
    return sorted(product(*choices), key=lambda ranks: (
        sum(abs(2 * r - a) for r, a in zip(ranks, boundary.block_sizes)), ranks))


class _Search:
    """Backtracking over basis vectors, colour by colour, plus part before minus part."""

    def __init__(self, boundary: ColouredBoundarySeifertMatrix, bound: int, ranks: Sequence[int]) -> None:
        self.boundary = boundary
        self.candidates = [_candidates(a, bound) for a in boundary.block_sizes]
        # slots: (colour, family) where family 0 is plus and 1 is minus
        self.slots: List[Tuple[int, int]] = []
        for i, (a, r) in enumerate(zip(boundary.block_sizes, ranks)):
            self.slots += [(i, 0)] * r + [(i, 1)] * (a - r)

    def compatible(self, chosen: List[Tuple[int, int, Tuple[int, ...]]], colour: int, family: int, v: Tuple[int, ...]) -> bool:
        blocks = self.boundary.blocks
        if _bilinear(v, blocks[(colour, colour)], v):
            return False
        for other_colour, other_family, u in chosen:
            if other_family != family:
                continue
            if _bilinear(v, blocks[(colour, other_colour)], u) or _bilinear(u, blocks[(other_colour, colour)], v):
                return False
        same_colour = [u for c, _, u in chosen if c == colour] + [v]
        return _spans_summand(same_colour)

    def run(self, prefix: List[Tuple[int, int, Tuple[int, ...]]]) -> Optional[List[Tuple[int, int, Tuple[int, ...]]]]:
        depth = len(prefix)
        if depth == len(self.slots):
            return prefix
        colour, family = self.slots[depth]
        previous = prefix[-1] if prefix and prefix[-1][:2] == (colour, family) else None
        start = self.candidates[colour].index(previous[2]) + 1 if previous else 0
        for v in self.candidates[colour][start:]:
            if not self.compatible(prefix, colour, family, v):
                continue
            found = self.run(prefix + [(colour, family, v)])
            if found is not None:
                return found
        return None

    def first_choices(self) -> List[Tuple[int, int, Tuple[int, ...]]]:
        colour, family = self.slots[0]
        return [(colour, family, v) for v in self.candidates[colour] if self.compatible([], colour, family, v)]


def _run_branch(task: Tuple[ColouredBoundarySeifertMatrix, int, Tuple[int, ...], Tuple[int, int, Tuple[int, ...]]]):
    boundary, bound, ranks, first = task
    return _Search(boundary, bound, ranks).run([first])


def _search_split(
    boundary: ColouredBoundarySeifertMatrix,
    bound: int,
    ranks: Tuple[int, ...],
    workers: int,
) -> Optional[List[Tuple[int, int, Tuple[int, ...]]]]:
    search = _Search(boundary, bound, ranks)
    if logger.isEnabledFor(logging.DEBUG):
        logger.debug('Isotropy search: plus ranks %s, candidate counts %s', list(ranks), [len(c) for c in search.candidates])
    firsts = search.first_choices()
    if workers > 1 and len(firsts) > 1:
        tasks = [(boundary, bound, ranks, first) for first in firsts]
        with ProcessPoolExecutor(max_workers=workers) as pool:
            return next((r for r in pool.map(_run_branch, tasks) if r is not None), None)
    return next((r for r in (search.run([first]) for first in firsts) if r is not None), None)


def search_doubly_isotropic(
    boundary: ColouredBoundarySeifertMatrix,
    coeff_bound: Optional[int] = None,
    workers: Optional[int] = None,
) -> IsotropyResult:
    """
    Look for a doubly isotropic pair using basis vectors with entries in
    [-bound, bound].

    Colour i may split as rank r plus a_i - r minus for any r; knot blocks
    (A_ii - A_ii^T non-singular) only split in half. Splits closest to half
    rank are tried first. The reported witness is the least one in
    candidate order for the first split that has one, also when the first
    choices are spread over worker processes.
    """
    bound = Config.ISOTROPY_COEFF_BOUND if coeff_bound is None else coeff_bound
    workers = Config.WORKERS if workers is None else workers
    size = boundary.total_size
    if size > Config.ISOTROPY_MAX_SIZE:
        raise SearchBoundError(f'total size {size} exceeds the search bound {Config.ISOTROPY_MAX_SIZE}')
    searched = f'sizes {list(boundary.block_sizes)}, coefficients in [-{bound}, {bound}], matrix {boundary.as_matrix().to_list()}'

    reason = _certify_none(boundary)
    if reason is not None:
        logger.info('No doubly isotropic pair: %s', reason)
        return IsotropyResult(STATUS_CERTIFIED_NONE, searched=searched, note=reason)
    if size == 0:
        trivial = IsotropicFamily.trivial(boundary.block_sizes)
        return IsotropyResult(STATUS_FOUND, trivial, trivial, searched=searched)

    splits = _rank_splits(boundary)
    witness = None
    for ranks in splits:
        witness = _search_split(boundary, bound, ranks, workers)
        if witness is not None:
            break
    if witness is None:
        return IsotropyResult(STATUS_NONE_WITHIN_BOUND, searched=searched, note=f'{len(splits)} rank splits tried')
    sizes = boundary.block_sizes
    plus_cols = [[list(v) for c, f, v in witness if c == i and f == 0] for i in range(boundary.mu)]
    minus_cols = [[list(v) for c, f, v in witness if c == i and f == 1] for i in range(boundary.mu)]
    return IsotropyResult(
        STATUS_FOUND,
        IsotropicFamily.from_columns(plus_cols, sizes),
        IsotropicFamily.from_columns(minus_cols, sizes),
        searched=searched,
    )
