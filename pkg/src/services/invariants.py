"""
Invariants computed from generalized Seifert data.

The C-complex matrix H(t) is assembled from the collection A^eps; its
signature and nullity on the torus give sigma_L and eta_L, its generic rank
gives the Alexander nullity. One-coloured Seifert matrices additionally give
Levine-Tristram signatures, the torsion Alexander polynomial and the double
branched cover with its linking form.
"""
from __future__ import annotations

import logging
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from itertools import product
from typing import Dict, List, Optional, Sequence, Tuple, Union

import numpy as np
from sympy import Poly, symbols
from sympy.polys.domains import QQ
from sympy.polys.matrices import DomainMatrix
from sympy.polys.matrices.normalforms import invariant_factors

from src.config import Config
from src.models.models import GeneralizedSeifertCollection, LinkingFormOnCoker, sign_vectors
from src.services.algebra import (
    AbelianGroupClass,
    IntMatrix,
    SignatureResult,
    cokernel_group,
    exact_signature_symmetric,
    hermitian_signature_numeric,
    is_perfect_square,
)
from src.services.laurent import LaurentMatrix, LaurentPoly, TorusPoint, generic_rank

logger = logging.getLogger(__name__)


class UncertifiedResultError(RuntimeError):
    """A numeric signature could not be certified at the requested point."""


class MissingDataError(LookupError):
    """The record lacks the data an invariant needs."""


# C-complex matrix -------------------------------------------------------------------

def assemble_cmatrix(collection: GeneralizedSeifertCollection) -> LaurentMatrix:
    """H = sum over eps of prod_i (1 - t_i^eps_i) A^eps."""
    mu, n = collection.mu, collection.size
    entries: List[Dict[Tuple[int, ...], int]] = [dict() for _ in range(n * n)]
    for eps in sign_vectors(mu):
        weight = LaurentPoly.constant(1, mu)
        for i, e in enumerate(eps):
            weight = weight * (1 - LaurentPoly.variable(i, mu, e))
        matrix = collection.matrix(eps)
        for slot, value in enumerate(matrix.entries):
            if not value:
                continue
            for exponent, coefficient in weight.terms:
                entries[slot][exponent] = entries[slot].get(exponent, 0) + value * coefficient
    return LaurentMatrix(mu, n, n, tuple(LaurentPoly.from_dict(mu, e) for e in entries))


# Signatures and nullities ---------------------------------------------------------------

def signature_result_at(h: LaurentMatrix, point: TorusPoint, tol: Optional[float] = None) -> SignatureResult:
    """
    Inertia of H at ``point``; exact when every angle is 0 or 1/2.

    Points with a coordinate equal to 1 return the conventional zero form.
    """
    if point.num_vars != h.num_vars:
        raise ValueError(f'point has {point.num_vars} coordinates, H has {h.num_vars} variables')
    if point.has_unit_coordinate:
        return SignatureResult(0, 0, h.rows, certified=True)
    if point.is_half_turn:
        return exact_signature_symmetric(h.evaluate_signs(point.signs()))
    result = hermitian_signature_numeric(h.evaluate(point), tol)
    if not result.certified:
        logger.warning('Uncertified numeric signature at %s', point)
    return result


def signature_at(h: LaurentMatrix, point: TorusPoint, tol: Optional[float] = None) -> int:
    """sigma_L at ``point``; raises UncertifiedResultError rather than guessing."""
    result = signature_result_at(h, point, tol)
    if not result.certified:
        raise UncertifiedResultError(f'signature at {point} is not certified')
    return result.signature


def nullity_at(h: LaurentMatrix, beta0: int, point: TorusPoint, tol: Optional[float] = None) -> int:
    """eta_L = null(H(omega)) + beta0 - 1, defined only off the coordinate circles omega_i = 1."""
    if point.has_unit_coordinate:
        raise ValueError(f'nullity is undefined at {point}: some coordinate equals 1')
    result = signature_result_at(h, point, tol)
    if not result.certified:
        raise UncertifiedResultError(f'nullity at {point} is not certified')
    return result.nullity + beta0 - 1


def _lt_matrix(seifert: IntMatrix, w: complex) -> np.ndarray:
    a = np.array(seifert.to_rows(), dtype=complex).reshape(seifert.rows, seifert.cols)
    return (1 - w) * a + (1 - np.conj(w)) * a.T


def lt_signature_result(seifert: IntMatrix, w: Union[TorusPoint, complex], tol: Optional[float] = None) -> SignatureResult:
    """Inertia of (1 - w) A + (1 - conj w) A^T."""
    if isinstance(w, TorusPoint):
        if w.num_vars != 1:
            raise ValueError('Levine-Tristram signatures take a single coordinate')
        if w.has_unit_coordinate:
            return SignatureResult(0, 0, seifert.rows, certified=True)
        if w.is_half_turn:
            return exact_signature_symmetric((seifert + seifert.T).scale(2))
        w = complex(w.values[0])
    elif abs(complex(w) - 1) < 1e-12:
        return SignatureResult(0, 0, seifert.rows, certified=True)
    return hermitian_signature_numeric(_lt_matrix(seifert, complex(w)), tol)


def lt_signature(seifert: IntMatrix, w: Union[TorusPoint, complex], tol: Optional[float] = None) -> int:
    result = lt_signature_result(seifert, w, tol)
    if not result.certified:
        raise UncertifiedResultError(f'Levine-Tristram signature at {w} is not certified')
    return result.signature


def lt_nullity(seifert: IntMatrix, w: Union[TorusPoint, complex], tol: Optional[float] = None) -> int:
    result = lt_signature_result(seifert, w, tol)
    if not result.certified:
        raise UncertifiedResultError(f'Levine-Tristram nullity at {w} is not certified')
    return result.nullity


# Grid evaluation ------------------------------------------------------------------------

@dataclass(frozen=True)
class GridValue:
    """sigma and eta at one torus point; ``eta`` is None where it is undefined."""

    point: TorusPoint
    signature: int
    nullity: Optional[int]
    certified: bool

    def to_dict(self) -> Dict[str, object]:
        return {
            'point': str(self.point),
            'sigma': self.signature,
            'eta': self.nullity,
            'certified': self.certified,
        }


def _grid_value(task: Tuple[LaurentMatrix, int, TorusPoint, Optional[float]]) -> GridValue:
    h, beta0, point, tol = task
    result = signature_result_at(h, point, tol)
    nullity = None if point.has_unit_coordinate else result.nullity + beta0 - 1
    return GridValue(point, result.signature, nullity, result.certified)


def evaluate_grid(
    h: LaurentMatrix,
    beta0: int,
    points: Sequence[TorusPoint],
    workers: Optional[int] = None,
    tol: Optional[float] = None,
) -> List[GridValue]:
    """Evaluate sigma and eta at every point; output order follows ``points``."""
    workers = Config.WORKERS if workers is None else workers
    tasks = [(h, beta0, point, tol) for point in points]
    if workers <= 1 or len(tasks) < 2:
        return [_grid_value(task) for task in tasks]
    chunk = max(1, len(tasks) // (4 * workers))
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(_grid_value, tasks, chunksize=chunk))


# Alexander data ---------------------------------------------------------------------------

def alexander_nullity(h: LaurentMatrix, beta0: int) -> int:
    """
    beta(L) = (N - generic rank of H) + beta0 - 1.

    Assumes H comes from a C-complex of the link.
    """
    return (h.rows - generic_rank(h)) + beta0 - 1


def _seifert_pencil(seifert: IntMatrix) -> LaurentMatrix:
    t = LaurentPoly.variable(0, 1)
    rows = []
    for i in range(seifert.rows):
        rows.append([t * seifert[i, j] - seifert[j, i] for j in range(seifert.cols)])
    return LaurentMatrix.from_rows(1, rows, cols=seifert.cols)


def _nonzero_invariant_product(pencil: LaurentMatrix) -> Poly:
    """Product of the non-zero invariant factors of the pencil over Q[t]."""
    t = symbols('t')
    ring = QQ[t]
    rows = [[ring.from_sympy(_exact_poly(p, t).as_expr()) for p in row] for row in pencil.to_rows()]
    result = Poly(1, t, domain='QQ')
    if not rows or not pencil.cols:
        return result
    for factor in invariant_factors(DomainMatrix(rows, (pencil.rows, pencil.cols), ring)):
        if factor:
            result = result * Poly(ring.to_sympy(factor), t, domain='QQ')
    return result


def _exact_poly(p: LaurentPoly, t) -> Poly:
    if p.is_zero():
        return Poly(0, t, domain='QQ')
    return Poly.from_dict({(exp[0],): c for exp, c in p.terms}, t, domain='QQ')


def torsion_alexander_1var(seifert: IntMatrix) -> LaurentPoly:
    """
    det(tA - A^T) in normal form (lowest exponent 0, positive leading
    coefficient). When the determinant vanishes the torsion order is the
    product of the non-zero invariant factors of tA - A^T over Q[t], made
    primitive.
    """
    if seifert.rows == 0:
        return LaurentPoly.constant(1, 1)
    pencil = _seifert_pencil(seifert)
    det = pencil.determinant()
    if not det.is_zero():
        return det.normalized()
    logger.info('det(tA - A^T) vanishes; using the torsion part of the Alexander module')
    _, integral = _nonzero_invariant_product(pencil).clear_denoms(convert=True)
    _, primitive = integral.primitive()
    return LaurentPoly.from_poly(primitive).normalized()


# Double branched cover ---------------------------------------------------------------------

def branched_cover_from_seifert(seifert: IntMatrix) -> AbelianGroupClass:
    """H_1 of the double branched cover, presented by A + A^T."""
    return cokernel_group(seifert + seifert.T)


@dataclass(frozen=True)
class MetaboliserResult:
    """
    Outcome of the metaboliser search: ``found`` (with generators in
    invariant-factor coordinates), ``none`` or ``inconclusive``.
    """

    status: str
    generators: Tuple[Tuple[int, ...], ...] = ()
    note: str = ''

    @property
    def found(self) -> bool:
        return self.status == 'found'

    def to_dict(self) -> Dict[str, object]:
        return {'status': self.status, 'generators': [list(g) for g in self.generators], 'note': self.note}


def metaboliser_search(form: LinkingFormOnCoker, max_order: Optional[int] = None) -> MetaboliserResult:
    """
    Look for a subgroup of order sqrt|G| on which the linking form vanishes.

    Only self-isotropic elements are used as generators, and each new
    generator must pair trivially with the ones already chosen.
    """
    max_order = Config.METABOLISER_MAX_ORDER if max_order is None else max_order
    order = form.order
    if order is None:
        raise ValueError('metaboliser search needs a finite group')
    if order > max_order:
        logger.warning('Metaboliser search skipped: |G| = %d exceeds %d', order, max_order)
        return MetaboliserResult('inconclusive', note=f'group order {order} exceeds bound {max_order}')
    if not is_perfect_square(order):
        return MetaboliserResult('none', note=f'group order {order} is not a square')
    target = math.isqrt(order)
    if target == 1:
        return MetaboliserResult('found', note='trivial group')

    factors = [form.diagonal[k] for k in form.cyclic_slots]
    rank = len(factors)
    basis_pairing = [
        [form.pairing_on_classes(_unit(k, rank), _unit(l, rank)) for l in range(rank)]
        for k in range(rank)
    ]

    def pair(x: Sequence[int], y: Sequence[int]) -> Fraction:
        total = Fraction(0)
        for k in range(rank):
            if x[k]:
                for l in range(rank):
                    if y[l]:
                        total += x[k] * y[l] * basis_pairing[k][l]
        return total % 1

    def add(x: Sequence[int], y: Sequence[int]) -> Tuple[int, ...]:
        return tuple((a + b) % d for a, b, d in zip(x, y, factors))

    zero = (0,) * rank
    isotropic = [x for x in product(*(range(d) for d in factors)) if x != zero and pair(x, x) == 0]
    if logger.isEnabledFor(logging.DEBUG):
        logger.debug('Metaboliser search: |G|=%d, %d self-isotropic elements', order, len(isotropic))

    visited = set()

    def extend(subgroup: frozenset, generators: List[Tuple[int, ...]]) -> Optional[List[Tuple[int, ...]]]:
        if len(subgroup) == target:
            return generators
        if subgroup in visited:
            return None
        visited.add(subgroup)
        for x in isotropic:
            if x in subgroup or any(pair(x, g) != 0 for g in generators):
                continue
            grown = set(subgroup)
            multiple = x
            while multiple not in subgroup:
                grown.update(add(s, multiple) for s in subgroup)
                multiple = add(multiple, x)
            if len(grown) > target or target % len(grown):
                continue
            found = extend(frozenset(grown), generators + [x])
            if found is not None:
                return found
        return None

    generators = extend(frozenset([zero]), [])
    if generators is None:
        return MetaboliserResult('none', note='exhaustive search over isotropic subgroups')
    return MetaboliserResult('found', tuple(generators))


def _unit(k: int, rank: int) -> Tuple[int, ...]:
    return tuple(int(i == k) for i in range(rank))
