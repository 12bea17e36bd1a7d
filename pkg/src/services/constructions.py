"""
Generators and constructions.

Pretzel links (parameters, diagrams, Seifert matrices of the even family and
the folding move on parameters), closed-braid Seifert matrices, conversion
of coloured boundary Seifert matrices to generalized Seifert collections,
the (2,0)-cable signature, and planted doubly isotropic inputs used to
exercise the vanishing theorems.
"""
from __future__ import annotations

import logging
import random
from typing import Callable, Dict, List, Optional, Sequence, Tuple, Union

from src.models.models import (
    ColouredBoundarySeifertMatrix,
    GeneralizedSeifertCollection,
    IsotropicFamily,
    LinkRecord,
    PretzelParams,
    sign_vectors,
)
from src.services.algebra import IntMatrix
from src.services.diagram import PDCode
from src.services.laurent import LaurentMatrix, LaurentPoly, TorusPoint

logger = logging.getLogger(__name__)


class UnsupportedConstructionError(ValueError):
    """The requested construction is not defined for these parameters."""


# Pretzel parameters ---------------------------------------------------------------

def fold_pretzel(params: PretzelParams, j: int) -> PretzelParams:
    """Replace a_j by a_j, -a_j, a_j (1-based ``j``)."""
    k = params.length
    if not 1 <= j <= k:
        raise UnsupportedConstructionError(f'fold index {j} outside 1..{k}')
    a = params.twists[j - 1]
    twists = params.twists[:j] + (-a, a) + params.twists[j:]
    note = f'folded from {params} at position {j}; inherits double sliceness and its quasi-orientation'
    return PretzelParams(twists, params.provenance + (note,))


_CCW = ('NE', 'NW', 'SW', 'SE')
_OPPOSITE = {'NE': 'SW', 'SW': 'NE', 'NW': 'SE', 'SE': 'NW'}


def _pretzel_wiring(twists: Sequence[int]) -> Dict[tuple, List[tuple]]:
    """
    Wire graph of the standard pretzel diagram.

    Crossing ports are ``(i, j, port)`` with j counted from the top of twist
    region i; terminal nodes ``('T', corner, i)`` mark the region corners so
    that empty regions become two vertical strands.
    """
    k = len(twists)
    wires: Dict[tuple, List[tuple]] = {}

    def join(u: tuple, v: tuple) -> None:
        wires.setdefault(u, []).append(v)
        wires.setdefault(v, []).append(u)

    for i, a in enumerate(twists):
        n = abs(a)
        corner = {name: ('T', name, i) for name in ('TL', 'TR', 'BL', 'BR')}
        if n == 0:
            join(corner['TL'], corner['BL'])
            join(corner['TR'], corner['BR'])
        else:
            join(corner['TL'], (i, 0, 'NW'))
            join(corner['TR'], (i, 0, 'NE'))
            join(corner['BL'], (i, n - 1, 'SW'))
            join(corner['BR'], (i, n - 1, 'SE'))
            for j in range(n - 1):
                join((i, j, 'SW'), (i, j + 1, 'NW'))
                join((i, j, 'SE'), (i, j + 1, 'NE'))
        join(('T', 'TR', i), ('T', 'TL', (i + 1) % k))
        join(('T', 'BR', i), ('T', 'BL', (i + 1) % k))
    return wires


def pretzel_pd(params: PretzelParams) -> PDCode:
    """
    The standard pretzel diagram: twist region i holds |a_i| crossings and
    a positive a_i puts the strand from NE to SW over.

    Strands are oriented so that every crossing port NE at the top of a
    region (or, failing that, SW at the bottom) is entered first; for even
    twists this makes both strands of each region anti-parallel, which is
    the orientation of the two-disc-and-bands Seifert surface.
    """
    twists = params.twists
    if all(a == 0 for a in twists):
        if len(twists) == 1:
            return PDCode(())
        raise UnsupportedConstructionError(f'{params} is a crossingless split unlink')

    wires = _pretzel_wiring(twists)
    terminals_seen = set()

    def partner(port: tuple) -> tuple:
        previous, current = port, wires[port][0]
        while current[0] == 'T':
            terminals_seen.add(current)
            step = wires[current]
            nxt = step[0] if step[0] != previous else step[1]
            previous, current = current, nxt
        return current

    ports = [(i, j, name) for i, a in enumerate(twists) for j in range(abs(a)) for name in _CCW]
    starts = (
        [(i, 0, 'NE') for i, a in enumerate(twists) if a]
        + [(i, abs(a) - 1, 'SW') for i, a in enumerate(twists) if a]
        + ports
    )
    labels: Dict[tuple, int] = {}
    entered: Dict[Tuple[int, int], List[str]] = {}
    next_label = 1
    for start in starts:
        if start in labels:
            continue
        current = start
        while True:
            i, j, name = current
            entered.setdefault((i, j), []).append(name)
            exit_port = (i, j, _OPPOSITE[name])
            arrival = partner(exit_port)
            labels[exit_port] = next_label
            labels[arrival] = next_label
            next_label += 1
            current = arrival
            if current == start:
                break
    if len(terminals_seen) != sum(1 for node in wires if node[0] == 'T'):
        raise UnsupportedConstructionError(f'{params} has a crossingless split component')

    crossings = []
    for i, a in enumerate(twists):
        under = ('NW', 'SE') if a > 0 else ('NE', 'SW')
        for j in range(abs(a)):
            incoming = next(name for name in entered[(i, j)] if name in under)
            offset = _CCW.index(incoming)
            order = _CCW[offset:] + _CCW[:offset]
            crossings.append(tuple(labels[(i, j, name)] for name in order))
    pd = PDCode(tuple(crossings))
    logger.debug('Built %s with %d crossings and %d components', params, pd.crossing_count, pd.num_components)
    return pd


def pretzel_even_seifert(params: PretzelParams) -> IntMatrix:
    """
    Seifert matrix of the two-disc-and-bands surface of an even pretzel link.

    The surface is planar, so the matrix is symmetric: V_ii = (a_i + a_{i+1})/2
    and V_{i,i+1} = V_{i+1,i} = -a_{i+1}/2 on the k-1 loops through
    consecutive bands.
    """
    if any(a % 2 for a in params.twists):
        raise UnsupportedConstructionError(f'{params} has an odd twist region')
    a = params.twists
    size = len(a) - 1
    rows = [[0] * size for _ in range(size)]
    for i in range(size):
        rows[i][i] = (a[i] + a[i + 1]) // 2
        if i + 1 < size:
            rows[i][i + 1] = rows[i + 1][i] = -a[i + 1] // 2
    return IntMatrix.from_rows(rows, cols=size)


def pretzel_components(params: PretzelParams) -> int:
    return pretzel_pd(params).num_components


def pretzel_record(params: PretzelParams) -> LinkRecord:
    """Catalog-style record for a generated pretzel link (one colour)."""
    pd = pretzel_pd(params)
    n = pd.num_components
    even = all(a % 2 == 0 for a in params.twists)
    provenance = {'pd': 'generated by pretzel_pd'}
    if even:
        provenance['seifert'] = 'two-disc-and-bands surface, folding orientation'
    if params.provenance:
        provenance['construction'] = '; '.join(params.provenance)
    return LinkRecord(
        name=str(params),
        components=n,
        mu=1,
        colouring=(1,) * n,
        pd=pd,
        seifert=pretzel_even_seifert(params) if even else None,
        orientation_tag='folding' if even else '',
        provenance=provenance,
    )


# Braids -----------------------------------------------------------------------------

def braid_seifert_matrix(word: Sequence[int]) -> IntMatrix:
    """
    Seifert matrix of the Seifert-algorithm surface of a closed braid.

    ``word`` lists signed generator indices (``2`` is sigma_2, ``-2`` its
    inverse). One homology generator sits between each letter and the next
    letter on the same generator.
    """
    word = [int(x) for x in word]
    if any(x == 0 for x in word):
        raise UnsupportedConstructionError('braid generators are numbered from 1')
    length = len(word)
    nxt = [0] * length
    for i, x in enumerate(word):
        nxt[i] = next((j for j in range(i + 1, length) if abs(word[j]) == abs(x)), 0)
    generators = [i for i in range(length) if nxt[i]]
    position = {g: k for k, g in enumerate(generators)}
    size = len(generators)
    rows = [[0] * size for _ in range(size)]

    def sign(value: int) -> int:
        return (value > 0) - (value < 0)

    for i in generators:
        hi = nxt[i]
        p = position[i]
        rows[p][p] = -sign(word[i] + word[hi])
        for j in generators:
            if j <= i or j > hi:
                continue
            q = position[j]
            if j == hi:
                if word[j] > 0:
                    rows[p][q] = 1
                else:
                    rows[q][p] = -1
            elif nxt[j] > hi:
                gap = abs(word[j]) - abs(word[i])
                if gap == 1:
                    rows[p][q] = 1
                elif gap == -1:
                    rows[q][p] = -1
    return IntMatrix.from_rows(rows, cols=size)


# Coloured boundary data ------------------------------------------------------------

def boundary_to_gsm(boundary: ColouredBoundarySeifertMatrix) -> GeneralizedSeifertCollection:
    """
    Generalized Seifert matrices of the disjoint surfaces of a boundary link:
    off-diagonal blocks never depend on eps, diagonal block i is A_ii when
    eps_i = -1 and its transpose when eps_i = +1.
    """
    mu = boundary.mu
    offsets = boundary.offsets()
    n = boundary.total_size
    matrices = {}
    for eps in sign_vectors(mu):
        rows = [[0] * n for _ in range(n)]
        for i in range(mu):
            for j in range(mu):
                block = boundary.blocks[(i, j)]
                if i == j and eps[i] > 0:
                    block = block.T
                for r in range(block.rows):
                    for c in range(block.cols):
                        rows[offsets[i] + r][offsets[j] + c] = block[r, c]
        matrices[eps] = IntMatrix.from_rows(rows, cols=n)
    return GeneralizedSeifertCollection(mu, n, mu, matrices)


# Satellites -------------------------------------------------------------------------

def cable_signature(sigma_k: Callable, w: Union[TorusPoint, complex]) -> int:
    """
    Signature at ``w`` of the parallel (2,0)-cable of K, as sigma_K(w^2).

    ``w`` is a one-coordinate torus point (exact) or a unit complex number.
    """
    if isinstance(w, TorusPoint):
        if w.num_vars != 1 or w.has_unit_coordinate:
            raise ValueError('the cable formula needs one coordinate different from 1')
        return sigma_k(w.power(2))
    if abs(complex(w) - 1) < 1e-12:
        raise ValueError('the cable formula is undefined at w = 1')
    return sigma_k(complex(w) ** 2)


# Planted inputs --------------------------------------------------------------------

def random_unimodular(rng: random.Random, n: int, steps: int = 12, bound: int = 1) -> Tuple[IntMatrix, IntMatrix]:
    """A random product of elementary matrices and its inverse."""
    u = [[int(i == j) for j in range(n)] for i in range(n)]
    inv = [[int(i == j) for j in range(n)] for i in range(n)]
    if n < 2:
        return IntMatrix.from_rows(u, cols=n), IntMatrix.from_rows(inv, cols=n)
    for _ in range(steps):
        i, j = rng.sample(range(n), 2)
        k = rng.choice([x for x in range(-bound, bound + 1) if x])
        # u <- u (I + k e_i e_j^T): column j += k * column i
        for row in u:
            row[j] += k * row[i]
        # inv <- (I - k e_i e_j^T) inv: row i -= k * row j
        inv[i] = [x - k * y for x, y in zip(inv[i], inv[j])]
    return IntMatrix.from_rows(u, cols=n), IntMatrix.from_rows(inv, cols=n)


def _random_block(rng: random.Random, rows: int, cols: int, bound: int) -> List[List[int]]:
    return [[rng.randint(-bound, bound) for _ in range(cols)] for _ in range(rows)]


def planted_doubly_isotropic(
    rng: random.Random,
    half_sizes: Sequence[int],
    bound: int = 2,
    mixing_steps: int = 0,
) -> Tuple[ColouredBoundarySeifertMatrix, IsotropicFamily, IsotropicFamily]:
    """
    A coloured boundary Seifert matrix with a known doubly isotropic pair.

    Colour i has size 2 m_i. In the standard basis every block has the
    shape [[0, X], [Y, 0]] with diagonal blocks [[0, X], [X^T - I, 0]], so
    the first and second halves are complementary isotropic families. With
    ``mixing_steps`` each colour is then re-based by a random unimodular
    matrix and the families are carried along.

    Returns ``(boundary, gplus, gminus)`` with gplus the second halves.
    """
    mu = len(half_sizes)
    sizes = [2 * m for m in half_sizes]
    blocks: Dict[Tuple[int, int], IntMatrix] = {}
    for i in range(mu):
        m = half_sizes[i]
        x = _random_block(rng, m, m, bound)
        y = [[x[c][r] - int(r == c) for c in range(m)] for r in range(m)]
        blocks[(i, i)] = _hyperbolic_block(m, m, x, y)
        for j in range(i + 1, mu):
            mj = half_sizes[j]
            block = _hyperbolic_block(m, mj, _random_block(rng, m, mj, bound), _random_block(rng, m, mj, bound))
            blocks[(i, j)] = block
            blocks[(j, i)] = block.T

    minus_cols, plus_cols = [], []
    for i in range(mu):
        u, u_inv = random_unimodular(rng, sizes[i], steps=mixing_steps)
        if mixing_steps:
            for j in range(mu):
                blocks[(i, j)] = u.T @ blocks[(i, j)]
                blocks[(j, i)] = blocks[(j, i)] @ u
        # families live in the coordinates of u^-1
        columns = u_inv.T.to_list()
        m = half_sizes[i]
        minus_cols.append(columns[:m])
        plus_cols.append(columns[m:])

    boundary = ColouredBoundarySeifertMatrix(mu, tuple(sizes), blocks)
    return (
        boundary,
        IsotropicFamily.from_columns(plus_cols, sizes),
        IsotropicFamily.from_columns(minus_cols, sizes),
    )


def _hyperbolic_block(m: int, n: int, x: List[List[int]], y: List[List[int]]) -> IntMatrix:
    rows = [[0] * n + list(x[r]) for r in range(m)]
    rows += [list(y[r]) + [0] * n for r in range(m)]
    return IntMatrix.from_rows(rows, cols=2 * n)


def planted_hyperbolic_cmatrix(rng: random.Random, mu: int, half: int, bound: int = 2) -> LaurentMatrix:
    """
    Bar-Hermitian matrix [[0, C], [bar(C)^T, 0]] conjugated by a random
    unimodular integer matrix; its signature vanishes at every torus point.
    """
    def random_poly() -> LaurentPoly:
        terms = []
        for _ in range(rng.randint(0, 3)):
            exponent = tuple(rng.randint(-1, 1) for _ in range(mu))
            terms.append((exponent, rng.randint(-bound, bound)))
        return LaurentPoly(mu, tuple(terms))

    c = [[random_poly() for _ in range(half)] for _ in range(half)]
    zero = LaurentPoly.zero(mu)
    rows = [[zero] * half + c[r] for r in range(half)]
    rows += [[c[col][r].bar() for col in range(half)] + [zero] * half for r in range(half)]
    h = LaurentMatrix.from_rows(mu, rows, cols=2 * half)
    u, _ = random_unimodular(rng, 2 * half, steps=2 * half)
    u_laurent = LaurentMatrix.from_int(u, mu)
    return u_laurent @ h @ u_laurent.T
