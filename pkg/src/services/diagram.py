"""
Planar diagram codes.

A crossing ``X[a,b,c,d]`` lists arc labels counterclockwise starting from
the incoming under-strand, so the under-strand runs ``a -> c``. The crossing
is positive when the over-strand runs ``d -> b``.

Regions are traced directly on the code: leaving crossing ``c`` through slot
``s`` and arriving at slot ``s'`` of the next crossing, the region on the
right continues through slot ``s' + 1``. Corner ``k`` of a crossing is the
region between slots ``k`` and ``k + 1``.
"""
from __future__ import annotations

import logging
import re
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple

from src.services.algebra import (
    AbelianGroupClass,
    IntMatrix,
    cokernel_group,
    exact_signature_symmetric,
)

logger = logging.getLogger(__name__)

Slot = Tuple[int, int]


class PDParseError(ValueError):
    """Malformed or inconsistent PD code; ``position`` is a text offset when known."""

    def __init__(self, message: str, position: Optional[int] = None, crossing: Optional[int] = None) -> None:
        where = f' (at position {position})' if position is not None else ''
        super().__init__(f'{message}{where}')
        self.message = message
        self.position = position
        self.crossing = crossing


class DisconnectedDiagramError(ValueError):
    """Raised by per-diagram constructions that need a connected projection."""


# PD code ----------------------------------------------------------------------

@dataclass(frozen=True)
class PDCode:
    """Validated planar diagram; component data is derived on construction."""

    crossings: Tuple[Tuple[int, int, int, int], ...] = ()
    components: Tuple[Tuple[int, ...], ...] = field(init=False, compare=False, repr=False)
    signs: Tuple[int, ...] = field(init=False, compare=False, repr=False)
    endpoints: Dict[int, Tuple[Slot, Slot]] = field(init=False, compare=False, repr=False)

    def __post_init__(self) -> None:
        crossings = tuple(tuple(int(v) for v in x) for x in self.crossings)
        for index, crossing in enumerate(crossings):
            if len(crossing) != 4:
                raise PDParseError(f'crossing {index + 1} does not have four labels', crossing=index)
        object.__setattr__(self, 'crossings', crossings)
        ends = _arc_endpoints(crossings)
        object.__setattr__(self, 'endpoints', ends)
        components, signs = _trace_components(crossings, ends)
        object.__setattr__(self, 'components', components)
        object.__setattr__(self, 'signs', signs)

    @property
    def crossing_count(self) -> int:
        return len(self.crossings)

    @property
    def num_components(self) -> int:
        return len(self.components)

    def partner(self, slot: Slot) -> Slot:
        """The other end of the arc leaving ``slot``."""
        c, s = slot
        first, second = self.endpoints[self.crossings[c][s]]
        return second if first == slot else first

    def component_of_arc(self, label: int) -> int:
        for index, arcs in enumerate(self.components):
            if label in arcs:
                return index
        raise KeyError(label)

    def mirror(self) -> 'PDCode':
        """Switch every crossing, keeping orientations."""
        flipped = []
        for (a, b, c, d), sign in zip(self.crossings, self.signs):
            flipped.append((d, a, b, c) if sign > 0 else (b, c, d, a))
        return PDCode(tuple(flipped))

    def pieces(self) -> List[List[int]]:
        """Crossing indices grouped by connected piece of the projection."""
        parent = list(range(len(self.crossings)))

        def find(x: int) -> int:
            while parent[x] != x:
                parent[x] = parent[parent[x]]
                x = parent[x]
            return x

        for (c1, _), (c2, _) in self.endpoints.values():
            parent[find(c1)] = find(c2)
        groups: Dict[int, List[int]] = {}
        for c in range(len(self.crossings)):
            groups.setdefault(find(c), []).append(c)
        return sorted(groups.values())

    def __str__(self) -> str:
        return 'PD[' + ', '.join('X[{},{},{},{}]'.format(*x) for x in self.crossings) + ']'


def _arc_endpoints(crossings) -> Dict[int, Tuple[Slot, Slot]]:
    ends: Dict[int, List[Slot]] = {}
    for c, crossing in enumerate(crossings):
        for s, label in enumerate(crossing):
            ends.setdefault(label, []).append((c, s))
    for label, slots in ends.items():
        if len(slots) != 2:
            raise PDParseError(
                f'arc multiplicity: label {label} occurs {len(slots)} times', crossing=slots[-1][0]
            )
    return {label: (slots[0], slots[1]) for label, slots in ends.items()}


def _trace_components(crossings, endpoints) -> Tuple[Tuple[Tuple[int, ...], ...], Tuple[int, ...]]:
    """Walk strands through crossings; orient by under-passages, else by label order."""
    if not crossings:
        return ((),), ()

    def partner(slot: Slot) -> Slot:
        first, second = endpoints[crossings[slot[0]][slot[1]]]
        return second if first == slot else first

    def walk(start: Slot) -> List[Slot]:
        entries, current = [], start
        while True:
            entries.append(current)
            if len(entries) > 4 * len(crossings):
                raise PDParseError('strand does not close up', crossing=start[0])
            c, s = current
            current = partner((c, (s + 2) % 4))
            if current == start:
                return entries

    seen = set()
    traced: List[List[Slot]] = []
    for c in range(len(crossings)):
        for s in (0, 2, 1, 3):
            if (c, s) in seen:
                continue
            loop = walk((c, s))
            slots = {slot for entry in loop for slot in (entry, (entry[0], (entry[1] + 2) % 4))}
            seen |= slots
            start = next((slot for slot in sorted(slots) if slot[1] == 0), None)
            if start is None:
                # over-strands only: orient by consecutive labels
                oc, _ = next(slot for slot in sorted(slots) if slot[1] in (1, 3))
                b, d = crossings[oc][1], crossings[oc][3]
                start = (oc, 3) if (b - d == 1 or d - b > 1) else (oc, 1)
            loop = walk(start)
            for entry in loop:
                if entry[1] == 2:
                    raise PDParseError('inconsistent orientation', crossing=entry[0])
            traced.append(loop)

    signs = [0] * len(crossings)
    components = []
    for loop in traced:
        for c, s in loop:
            if s == 3:
                signs[c] = 1
            elif s == 1:
                signs[c] = -1
        arcs = [crossings[c][s] for c, s in loop]
        low = arcs.index(min(arcs))
        components.append(tuple(arcs[low:] + arcs[:low]))
    components.sort(key=min)
    return tuple(components), tuple(signs)


# Parsing ----------------------------------------------------------------------

_TERM = re.compile(
    r'(X?)\s*([\(\[])\s*(-?\d+)\s*,\s*(-?\d+)\s*,\s*(-?\d+)\s*,\s*(-?\d+)\s*([\)\]])'
)
_SEPARATORS = re.compile(r'[\s,;]*')
_CLOSING = {'(': ')', '[': ']'}


def parse_pd(text: str) -> PDCode:
    """
    Parse ``X(a,b,c,d)`` terms separated by ``;`` or newlines, the bracket
    form ``PD[X[a,b,c,d], ...]`` or a nested list ``[[a,b,c,d], ...]``.
    Empty input is the crossingless unknot.
    """
    body, offset = text.strip(), len(text) - len(text.lstrip())
    if body.startswith('PD[') or (body.startswith('[') and body[1:].lstrip().startswith('[')) or body == '[]':
        head = 3 if body.startswith('PD[') else 1
        if not body.endswith(']'):
            raise PDParseError("missing closing ']'", offset + len(body))
        body, offset = body[head:-1], offset + head

    terms: List[Tuple[int, int, int, int]] = []
    starts: List[int] = []
    pos = _SEPARATORS.match(body, 0).end()
    while pos < len(body):
        match = _TERM.match(body, pos)
        if not match:
            raise PDParseError('expected a crossing X(a,b,c,d)', offset + pos)
        if _CLOSING[match.group(2)] != match.group(7):
            raise PDParseError('mismatched brackets', offset + match.start(7))
        terms.append(tuple(int(match.group(k)) for k in range(3, 7)))
        starts.append(offset + pos)
        pos = _SEPARATORS.match(body, match.end()).end()

    try:
        pd = PDCode(tuple(terms))
    except PDParseError as exc:
        position = starts[exc.crossing] if exc.crossing is not None and starts else None
        raise PDParseError(exc.message, position, exc.crossing) from None
    if logger.isEnabledFor(logging.DEBUG):
        logger.debug('Parsed PD code with %d crossings, %d components', pd.crossing_count, pd.num_components)
    return pd


# Component data -----------------------------------------------------------------

def components(pd: PDCode) -> Tuple[Tuple[int, ...], ...]:
    return pd.components


def crossing_signs(pd: PDCode) -> Tuple[int, ...]:
    return pd.signs


def linking_matrix(pd: PDCode) -> IntMatrix:
    """Half the signed count of crossings between each pair of components."""
    n = pd.num_components
    owner = {label: i for i, arcs in enumerate(pd.components) for label in arcs}
    counts = [[0] * n for _ in range(n)]
    for crossing, sign in zip(pd.crossings, pd.signs):
        under, over = owner[crossing[0]], owner[crossing[1]]
        if under != over:
            counts[under][over] += sign
            counts[over][under] += sign
    for i in range(n):
        for j in range(i + 1, n):
            if counts[i][j] % 2:
                raise PDParseError(f'components {i + 1} and {j + 1} meet in an odd signed crossing count {counts[i][j]}')
    return IntMatrix.from_rows([[value // 2 for value in row] for row in counts], cols=n)


# Checkerboard structure ----------------------------------------------------------

@dataclass(frozen=True)
class GoeritzData:
    """Goeritz form on white regions with one region deleted, plus the type II correction."""

    matrix: IntMatrix
    correction: int
    region_count: int


def _faces(pd: PDCode, piece: Sequence[int]) -> Tuple[List[List[Slot]], Dict[Slot, int]]:
    seen = set()
    faces: List[List[Slot]] = []
    face_of: Dict[Slot, int] = {}
    for c in piece:
        for s in range(4):
            dart = (c, s)
            if dart in seen:
                continue
            corners: List[Slot] = []
            while dart not in seen:
                seen.add(dart)
                arrival = pd.partner(dart)
                corners.append(arrival)
                face_of[arrival] = len(faces)
                dart = (arrival[0], (arrival[1] + 1) % 4)
            faces.append(corners)
    if len(faces) != len(piece) + 2:
        raise PDParseError(f'diagram is not planar: {len(faces)} regions for {len(piece)} crossings')
    return faces, face_of


def _checkerboard(piece: Sequence[int], faces, face_of: Dict[Slot, int]) -> List[int]:
    adjacent: Dict[int, set] = {f: set() for f in range(len(faces))}
    for c in piece:
        for k in range(4):
            f, g = face_of[(c, k)], face_of[(c, (k + 1) % 4)]
            adjacent[f].add(g)
            adjacent[g].add(f)
    colour = [-1] * len(faces)
    colour[face_of[(piece[0], 0)]] = 0
    queue = [face_of[(piece[0], 0)]]
    while queue:
        f = queue.pop()
        for g in adjacent[f]:
            if colour[g] == -1:
                colour[g] = 1 - colour[f]
                queue.append(g)
            elif colour[g] == colour[f]:
                raise PDParseError('regions admit no checkerboard colouring')
    return colour


def _goeritz_piece(pd: PDCode, piece: Sequence[int], white: int, deleted: int) -> GoeritzData:
    faces, face_of = _faces(pd, piece)
    colour = _checkerboard(piece, faces, face_of)
    regions = [f for f in range(len(faces)) if colour[f] == white]
    index = {f: i for i, f in enumerate(regions)}
    size = len(regions)
    full = [[0] * size for _ in range(size)]
    correction = 0
    for c in piece:
        white_corners = (1, 3) if colour[face_of[(c, 1)]] == white else (0, 2)
        weight = 1 if white_corners == (1, 3) else -1
        i, j = index[face_of[(c, white_corners[0])]], index[face_of[(c, white_corners[1])]]
        if i != j:
            full[i][j] += weight
            full[j][i] += weight
        mixed = (0, 2) if pd.signs[c] > 0 else (1, 3)
        if white_corners == mixed:
            correction += weight
    for i in range(size):
        full[i][i] = -sum(full[i][j] for j in range(size) if j != i)
    if not 0 <= deleted < size:
        raise IndexError(f'region {deleted} out of range for {size} white regions')
    keep = [i for i in range(size) if i != deleted]
    matrix = IntMatrix.from_rows([[full[i][j] for j in keep] for i in keep], cols=len(keep))
    return GoeritzData(matrix, correction, size)


def goeritz_data(pd: PDCode, white: int = 1, deleted: int = 0) -> GoeritzData:
    """
    Goeritz data for a connected diagram.

    ``white`` picks the colour class (0 is the class of corner 0 at the first
    crossing) and ``deleted`` the white region dropped from the full form.
    """
    if pd.crossing_count == 0:
        return GoeritzData(IntMatrix.zeros(0), 0, 1)
    pieces = pd.pieces()
    if len(pieces) > 1:
        raise DisconnectedDiagramError(
            f'diagram has {len(pieces)} split pieces; use branched_cover_group for split diagrams'
        )
    return _goeritz_piece(pd, pieces[0], white, deleted)


def goeritz_matrix(pd: PDCode, white: int = 1, deleted: int = 0) -> IntMatrix:
    return goeritz_data(pd, white, deleted).matrix


def murasugi_signature(pd: PDCode) -> int:
    """Signature of the Goeritz form corrected by the type II crossings."""
    data = goeritz_data(pd)
    return exact_signature_symmetric(data.matrix).signature + data.correction


def branched_cover_group(pd: PDCode) -> AbelianGroupClass:
    """H_1 of the double branched cover; split pieces add one free summand each."""
    if pd.crossing_count == 0:
        return AbelianGroupClass.trivial()
    pieces = pd.pieces()
    group = AbelianGroupClass(free_rank=len(pieces) - 1)
    for piece in pieces:
        group = group.direct_sum(cokernel_group(_goeritz_piece(pd, piece, 1, 0).matrix))
    return group


def determinant(pd: PDCode) -> int:
    """Link determinant; 0 for split diagrams."""
    if pd.crossing_count == 0:
        return 1
    if len(pd.pieces()) > 1:
        return 0
    return abs(goeritz_matrix(pd).determinant())
