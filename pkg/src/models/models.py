"""
Record types shared by the services, the catalog layer and the CLI.

Each type validates its invariants on construction and raises
``InvalidDataError`` when they fail; ``to_dict`` produces the JSON-ready
form used by the catalog and by report output.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from itertools import product
from typing import Dict, List, Optional, Sequence, Tuple

from src.services.algebra import (
    AbelianGroupClass,
    IntMatrix,
    RatMatrix,
    cokernel_group,
    smith_normal_form,
    smith_with_transform,
)
from src.services.diagram import PDCode

SignVector = Tuple[int, ...]

STATUS_OBSTRUCTED = 'obstructed'
STATUS_PASSED = 'passed'
STATUS_INCONCLUSIVE = 'inconclusive'
STATUS_SKIPPED = 'skipped'

VERDICT_OBSTRUCTED = 'obstructed'
VERDICT_CLEAR = 'no abelian obstruction'


class InvalidDataError(ValueError):
    """A record violates one of its structural invariants."""


def sign_vectors(mu: int) -> List[SignVector]:
    """All of {-1, +1}^mu in a fixed order (``-`` before ``+``)."""
    return [tuple(v) for v in product((-1, 1), repeat=mu)]


def sign_key(eps: SignVector) -> str:
    return ''.join('-' if e < 0 else '+' for e in eps)


def parse_sign_key(key: str) -> SignVector:
    if not key or any(ch not in '+-' for ch in key):
        raise InvalidDataError(f'invalid sign vector key {key!r}')
    return tuple(-1 if ch == '-' else 1 for ch in key)


def _matrix(rows, label: str) -> IntMatrix:
    if isinstance(rows, IntMatrix):
        return rows
    try:
        return IntMatrix.from_rows(rows)
    except (TypeError, ValueError) as exc:
        raise InvalidDataError(f'{label}: {exc}') from exc


# Seifert-type data ------------------------------------------------------------------

@dataclass(eq=True)
class GeneralizedSeifertCollection:
    """
    The 2^mu matrices A^eps of a C-complex with N = ``size`` and
    ``beta0`` connected pieces.

    Invariants: every sign vector is present, each matrix is N x N and
    ``A^-eps`` is the transpose of ``A^eps``.
    """

    mu: int
    size: int
    beta0: int
    matrices: Dict[SignVector, IntMatrix]

    def __post_init__(self) -> None:
        if self.mu < 1:
            raise InvalidDataError('a collection needs mu >= 1')
        if self.beta0 < 1:
            raise InvalidDataError('beta0 must be at least 1')
        expected = set(sign_vectors(self.mu))
        if set(self.matrices) != expected:
            missing = sorted(sign_key(e) for e in expected - set(self.matrices))
            raise InvalidDataError(f'sign vectors missing or unexpected: {missing}')
        for eps, matrix in self.matrices.items():
            if matrix.shape != (self.size, self.size):
                raise InvalidDataError(f'A^{sign_key(eps)} has shape {matrix.shape}, expected N={self.size}')
        for eps, matrix in self.matrices.items():
            opposite = tuple(-e for e in eps)
            if self.matrices[opposite] != matrix.T:
                raise InvalidDataError(
                    f'A^{sign_key(opposite)} is not the transpose of A^{sign_key(eps)}'
                )

    @classmethod
    def from_seifert(cls, seifert: IntMatrix) -> 'GeneralizedSeifertCollection':
        """One-coloured collection of a connected Seifert surface: A^- = A, A^+ = A^T."""
        if not seifert.is_square:
            raise InvalidDataError('a Seifert matrix must be square')
        return cls(1, seifert.rows, 1, {(-1,): seifert, (1,): seifert.T})

    def matrix(self, eps: Sequence[int]) -> IntMatrix:
        return self.matrices[tuple(eps)]

    def to_dict(self) -> Dict[str, object]:
        return {
            'mu': self.mu,
            'size': self.size,
            'beta0': self.beta0,
            'matrices': {sign_key(eps): self.matrices[eps].to_list() for eps in sign_vectors(self.mu)},
        }

    @classmethod
    def from_dict(cls, data: Dict[str, object]) -> 'GeneralizedSeifertCollection':
        try:
            mu, size, beta0 = int(data['mu']), int(data['size']), int(data['beta0'])
            raw = data['matrices']
        except (KeyError, TypeError, ValueError) as exc:
            raise InvalidDataError(f'gsm needs integer mu, size, beta0 and matrices ({exc})') from exc
        matrices = {
            parse_sign_key(key): _matrix(rows, f'gsm matrix {key}') if rows else IntMatrix.zeros(size)
            for key, rows in raw.items()
        }
        return cls(mu, size, beta0, matrices)


@dataclass(eq=True)
class ColouredBoundarySeifertMatrix:
    """
    Block matrix (A_ij) of a coloured boundary link, block i of size a_i.

    Off-diagonal blocks satisfy A_ij = A_ji^T; each A_ii - A_ii^T must be
    unimodular plus zero, as it is for a Seifert matrix.
    """

    mu: int
    block_sizes: Tuple[int, ...]
    blocks: Dict[Tuple[int, int], IntMatrix]

    def __post_init__(self) -> None:
        self.block_sizes = tuple(int(a) for a in self.block_sizes)
        if len(self.block_sizes) != self.mu or self.mu < 1:
            raise InvalidDataError('one block size per colour is required')
        for i in range(self.mu):
            for j in range(self.mu):
                block = self.blocks.get((i, j))
                if block is None:
                    raise InvalidDataError(f'block A_{i + 1}{j + 1} is missing')
                if block.shape != (self.block_sizes[i], self.block_sizes[j]):
                    raise InvalidDataError(f'block A_{i + 1}{j + 1} has shape {block.shape}')
        for i in range(self.mu):
            for j in range(i + 1, self.mu):
                if self.blocks[(i, j)] != self.blocks[(j, i)].T:
                    raise InvalidDataError(f'A_{i + 1}{j + 1} differs from the transpose of A_{j + 1}{i + 1}')
        for i in range(self.mu):
            diagonal, _ = smith_normal_form(self.blocks[(i, i)] - self.blocks[(i, i)].T)
            if any(d != 1 for d in diagonal):
                raise InvalidDataError(f'A_{i + 1}{i + 1} - transpose is not unimodular plus zero')

    @classmethod
    def from_seifert(cls, seifert: IntMatrix) -> 'ColouredBoundarySeifertMatrix':
        return cls(1, (seifert.rows,), {(0, 0): seifert})

    @property
    def total_size(self) -> int:
        return sum(self.block_sizes)

    def offsets(self) -> List[int]:
        offsets, running = [], 0
        for a in self.block_sizes:
            offsets.append(running)
            running += a
        return offsets

    def as_matrix(self) -> IntMatrix:
        """All blocks assembled into one square matrix."""
        rows = []
        for i in range(self.mu):
            for r in range(self.block_sizes[i]):
                row = []
                for j in range(self.mu):
                    row.extend(self.blocks[(i, j)].row(r))
                rows.append(row)
        return IntMatrix.from_rows(rows, cols=self.total_size)

    def to_dict(self) -> Dict[str, object]:
        return {
            'mu': self.mu,
            'block_sizes': list(self.block_sizes),
            'blocks': [[self.blocks[(i, j)].to_list() for j in range(self.mu)] for i in range(self.mu)],
        }

    @classmethod
    def from_dict(cls, data: Dict[str, object]) -> 'ColouredBoundarySeifertMatrix':
        try:
            mu = int(data['mu'])
            sizes = tuple(int(a) for a in data['block_sizes'])
            raw = data['blocks']
            blocks = {}
            for i in range(mu):
                for j in range(mu):
                    rows = raw[i][j]
                    blocks[(i, j)] = IntMatrix.from_rows(rows, cols=sizes[j]) if rows else IntMatrix.zeros(sizes[i], sizes[j])
        except (KeyError, IndexError, TypeError, ValueError) as exc:
            raise InvalidDataError(f'malformed boundary data ({exc})') from exc
        return cls(mu, sizes, blocks)


@dataclass(frozen=True)
class PretzelParams:
    """P(a_1, ..., a_k); ``provenance`` records how the parameters were produced."""

    twists: Tuple[int, ...]
    provenance: Tuple[str, ...] = field(default=(), compare=False)

    def __post_init__(self) -> None:
        object.__setattr__(self, 'twists', tuple(int(a) for a in self.twists))
        if not self.twists:
            raise InvalidDataError('a pretzel link needs at least one twist region')

    @classmethod
    def parse(cls, text: str) -> 'PretzelParams':
        body = text.strip()
        if body.upper().startswith('P(') and body.endswith(')'):
            body = body[2:-1]
        try:
            return cls(tuple(int(part) for part in body.split(',')))
        except ValueError as exc:
            raise InvalidDataError(f'invalid pretzel parameters {text!r}: expected P(a1,...,ak)') from exc

    @property
    def length(self) -> int:
        return len(self.twists)

    def __str__(self) -> str:
        return 'P(' + ','.join(str(a) for a in self.twists) + ')'

    def to_dict(self) -> Dict[str, object]:
        return {'twists': list(self.twists), 'provenance': list(self.provenance)}


@dataclass(frozen=True)
class IsotropicFamily:
    """Per-colour basis matrices B_i whose columns span G_i."""

    bases: Tuple[IntMatrix, ...]

    @classmethod
    def trivial(cls, block_sizes: Sequence[int]) -> 'IsotropicFamily':
        return cls(tuple(IntMatrix.zeros(a, 0) for a in block_sizes))

    @classmethod
    def from_columns(cls, columns_per_colour: Sequence[Sequence[Sequence[int]]], block_sizes: Sequence[int]) -> 'IsotropicFamily':
        bases = []
        for columns, size in zip(columns_per_colour, block_sizes):
            if not columns:
                bases.append(IntMatrix.zeros(size, 0))
            else:
                bases.append(IntMatrix.from_rows(columns).T)
        return cls(tuple(bases))

    @property
    def ranks(self) -> Tuple[int, ...]:
        return tuple(b.cols for b in self.bases)

    def columns(self, colour: int) -> List[List[int]]:
        return self.bases[colour].T.to_list()

    def to_dict(self) -> Dict[str, object]:
        return {'columns': [self.columns(i) for i in range(len(self.bases))]}


# Linking form ---------------------------------------------------------------------

@dataclass(frozen=True)
class LinkingFormOnCoker:
    """
    The Q/Z-valued form ``([x], [y]) -> y^T M^-1 x`` on coker(M) for a
    symmetric non-singular integer presentation M.

    Classes are written in invariant-factor coordinates: ``x`` maps to
    ``P x mod D`` where ``P M Q = D`` is a Smith form.
    """

    presentation: IntMatrix
    group: AbelianGroupClass
    diagonal: Tuple[int, ...] = field(compare=False, repr=False)
    left: IntMatrix = field(compare=False, repr=False)
    left_inverse: IntMatrix = field(compare=False, repr=False)
    inverse: RatMatrix = field(compare=False, repr=False)

    @classmethod
    def from_presentation(cls, presentation: IntMatrix) -> 'LinkingFormOnCoker':
        if not presentation.is_square or not presentation.is_symmetric():
            raise InvalidDataError('a linking form needs a symmetric square presentation')
        if presentation.rows and presentation.determinant() == 0:
            raise InvalidDataError('a linking form needs a non-singular presentation')
        diagonal, left, left_inverse = smith_with_transform(presentation)
        return cls(
            presentation=presentation,
            group=cokernel_group(presentation),
            diagonal=tuple(diagonal),
            left=left,
            left_inverse=left_inverse,
            inverse=RatMatrix.from_int(presentation).inverse() if presentation.rows else RatMatrix.from_rows([], cols=0),
        )

    @property
    def order(self) -> int:
        return self.group.order

    @property
    def cyclic_slots(self) -> List[int]:
        """Indices of Smith coordinates with factor > 1."""
        return [k for k, d in enumerate(self.diagonal) if d > 1]

    def representative(self, coordinates: Sequence[int]) -> List[int]:
        """Vector in Z^n whose class has the given invariant-factor coordinates."""
        full = [0] * self.presentation.rows
        for k, value in zip(self.cyclic_slots, coordinates):
            full[k] = value
        return [sum(self.left_inverse[i, k] * full[k] for k in range(len(full))) for i in range(len(full))]

    def coordinates(self, vector: Sequence[int]) -> Tuple[int, ...]:
        n = self.presentation.rows
        image = [sum(self.left[i, k] * vector[k] for k in range(n)) for i in range(n)]
        return tuple(image[k] % self.diagonal[k] for k in self.cyclic_slots)

    def pairing(self, x: Sequence[int], y: Sequence[int]) -> Fraction:
        """lambda([x], [y]) in [0, 1)."""
        n = self.presentation.rows
        total = Fraction(0)
        for i in range(n):
            if y[i]:
                total += y[i] * sum((self.inverse[i, j] * x[j] for j in range(n)), Fraction(0))
        return total % 1

    def pairing_on_classes(self, a: Sequence[int], b: Sequence[int]) -> Fraction:
        return self.pairing(self.representative(a), self.representative(b))

    def to_dict(self) -> Dict[str, object]:
        return {'presentation': self.presentation.to_list(), 'group': str(self.group)}


# Link records and reports -------------------------------------------------------------

@dataclass
class LinkRecord:
    """
    One catalog entry: an oriented link with a colouring and whatever data
    the sources provide. ``colouring[i]`` is the colour (1..mu) of component i.
    """

    name: str
    components: int
    mu: int
    colouring: Tuple[int, ...]
    pd: Optional[PDCode] = None
    seifert: Optional[IntMatrix] = None
    gsm: Optional[GeneralizedSeifertCollection] = None
    linking: Optional[IntMatrix] = None
    orientation_tag: str = ''
    provenance: Dict[str, str] = field(default_factory=dict)
    cover_presentation: Optional[IntMatrix] = None
    component_seifert: Optional[Tuple[IntMatrix, ...]] = None
    boundary: Optional[ColouredBoundarySeifertMatrix] = None

    def __post_init__(self) -> None:
        self.colouring = tuple(int(c) for c in self.colouring)
        if not self.name:
            raise InvalidDataError('a record needs a name')
        if self.components < 1 or self.mu < 1:
            raise InvalidDataError(f'{self.name}: components and mu must be positive')
        if len(self.colouring) != self.components:
            raise InvalidDataError(f'{self.name}: colouring has {len(self.colouring)} entries for {self.components} components')
        if set(self.colouring) != set(range(1, self.mu + 1)):
            raise InvalidDataError(f'{self.name}: colouring is not onto colours 1..{self.mu}')
        if self.pd is not None and self.pd.num_components != self.components:
            raise InvalidDataError(
                f'{self.name}: PD code has {self.pd.num_components} components, record says {self.components}'
            )
        if self.seifert is not None and not self.seifert.is_square:
            raise InvalidDataError(f'{self.name}: Seifert matrix must be square')
        if self.gsm is not None and self.gsm.mu != self.mu:
            raise InvalidDataError(f'{self.name}: gsm has mu={self.gsm.mu}, record has mu={self.mu}')
        if self.linking is not None:
            if self.linking.shape != (self.components, self.components):
                raise InvalidDataError(f'{self.name}: linking matrix must be {self.components}x{self.components}')
            if not self.linking.is_symmetric() or any(self.linking[i, i] for i in range(self.components)):
                raise InvalidDataError(f'{self.name}: linking matrix must be symmetric with zero diagonal')
        if self.cover_presentation is not None and not self.cover_presentation.is_square:
            raise InvalidDataError(f'{self.name}: cover presentation must be square')
        if self.component_seifert is not None:
            self.component_seifert = tuple(self.component_seifert)
            if len(self.component_seifert) != self.components:
                raise InvalidDataError(f'{self.name}: one component Seifert matrix per component is required')
        if self.boundary is not None and self.boundary.mu != self.mu:
            raise InvalidDataError(f'{self.name}: boundary data has mu={self.boundary.mu}')

    def with_mu(self, mu: int) -> 'LinkRecord':
        """
        The same link under a coarser or the strong colouring.

        mu = 1 puts every component in one colour; mu = n gives each
        component its own colour. Coloured data for a different mu is dropped.
        """
        if mu == self.mu:
            return self
        if mu == 1:
            colouring = (1,) * self.components
        elif mu == self.components:
            colouring = tuple(range(1, self.components + 1))
        else:
            raise InvalidDataError(
                f'{self.name}: cannot recolour a mu={self.mu} record to mu={mu}; use 1 or {self.components}'
            )
        return LinkRecord(
            name=self.name,
            components=self.components,
            mu=mu,
            colouring=colouring,
            pd=self.pd,
            seifert=self.seifert,
            gsm=None,
            linking=self.linking,
            orientation_tag=self.orientation_tag,
            provenance=dict(self.provenance),
            cover_presentation=self.cover_presentation,
            component_seifert=self.component_seifert,
            boundary=None,
        )


@dataclass(frozen=True)
class CriterionResult:
    """Outcome of one criterion; ``witness`` explains the decision."""

    criterion: str
    title: str
    status: str
    witness: str = ''

    def to_dict(self) -> Dict[str, object]:
        return {
            'criterion': self.criterion,
            'title': self.title,
            'status': self.status,
            'witness': self.witness,
        }


@dataclass
class ObstructionReport:
    """All criteria for one record at one mu, with the verdict and genus bound."""

    name: str
    mu: int
    criteria: List[CriterionResult]
    genus_lower_bound: int
    grid_order: int
    notes: List[str] = field(default_factory=list)

    DISCLAIMER = (
        'No abelian obstruction does not mean doubly slice: '
        'the Borromean rings pass every abelian test and are not weakly doubly slice.'
    )

    @property
    def obstructed(self) -> bool:
        return any(c.status == STATUS_OBSTRUCTED for c in self.criteria)

    @property
    def verdict(self) -> str:
        return VERDICT_OBSTRUCTED if self.obstructed else VERDICT_CLEAR

    @property
    def obstructing_criteria(self) -> List[str]:
        return [c.criterion for c in self.criteria if c.status == STATUS_OBSTRUCTED]

    def criterion(self, criterion_id: str) -> CriterionResult:
        return next(c for c in self.criteria if c.criterion == criterion_id)

    def to_dict(self) -> Dict[str, object]:
        return {
            'name': self.name,
            'mu': self.mu,
            'verdict': self.verdict,
            'obstructed_by': self.obstructing_criteria,
            'genus_lower_bound': self.genus_lower_bound,
            'grid_order': self.grid_order,
            'criteria': [c.to_dict() for c in self.criteria],
            'notes': list(self.notes),
            'disclaimer': None if self.obstructed else self.DISCLAIMER,
        }
