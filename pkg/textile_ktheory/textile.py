"""C*-textile dynamical systems: tiles, paving, admissibility, diagonal propagation and analysis.

Patch coordinates: x grows rightward and y upward, so a tile's top meets the bottom of
the tile above it and its right edge meets the left edge of the tile to its right. In a
tile (top, right, left, bottom) the rho-letters run along the top and bottom edges and
the eta-letters along the left and right edges; its composite eta_right o rho_top equals
rho_bottom o eta_left and is read from the upper-left corner to the lower-right corner.
"""

from itertools import islice
from typing import Dict, FrozenSet, List, Optional, Sequence, Set, Tuple, Union

import numpy as np
from pydantic import BaseModel, Field, model_validator
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import connected_components

from .csds import (
    CsdsSystem,
    boolean_identity,
    boolean_product,
    compose,
    from_symbolic_matrix,
    language,
    one_vertex_system,
    tensor_pair,
)
from .exceptions import (
    CommutationFailure,
    DomainMismatch,
    InadmissibleDiagonal,
    Incompatible,
    InternalInvariant,
    NoSpecification,
    NotCommuting,
    NotPaved,
    SizeMismatch,
    UnknownSymbol,
)
from .models import AnalysisReport, Alphabet, Pair, Specification
from .symbolic_matrix import (
    IntLike,
    as_int_matrix,
    commutator_defect,
    from_integer_matrix,
    iter_specifications,
)


class Tile(BaseModel):
    """A tile (alpha, b, a, beta) with kappa(alpha, b) = (a, beta)."""

    top: str = Field(..., description="alpha, a rho-letter")
    right: str = Field(..., description="b, an eta-letter")
    left: str = Field(..., description="a, an eta-letter")
    bottom: str = Field(..., description="beta, a rho-letter")

    class Config:
        """Pydantic configuration."""

        frozen = True

    @property
    def id(self) -> str:
        return f"{self.top}|{self.right}|{self.left}|{self.bottom}"

    def __str__(self) -> str:
        return f"({self.top},{self.right},{self.left},{self.bottom})"


class TextileSystem(BaseModel):
    """Two systems on the same C^n with a specification kappa; create it with build()."""

    rho: CsdsSystem
    eta: CsdsSystem
    kappa: Specification
    tiles: Tuple[Tile, ...]
    composites: Dict[Tile, np.ndarray]

    class Config:
        """Pydantic configuration."""

        frozen = True
        arbitrary_types_allowed = True

    @property
    def n(self) -> int:
        return self.rho.n

    @property
    def sigma_rho_eta(self) -> FrozenSet[Pair]:
        return self.kappa.domain

    @property
    def sigma_eta_rho(self) -> FrozenSet[Pair]:
        return self.kappa.codomain

    def tile_from_top_right(self, top: str, right: str) -> Optional[Tile]:
        """The unique tile with the given top and right edges, if any."""
        image = self.kappa.image((top, right))
        if image is None:
            return None
        return Tile(top=top, right=right, left=image[0], bottom=image[1])

    def tile_from_left_bottom(self, left: str, bottom: str) -> Optional[Tile]:
        """The unique tile with the given left and bottom edges, if any."""
        source = self.kappa.preimage((left, bottom))
        if source is None:
            return None
        return Tile(top=source[0], right=source[1], left=left, bottom=bottom)

    def composite(self, tile: Tile) -> np.ndarray:
        try:
            return self.composites[tile]
        except KeyError:
            raise UnknownSymbol(tile.id)

    def tile_index(self, tile: Tile) -> int:
        return self.tiles.index(tile)


class Patch(BaseModel):
    """A finite rectangular window of a configuration; cells may be empty.

    grid[x][y] holds the tile at global position (origin[0] + x, origin[1] + y).
    """

    width: int = Field(..., gt=0)
    height: int = Field(..., gt=0)
    origin: Tuple[int, int] = (0, 0)
    grid: Tuple[Tuple[Optional[Tile], ...], ...]

    class Config:
        """Pydantic configuration."""

        frozen = True

    @model_validator(mode="after")
    def validate_grid(self) -> "Patch":
        if len(self.grid) != self.width or any(len(col) != self.height for col in self.grid):
            raise ValueError(f"grid must be {self.width}x{self.height}")
        return self

    @classmethod
    def from_columns(
        cls, columns: Sequence[Sequence[Optional[Tile]]], origin: Tuple[int, int] = (0, 0)
    ) -> "Patch":
        grid = tuple(tuple(column) for column in columns)
        return cls(width=len(grid), height=len(grid[0]), origin=origin, grid=grid)

    def tile_at(self, x: int, y: int) -> Optional[Tile]:
        if 0 <= x < self.width and 0 <= y < self.height:
            return self.grid[x][y]
        return None

    @property
    def is_complete(self) -> bool:
        return all(tile is not None for column in self.grid for tile in column)


class DiagonalWord(BaseModel):
    """Tiles omega_1 ... omega_k placed at (i0 + m, j0 - m)."""

    tiles: Tuple[Tile, ...] = Field(..., min_length=1)
    origin: Tuple[int, int] = (0, 0)


def _nonzero_pairs(first: CsdsSystem, second: CsdsSystem) -> Set[Pair]:
    """Pairs (x, y) with second_y o first_x != 0."""
    return {
        (x, y)
        for x in first.alphabet.symbols
        for y in second.alphabet.symbols
        if boolean_product(first.bits[x], second.bits[y]).any()
    }


def _describe(pairs: Set[Pair]) -> str:
    return ", ".join(f"({a},{b})" for a, b in sorted(pairs)[:5])


def build(rho: CsdsSystem, eta: CsdsSystem, kappa: Specification) -> TextileSystem:
    """Verify eta_b o rho_alpha = rho_beta o eta_a whenever kappa(alpha, b) = (a, beta).

    Raises:
        SizeMismatch: If the systems act on algebras of different dimension
        DomainMismatch: If kappa's domain or codomain is not the admissible pair set
        CommutationFailure: At the first pair violating the relation
    """
    if rho.n != eta.n:
        raise SizeMismatch(f"systems act on C^{rho.n} and C^{eta.n}")

    sigma_rho_eta = _nonzero_pairs(rho, eta)
    sigma_eta_rho = _nonzero_pairs(eta, rho)
    if kappa.domain != sigma_rho_eta:
        missing = sigma_rho_eta - kappa.domain
        extra = set(kappa.domain) - sigma_rho_eta
        raise DomainMismatch(
            f"domain of kappa differs from Sigma_rho_eta "
            f"(missing: {_describe(missing) or '-'}; extra: {_describe(extra) or '-'})"
        )
    if kappa.codomain != sigma_eta_rho:
        missing = sigma_eta_rho - kappa.codomain
        extra = set(kappa.codomain) - sigma_eta_rho
        raise DomainMismatch(
            f"codomain of kappa differs from Sigma_eta_rho "
            f"(missing: {_describe(missing) or '-'}; extra: {_describe(extra) or '-'})"
        )

    ordered = sorted(
        sigma_rho_eta, key=lambda p: (rho.alphabet.index_of(p[0]), eta.alphabet.index_of(p[1]))
    )
    tiles: List[Tile] = []
    composites: Dict[Tile, np.ndarray] = {}
    for alpha, b in ordered:
        a, beta = kappa.image((alpha, b))  # type: ignore[misc]
        top_right = boolean_product(rho.bits[alpha], eta.bits[b])
        left_bottom = boolean_product(eta.bits[a], rho.bits[beta])
        if not np.array_equal(top_right, left_bottom):
            raise CommutationFailure((alpha, b), (a, beta))
        tile = Tile(top=alpha, right=b, left=a, bottom=beta)
        top_right.setflags(write=False)
        tiles.append(tile)
        composites[tile] = top_right

    return TextileSystem(
        rho=rho, eta=eta, kappa=kappa, tiles=tuple(tiles), composites=composites
    )


def from_commuting_matrices(
    a: IntLike,
    b: IntLike,
    which: Union[int, Specification] = 0,
    prefix_rho: str = "e",
    prefix_eta: str = "f",
) -> TextileSystem:
    """Textile system of the edge-labelled graphs of commuting matrices A and B.

    Args:
        a: Nonnegative matrix for rho
        b: Nonnegative matrix for eta, with AB = BA
        which: Index into the specification enumeration, or an explicit specification
        prefix_rho: Symbol prefix for the edges of A
        prefix_eta: Symbol prefix for the edges of B

    Raises:
        NotCommuting: If AB != BA
        NoSpecification: If the requested specification does not exist
    """
    a_matrix = as_int_matrix(a)
    b_matrix = as_int_matrix(b)
    if (a_matrix.rows, a_matrix.cols) != (b_matrix.rows, b_matrix.cols):
        raise SizeMismatch("A and B must have the same size")
    defect = commutator_defect(a_matrix, b_matrix)
    if defect is not None:
        raise NotCommuting(*defect)

    m_a = from_integer_matrix(a_matrix, prefix_rho)
    m_b = from_integer_matrix(b_matrix, prefix_eta)

    if isinstance(which, Specification):
        kappa = which
    else:
        if which < 0:
            raise NoSpecification("specification index must be nonnegative")
        kappa_found = next(islice(iter_specifications(m_a, m_b), which, None), None)
        if kappa_found is None:
            raise NoSpecification(f"no specification with index {which}")
        kappa = kappa_found

    return build(from_symbolic_matrix(m_a), from_symbolic_matrix(m_b), kappa)


def onm_system(n: int, m: int) -> TextileSystem:
    """The one-vertex system with n rho-loops, m eta-loops and the flip specification."""
    rho, eta, kappa = tensor_pair(one_vertex_system(n, "e"), one_vertex_system(m, "f"))
    return build(rho, eta, kappa)


def is_paved(patch: Patch) -> bool:
    """True when every pair of neighbouring tiles shares its edge label."""
    for x in range(patch.width):
        for y in range(patch.height):
            tile = patch.grid[x][y]
            if tile is None:
                continue
            above = patch.tile_at(x, y + 1)
            if above is not None and tile.top != above.bottom:
                return False
            right = patch.tile_at(x + 1, y)
            if right is not None and tile.right != right.left:
                return False
    return True


def _filled_counts(patch: Patch) -> List[List[int]]:
    """Two-dimensional prefix sums of occupied cells."""
    counts = [[0] * (patch.height + 1) for _ in range(patch.width + 1)]
    for x in range(patch.width):
        for y in range(patch.height):
            occupied = int(patch.grid[x][y] is not None)
            counts[x + 1][y + 1] = counts[x][y + 1] + counts[x + 1][y] - counts[x][y] + occupied
    return counts


def patch_admissible(system: TextileSystem, patch: Patch) -> bool:
    """Check every fully occupied sub-rectangle of a paved patch.

    The composite of a rectangle is read down its left column (eta-letters) and then
    along its bottom row (rho-letters); the patch is admissible when none vanishes.

    Raises:
        NotPaved: If the patch is not paved
    """
    if not is_paved(patch):
        raise NotPaved("patch is not paved")
    counts = _filled_counts(patch)

    def full(x1: int, x2: int, y1: int, y2: int) -> bool:
        area = (x2 - x1 + 1) * (y2 - y1 + 1)
        filled = counts[x2 + 1][y2 + 1] - counts[x1][y2 + 1] - counts[x2 + 1][y1] + counts[x1][y1]
        return filled == area

    for x1 in range(patch.width):
        for y2 in range(patch.height):
            column = boolean_identity(system.n)
            for y1 in range(y2, -1, -1):
                if not full(x1, x1, y1, y2):
                    break
                tile = patch.grid[x1][y1]
                assert tile is not None
                column = boolean_product(column, system.eta.matrix(tile.left))
                boundary = column
                for x2 in range(x1, patch.width):
                    if not full(x1, x2, y1, y2):
                        break
                    bottom = patch.grid[x2][y1]
                    assert bottom is not None
                    boundary = boolean_product(boundary, system.rho.matrix(bottom.bottom))
                    if not boundary.any():
                        return False
    return True


def tile_word_composite(system: TextileSystem, tiles: Sequence[Tile]) -> np.ndarray:
    """Composite delta_{omega_k} o ... o delta_{omega_1} of a tile sequence."""
    result = boolean_identity(system.n)
    for tile in tiles:
        result = boolean_product(result, system.composite(tile))
    return result


def diagonal_successors(system: TextileSystem, tile: Tile) -> List[Tile]:
    """Tiles that can follow a tile one step down-right on an anti-diagonal."""
    successors = []
    composite = system.composite(tile)
    for candidate in system.tiles:
        if (tile.right, candidate.top) not in system.sigma_eta_rho:
            continue
        if (tile.bottom, candidate.left) not in system.sigma_rho_eta:
            continue
        if boolean_product(composite, system.composites[candidate]).any():
            successors.append(candidate)
    return successors


def propagate_from_diagonal(
    system: TextileSystem, diagonal: DiagonalWord, radius: int
) -> Patch:
    """Fill in the tiles determined by an anti-diagonal word.

    The diagonal tile omega_m sits at (i0 + m, j0 - m). A tile whose left and lower
    neighbours are known is kappa^-1(left.right, lower.top); a tile whose upper and right
    neighbours are known is kappa(upper.bottom, right.left). Tiles further than radius
    steps from the diagonal are left empty.

    Raises:
        InadmissibleDiagonal: If the diagonal composite vanishes or the result is not admissible
        Incompatible: If a fill-in pair lies outside Sigma_eta_rho or Sigma_rho_eta
    """
    if radius < 0:
        raise ValueError("radius must be nonnegative")
    tiles = diagonal.tiles
    for tile in tiles:
        if tile not in system.composites:
            raise UnknownSymbol(tile.id)
    if not tile_word_composite(system, tiles).any():
        raise InadmissibleDiagonal("the diagonal word has zero composite")

    k = len(tiles)
    i0, j0 = diagonal.origin
    # (p, q): p steps right of i0 and q steps down from j0
    known: Dict[Tuple[int, int], Tile] = {(m, m): tile for m, tile in enumerate(tiles)}

    for s in range(1, min(radius, k - 1) + 1):
        for p in range(s, k):
            q = p - s
            left, lower = known[(p - 1, q)], known[(p, q + 1)]
            filled = system.tile_from_left_bottom(left.right, lower.top)
            if filled is None:
                raise Incompatible((i0 + p, j0 - q), (left.right, lower.top))
            known[(p, q)] = filled
        for p in range(0, k - s):
            q = p + s
            upper, right = known[(p, q - 1)], known[(p + 1, q)]
            filled = system.tile_from_top_right(upper.bottom, right.left)
            if filled is None:
                raise Incompatible((i0 + p, j0 - q), (upper.bottom, right.left))
            known[(p, q)] = filled

    grid = [[known.get((p, k - 1 - y)) for y in range(k)] for p in range(k)]
    patch = Patch.from_columns(grid, origin=(i0, j0 - k + 1))
    if not is_paved(patch):
        raise InternalInvariant("propagated patch is not paved")
    if not patch_admissible(system, patch):
        raise InadmissibleDiagonal("the propagated patch is not admissible")
    return patch


def extract_diagonal(patch: Patch) -> DiagonalWord:
    """The main anti-diagonal of a square patch, from its upper-left corner down."""
    if patch.width != patch.height:
        raise ValueError("patch must be square")
    k = patch.width
    tiles = []
    for m in range(k):
        tile = patch.grid[m][k - 1 - m]
        if tile is None:
            raise ValueError(f"anti-diagonal cell {m} is empty")
        tiles.append(tile)
    i0, bottom = patch.origin
    return DiagonalWord(tiles=tuple(tiles), origin=(i0, bottom + k - 1))


def delta_system(system: TextileSystem) -> CsdsSystem:
    """The system (A, delta, Sigma_kappa) with delta_omega = eta_b o rho_alpha.

    Raises:
        InternalInvariant: If the result is not essential and faithful
    """
    result = CsdsSystem(
        n=system.n,
        alphabet=Alphabet(symbols=tuple(tile.id for tile in system.tiles)),
        bits={tile.id: system.composites[tile] for tile in system.tiles},
    )
    if not (result.essential and result.faithful):
        raise InternalInvariant("delta system is not essential and faithful")
    return result


def _components(adjacency: np.ndarray) -> Tuple[int, np.ndarray]:
    count, labels = connected_components(
        csr_matrix(adjacency.astype(np.int8)), directed=True, connection="strong"
    )
    return int(count), labels


def _has_cycle(adjacency: np.ndarray) -> bool:
    if np.diag(adjacency).any():
        return True
    _, labels = _components(adjacency)
    return bool((np.bincount(labels) > 1).any())


def _atoms(n: int, supports: Sequence[FrozenSet[int]]) -> FrozenSet[FrozenSet[int]]:
    """Atoms of the unital subalgebra of C^n generated by the projections onto supports."""
    classes: Dict[Tuple[bool, ...], Set[int]] = {}
    for j in range(n):
        signature = tuple(j in support for support in supports)
        classes.setdefault(signature, set()).add(j)
    return frozenset(frozenset(atom) for atom in classes.values())


def _word_supports(system: CsdsSystem, length: int) -> List[FrozenSet[int]]:
    supports = []
    for word in language(system, length, materialize_limit=max(length, 12)):
        composite = compose(system, word)
        supports.append(frozenset(int(j) for j in np.flatnonzero(composite.any(axis=0))))
    return supports


def forms_square(system: TextileSystem, depth: int = 1) -> bool:
    """Compare the subalgebras generated by rho_mu(1) and eta_xi(1) for words of each length."""
    for length in range(1, depth + 1):
        rho_atoms = _atoms(system.n, _word_supports(system.rho, length))
        eta_atoms = _atoms(system.n, _word_supports(system.eta, length))
        if rho_atoms != eta_atoms:
            return False
    return True


def analyze(system: TextileSystem, depth: int = 1) -> AnalysisReport:
    """Nonemptiness, irreducibility and the forms-square condition."""
    n = system.n
    delta_support = np.zeros((n, n), dtype=bool)
    for composite in system.composites.values():
        delta_support |= composite

    rho_support = np.zeros((n, n), dtype=bool)
    for array in system.rho.bits.values():
        rho_support |= array
    eta_support = np.zeros((n, n), dtype=bool)
    for array in system.eta.bits.values():
        eta_support |= array
    lambda_support = boolean_product(rho_support, eta_support)
    component_count, _ = _components(lambda_support)

    return AnalysisReport(
        nonempty=_has_cycle(delta_support),
        irreducible=component_count == 1,
        forms_square=forms_square(system, depth),
    )
