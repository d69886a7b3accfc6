"""Data models for the textile K-theory toolkit."""

import re
from collections import Counter
from math import gcd
from typing import Dict, FrozenSet, List, Literal, Optional, Sequence, Tuple

from pydantic import BaseModel, Field, PrivateAttr, field_validator, model_validator
from sympy import ZZ
from sympy.polys.matrices.domainmatrix import DomainMatrix

Pair = Tuple[str, str]

_TOKEN_RE = re.compile(r"[^\s,()\[\]+=]+")


def split_pair(symbol_id: str) -> Optional[Pair]:
    """Split a rendered pair symbol "(x,y)" into its components.

    Returns None when the id is not a well-formed pair.
    """
    if len(symbol_id) < 5 or symbol_id[0] != "(" or symbol_id[-1] != ")":
        return None
    depth = 0
    for pos, char in enumerate(symbol_id[1:-1], start=1):
        if char == "(":
            depth += 1
        elif char == ")":
            depth -= 1
            if depth < 0:
                return None
        elif char == "," and depth == 0:
            first, second = symbol_id[1:pos], symbol_id[pos + 1 : -1]
            if is_symbol_id(first) and is_symbol_id(second):
                return first, second
            return None
    return None


def is_symbol_id(symbol_id: str) -> bool:
    """Check that a string is a plain token or a rendered pair of symbol ids."""
    if _TOKEN_RE.fullmatch(symbol_id):
        return True
    return split_pair(symbol_id) is not None


def pair_id(first: str, second: str) -> str:
    """Render a pair symbol."""
    return f"({first},{second})"


class Symbol(BaseModel):
    """A letter of a finite alphabet."""

    id: str = Field(..., description="Token without whitespace, commas, brackets, '+' or '='")

    class Config:
        """Pydantic configuration."""

        frozen = True

    @field_validator("id")
    @classmethod
    def validate_id(cls, v: str) -> str:
        """Reject empty ids and ids the matrix file format cannot carry."""
        if not v or not is_symbol_id(v):
            raise ValueError(f"invalid symbol id {v!r}")
        return v

    @classmethod
    def pair(cls, first: str, second: str) -> "Symbol":
        """Build the pair symbol "(first,second)"."""
        return cls(id=pair_id(first, second))

    @property
    def components(self) -> Optional[Pair]:
        """Components of a pair symbol, None for plain tokens."""
        return split_pair(self.id)


class Alphabet(BaseModel):
    """Ordered finite alphabet; the order is the canonical iteration order."""

    symbols: Tuple[str, ...] = Field(default_factory=tuple, description="Symbol ids in order")

    _positions: Dict[str, int] = PrivateAttr(default_factory=dict)

    class Config:
        """Pydantic configuration."""

        frozen = True

    @field_validator("symbols")
    @classmethod
    def validate_symbols(cls, v: Tuple[str, ...]) -> Tuple[str, ...]:
        """Symbols must be valid and distinct."""
        seen = set()
        for symbol in v:
            Symbol(id=symbol)
            if symbol in seen:
                raise ValueError(f"duplicate symbol {symbol!r}")
            seen.add(symbol)
        return v

    def model_post_init(self, __context: object) -> None:
        self._positions = {symbol: pos for pos, symbol in enumerate(self.symbols)}

    def __contains__(self, symbol: object) -> bool:
        return symbol in self._positions

    def __len__(self) -> int:
        return len(self.symbols)

    def index_of(self, symbol: str) -> int:
        """Position of a symbol in the canonical order."""
        return self._positions[symbol]

    def sort_key(self, symbol: str) -> int:
        return self._positions[symbol]


Cell = Tuple[str, ...]


class SymbolicMatrix(BaseModel):
    """Square matrix whose entries are finite multisets (formal sums) of symbols.

    Indices are 0-based in the API and 1-based in files and reports.
    """

    n: int = Field(..., gt=0, description="Matrix size")
    alphabet: Alphabet
    entries: Tuple[Tuple[Cell, ...], ...] = Field(..., description="n x n cells")

    class Config:
        """Pydantic configuration."""

        frozen = True

    @model_validator(mode="after")
    def validate_entries(self) -> "SymbolicMatrix":
        """Check shape, alphabet membership and that no symbol is orphaned."""
        if len(self.entries) != self.n or any(len(row) != self.n for row in self.entries):
            raise ValueError(f"entries must be {self.n}x{self.n}")
        used = set()
        for row in self.entries:
            for cell in row:
                for symbol in cell:
                    if symbol not in self.alphabet:
                        raise ValueError(f"symbol {symbol!r} not in alphabet")
                    used.add(symbol)
        orphans = [s for s in self.alphabet.symbols if s not in used]
        if orphans:
            raise ValueError(f"orphan symbols: {', '.join(orphans)}")
        return self

    def cell(self, i: int, j: int) -> Cell:
        return self.entries[i][j]

    def cell_counter(self, i: int, j: int) -> Counter:
        return Counter(self.entries[i][j])

    def occurrences(self) -> Dict[str, List[Tuple[int, int]]]:
        """Map each symbol to the cells it occurs in (with repetition)."""
        found: Dict[str, List[Tuple[int, int]]] = {s: [] for s in self.alphabet.symbols}
        for i, row in enumerate(self.entries):
            for j, cell in enumerate(row):
                for symbol in cell:
                    found[symbol].append((i, j))
        return found

    def is_edge_distinct(self) -> bool:
        """True when every symbol occurs exactly once in the whole matrix."""
        return all(len(cells) == 1 for cells in self.occurrences().values())


class Violation(BaseModel):
    """One failed validity condition; row and col are 1-based."""

    kind: Literal["zero_row", "zero_column", "repeated_in_column"]
    row: Optional[int] = None
    col: Optional[int] = None
    symbol: Optional[str] = None


class ValidityReport(BaseModel):
    """Result of validating a symbolic matrix."""

    essential: bool
    left_resolving: bool
    offending_positions: List[Violation] = Field(default_factory=list)

    @property
    def valid(self) -> bool:
        return self.essential and self.left_resolving


Bits = Tuple[Tuple[int, ...], ...]


class BitTensor(BaseModel):
    """A^M(i, alpha, j): 1 exactly when alpha appears in M(i, j)."""

    n: int = Field(..., gt=0)
    alphabet: Alphabet
    bits: Dict[str, Bits]

    class Config:
        """Pydantic configuration."""

        frozen = True

    @model_validator(mode="after")
    def validate_bits(self) -> "BitTensor":
        if set(self.bits) != set(self.alphabet.symbols):
            raise ValueError("bits must have one matrix per symbol")
        for symbol, matrix in self.bits.items():
            if len(matrix) != self.n or any(len(row) != self.n for row in matrix):
                raise ValueError(f"matrix of {symbol!r} must be {self.n}x{self.n}")
            if any(x not in (0, 1) for row in matrix for x in row):
                raise ValueError(f"matrix of {symbol!r} must be 0-1")
        return self


class Specification(BaseModel):
    """Bijection kappa between two sets of symbol pairs."""

    mapping: Tuple[Tuple[Pair, Pair], ...] = Field(..., description="(source, target) pairs")
    domain: FrozenSet[Pair]
    codomain: FrozenSet[Pair]

    _forward: Dict[Pair, Pair] = PrivateAttr(default_factory=dict)
    _backward: Dict[Pair, Pair] = PrivateAttr(default_factory=dict)

    class Config:
        """Pydantic configuration."""

        frozen = True

    @model_validator(mode="after")
    def validate_bijection(self) -> "Specification":
        sources = [source for source, _ in self.mapping]
        targets = [target for _, target in self.mapping]
        if len(set(sources)) != len(sources):
            raise ValueError("a source pair is mapped twice")
        if len(set(targets)) != len(targets):
            raise ValueError("specification is not injective")
        if set(sources) != self.domain:
            raise ValueError("mapping does not cover the declared domain")
        if set(targets) != self.codomain:
            raise ValueError("mapping is not onto the declared codomain")
        return self

    def model_post_init(self, __context: object) -> None:
        self._forward = dict(self.mapping)
        self._backward = {target: source for source, target in self.mapping}

    @classmethod
    def from_dict(cls, mapping: Dict[Pair, Pair]) -> "Specification":
        items = tuple(mapping.items())
        return cls(
            mapping=items,
            domain=frozenset(mapping),
            codomain=frozenset(mapping.values()),
        )

    def image(self, pair: Pair) -> Optional[Pair]:
        return self._forward.get(pair)

    def preimage(self, pair: Pair) -> Optional[Pair]:
        return self._backward.get(pair)

    def as_dict(self) -> Dict[Pair, Pair]:
        return dict(self._forward)

    def symbol_map(self) -> Dict[str, str]:
        """The specification as a map between rendered pair symbols."""
        return {pair_id(*s): pair_id(*t) for s, t in self.mapping}


class IntMatrix(BaseModel):
    """Dense exact integer matrix.

    Entries are stored as nested tuples; arithmetic goes through sympy's DomainMatrix
    over ZZ.
    """

    rows: int = Field(..., ge=0)
    cols: int = Field(..., ge=0)
    entries: Tuple[Tuple[int, ...], ...]

    class Config:
        """Pydantic configuration."""

        frozen = True

    @model_validator(mode="after")
    def validate_shape(self) -> "IntMatrix":
        if len(self.entries) != self.rows or any(len(r) != self.cols for r in self.entries):
            raise ValueError(f"entries must be {self.rows}x{self.cols}")
        return self

    @classmethod
    def from_rows(cls, rows: Sequence[Sequence[int]], cols: Optional[int] = None) -> "IntMatrix":
        data = tuple(tuple(int(x) for x in row) for row in rows)
        if cols is None:
            cols = len(data[0]) if data else 0
        return cls(rows=len(data), cols=cols, entries=data)

    @classmethod
    def identity(cls, n: int) -> "IntMatrix":
        return cls.from_rows([[int(i == j) for j in range(n)] for i in range(n)], cols=n)

    @classmethod
    def from_domain_matrix(cls, matrix: DomainMatrix) -> "IntMatrix":
        _, cols = matrix.shape
        return cls.from_rows([[int(x) for x in row] for row in matrix.to_list()], cols=cols)

    def to_domain_matrix(self) -> DomainMatrix:
        return DomainMatrix(
            [[ZZ(x) for x in row] for row in self.entries], (self.rows, self.cols), ZZ
        )

    @classmethod
    def from_columns(cls, columns: Sequence[Sequence[int]], rows: int) -> "IntMatrix":
        return cls.from_rows(
            [[column[i] for column in columns] for i in range(rows)], cols=len(columns)
        )

    def to_lists(self) -> List[List[int]]:
        return [list(row) for row in self.entries]

    def column(self, j: int) -> Tuple[int, ...]:
        return tuple(row[j] for row in self.entries)

    def columns(self) -> List[Tuple[int, ...]]:
        return [self.column(j) for j in range(self.cols)]

    @property
    def is_square(self) -> bool:
        return self.rows == self.cols

    def __matmul__(self, other: "IntMatrix") -> "IntMatrix":
        if self.cols != other.rows:
            raise ValueError(
                f"cannot multiply {self.rows}x{self.cols} by {other.rows}x{other.cols}"
            )
        product = self.to_domain_matrix().matmul(other.to_domain_matrix())
        return IntMatrix.from_domain_matrix(product)

    def __sub__(self, other: "IntMatrix") -> "IntMatrix":
        self._check_same_shape(other)
        return IntMatrix.from_domain_matrix(self.to_domain_matrix() - other.to_domain_matrix())

    def __neg__(self) -> "IntMatrix":
        return IntMatrix.from_domain_matrix(-self.to_domain_matrix())

    def _check_same_shape(self, other: "IntMatrix") -> None:
        if (self.rows, self.cols) != (other.rows, other.cols):
            raise ValueError("matrix shapes differ")

    def hstack(self, other: "IntMatrix") -> "IntMatrix":
        if self.rows != other.rows:
            raise ValueError("row counts differ")
        stacked = self.to_domain_matrix().hstack(other.to_domain_matrix())
        return IntMatrix.from_domain_matrix(stacked)

    def vstack(self, other: "IntMatrix") -> "IntMatrix":
        if self.cols != other.cols:
            raise ValueError("column counts differ")
        stacked = self.to_domain_matrix().vstack(other.to_domain_matrix())
        return IntMatrix.from_domain_matrix(stacked)

    def apply(self, vector: Sequence[int]) -> Tuple[int, ...]:
        """Matrix-vector product."""
        if len(vector) != self.cols:
            raise ValueError(f"vector has {len(vector)} entries, matrix has {self.cols} columns")
        column = IntMatrix.from_rows([[x] for x in vector], cols=1)
        return (self @ column).column(0)


class SnfResult(BaseModel):
    """Smith normal form D = U * A * V with unimodular U, V."""

    U: IntMatrix
    D: IntMatrix
    V: IntMatrix

    @property
    def diagonal(self) -> List[int]:
        return [self.D.entries[i][i] for i in range(min(self.D.rows, self.D.cols))]

    @property
    def rank(self) -> int:
        return sum(1 for d in self.diagonal if d != 0)


def _chain_from_orders(orders: Sequence[int]) -> Tuple[int, ...]:
    """Invariant factors of a direct sum of finite cyclic groups of the given orders."""
    values = [abs(x) for x in orders if abs(x) != 1]
    for i in range(len(values)):
        for j in range(i + 1, len(values)):
            g = gcd(values[i], values[j])
            values[i], values[j] = g, values[i] * values[j] // g
    return tuple(v for v in values if v != 1)


class FgAbelianGroup(BaseModel):
    """Finitely generated abelian group Z^rank + Z/d_1 + ... + Z/d_k with d_i | d_(i+1)."""

    rank: int = Field(default=0, ge=0)
    torsion: Tuple[int, ...] = Field(default_factory=tuple)

    class Config:
        """Pydantic configuration."""

        frozen = True

    @field_validator("torsion")
    @classmethod
    def validate_torsion(cls, v: Tuple[int, ...]) -> Tuple[int, ...]:
        for d in v:
            if d < 2:
                raise ValueError("invariant factors must be at least 2")
        for a, b in zip(v, v[1:]):
            if b % a:
                raise ValueError(f"invariant factors must divide: {a} does not divide {b}")
        return v

    @classmethod
    def from_orders(cls, rank: int, orders: Sequence[int]) -> "FgAbelianGroup":
        """Canonical form of Z^rank plus cyclic groups of the given finite orders."""
        if any(x == 0 for x in orders):
            raise ValueError("finite orders only; put free summands in rank")
        return cls(rank=rank, torsion=_chain_from_orders(orders))

    def direct_sum(self, other: "FgAbelianGroup") -> "FgAbelianGroup":
        return FgAbelianGroup.from_orders(self.rank + other.rank, self.torsion + other.torsion)

    @property
    def is_trivial(self) -> bool:
        return self.rank == 0 and not self.torsion

    @property
    def is_free(self) -> bool:
        return not self.torsion

    @property
    def is_cyclic(self) -> bool:
        return self.rank + len(self.torsion) <= 1

    @property
    def order(self) -> Optional[int]:
        """Group order, None when infinite."""
        if self.rank:
            return None
        result = 1
        for d in self.torsion:
            result *= d
        return result

    def __str__(self) -> str:
        parts = [f"Z/{d}" for d in self.torsion]
        if self.rank == 1:
            parts.append("Z")
        elif self.rank > 1:
            parts.append(f"Z^{self.rank}")
        return " + ".join(parts) if parts else "0"


class ExtensionReport(BaseModel):
    """Data of a short exact sequence 0 -> sub -> G -> quot -> 0."""

    sub: FgAbelianGroup
    quot: FgAbelianGroup
    split: Literal["yes", "unknown"]
    total: Optional[FgAbelianGroup] = None

    @model_validator(mode="after")
    def validate_split(self) -> "ExtensionReport":
        if self.quot.is_free and self.split != "yes":
            raise ValueError("an extension by a free group splits")
        if (self.split == "yes") != (self.total is not None):
            raise ValueError("total is given exactly when the extension splits")
        return self


class AnalysisReport(BaseModel):
    """Structural properties of a textile system."""

    nonempty: bool
    irreducible: bool
    forms_square: bool


class KGroups(BaseModel):
    """K-groups of the algebra of a textile system forming square."""

    k0: FgAbelianGroup
    k1: ExtensionReport


class WorkbenchConfig(BaseModel):
    """Configuration for the workbench."""

    version: str = Field(default="1.0.0", description="Config version")
    kappa_limit: int = Field(default=10, gt=0, description="Default specification search limit")
    count_only_threshold: int = Field(
        default=12, ge=0, description="Word length above which languages are only counted"
    )
    prefix_rho: str = Field(default="e", description="Symbol prefix for the first matrix")
    prefix_eta: str = Field(default="f", description="Symbol prefix for the second matrix")
    svg_cell_size: int = Field(default=96, ge=32, description="SVG tile size in pixels")
    console_width: int = Field(default=100, ge=40, description="Fixed console width")
    square_depth: int = Field(default=1, ge=1, description="Word length for forms-square")

    @field_validator("prefix_rho", "prefix_eta")
    @classmethod
    def validate_prefix(cls, v: str) -> str:
        """Prefixes must yield valid symbol ids."""
        if not re.fullmatch(r"[A-Za-z][A-Za-z0-9]*", v) or v[-1].isdigit():
            raise ValueError(f"prefix must start with a letter and not end with a digit: {v!r}")
        return v
