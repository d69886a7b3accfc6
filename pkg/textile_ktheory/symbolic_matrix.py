"""Symbolic matrices, their validity conditions, products and specified equivalences."""

from collections import Counter
from itertools import permutations
from pathlib import Path
from typing import Callable, Dict, Iterator, List, Optional, Sequence, Tuple, Union

from .exceptions import (
    DomainGap,
    NegativeEntry,
    NotEdgeDistinct,
    ParseError,
    SizeMismatch,
    ZeroRowOrColumn,
)
from .models import (
    Alphabet,
    BitTensor,
    IntMatrix,
    Pair,
    Specification,
    SymbolicMatrix,
    ValidityReport,
    Violation,
    pair_id,
    split_pair,
)

IntLike = Union[IntMatrix, Sequence[Sequence[int]]]


def as_int_matrix(matrix: IntLike) -> IntMatrix:
    """Accept an IntMatrix or nested sequences of integers."""
    if isinstance(matrix, IntMatrix):
        return matrix
    return IntMatrix.from_rows(matrix)


def validate(matrix: SymbolicMatrix) -> ValidityReport:
    """Check the essential and left-resolving conditions.

    Args:
        matrix: Symbolic matrix to check

    Returns:
        Report listing every violation with 1-based positions
    """
    n = matrix.n
    violations: List[Violation] = []

    for i in range(n):
        if not any(matrix.cell(i, j) for j in range(n)):
            violations.append(Violation(kind="zero_row", row=i + 1))
    for j in range(n):
        if not any(matrix.cell(i, j) for i in range(n)):
            violations.append(Violation(kind="zero_column", col=j + 1))
    essential = not violations

    left_resolving = True
    for j in range(n):
        totals: Counter = Counter()
        for i in range(n):
            totals.update(matrix.cell(i, j))
        repeated = [s for s in matrix.alphabet.symbols if totals[s] > 1]
        for symbol in repeated:
            left_resolving = False
            for i in range(n):
                if symbol in matrix.cell(i, j):
                    violations.append(
                        Violation(kind="repeated_in_column", row=i + 1, col=j + 1, symbol=symbol)
                    )

    return ValidityReport(
        essential=essential, left_resolving=left_resolving, offending_positions=violations
    )


def _check_nonzero_lines(matrix: IntMatrix) -> None:
    for i, row in enumerate(matrix.entries):
        if not any(row):
            raise ZeroRowOrColumn("row", i + 1)
    for j in range(matrix.cols):
        if not any(matrix.column(j)):
            raise ZeroRowOrColumn("column", j + 1)


def from_integer_matrix(matrix: IntLike, prefix: str = "e") -> SymbolicMatrix:
    """Label the edges of the graph of a nonnegative integer matrix.

    Entry (i, j) receives A(i, j) fresh symbols "{prefix}{i}_{j}_{k}" (1-based), so the
    result is edge-distinct and left-resolving.

    Raises:
        ZeroRowOrColumn: If some row or column of A is all zero
    """
    a = as_int_matrix(matrix)
    if not a.is_square or a.rows == 0:
        raise SizeMismatch(f"expected a nonempty square matrix, got {a.rows}x{a.cols}")
    if any(x < 0 for row in a.entries for x in row):
        raise NegativeEntry("integer matrix must be nonnegative")
    _check_nonzero_lines(a)

    symbols: List[str] = []
    entries: List[Tuple[Tuple[str, ...], ...]] = []
    for i, row in enumerate(a.entries):
        cells = []
        for j, count in enumerate(row):
            cell = tuple(f"{prefix}{i + 1}_{j + 1}_{k}" for k in range(1, count + 1))
            symbols.extend(cell)
            cells.append(cell)
        entries.append(tuple(cells))

    return SymbolicMatrix(
        n=a.rows, alphabet=Alphabet(symbols=tuple(symbols)), entries=tuple(entries)
    )


def bit_tensor(matrix: SymbolicMatrix) -> BitTensor:
    """Collapse multiplicities into one 0-1 matrix per symbol."""
    n = matrix.n
    grids: Dict[str, List[List[int]]] = {
        s: [[0] * n for _ in range(n)] for s in matrix.alphabet.symbols
    }
    for symbol, cells in matrix.occurrences().items():
        for i, j in cells:
            grids[symbol][i][j] = 1
    return BitTensor(
        n=n,
        alphabet=matrix.alphabet,
        bits={s: tuple(tuple(row) for row in grid) for s, grid in grids.items()},
    )


def nonnegative_matrix(matrix: SymbolicMatrix) -> IntMatrix:
    """The integer matrix A^M(i, j) = sum over symbols of the bit tensor."""
    tensor = bit_tensor(matrix)
    n = matrix.n
    return IntMatrix.from_rows(
        [[sum(tensor.bits[s][i][j] for s in tensor.bits) for j in range(n)] for i in range(n)],
        cols=n,
    )


def multiply(left: SymbolicMatrix, right: SymbolicMatrix) -> SymbolicMatrix:
    """Product of symbolic matrices over the pair alphabet.

    Entry (i, k) collects the pair symbols "(alpha,b)" for alpha in left(i, j) and b in
    right(j, k) over all j.

    Raises:
        SizeMismatch: If the matrices have different sizes
    """
    if left.n != right.n:
        raise SizeMismatch(f"cannot multiply {left.n}x{left.n} by {right.n}x{right.n}")
    n = left.n
    present = set()
    entries = []
    for i in range(n):
        row = []
        for k in range(n):
            cell = []
            for j in range(n):
                for alpha in left.cell(i, j):
                    for b in right.cell(j, k):
                        cell.append(pair_id(alpha, b))
                        present.add((alpha, b))
            row.append(tuple(cell))
        entries.append(tuple(row))

    ordered = sorted(
        present, key=lambda p: (left.alphabet.index_of(p[0]), right.alphabet.index_of(p[1]))
    )
    alphabet = Alphabet(symbols=tuple(pair_id(*p) for p in ordered))
    return SymbolicMatrix(n=n, alphabet=alphabet, entries=tuple(entries))


def relabel(matrix: SymbolicMatrix, mapping: Dict[str, str]) -> SymbolicMatrix:
    """Replace every symbol by its image.

    Raises:
        DomainGap: If a symbol has no image
    """
    for symbol in matrix.alphabet.symbols:
        if symbol not in mapping:
            raise DomainGap(symbol)
    entries = tuple(
        tuple(tuple(mapping[s] for s in cell) for cell in row) for row in matrix.entries
    )
    alphabet = Alphabet(symbols=tuple(mapping[s] for s in matrix.alphabet.symbols))
    return SymbolicMatrix(n=matrix.n, alphabet=alphabet, entries=entries)


def _pair_of(symbol: str) -> Pair:
    pair = split_pair(symbol)
    if pair is None:
        raise DomainGap(symbol)
    return pair


def check_specification(
    product: SymbolicMatrix, reversed_product: SymbolicMatrix, kappa: Specification
) -> bool:
    """Decide whether kappa carries product onto reversed_product cell by cell.

    Raises:
        SizeMismatch: If the matrices have different sizes
        DomainGap: If a symbol of product has no image under kappa
    """
    if product.n != reversed_product.n:
        raise SizeMismatch("products have different sizes")
    images: Dict[str, str] = {}
    for symbol in product.alphabet.symbols:
        image = kappa.image(_pair_of(symbol))
        if image is None:
            raise DomainGap(symbol)
        images[symbol] = pair_id(*image)

    relabelled = relabel(product, images)
    n = product.n
    return all(
        relabelled.cell_counter(i, k) == reversed_product.cell_counter(i, k)
        for i in range(n)
        for k in range(n)
    )


def _require_edge_distinct(matrix: SymbolicMatrix) -> None:
    for symbol, cells in matrix.occurrences().items():
        if len(cells) != 1:
            raise NotEdgeDistinct(symbol)


def _lazy_product(factories: Sequence[Callable[[], Iterator[Tuple]]]) -> Iterator[Tuple]:
    """Cartesian product that never materializes its factors."""
    if not factories:
        yield ()
        return
    for head in factories[0]():
        for tail in _lazy_product(factories[1:]):
            yield (head,) + tail


def iter_specifications(left: SymbolicMatrix, right: SymbolicMatrix) -> Iterator[Specification]:
    """Lazily enumerate specifications of left*right onto right*left.

    Each pair symbol of an edge-distinct product lives in exactly one cell, so the
    global search is the product of per-cell matchings. Cells are taken in row-major
    order and the matchings of each cell in lexicographic order of the canonical
    symbol ordering.

    Raises:
        SizeMismatch: If the matrices have different sizes
        NotEdgeDistinct: If a symbol occurs in two cells of either matrix
    """
    if left.n != right.n:
        raise SizeMismatch(f"matrices have sizes {left.n} and {right.n}")
    _require_edge_distinct(left)
    _require_edge_distinct(right)

    product = multiply(left, right)
    reversed_product = multiply(right, left)
    n = left.n

    cells: List[Tuple[List[Pair], List[Pair]]] = []
    for i in range(n):
        for k in range(n):
            sources = sorted(product.cell(i, k), key=product.alphabet.sort_key)
            targets = sorted(reversed_product.cell(i, k), key=reversed_product.alphabet.sort_key)
            if len(sources) != len(targets):
                return
            if sources:
                cells.append(([_pair_of(s) for s in sources], [_pair_of(t) for t in targets]))

    domain = frozenset(_pair_of(s) for s in product.alphabet.symbols)
    codomain = frozenset(_pair_of(s) for s in reversed_product.alphabet.symbols)

    def factory(targets: List[Pair]) -> Callable[[], Iterator[Tuple]]:
        return lambda: permutations(targets)

    for choice in _lazy_product([factory(targets) for _, targets in cells]):
        mapping = []
        for (sources, _), matched in zip(cells, choice):
            mapping.extend(zip(sources, matched))
        yield Specification(mapping=tuple(mapping), domain=domain, codomain=codomain)


def find_specifications(
    left: SymbolicMatrix, right: SymbolicMatrix, limit: int = 10
) -> List[Specification]:
    """Return up to limit specifications kappa with left*right equivalent to right*left.

    Returns an empty list when some cell of the two products has different sizes.
    """
    if limit < 1:
        raise ValueError("limit must be positive")
    found = []
    for kappa in iter_specifications(left, right):
        found.append(kappa)
        if len(found) >= limit:
            break
    return found


def _content_lines(text: str) -> List[Tuple[int, str]]:
    lines = []
    for number, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if line:
            lines.append((number, line))
    return lines


def _parse_size(number: int, line: str) -> int:
    key, _, value = line.partition("=")
    if key.strip() != "n":
        raise ParseError("expected 'n=<size>'", number)
    try:
        size = int(value.strip())
    except ValueError:
        raise ParseError(f"invalid size {value.strip()!r}", number)
    if size < 1:
        raise ParseError("size must be positive", number)
    return size


def parse_symbolic_matrix(text: str) -> SymbolicMatrix:
    """Parse the line-oriented symbolic matrix format.

    Raises:
        ParseError: If the text does not follow the format
    """
    lines = _content_lines(text)
    if len(lines) < 2:
        raise ParseError("expected 'n=' and 'alphabet=' lines")
    n = _parse_size(*lines[0])

    number, line = lines[1]
    key, _, value = line.partition("=")
    if key.strip() != "alphabet":
        raise ParseError("expected 'alphabet= <sym> ...'", number)
    try:
        alphabet = Alphabet(symbols=tuple(value.split()))
    except ValueError as e:
        raise ParseError(f"invalid alphabet: {e}", number)

    cells: List[List[Tuple[str, ...]]] = [[() for _ in range(n)] for _ in range(n)]
    seen = set()
    for number, line in lines[2:]:
        position, sep, body = line.partition("=")
        if not sep:
            raise ParseError("expected '<i>,<j>= <sym>+...'", number)
        try:
            i, j = (int(x) for x in position.split(","))
        except ValueError:
            raise ParseError(f"invalid cell position {position.strip()!r}", number)
        if not (1 <= i <= n and 1 <= j <= n):
            raise ParseError(f"cell ({i},{j}) outside a {n}x{n} matrix", number)
        if (i, j) in seen:
            raise ParseError(f"cell ({i},{j}) given twice", number)
        seen.add((i, j))
        tokens = [t.strip() for t in body.split("+")]
        if any(not t for t in tokens):
            raise ParseError("empty symbol in cell", number)
        for token in tokens:
            if token not in alphabet:
                raise ParseError(f"symbol {token!r} not in alphabet", number)
        cells[i - 1][j - 1] = tuple(tokens)

    try:
        return SymbolicMatrix(
            n=n, alphabet=alphabet, entries=tuple(tuple(row) for row in cells)
        )
    except ValueError as e:
        raise ParseError(str(e))


def format_symbolic_matrix(matrix: SymbolicMatrix) -> str:
    """Render a symbolic matrix in the line-oriented file format."""
    lines = [f"n={matrix.n}", "alphabet= " + " ".join(matrix.alphabet.symbols)]
    for i in range(matrix.n):
        for j in range(matrix.n):
            cell = matrix.cell(i, j)
            if cell:
                lines.append(f"{i + 1},{j + 1}= " + "+".join(cell))
    return "\n".join(lines) + "\n"


def parse_int_matrix(text: str) -> IntMatrix:
    """Parse "n=<size>" followed by n rows of n integers.

    Raises:
        ParseError: If the text does not follow the format
    """
    lines = _content_lines(text)
    if not lines:
        raise ParseError("empty integer matrix file")
    n = _parse_size(*lines[0])
    rows = lines[1:]
    if len(rows) != n:
        raise ParseError(f"expected {n} rows, found {len(rows)}")
    data = []
    for number, line in rows:
        try:
            values = [int(x) for x in line.split()]
        except ValueError:
            raise ParseError("rows must contain integers", number)
        if len(values) != n:
            raise ParseError(f"expected {n} entries, found {len(values)}", number)
        data.append(values)
    return IntMatrix.from_rows(data, cols=n)


def format_int_matrix(matrix: IntMatrix) -> str:
    """Render a square integer matrix in the file format."""
    lines = [f"n={matrix.rows}"]
    lines.extend(" ".join(str(x) for x in row) for row in matrix.entries)
    return "\n".join(lines) + "\n"


def _read_text(path: Union[str, Path]) -> str:
    try:
        return Path(path).read_text(encoding="utf-8")
    except UnicodeDecodeError as e:
        raise ParseError(f"{path} is not UTF-8 text: {e.reason} at byte {e.start}")


def load_symbolic_matrix(path: Union[str, Path]) -> SymbolicMatrix:
    return parse_symbolic_matrix(_read_text(path))


def load_int_matrix(path: Union[str, Path]) -> IntMatrix:
    return parse_int_matrix(_read_text(path))


def commutator_defect(a: IntMatrix, b: IntMatrix) -> Optional[Tuple[int, int, int, int]]:
    """First cell (1-based) where AB != BA, with both values, or None when they commute."""
    ab = a @ b
    ba = b @ a
    for i in range(ab.rows):
        for j in range(ab.cols):
            if ab.entries[i][j] != ba.entries[i][j]:
                return i + 1, j + 1, ab.entries[i][j], ba.entries[i][j]
    return None
