"""Tests for symbolic matrices and specification search."""

import random
from pathlib import Path
from typing import List

import pytest

from textile_ktheory.exceptions import (
    DomainGap,
    NegativeEntry,
    NotEdgeDistinct,
    ParseError,
    SizeMismatch,
    ZeroRowOrColumn,
)
from textile_ktheory.models import Alphabet, IntMatrix, Specification, SymbolicMatrix
from textile_ktheory.symbolic_matrix import (
    check_specification,
    commutator_defect,
    find_specifications,
    format_int_matrix,
    format_symbolic_matrix,
    from_integer_matrix,
    iter_specifications,
    load_int_matrix,
    load_symbolic_matrix,
    multiply,
    nonnegative_matrix,
    parse_int_matrix,
    parse_symbolic_matrix,
    relabel,
    validate,
)

DATA = Path(__file__).resolve().parent.parent / "data"
FIBONACCI = [[1, 1], [1, 0]]


def symbolic(n: int, symbols: str, rows: List[List[str]]) -> SymbolicMatrix:
    """Build a matrix from cells written as "a+c" ("" is the zero entry)."""
    entries = tuple(
        tuple(tuple(cell.split("+")) if cell else () for cell in row) for row in rows
    )
    return SymbolicMatrix(n=n, alphabet=Alphabet(symbols=tuple(symbols.split())), entries=entries)


def golden() -> SymbolicMatrix:
    return symbolic(2, "a b c", [["a", "b"], ["c", ""]])


def test_validate_valid_matrix() -> None:
    """Test a matrix that is essential and left-resolving."""
    report = validate(symbolic(2, "a c", [["a", "a+c"], ["c", ""]]))
    assert report.essential
    assert report.left_resolving
    assert report.offending_positions == []


def test_validate_not_left_resolving() -> None:
    """Test a symbol repeated in one column is reported for each row."""
    report = validate(symbolic(2, "a b c", [["a", "a+b"], ["c", "b"]]))
    assert report.essential
    assert not report.left_resolving
    positions = [(v.kind, v.row, v.col, v.symbol) for v in report.offending_positions]
    assert positions == [("repeated_in_column", 1, 2, "b"), ("repeated_in_column", 2, 2, "b")]


def test_validate_not_essential() -> None:
    """Test zero rows and columns are reported."""
    report = validate(symbolic(2, "a", [["a", ""], ["", ""]]))
    assert not report.essential
    assert report.left_resolving
    kinds = [(v.kind, v.row, v.col) for v in report.offending_positions]
    assert kinds == [("zero_row", 2, None), ("zero_column", None, 2)]


def test_from_integer_matrix() -> None:
    """Test edge labelling of integer matrices."""
    single = from_integer_matrix([[2]], "e")
    assert single.cell(0, 0) == ("e1_1_1", "e1_1_2")

    matrix = from_integer_matrix(FIBONACCI, "f")
    assert matrix.entries == ((("f1_1_1",), ("f1_2_1",)), (("f2_1_1",), ()))
    assert matrix.is_edge_distinct()


def test_from_integer_matrix_errors() -> None:
    """Test degenerate integer matrices are rejected."""
    with pytest.raises(ZeroRowOrColumn) as excinfo:
        from_integer_matrix([[0, 1], [0, 1]])
    assert excinfo.value.kind == "column"
    assert excinfo.value.index == 1

    with pytest.raises(NegativeEntry):
        from_integer_matrix([[1, -1], [1, 1]])
    with pytest.raises(SizeMismatch):
        from_integer_matrix([[1, 1]])


def test_integer_matrix_round_trip_through_bits() -> None:
    """Test the nonnegative matrix of a labelled graph recovers the integers."""
    rng = random.Random(7)
    for _ in range(20):
        n = rng.randint(1, 4)
        rows = [[rng.randint(1, 3) for _ in range(n)] for _ in range(n)]
        matrix = from_integer_matrix(rows)
        assert nonnegative_matrix(matrix) == IntMatrix.from_rows(rows)
        report = validate(matrix)
        assert report.valid


def test_multiply_fibonacci() -> None:
    """Test the product of the golden mean matrix with itself."""
    square = multiply(golden(), golden())
    assert square.cell(0, 0) == ("(a,a)", "(b,c)")
    assert square.cell(0, 1) == ("(a,b)",)
    assert square.cell(1, 0) == ("(c,a)",)
    assert square.cell(1, 1) == ("(c,b)",)
    assert square.alphabet.symbols == ("(a,a)", "(a,b)", "(b,c)", "(c,a)", "(c,b)")


def test_multiply_scalars_and_zero() -> None:
    """Test 1x1 products and annihilation by empty cells."""
    product = multiply(symbolic(1, "a", [["a"]]), symbolic(1, "x", [["x"]]))
    assert product.entries == (((("(a,x)",),),))

    left = symbolic(2, "a b", [["a", ""], ["", "b"]])
    right = symbolic(2, "x y", [["", "x"], ["y", ""]])
    product = multiply(left, right)
    assert product.cell(0, 0) == ()
    assert product.cell(0, 1) == ("(a,x)",)

    with pytest.raises(SizeMismatch):
        multiply(golden(), symbolic(1, "a", [["a"]]))


def test_relabel() -> None:
    """Test symbol-wise relabelling."""
    relabelled = relabel(golden(), {"a": "x", "b": "y", "c": "z"})
    assert relabelled.cell(0, 1) == ("y",)
    with pytest.raises(DomainGap):
        relabel(golden(), {"a": "x"})


def test_check_specification_identity() -> None:
    """Test the identity specification on a 1x1 product."""
    product = multiply(symbolic(1, "a", [["a"]]), symbolic(1, "x", [["x"]]))
    kappa = Specification.from_dict({("a", "x"): ("a", "x")})
    assert check_specification(product, product, kappa)


def test_check_specification_flip() -> None:
    """Test the flip specification of one-vertex matrices."""
    m = from_integer_matrix([[3]], "e")
    n = from_integer_matrix([[2]], "f")
    flip = {
        (alpha, b): (b, alpha) for alpha in m.alphabet.symbols for b in n.alphabet.symbols
    }
    assert check_specification(multiply(m, n), multiply(n, m), Specification.from_dict(flip))


def test_check_specification_domain_gap() -> None:
    """Test a specification missing a pair."""
    product = multiply(golden(), golden())
    kappa = Specification.from_dict({("a", "a"): ("a", "a")})
    with pytest.raises(DomainGap):
        check_specification(product, product, kappa)


def test_check_specification_wrong_cell() -> None:
    """Test a bijection that moves a pair to another cell."""
    product = multiply(golden(), golden())
    mapping = {pair: pair for pair in [("a", "a"), ("b", "c"), ("a", "b"), ("c", "a"), ("c", "b")]}
    mapping[("a", "b")], mapping[("c", "a")] = ("c", "a"), ("a", "b")
    assert not check_specification(product, product, Specification.from_dict(mapping))


def test_find_specifications_scalars() -> None:
    """Test the single matching of two one-loop matrices."""
    found = find_specifications(from_integer_matrix([[1]], "e"), from_integer_matrix([[1]], "f"))
    assert len(found) == 1
    assert found[0].as_dict() == {("e1_1_1", "f1_1_1"): ("f1_1_1", "e1_1_1")}


def test_find_specifications_fibonacci() -> None:
    """Test the Fibonacci pair has exactly two specifications."""
    m = from_integer_matrix(FIBONACCI, "e")
    n = from_integer_matrix(FIBONACCI, "f")
    found = find_specifications(m, n, limit=10)
    assert len(found) == 2
    for kappa in found:
        assert check_specification(multiply(m, n), multiply(n, m), kappa)
    assert found[0].image(("e1_1_1", "f1_1_1")) == ("f1_1_1", "e1_1_1")
    assert found[1].image(("e1_1_1", "f1_1_1")) == ("f1_2_1", "e2_1_1")


def test_find_specifications_fibonacci_and_square() -> None:
    """Test A and A^2 commute and admit a specification."""
    m = from_integer_matrix(FIBONACCI, "e")
    n = from_integer_matrix([[2, 1], [1, 1]], "f")
    found = find_specifications(m, n, limit=3)
    assert found
    for kappa in found:
        assert check_specification(multiply(m, n), multiply(n, m), kappa)


def test_find_specifications_respects_limit() -> None:
    """Test the search stops at the limit without enumerating everything."""
    m = from_integer_matrix([[12]], "e")
    n = from_integer_matrix([[12]], "f")
    assert len(find_specifications(m, n, limit=4)) == 4
    assert next(iter_specifications(m, n)).mapping[0][0] == ("e1_1_1", "f1_1_1")
    with pytest.raises(ValueError):
        find_specifications(m, n, limit=0)


def test_find_specifications_non_commuting() -> None:
    """Test mismatched cell sizes give no specification."""
    m = from_integer_matrix(FIBONACCI, "e")
    n = from_integer_matrix([[1, 0], [1, 1]], "f")
    assert find_specifications(m, n) == []


def test_find_specifications_requires_edge_distinct() -> None:
    """Test a repeated symbol is rejected."""
    repeated = load_symbolic_matrix(DATA / "not_left_resolving.smx")
    with pytest.raises(NotEdgeDistinct):
        find_specifications(repeated, repeated)


def test_commuting_pairs_have_specifications() -> None:
    """Test random commuting pairs (A, A + I) admit a valid specification."""
    rng = random.Random(11)
    for _ in range(20):
        n = rng.randint(1, 3)
        rows = [[rng.randint(1, 2) for _ in range(n)] for _ in range(n)]
        a = IntMatrix.from_rows(rows)
        b = IntMatrix.from_rows(
            [[x + int(i == j) for j, x in enumerate(row)] for i, row in enumerate(rows)]
        )
        assert commutator_defect(a, b) is None
        m, k = from_integer_matrix(a, "e"), from_integer_matrix(b, "f")
        found = find_specifications(m, k, limit=1)
        assert len(found) == 1
        assert check_specification(multiply(m, k), multiply(k, m), found[0])


def test_commutator_defect() -> None:
    """Test the first cell where AB and BA differ."""
    a = IntMatrix.from_rows(FIBONACCI)
    b = IntMatrix.from_rows([[1, 0], [1, 1]])
    assert commutator_defect(a, b) == (1, 1, 2, 1)
    assert commutator_defect(a, a) is None


def test_parse_symbolic_matrix() -> None:
    """Test the line-oriented format with comments and multiplicities."""
    text = "# sample\nn=2\nalphabet= a c\n1,1= a\n1,2= a+c  # two symbols\n2,1= c\n"
    matrix = parse_symbolic_matrix(text)
    assert matrix == symbolic(2, "a c", [["a", "a+c"], ["c", ""]])
    assert parse_symbolic_matrix(format_symbolic_matrix(matrix)) == matrix

    doubled = parse_symbolic_matrix("n=1\nalphabet= a\n1,1= a+a\n")
    assert doubled.cell(0, 0) == ("a", "a")


@pytest.mark.parametrize(
    "text,line",
    [
        ("m=2\nalphabet= a\n", 1),
        ("n=2\nalphabet= a\n1,3= a\n", 3),
        ("n=1\nalphabet= a\n1,1= b\n", 3),
        ("n=1\nalphabet= a\n1,1= a\n1,1= a\n", 4),
        ("n=1\nsymbols= a\n", 2),
        ("n=1\nalphabet= a\n1;1= a\n", 3),
    ],
)
def test_parse_symbolic_matrix_errors(text: str, line: int) -> None:
    """Test parse errors carry the offending line."""
    with pytest.raises(ParseError) as excinfo:
        parse_symbolic_matrix(text)
    assert excinfo.value.line == line
    assert str(excinfo.value).startswith(f"line {line}:")


def test_parse_int_matrix() -> None:
    """Test the integer matrix format."""
    matrix = parse_int_matrix("n=2\n1 1\n1 0\n")
    assert matrix.to_lists() == FIBONACCI
    assert format_int_matrix(matrix) == "n=2\n1 1\n1 0\n"
    assert load_int_matrix(DATA / "fibonacci.int") == matrix

    with pytest.raises(ParseError):
        parse_int_matrix("n=2\n1 1\n")
    with pytest.raises(ParseError):
        parse_int_matrix("n=2\n1 1\n1 x\n")


def test_sample_files() -> None:
    """Test the bundled sample matrices."""
    assert validate(load_symbolic_matrix(DATA / "golden.smx")).valid
    report = validate(load_symbolic_matrix(DATA / "not_left_resolving.smx"))
    assert report.essential and not report.left_resolving
    square = load_int_matrix(DATA / "fibonacci_squared.int")
    assert commutator_defect(load_int_matrix(DATA / "fibonacci.int"), square) is None


def test_load_rejects_undecodable_files(tmp_path: Path) -> None:
    """Test bytes that are not UTF-8 give a ParseError."""
    garbled = tmp_path / "garbled.smx"
    garbled.write_bytes(b"n=1\nalphabet= \xff\n")
    with pytest.raises(ParseError) as excinfo:
        load_symbolic_matrix(garbled)
    assert "is not UTF-8 text" in str(excinfo.value)
    with pytest.raises(ParseError):
        load_int_matrix(garbled)


def test_check_specification_matches_relabelled_product() -> None:
    """Test the check agrees with comparing the relabelled product cell by cell."""
    m = from_integer_matrix(FIBONACCI, "e")
    n = from_integer_matrix(FIBONACCI, "f")
    product, reversed_product = multiply(m, n), multiply(n, m)
    for kappa in find_specifications(m, n):
        relabelled = relabel(product, kappa.symbol_map())
        assert all(
            sorted(relabelled.cell(i, k)) == sorted(reversed_product.cell(i, k))
            for i in range(2)
            for k in range(2)
        )
        assert check_specification(product, reversed_product, kappa)
