"""Tests for C*-symbolic dynamical systems and their languages."""

import random
from itertools import product
from typing import List

import numpy as np
import pytest

from textile_ktheory.csds import (
    CsdsSystem,
    boolean_product,
    compose,
    count_words,
    from_symbolic_matrix,
    is_admissible,
    language,
    one_vertex_system,
    tensor_pair,
)
from textile_ktheory.exceptions import InvalidMatrix, UnknownSymbol
from textile_ktheory.models import Alphabet, SymbolicMatrix
from textile_ktheory.symbolic_matrix import from_integer_matrix


def golden() -> CsdsSystem:
    matrix = SymbolicMatrix(
        n=2,
        alphabet=Alphabet(symbols=("a", "b", "c")),
        entries=((("a",), ("b",)), (("c",), ())),
    )
    return from_symbolic_matrix(matrix)


def random_matrix(rng: random.Random, size: int, top: int) -> List[List[int]]:
    """Random nonnegative matrix without zero rows or columns."""
    while True:
        rows = [[rng.randint(0, top) for _ in range(size)] for _ in range(size)]
        if all(any(row) for row in rows) and all(any(col) for col in zip(*rows)):
            return rows


def paths(rows: List[List[int]], k: int) -> int:
    """1^T A^k 1."""
    a = np.array(rows, dtype=object)
    power = np.identity(len(rows), dtype=object)
    for _ in range(k):
        power = power.dot(a)
    return int(power.sum())


def test_from_symbolic_matrix_bits() -> None:
    """Test the 0-1 matrices of the golden mean system."""
    system = golden()
    assert system.n == 2
    assert system.matrix("a").tolist() == [[True, False], [False, False]]
    assert system.matrix("b").tolist() == [[False, True], [False, False]]
    assert system.matrix("c").tolist() == [[False, False], [True, False]]
    assert system.essential
    assert system.faithful
    assert system.transfer_matrix().tolist() == [[1, 1], [1, 0]]
    assert system.image_support("b") == frozenset({1})


def test_bits_are_read_only() -> None:
    """Test stored matrices cannot be modified in place."""
    system = golden()
    with pytest.raises(ValueError):
        system.matrix("a")[0, 0] = False


def test_single_loop() -> None:
    """Test the one-vertex system with one loop."""
    system = one_vertex_system(1)
    assert system.alphabet.symbols == ("e1_1_1",)
    assert system.matrix("e1_1_1").tolist() == [[True]]
    assert count_words(system, 50) == 1


def test_from_symbolic_matrix_rejects_invalid() -> None:
    """Test a non-left-resolving matrix is refused."""
    matrix = SymbolicMatrix(
        n=2,
        alphabet=Alphabet(symbols=("a", "b")),
        entries=((("a",), ("b",)), (("a",), ())),
    )
    with pytest.raises(InvalidMatrix) as excinfo:
        from_symbolic_matrix(matrix)
    assert "not left-resolving" in str(excinfo.value)


def test_csds_system_validation() -> None:
    """Test shape and 0-1 checks on direct construction."""
    alphabet = Alphabet(symbols=("a",))
    with pytest.raises(ValueError):
        CsdsSystem(n=2, alphabet=alphabet, bits={"a": [[1]]})
    with pytest.raises(ValueError):
        CsdsSystem(n=1, alphabet=alphabet, bits={"a": [[2]]})
    with pytest.raises(ValueError):
        CsdsSystem(n=1, alphabet=alphabet, bits={"b": [[1]]})


def test_compose() -> None:
    """Test word composites in letter order."""
    system = golden()
    assert compose(system, []).tolist() == [[True, False], [False, True]]
    assert compose(system, ["b", "c"]).tolist() == [[True, False], [False, False]]
    assert compose(system, ["c", "b"]).tolist() == [[False, False], [False, True]]
    assert not compose(system, ["b", "b"]).any()
    assert is_admissible(system, ["a", "b", "c", "a"])
    assert not is_admissible(system, ["a", "c"])

    with pytest.raises(UnknownSymbol):
        compose(system, ["a", "z"])


def test_boolean_product_saturates() -> None:
    """Test products stay 0-1 however many paths there are."""
    ones = np.ones((3, 3), dtype=bool)
    assert boolean_product(ones, ones).dtype == bool
    assert boolean_product(ones, ones).all()


def test_language_golden() -> None:
    """Test the golden mean language."""
    system = golden()
    assert language(system, 0) == [()]
    assert language(system, 2) == [("a", "a"), ("a", "b"), ("b", "c"), ("c", "a"), ("c", "b")]
    assert [len(language(system, k)) for k in range(1, 6)] == [3, 5, 8, 13, 21]


def test_language_limits() -> None:
    """Test negative lengths and the materialization limit."""
    system = golden()
    with pytest.raises(ValueError):
        language(system, -1)
    with pytest.raises(ValueError):
        language(system, 13)
    assert len(language(system, 13, materialize_limit=13)) == 987
    with pytest.raises(ValueError):
        count_words(system, -1)


def test_count_words_long() -> None:
    """Test counting without listing for a long word length."""
    system = golden()
    assert count_words(system, 0) == 1
    assert count_words(system, 20) == 28657
    assert count_words(one_vertex_system(3), 30) == 3**30


def test_language_matches_path_counts() -> None:
    """Test word counts equal 1^T A^k 1 for edge-labelled graphs."""
    rng = random.Random(2024)
    for _ in range(6):
        rows = random_matrix(rng, rng.randint(1, 3), 1)
        system = from_symbolic_matrix(from_integer_matrix(rows))
        for k in range(1, 9):
            assert len(language(system, k)) == paths(rows, k)
    for _ in range(10):
        rows = random_matrix(rng, rng.randint(1, 3), 2)
        system = from_symbolic_matrix(from_integer_matrix(rows))
        for k in range(1, 9):
            assert count_words(system, k) == paths(rows, k)


def test_language_prefix_closed() -> None:
    """Test every prefix of an admissible word is admissible."""
    rng = random.Random(99)
    for _ in range(4):
        rows = random_matrix(rng, rng.randint(1, 3), 1)
        system = from_symbolic_matrix(from_integer_matrix(rows))
        levels = [set(language(system, k)) for k in range(7)]
        for k in range(1, 7):
            for word in levels[k]:
                for j in range(k):
                    assert word[:j] in levels[j]


def test_language_exhaustive() -> None:
    """Test the pruned search finds exactly the admissible words."""
    rng = random.Random(5)
    for _ in range(3):
        rows = random_matrix(rng, 2, 1)
        system = from_symbolic_matrix(from_integer_matrix(rows))
        for k in range(5):
            listed = set(language(system, k))
            for word in product(system.alphabet.symbols, repeat=k):
                assert (word in listed) == is_admissible(system, word)


def test_tensor_pair() -> None:
    """Test the tensor product input commutes under the flip."""
    rho, eta, kappa = tensor_pair(one_vertex_system(2, "e"), golden())
    assert rho.n == eta.n == 2
    assert rho.matrix("e1_1_1").tolist() == [[True, False], [False, True]]
    assert eta.matrix("b").tolist() == [[False, True], [False, False]]
    assert kappa.image(("e1_1_2", "c")) == ("c", "e1_1_2")
    for alpha in rho.alphabet.symbols:
        for b in eta.alphabet.symbols:
            assert np.array_equal(
                boolean_product(rho.matrix(alpha), eta.matrix(b)),
                boolean_product(eta.matrix(b), rho.matrix(alpha)),
            )


def test_tensor_pair_is_essential_and_faithful() -> None:
    """Test both tensor factors stay essential and faithful for multi-vertex inputs."""
    fibonacci = from_symbolic_matrix(from_integer_matrix([[1, 1], [1, 0]], "e"))
    fibonacci_eta = from_symbolic_matrix(from_integer_matrix([[1, 1], [1, 0]], "f"))
    pairs = [
        (fibonacci, one_vertex_system(1, "f")),
        (fibonacci, fibonacci_eta),
        (golden(), one_vertex_system(2, "f")),
        (one_vertex_system(3, "e"), golden()),
    ]
    for left, right in pairs:
        rho, eta, kappa = tensor_pair(left, right)
        assert rho.n == eta.n == left.n * right.n
        assert rho.essential and rho.faithful
        assert eta.essential and eta.faithful
        assert len(kappa.mapping) == len(left.alphabet) * len(right.alphabet)

    rho, _, _ = tensor_pair(fibonacci, one_vertex_system(1, "f"))
    for symbol in fibonacci.alphabet.symbols:
        assert np.array_equal(rho.matrix(symbol), fibonacci.matrix(symbol))
