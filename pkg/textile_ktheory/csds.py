"""C*-symbolic dynamical systems over A = C^n encoded as per-symbol 0-1 matrices.

bits[alpha][i, j] is 1 exactly when rho_alpha(E_i) >= E_j. The composite of a word
alpha_1 ... alpha_k is the boolean product bits[alpha_1] ... bits[alpha_k], so the first
letter acts first and position (i, j) records rho_{alpha_k} o ... o rho_{alpha_1}(E_i) >= E_j.
"""

from typing import Dict, List, Mapping, Sequence, Tuple

import numpy as np
from pydantic import BaseModel, Field, field_validator, model_validator

from .exceptions import InvalidMatrix, UnknownSymbol
from .models import Alphabet, BitTensor, Pair, Specification, SymbolicMatrix
from .symbolic_matrix import bit_tensor, from_integer_matrix, validate

Word = Tuple[str, ...]


def boolean_product(left: np.ndarray, right: np.ndarray) -> np.ndarray:
    """Product of 0-1 matrices in the idempotent semiring."""
    return (left.astype(np.int64) @ right.astype(np.int64)) > 0


def boolean_identity(n: int) -> np.ndarray:
    return np.eye(n, dtype=bool)


class CsdsSystem(BaseModel):
    """A C*-symbolic dynamical system (C^n, rho, Sigma)."""

    n: int = Field(..., gt=0, description="Dimension of A = C^n")
    alphabet: Alphabet
    bits: Dict[str, np.ndarray]

    class Config:
        """Pydantic configuration."""

        frozen = True
        arbitrary_types_allowed = True

    @field_validator("bits", mode="before")
    @classmethod
    def freeze_bits(cls, v: Mapping[str, object]) -> Dict[str, np.ndarray]:
        """Store read-only boolean copies."""
        frozen = {}
        for symbol, matrix in v.items():
            array = np.array(matrix, dtype=np.int64)
            if array.ndim != 2 or not np.isin(array, (0, 1)).all():
                raise ValueError(f"matrix of {symbol!r} must be a 0-1 matrix")
            array = array.astype(bool)
            array.setflags(write=False)
            frozen[symbol] = array
        return frozen

    @model_validator(mode="after")
    def validate_shapes(self) -> "CsdsSystem":
        if set(self.bits) != set(self.alphabet.symbols):
            raise ValueError("bits must have exactly one matrix per symbol")
        for symbol, array in self.bits.items():
            if array.shape != (self.n, self.n):
                raise ValueError(f"matrix of {symbol!r} must be {self.n}x{self.n}")
        return self

    @classmethod
    def from_bit_tensor(cls, tensor: BitTensor) -> "CsdsSystem":
        return cls(n=tensor.n, alphabet=tensor.alphabet, bits=dict(tensor.bits))

    def matrix(self, symbol: str) -> np.ndarray:
        """The 0-1 matrix of rho_symbol."""
        try:
            return self.bits[symbol]
        except KeyError:
            raise UnknownSymbol(symbol)

    @property
    def essential(self) -> bool:
        """No rho_alpha vanishes and sum of rho_alpha(1) >= 1."""
        if any(not array.any() for array in self.bits.values()):
            return False
        covered = np.zeros(self.n, dtype=bool)
        for array in self.bits.values():
            covered |= array.any(axis=0)
        return bool(covered.all())

    @property
    def faithful(self) -> bool:
        """Every minimal projection E_i has a nonzero image under some rho_alpha."""
        covered = np.zeros(self.n, dtype=bool)
        for array in self.bits.values():
            covered |= array.any(axis=1)
        return bool(covered.all())

    def image_support(self, symbol: str) -> frozenset:
        """Indices j with E_j <= rho_symbol(1)."""
        return frozenset(int(j) for j in np.flatnonzero(self.matrix(symbol).any(axis=0)))

    def transfer_matrix(self) -> np.ndarray:
        """L(i, j) = number of symbols alpha with rho_alpha(E_i) >= E_j."""
        total = np.zeros((self.n, self.n), dtype=np.int64)
        for symbol in self.alphabet.symbols:
            total += self.bits[symbol].astype(np.int64)
        return total


def from_symbolic_matrix(matrix: SymbolicMatrix) -> CsdsSystem:
    """Build the system rho^M(E_i) = sum_j A^M(i, alpha, j) E_j.

    Raises:
        InvalidMatrix: If the matrix is not essential and left-resolving
    """
    report = validate(matrix)
    if not report.valid:
        raise InvalidMatrix(report)
    return CsdsSystem.from_bit_tensor(bit_tensor(matrix))


def one_vertex_system(loops: int, prefix: str = "e") -> CsdsSystem:
    """The one-vertex system with the given number of loops, each acting as rho(1) = 1."""
    return from_symbolic_matrix(from_integer_matrix([[loops]], prefix))


def compose(system: CsdsSystem, word: Sequence[str]) -> np.ndarray:
    """Boolean composite of a word; the empty word gives the identity.

    Raises:
        UnknownSymbol: If the word leaves the alphabet
    """
    result = boolean_identity(system.n)
    for symbol in word:
        result = boolean_product(result, system.matrix(symbol))
    return result


def is_admissible(system: CsdsSystem, word: Sequence[str]) -> bool:
    return bool(compose(system, word).any())


def language(system: CsdsSystem, length: int, materialize_limit: int = 12) -> List[Word]:
    """Admissible words of the given length in lexicographic (alphabet) order.

    Words are grown letter by letter and a prefix with zero composite is pruned, since
    every prefix of an admissible word is admissible.
    """
    if length < 0:
        raise ValueError("word length must be nonnegative")
    if length > materialize_limit:
        raise ValueError(
            f"refusing to list words of length {length} > {materialize_limit}; use count_words"
        )
    words: List[Word] = []

    def grow(prefix: Word, composite: np.ndarray) -> None:
        if len(prefix) == length:
            words.append(prefix)
            return
        for symbol in system.alphabet.symbols:
            extended = boolean_product(composite, system.bits[symbol])
            if extended.any():
                grow(prefix + (symbol,), extended)

    grow((), boolean_identity(system.n))
    return words


def count_words(system: CsdsSystem, length: int) -> int:
    """Number of admissible words of the given length without listing them.

    Words are grouped by their composite matrix, so the work depends on the number of
    distinct composites rather than on the number of words.
    """
    if length < 0:
        raise ValueError("word length must be nonnegative")
    identity = boolean_identity(system.n)
    states: Dict[bytes, Tuple[np.ndarray, int]] = {identity.tobytes(): (identity, 1)}
    for _ in range(length):
        following: Dict[bytes, Tuple[np.ndarray, int]] = {}
        for composite, count in states.values():
            for symbol in system.alphabet.symbols:
                extended = boolean_product(composite, system.bits[symbol])
                if not extended.any():
                    continue
                key = extended.tobytes()
                if key in following:
                    following[key] = (extended, following[key][1] + count)
                else:
                    following[key] = (extended, count)
        states = following
    return sum(count for _, count in states.values())


def tensor_pair(
    rho: CsdsSystem, eta: CsdsSystem
) -> Tuple[CsdsSystem, CsdsSystem, Specification]:
    """Tensor product input: rho x id, id x eta and the flip kappa(alpha, b) = (b, alpha)."""
    n = rho.n * eta.n
    id_rho = np.eye(rho.n, dtype=np.int64)
    id_eta = np.eye(eta.n, dtype=np.int64)
    rho_bar = CsdsSystem(
        n=n,
        alphabet=rho.alphabet,
        bits={s: np.kron(rho.bits[s].astype(np.int64), id_eta) > 0 for s in rho.alphabet.symbols},
    )
    eta_bar = CsdsSystem(
        n=n,
        alphabet=eta.alphabet,
        bits={s: np.kron(id_rho, eta.bits[s].astype(np.int64)) > 0 for s in eta.alphabet.symbols},
    )
    mapping: Dict[Pair, Pair] = {
        (alpha, b): (b, alpha) for alpha in rho.alphabet.symbols for b in eta.alphabet.symbols
    }
    return rho_bar, eta_bar, Specification.from_dict(mapping)
