"""Exact integer linear algebra and K-groups of textile systems that form square.

The Smith normal form loop works on rows of Python integers; products, differences and stacking
go through IntMatrix, which computes over ZZ with sympy. Nothing uses floating point.
"""

from math import gcd
from typing import List, Optional, Sequence, Tuple

from .exceptions import InternalInvariant, NotCommuting, NotSquare, ParseError, SizeMismatch
from .models import ExtensionReport, FgAbelianGroup, IntMatrix, KGroups, SnfResult
from .symbolic_matrix import IntLike, as_int_matrix, commutator_defect
from .textile import TextileSystem, forms_square

Rows = List[List[int]]


def _identity_rows(n: int) -> Rows:
    return [[int(i == j) for j in range(n)] for i in range(n)]


def _swap_rows(m: Rows, a: int, b: int) -> None:
    m[a], m[b] = m[b], m[a]


def _swap_cols(m: Rows, a: int, b: int) -> None:
    for row in m:
        row[a], row[b] = row[b], row[a]


def _add_row(m: Rows, target: int, source: int, factor: int) -> None:
    """row[target] += factor * row[source]"""
    m[target] = [x + factor * y for x, y in zip(m[target], m[source])]


def _add_col(m: Rows, target: int, source: int, factor: int) -> None:
    """col[target] += factor * col[source]"""
    for row in m:
        row[target] += factor * row[source]


def smith_normal_form(matrix: IntLike) -> SnfResult:
    """Smith normal form D = U * A * V with unimodular U and V.

    The pivot is the nonzero entry of least absolute value in the remaining block,
    ties broken by the smallest (row, column). Diagonal entries are nonnegative and
    each divides the next.
    """
    a = as_int_matrix(matrix)
    m, n = a.rows, a.cols
    d = a.to_lists()
    u = _identity_rows(m)
    v = _identity_rows(n)

    for t in range(min(m, n)):
        while True:
            candidates = [
                (abs(d[i][j]), i, j) for i in range(t, m) for j in range(t, n) if d[i][j] != 0
            ]
            if not candidates:
                return _snf_result(u, d, v, m, n)
            _, pi, pj = min(candidates)
            if pi != t:
                _swap_rows(d, t, pi)
                _swap_rows(u, t, pi)
            if pj != t:
                _swap_cols(d, t, pj)
                _swap_cols(v, t, pj)

            pivot = d[t][t]
            for i in range(t + 1, m):
                q = d[i][t] // pivot
                if q:
                    _add_row(d, i, t, -q)
                    _add_row(u, i, t, -q)
            for j in range(t + 1, n):
                q = d[t][j] // pivot
                if q:
                    _add_col(d, j, t, -q)
                    _add_col(v, j, t, -q)

            if any(d[i][t] for i in range(t + 1, m)) or any(d[t][j] for j in range(t + 1, n)):
                continue

            offender = next(
                (i for i in range(t + 1, m) for j in range(t + 1, n) if d[i][j] % pivot), None
            )
            if offender is None:
                break
            _add_row(d, t, offender, 1)
            _add_row(u, t, offender, 1)

        if d[t][t] < 0:
            d[t] = [-x for x in d[t]]
            u[t] = [-x for x in u[t]]

    return _snf_result(u, d, v, m, n)


def _snf_result(u: Rows, d: Rows, v: Rows, m: int, n: int) -> SnfResult:
    return SnfResult(
        U=IntMatrix.from_rows(u, cols=m),
        D=IntMatrix.from_rows(d, cols=n),
        V=IntMatrix.from_rows(v, cols=n),
    )


def cokernel(matrix: IntLike) -> FgAbelianGroup:
    """Z^r modulo the column span of an r-row matrix."""
    a = as_int_matrix(matrix)
    snf = smith_normal_form(a)
    nonzero = [x for x in snf.diagonal if x != 0]
    return FgAbelianGroup.from_orders(a.rows - len(nonzero), nonzero)


def _empty_columns(rows: int) -> IntMatrix:
    return IntMatrix.from_rows([[] for _ in range(rows)], cols=0)


def kernel_basis(matrix: IntLike) -> IntMatrix:
    """Matrix whose columns form a Z-basis of the integer kernel."""
    a = as_int_matrix(matrix)
    snf = smith_normal_form(a)
    columns = snf.V.columns()[snf.rank :]
    if not columns:
        return _empty_columns(a.cols)
    return IntMatrix.from_columns(columns, rows=a.cols)


def solve_in_lattice(matrix: IntLike, target: Sequence[int]) -> Optional[Tuple[int, ...]]:
    """An integer solution of A x = target, or None when there is none."""
    a = as_int_matrix(matrix)
    if len(target) != a.rows:
        raise SizeMismatch(f"target has {len(target)} entries, matrix has {a.rows} rows")
    snf = smith_normal_form(a)
    y = snf.U.apply(target)
    diagonal = snf.diagonal
    z = [0] * a.cols
    for i, value in enumerate(y):
        pivot = diagonal[i] if i < len(diagonal) else 0
        if pivot == 0:
            if value != 0:
                return None
        elif value % pivot:
            return None
        else:
            z[i] = value // pivot
    return snf.V.apply(z)


def _check_pair(a: IntMatrix, b: IntMatrix) -> None:
    if not a.is_square or (a.rows, a.cols) != (b.rows, b.cols):
        raise SizeMismatch("A and B must be square matrices of the same size")
    defect = commutator_defect(a, b)
    if defect is not None:
        raise NotCommuting(*defect)


def k0_of_pair(a: IntLike, b: IntLike) -> FgAbelianGroup:
    """Z^N / ((1-A)Z^N + (1-B)Z^N) plus the free part Ker(1-A) n Ker(1-B).

    Raises:
        NotCommuting: If AB != BA
    """
    a_matrix, b_matrix = as_int_matrix(a), as_int_matrix(b)
    _check_pair(a_matrix, b_matrix)
    identity = IntMatrix.identity(a_matrix.rows)
    one_minus_a = identity - a_matrix
    one_minus_b = identity - b_matrix
    quotient = cokernel(one_minus_a.hstack(one_minus_b))
    common_kernel = kernel_basis(one_minus_a.vstack(one_minus_b))
    return quotient.direct_sum(FgAbelianGroup(rank=common_kernel.cols))


def _restricted_cokernel(one_minus_a: IntMatrix, one_minus_b: IntMatrix) -> FgAbelianGroup:
    """Ker(1-B) / (1-A)Ker(1-B), computed in coordinates of a kernel basis."""
    basis = kernel_basis(one_minus_b)
    if basis.cols == 0:
        return FgAbelianGroup()
    images = []
    for column in basis.columns():
        coordinates = solve_in_lattice(basis, one_minus_a.apply(column))
        if coordinates is None:
            raise InternalInvariant("1-A does not preserve the kernel of 1-B")
        images.append(coordinates)
    return cokernel(IntMatrix.from_columns(images, rows=basis.cols))


def _induced_kernel(one_minus_a: IntMatrix, one_minus_b: IntMatrix) -> FgAbelianGroup:
    """Kernel of the map induced by 1-A on Z^N / (1-B)Z^N.

    The kernel is F / L with L = (1-B)Z^N and F = {x : (1-A)x in L}. F is spanned by the
    x-parts G of the integer kernel of [1-A | -(1-B)]; pulling L back along c -> Gc gives
    F / L = Z^p / (X Z^k + Ker G) where G X = 1-B.
    """
    n = one_minus_a.rows
    relation = one_minus_a.hstack(-one_minus_b)
    solutions = kernel_basis(relation)
    generators = IntMatrix.from_rows(solutions.entries[:n], cols=solutions.cols)

    preimages = []
    for column in one_minus_b.columns():
        preimage = solve_in_lattice(generators, column)
        if preimage is None:
            raise InternalInvariant("(1-B)Z^N is not contained in its preimage lattice")
        preimages.append(preimage)
    relations = IntMatrix.from_columns(preimages, rows=generators.cols)
    return cokernel(relations.hstack(kernel_basis(generators)))


def k1_of_pair(a: IntLike, b: IntLike) -> ExtensionReport:
    """The short exact sequence for K1 of a commuting pair.

    Returns:
        sub = Ker(1-B) / (1-A)Ker(1-B) and quot = Ker of 1-A acting on Z^N / (1-B)Z^N;
        the total group is named only when the extension is known to split.

    Raises:
        NotCommuting: If AB != BA
    """
    a_matrix, b_matrix = as_int_matrix(a), as_int_matrix(b)
    _check_pair(a_matrix, b_matrix)
    identity = IntMatrix.identity(a_matrix.rows)
    one_minus_a = identity - a_matrix
    one_minus_b = identity - b_matrix

    sub = _restricted_cokernel(one_minus_a, one_minus_b)
    quot = _induced_kernel(one_minus_a, one_minus_b)
    if quot.is_free or sub.is_trivial or quot.is_trivial:
        return ExtensionReport(sub=sub, quot=quot, split="yes", total=sub.direct_sum(quot))
    return ExtensionReport(sub=sub, quot=quot, split="unknown")


def lambda_matrices(system: TextileSystem) -> Tuple[IntMatrix, IntMatrix]:
    """L(i, j) = number of letters with rho_alpha(E_i) >= E_j, for rho and for eta."""
    return (
        IntMatrix.from_rows(system.rho.transfer_matrix().tolist()),
        IntMatrix.from_rows(system.eta.transfer_matrix().tolist()),
    )


def k_groups_textile(system: TextileSystem, depth: int = 1) -> KGroups:
    """K0 and K1 of the algebra of a textile system that forms square.

    Raises:
        NotSquare: If the system does not form square
    """
    if not forms_square(system, depth):
        raise NotSquare("the textile system does not form square")
    l_rho, l_eta = lambda_matrices(system)
    return KGroups(k0=k0_of_pair(l_rho, l_eta), k1=k1_of_pair(l_rho, l_eta))


def _prime_factors(value: int) -> List[int]:
    primes = []
    p = 2
    while p * p <= value:
        if value % p == 0:
            primes.append(p)
            while value % p == 0:
                value //= p
        p += 1
    if value > 1:
        primes.append(value)
    return primes


def group_from_element_orders(orders: Sequence[int]) -> FgAbelianGroup:
    """Reconstruct a finite abelian group from the orders of all of its elements.

    For each prime p the number of elements killed by p^k is p^(sum of min(e_i, k))
    over the p-primary cyclic factors Z/p^e_i, which determines the exponents e_i.
    """
    size = len(orders)
    if size == 0:
        raise ValueError("a group has at least one element")
    cyclic_orders: List[int] = []
    for p in _prime_factors(size):
        logs = [0]
        power = p
        while True:
            killed = sum(1 for order in orders if power % order == 0)
            exponent, remainder = 0, killed
            while remainder % p == 0 and remainder > 1:
                remainder //= p
                exponent += 1
            if remainder != 1:
                raise ValueError("element orders do not come from an abelian group")
            if exponent == logs[-1]:
                break
            logs.append(exponent)
            power *= p
        at_least = [logs[k] - logs[k - 1] for k in range(1, len(logs))] + [0]
        for k in range(1, len(logs)):
            cyclic_orders.extend([p**k] * (at_least[k - 1] - at_least[k]))
    group = FgAbelianGroup.from_orders(0, cyclic_orders)
    if group.order != size:
        raise ValueError("element orders do not come from an abelian group")
    return group


def cyclic_subgroup_oracle(n: int, m: int) -> FgAbelianGroup:
    """The subgroup {k mod m : nk = 0 mod m} of Z/m, found by enumeration."""
    if n < 1 or m < 1:
        raise ValueError("n and m must be positive")
    members = [k for k in range(m) if (n * k) % m == 0]
    return group_from_element_orders([m // gcd(k, m) for k in members])


def parse_group(text: str) -> FgAbelianGroup:
    """Parse the rendering "Z/2 + Z/4 + Z^2", "Z" or "0".

    Raises:
        ParseError: If a summand is not "0", "Z", "Z^r" or "Z/d"
    """
    rank = 0
    orders: List[int] = []
    for part in (piece.strip() for piece in text.split("+")):
        try:
            if part == "0":
                continue
            if part == "Z":
                rank += 1
            elif part.startswith("Z^"):
                exponent = int(part[2:])
                if exponent < 0:
                    raise ValueError(exponent)
                rank += exponent
            elif part.startswith("Z/"):
                order = int(part[2:])
                if order < 1:
                    raise ValueError(order)
                orders.append(order)
            else:
                raise ValueError(part)
        except ValueError:
            raise ParseError(f"invalid group summand {part!r}")
    return FgAbelianGroup.from_orders(rank, orders)

