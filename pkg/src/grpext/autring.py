"""Matrix model of the automorphism ring of a finite abelian p-group.

An abelian p-group Z_{p^{e_1}} x ... x Z_{p^{e_s}} with e_1 <= ... <= e_s has
its endomorphisms represented by s x s integer matrices whose column j holds
the exponents of the image of the j-th basis generator. Entry (i, j) lives in
{0, ..., p^{e_i} - 1} and must be divisible by p^{e_i - e_min(i,j)}; the units
(matrices invertible mod p) form a group isomorphic to Aut of the group.

The module also provides the block-reduction map psi onto block-diagonal
invertible matrices over F_p, rational canonical forms with explicit
transformation matrices, and a conjugacy solver for matrices whose order is
coprime with p.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from typing import Optional, Sequence

from .arith import ModularLinearSystem, is_prime, solve_modular_system
from .errors import (
    Condition3Error,
    InvariantBreachError,
    MalformedInputError,
)

IntMatrix = tuple[tuple[int, ...], ...]


def _freeze(rows: Sequence[Sequence[int]]) -> IntMatrix:
    return tuple(tuple(int(x) for x in r) for r in rows)


@dataclass(frozen=True)
class PType:
    """Isomorphism type of an abelian p-group: prime p and ascending exponents."""

    p: int
    exps: tuple[int, ...]

    def __post_init__(self):
        if not is_prime(self.p):
            raise MalformedInputError(f"{self.p} is not prime")
        if not self.exps or any(e < 1 for e in self.exps):
            raise MalformedInputError("exponents must be positive and nonempty")
        if list(self.exps) != sorted(self.exps):
            raise MalformedInputError("exponents must be nondecreasing")

    @property
    def s(self) -> int:
        return len(self.exps)

    @property
    def order(self) -> int:
        return self.p ** sum(self.exps)

    @property
    def moduli(self) -> tuple[int, ...]:
        return tuple(self.p**e for e in self.exps)

    def block_structure(self) -> list[tuple[int, int, int]]:
        """Runs of equal exponents as (exponent, start, stop) index spans."""
        spans = []
        start = 0
        for i in range(1, self.s + 1):
            if i == self.s or self.exps[i] != self.exps[start]:
                spans.append((self.exps[start], start, i))
                start = i
        return spans


@dataclass(frozen=True)
class AutMatrix:
    """Endomorphism matrix: row i reduced mod p^{e_i}, divisibility respected."""

    ptype: PType
    rows: IntMatrix


def _check_divisibility(ptype: PType, rows: Sequence[Sequence[int]]) -> Optional[tuple[int, int]]:
    p, exps = ptype.p, ptype.exps
    for i in range(ptype.s):
        for j in range(ptype.s):
            need = exps[i] - exps[min(i, j)]
            if need > 0 and rows[i][j] % p**need:
                return (i, j)
    return None


def validate_M(ptype: PType, rows: Sequence[Sequence[int]]) -> AutMatrix:
    """Strict membership test: ranges and divisibility exactly as given."""
    if len(rows) != ptype.s or any(len(r) != ptype.s for r in rows):
        raise MalformedInputError(f"matrix must be {ptype.s}x{ptype.s}")
    for i in range(ptype.s):
        bound = ptype.moduli[i]
        for j in range(ptype.s):
            if not 0 <= rows[i][j] < bound:
                raise MalformedInputError(
                    f"entry ({i + 1},{j + 1})={rows[i][j]} outside [0, {bound})"
                )
    bad = _check_divisibility(ptype, rows)
    if bad is not None:
        i, j = bad
        need = ptype.p ** (ptype.exps[i] - ptype.exps[min(i, j)])
        raise MalformedInputError(
            f"entry ({i + 1},{j + 1})={rows[i][j]} must be divisible by {need}"
        )
    return AutMatrix(ptype, _freeze(rows))


def make_matrix(ptype: PType, rows: Sequence[Sequence[int]]) -> AutMatrix:
    """Reduce each row i mod p^{e_i}, then require divisibility membership."""
    if len(rows) != ptype.s or any(len(r) != ptype.s for r in rows):
        raise MalformedInputError(f"matrix must be {ptype.s}x{ptype.s}")
    reduced = [[rows[i][j] % ptype.moduli[i] for j in range(ptype.s)] for i in range(ptype.s)]
    bad = _check_divisibility(ptype, reduced)
    if bad is not None:
        raise MalformedInputError(f"entry {bad} violates the divisibility constraint")
    return AutMatrix(ptype, _freeze(reduced))


def identity_matrix(ptype: PType) -> AutMatrix:
    return AutMatrix(ptype, _freeze([[int(i == j) for j in range(ptype.s)] for i in range(ptype.s)]))


def star_mul(u: AutMatrix, u2: AutMatrix) -> AutMatrix:
    """Matrix product with row i of the result reduced modulo p^{e_i}."""
    if u.ptype != u2.ptype:
        raise MalformedInputError("star_mul requires matching types")
    s = u.ptype.s
    moduli = u.ptype.moduli
    a, b = u.rows, u2.rows
    out = [
        tuple(sum(a[i][k] * b[k][j] for k in range(s)) % moduli[i] for j in range(s))
        for i in range(s)
    ]
    return AutMatrix(u.ptype, tuple(out))


def star_pow(u: AutMatrix, n: int) -> AutMatrix:
    if n < 0:
        raise MalformedInputError("star_pow needs n >= 0")
    result = identity_matrix(u.ptype)
    base = u
    while n:
        if n & 1:
            result = star_mul(result, base)
        base = star_mul(base, base)
        n >>= 1
    return result


def _det_mod(rows: Sequence[Sequence[int]], p: int) -> int:
    n = len(rows)
    a = [[x % p for x in r] for r in rows]
    det = 1
    for col in range(n):
        pivot = next((r for r in range(col, n) if a[r][col]), None)
        if pivot is None:
            return 0
        if pivot != col:
            a[col], a[pivot] = a[pivot], a[col]
            det = -det % p
        det = det * a[col][col] % p
        inv = pow(a[col][col], -1, p)
        for r in range(col + 1, n):
            if a[r][col]:
                f = a[r][col] * inv % p
                a[r] = [(x - f * y) % p for x, y in zip(a[r], a[col])]
    return det % p


def is_in_R(u: AutMatrix) -> bool:
    return _det_mod(u.rows, u.ptype.p) != 0


def is_in_N(u: AutMatrix) -> bool:
    """Kernel pattern: diagonal blocks congruent to the identity mod p."""
    p = u.ptype.p
    for _, start, stop in u.ptype.block_structure():
        for i in range(start, stop):
            for j in range(start, stop):
                if (u.rows[i][j] - int(i == j)) % p:
                    return False
    return True


@dataclass(frozen=True)
class BlockDiagGF:
    """Block-diagonal invertible matrices over F_p, one block per exponent run."""

    p: int
    blocks: tuple[IntMatrix, ...]


def psi(u: AutMatrix) -> BlockDiagGF:
    """Reduce the diagonal blocks mod p, discarding everything off-block."""
    if not is_in_R(u):
        raise MalformedInputError("psi is defined on units only")
    p = u.ptype.p
    blocks = []
    for _, start, stop in u.ptype.block_structure():
        blocks.append(
            _freeze([[u.rows[i][j] % p for j in range(start, stop)] for i in range(start, stop)])
        )
    return BlockDiagGF(p, tuple(blocks))


def identity_gf(p: int, sizes: Sequence[int]) -> BlockDiagGF:
    return BlockDiagGF(
        p, tuple(_freeze([[int(i == j) for j in range(n)] for i in range(n)]) for n in sizes)
    )


# --- F_p matrix and polynomial helpers ------------------------------------


def _gf_mul(a, b, p):
    n, m, k = len(a), len(b[0]), len(b)
    return _freeze(
        [[sum(a[i][t] * b[t][j] for t in range(k)) % p for j in range(m)] for i in range(n)]
    )


def _gf_identity(n):
    return _freeze([[int(i == j) for j in range(n)] for i in range(n)])


def _gf_inv(rows, p):
    n = len(rows)
    a = [[x % p for x in r] + [int(i == j) for j in range(n)] for i, r in enumerate(rows)]
    for col in range(n):
        pivot = next((r for r in range(col, n) if a[r][col]), None)
        if pivot is None:
            return None
        a[col], a[pivot] = a[pivot], a[col]
        inv = pow(a[col][col], -1, p)
        a[col] = [x * inv % p for x in a[col]]
        for r in range(n):
            if r != col and a[r][col]:
                f = a[r][col]
                a[r] = [(x - f * y) % p for x, y in zip(a[r], a[col])]
    return _freeze([r[n:] for r in a])


def _pnorm(c):
    c = [x for x in c]
    while c and c[-1] == 0:
        c.pop()
    return c


def _padd(a, b, p):
    n = max(len(a), len(b))
    return _pnorm([((a[i] if i < len(a) else 0) + (b[i] if i < len(b) else 0)) % p for i in range(n)])


def _pscale(a, k, p):
    return _pnorm([x * k % p for x in a])


def _pmul(a, b, p):
    if not a or not b:
        return []
    out = [0] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                out[i + j] = (out[i + j] + x * y) % p
    return _pnorm(out)


def _pdivmod(a, b, p):
    if not b:
        raise ZeroDivisionError("polynomial division by zero")
    a = list(a)
    q = [0] * max(0, len(a) - len(b) + 1)
    inv = pow(b[-1], -1, p)
    while len(a) >= len(b) and _pnorm(a):
        a = _pnorm(a)
        if len(a) < len(b):
            break
        shift = len(a) - len(b)
        f = a[-1] * inv % p
        q[shift] = f
        for i, x in enumerate(b):
            a[shift + i] = (a[shift + i] - f * x) % p
        a = _pnorm(a)
    return _pnorm(q), _pnorm(a)


def _pmonic(a, p):
    if not a:
        return []
    return _pscale(a, pow(a[-1], -1, p), p)


def _poly_snf_uinv(mat, p):
    """Diagonalize a polynomial matrix; return (diagonal, U^{-1}) for S = U A V."""
    n = len(mat)
    a = [[list(c) for c in row] for row in mat]
    u_inv = [[[1] if i == j else [] for j in range(n)] for i in range(n)]

    def swap_rows(i, j):
        a[i], a[j] = a[j], a[i]
        for r in u_inv:
            r[i], r[j] = r[j], r[i]

    def swap_cols(i, j):
        for r in a:
            r[i], r[j] = r[j], r[i]

    def add_row(dst, src, c):
        if not c:
            return
        a[dst] = [_padd(x, _pmul(c, y, p), p) for x, y in zip(a[dst], a[src])]
        neg = _pscale(c, p - 1, p)
        for r in u_inv:
            r[src] = _padd(r[src], _pmul(neg, r[dst], p), p)

    def add_col(dst, src, c):
        if not c:
            return
        for r in a:
            r[dst] = _padd(r[dst], _pmul(c, r[src], p), p)

    def scale_row(i, k):
        a[i] = [_pscale(x, k, p) for x in a[i]]
        kinv = pow(k, -1, p)
        for r in u_inv:
            r[i] = _pscale(r[i], kinv, p)

    for t in range(n):
        while True:
            pivot = None
            best = None
            for i in range(t, n):
                for j in range(t, n):
                    if a[i][j] and (best is None or len(a[i][j]) < best):
                        pivot, best = (i, j), len(a[i][j])
            if pivot is None:
                break
            pi, pj = pivot
            if pi != t:
                swap_rows(t, pi)
            if pj != t:
                swap_cols(t, pj)
            clean = True
            for i in range(t + 1, n):
                if a[i][t]:
                    q, _ = _pdivmod(a[i][t], a[t][t], p)
                    add_row(i, t, _pscale(q, p - 1, p))
                    if a[i][t]:
                        clean = False
            for j in range(t + 1, n):
                if a[t][j]:
                    q, _ = _pdivmod(a[t][j], a[t][t], p)
                    add_col(j, t, _pscale(q, p - 1, p))
                    if a[t][j]:
                        clean = False
            if not clean:
                continue
            culprit = None
            for i in range(t + 1, n):
                for j in range(t + 1, n):
                    _, rem = _pdivmod(a[i][j], a[t][t], p)
                    if rem:
                        culprit = i
                        break
                if culprit is not None:
                    break
            if culprit is None:
                break
            add_row(t, culprit, [1])
    for t in range(n):
        if a[t][t] and a[t][t][-1] != 1:
            scale_row(t, pow(a[t][t][-1], -1, p))
    diag = [a[t][t] for t in range(n)]
    return diag, u_inv


def _companion(poly, p):
    k = len(poly) - 1
    c = [[0] * k for _ in range(k)]
    for i in range(1, k):
        c[i][i - 1] = 1
    for i in range(k):
        c[i][k - 1] = (-poly[i]) % p
    return c


@dataclass(frozen=True)
class RCFResult:
    """form = T * mat * T^{-1} with T invertible mod p; factors ascending."""

    p: int
    form: IntMatrix
    transform: IntMatrix
    factors: tuple[tuple[int, ...], ...]


def rcf(mat: Sequence[Sequence[int]], p: int) -> RCFResult:
    """Rational (Frobenius) canonical form over F_p with its transformation.

    Works through the invariant factors of xI - mat; the transformation T
    satisfies T * mat = form * T and is verified before returning.
    """
    n = len(mat)
    char = [
        [_pnorm([(-mat[i][j]) % p]) if i != j else _pnorm([(-mat[i][j]) % p, 1]) for j in range(n)]
        for i in range(n)
    ]
    diag, u_inv = _poly_snf_uinv(char, p)
    entries = sorted(range(n), key=lambda t: len(diag[t]))
    factors = []
    basis_cols: list[list[int]] = []
    for t in entries:
        d = diag[t]
        if len(d) <= 1:
            continue
        factors.append(tuple(_pmonic(d, p)))
        gen = [0] * n
        for j in range(n):
            coeffs = u_inv[j][t]
            vec = [0] * n
            for c in reversed(coeffs):
                vec = [
                    (sum(mat[r][k] * vec[k] for k in range(n)) + (c if r == j else 0)) % p
                    for r in range(n)
                ]
            gen = [(g + v) % p for g, v in zip(gen, vec)]
        col = gen
        for _ in range(len(d) - 1):
            basis_cols.append(col)
            col = [sum(mat[r][k] * col[k] for k in range(n)) % p for r in range(n)]
    if sum(len(f) - 1 for f in factors) != n:
        raise InvariantBreachError("invariant factor degrees do not sum to n")
    q = [[basis_cols[j][i] for j in range(n)] for i in range(n)]
    t_inv = _freeze(q)
    t_mat = _gf_inv(t_inv, p)
    if t_mat is None:
        raise InvariantBreachError("cyclic vectors did not form a basis")
    form = [[0] * n for _ in range(n)]
    pos = 0
    for f in factors:
        k = len(f) - 1
        block = _companion(f, p)
        for i in range(k):
            for j in range(k):
                form[pos + i][pos + j] = block[i][j]
        pos += k
    form_f = _freeze(form)
    if _gf_mul(t_mat, _freeze(mat), p) != _gf_mul(form_f, t_mat, p):
        raise InvariantBreachError("canonical form transform failed verification")
    return RCFResult(p, form_f, t_mat, tuple(factors))


def gl_conjugator(v1, v2, p: int) -> Optional[IntMatrix]:
    """T with T*v1 = v2*T over F_p, or None when canonical forms differ."""
    r1 = rcf(v1, p)
    r2 = rcf(v2, p)
    if r1.factors != r2.factors:
        return None
    t2_inv = _gf_inv(r2.transform, p)
    t = _gf_mul(t2_inv, r1.transform, p)
    if _gf_mul(t, _freeze(v1), p) != _gf_mul(_freeze(v2), t, p):
        raise InvariantBreachError("conjugator failed verification")
    return t


def matrix_order(u: AutMatrix, cap: int) -> Optional[int]:
    """Least n <= cap with u^n = identity; None when the cap is exceeded."""
    if cap < 1:
        raise MalformedInputError("order cap must be >= 1")
    ident = identity_matrix(u.ptype)
    w = u
    for n in range(1, cap + 1):
        if w == ident:
            return n
        w = star_mul(w, u)
    return None


def _n_pattern(ptype: PType) -> list[list[int]]:
    """Exponent c_ij such that kernel entries are delta_ij + p^{c_ij} * free."""
    s = ptype.s
    block_of = [0] * s
    for b, (_, start, stop) in enumerate(ptype.block_structure()):
        for i in range(start, stop):
            block_of[i] = b
    out = [[0] * s for _ in range(s)]
    for i in range(s):
        for j in range(s):
            if i == j or block_of[i] == block_of[j]:
                out[i][j] = 1
            else:
                out[i][j] = max(ptype.exps[i] - ptype.exps[min(i, j)], 0)
    return out


def conjugacy(u1: AutMatrix, u2: AutMatrix, order_cap: int) -> Optional[AutMatrix]:
    """Solve U * u1 = u2 * U for U in the unit group, or report None.

    Requires both input orders to be finite within order_cap and coprime with
    p. The found conjugator is verified by substitution before returning.
    """
    if u1.ptype != u2.ptype:
        raise MalformedInputError("conjugacy requires matching types")
    ptype = u1.ptype
    p, s = ptype.p, ptype.s
    for u in (u1, u2):
        if not is_in_R(u):
            raise MalformedInputError("conjugacy inputs must be units")
        order = matrix_order(u, order_cap)
        if order is None:
            raise Condition3Error(f"matrix order exceeds cap {order_cap}")
        if order % p == 0:
            raise Condition3Error(f"matrix order {order} is not coprime with p={p}")

    spans = ptype.block_structure()
    v1, v2 = psi(u1), psi(u2)
    conjugators = []
    for b1, b2 in zip(v1.blocks, v2.blocks):
        t = gl_conjugator(b1, b2, p)
        if t is None:
            return None
        conjugators.append(t)

    x_rows = [[0] * s for _ in range(s)]
    for t, (_, start, stop) in zip(conjugators, spans):
        for i in range(start, stop):
            for j in range(start, stop):
                x_rows[i][j] = t[i - start][j - start]
    x = make_matrix(ptype, x_rows)
    if not is_in_R(x):
        raise InvariantBreachError("block lift of the conjugators is singular")

    pc = [[p**c for c in row] for row in _n_pattern(ptype)]
    xu1 = star_mul(x, u1)
    u2x = star_mul(u2, x)
    n_var = s * s
    rows = []
    rhs = []
    moduli = []
    for i in range(s):
        for j in range(s):
            row = [0] * n_var
            for k in range(s):
                xik = x.rows[i][k]
                if xik == 0:
                    continue
                for l in range(s):
                    row[k * s + l] += xik * u1.rows[l][j] * pc[k][l]
            for l in range(s):
                row[l * s + j] -= u2x.rows[i][l] * pc[l][j]
            rows.append(tuple(row))
            rhs.append(u2x.rows[i][j] - xu1.rows[i][j])
            moduli.append(ptype.moduli[i])
    solution = solve_modular_system(
        ModularLinearSystem(tuple(rows), tuple(rhs), tuple(moduli))
    )
    if solution is None:
        raise InvariantBreachError("kernel correction system is infeasible")
    y_rows = [
        [(int(i == j) + pc[i][j] * solution[i * s + j]) % ptype.moduli[i] for j in range(s)]
        for i in range(s)
    ]
    y = make_matrix(ptype, y_rows)
    if not is_in_N(y):
        raise InvariantBreachError("kernel correction left the kernel pattern")
    result = star_mul(x, y)
    if star_mul(result, u1) != star_mul(u2, result) or not is_in_R(result):
        raise InvariantBreachError("conjugator failed final verification")
    return result


def random_unit(ptype: PType, rng) -> AutMatrix:
    """Uniformly sample matrix entries within their constraints until a unit."""
    p = ptype.p
    while True:
        rows = []
        for i in range(ptype.s):
            row = []
            for j in range(ptype.s):
                step = p ** (ptype.exps[i] - ptype.exps[min(i, j)])
                count = p ** ptype.exps[min(i, j)]
                row.append(step * rng.randrange(count))
            rows.append(row)
        if _det_mod(rows, p) != 0:
            return AutMatrix(ptype, _freeze(rows))


def enumerate_R(ptype: PType) -> list[AutMatrix]:
    """All units, by direct enumeration. Guarded to small groups."""
    if ptype.order > 2**12:
        raise MalformedInputError("enumerate_R is restricted to |A| <= 4096")
    p = ptype.p
    choice_lists = []
    for i in range(ptype.s):
        for j in range(ptype.s):
            step = p ** (ptype.exps[i] - ptype.exps[min(i, j)])
            count = p ** ptype.exps[min(i, j)]
            choice_lists.append([t * step for t in range(count)])
    out = []
    s = ptype.s
    for combo in itertools.product(*choice_lists):
        rows = [combo[i * s : (i + 1) * s] for i in range(s)]
        if _det_mod(rows, p) != 0:
            out.append(AutMatrix(ptype, _freeze(rows)))
    return out


# --- Automorphisms of a general abelian group: one block per prime ---------


@dataclass(frozen=True)
class AutBlocks:
    """Blockwise automorphism of an abelian group, primes strictly ascending."""

    blocks: tuple[AutMatrix, ...]

    def __post_init__(self):
        primes = [b.ptype.p for b in self.blocks]
        if primes != sorted(set(primes)):
            raise MalformedInputError("blocks must come in strictly ascending primes")


def blocks_identity(ptypes: Sequence[PType]) -> AutBlocks:
    return AutBlocks(tuple(identity_matrix(t) for t in ptypes))


def blocks_star(a: AutBlocks, b: AutBlocks) -> AutBlocks:
    return AutBlocks(tuple(star_mul(x, y) for x, y in zip(a.blocks, b.blocks)))


def blocks_pow(a: AutBlocks, n: int) -> AutBlocks:
    return AutBlocks(tuple(star_pow(x, n) for x in a.blocks))


def blocks_is_identity(a: AutBlocks) -> bool:
    return all(b == identity_matrix(b.ptype) for b in a.blocks)


def blocks_order(a: AutBlocks, cap: int) -> Optional[int]:
    orders = []
    for b in a.blocks:
        o = matrix_order(b, cap)
        if o is None:
            return None
        orders.append(o)
    out = 1
    for o in orders:
        out = math.lcm(out, o)
    return out if out <= cap else None


def apply_blocks(a: AutBlocks, vec: Sequence[int]) -> tuple[int, ...]:
    """Apply the blockwise matrix to an exponent vector, per-coordinate moduli."""
    out = []
    pos = 0
    for b in a.blocks:
        s = b.ptype.s
        seg = vec[pos : pos + s]
        for i in range(s):
            out.append(sum(b.rows[i][j] * seg[j] for j in range(s)) % b.ptype.moduli[i])
        pos += s
    if pos != len(vec):
        raise MalformedInputError("vector length does not match block sizes")
    return tuple(out)


# --- Matrix text format -----------------------------------------------------


def parse_matrix_file(text: str) -> AutMatrix:
    """Parse `ptype <p> <e_1> ... <e_s>` followed by s rows of s integers."""
    lines = [ln.strip() for ln in text.splitlines()]
    lines = [ln for ln in lines if ln and not ln.startswith("#")]
    if not lines or not lines[0].startswith("ptype"):
        raise MalformedInputError("matrix file must start with a ptype header")
    head = lines[0].split()
    if len(head) < 3:
        raise MalformedInputError("ptype header needs a prime and exponents")
    try:
        p = int(head[1])
        exps = tuple(int(x) for x in head[2:])
    except ValueError as exc:
        raise MalformedInputError(f"bad ptype header: {exc}") from None
    ptype = PType(p, exps)
    if len(lines) != 1 + ptype.s:
        raise MalformedInputError(f"expected {ptype.s} matrix rows")
    rows = []
    for ln in lines[1:]:
        try:
            row = [int(x) for x in ln.split()]
        except ValueError as exc:
            raise MalformedInputError(f"bad matrix row: {exc}") from None
        if len(row) != ptype.s:
            raise MalformedInputError(f"expected {ptype.s} entries per row")
        rows.append(row)
    return validate_M(ptype, rows)


def format_matrix(u: AutMatrix) -> str:
    head = "ptype " + str(u.ptype.p) + " " + " ".join(str(e) for e in u.ptype.exps)
    body = "\n".join(" ".join(str(x) for x in row) for row in u.rows)
    return head + "\n" + body + "\n"
