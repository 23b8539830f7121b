"""Black-box finite groups: opaque element codes plus product/inverse oracles.

A group handle exposes a generator list, an identity code, and two oracles
(product and inverse) that each count as one operation. Algorithms elsewhere
in the package only ever touch groups through this surface; the two concrete
backends (multiplication table, semidirect product) live here.
"""

from __future__ import annotations

import math
import random
import threading
from dataclasses import dataclass
from typing import Callable, Optional, Sequence

from . import autring
from .arith import prime_power
from .errors import MalformedInputError, OpBudgetExceeded

ElementCode = bytes


class _OpCounter:
    """Oracle-call counter, safe to bump from concurrent readers."""

    def __init__(self):
        self._lock = threading.Lock()
        self._count = 0

    def tick(self):
        with self._lock:
            self._count += 1

    @property
    def value(self) -> int:
        return self._count


class GroupHandle:
    """Oracle view of a finite group.

    mul and inv each increment the operation counter by exactly one. A budget
    handle created with with_budget shares the oracles (and keeps feeding the
    parent counter) but aborts once its own allowance runs out.
    """

    def __init__(
        self,
        identity: ElementCode,
        generators: Sequence[ElementCode],
        mul: Callable[[ElementCode, ElementCode], ElementCode],
        inv: Callable[[ElementCode], ElementCode],
        name: str = "group",
        parse_element: Optional[Callable[[str], ElementCode]] = None,
    ):
        self.identity = identity
        self.generators = list(generators)
        self.name = name
        self._mul = mul
        self._inv = inv
        self._counter = _OpCounter()
        self._budget: Optional[int] = None
        self._parent: Optional[GroupHandle] = None
        self.parse_element = parse_element or self._parse_raw

    @staticmethod
    def _parse_raw(text: str) -> ElementCode:
        return text.encode("ascii")

    def _tick(self):
        self._counter.tick()
        if self._budget is not None and self._counter.value > self._budget:
            raise OpBudgetExceeded(f"operation budget {self._budget} exceeded")
        if self._parent is not None:
            self._parent._tick()

    def mul(self, a: ElementCode, b: ElementCode) -> ElementCode:
        self._tick()
        return self._mul(a, b)

    def inv(self, a: ElementCode) -> ElementCode:
        self._tick()
        return self._inv(a)

    @property
    def operation_count(self) -> int:
        return self._counter.value

    def with_budget(self, budget: int) -> "GroupHandle":
        child = GroupHandle(
            self.identity, self.generators, self._mul, self._inv, self.name, self.parse_element
        )
        child._budget = budget
        child._parent = self
        return child


def with_generators(G: GroupHandle, generators: Sequence[ElementCode]) -> GroupHandle:
    """A view of the same group with a different generator list.

    The caller is responsible for the new list actually generating the group.
    """
    return GroupHandle(
        G.identity, generators, G._mul, G._inv, name=G.name, parse_element=G.parse_element
    )


def group_pow(G: GroupHandle, g: ElementCode, n: int) -> ElementCode:
    """g^n through the oracles, square-and-multiply; n may be negative."""
    if n < 0:
        return group_pow(G, G.inv(g), -n)
    result = G.identity
    base = g
    while n:
        if n & 1:
            result = G.mul(result, base)
        base = G.mul(base, base)
        n >>= 1
    return result


def commutator_generators(G: GroupHandle) -> list[ElementCode]:
    """The conjugated commutators g_k [g_i, g_j] g_k^{-1} over all index triples.

    The returned set generates the derived subgroup. Duplicates are removed
    and the list is sorted for determinism.
    """
    gens = G.generators
    invs = [G.inv(g) for g in gens]
    comms = []
    for i, gi in enumerate(gens):
        for j, gj in enumerate(gens):
            c = G.mul(G.mul(gi, gj), G.mul(invs[i], invs[j]))
            comms.append(c)
    out = set()
    for k, gk in enumerate(gens):
        for c in comms:
            out.add(G.mul(G.mul(gk, c), invs[k]))
    return sorted(out)


def closure(G: GroupHandle, seeds: Sequence[ElementCode], limit: Optional[int] = None) -> list[ElementCode]:
    """Subgroup generated by seeds, as a sorted code list (breadth-first)."""
    seen = {G.identity}
    frontier = [G.identity]
    gens = [g for g in seeds]
    while frontier:
        nxt = []
        for a in frontier:
            for g in gens:
                b = G.mul(a, g)
                if b not in seen:
                    seen.add(b)
                    nxt.append(b)
                    if limit is not None and len(seen) > limit:
                        raise MalformedInputError(f"closure exceeded limit {limit}")
        frontier = nxt
    return sorted(seen)


# --- Multiplication-table backend -------------------------------------------


@dataclass(frozen=True)
class TableGroupSpec:
    """n x n Cayley table over indices 0..n-1 with index 0 the identity."""

    n: int
    table: tuple[tuple[int, ...], ...]


def _greedy_generators(table: Sequence[Sequence[int]]) -> list[int]:
    n = len(table)
    gens: list[int] = []
    reached = {0}
    while len(reached) < n:
        candidate = next(i for i in range(n) if i not in reached)
        gens.append(candidate)
        frontier = list(reached)
        reached.add(candidate)
        frontier.append(candidate)
        while frontier:
            nxt = []
            for a in frontier:
                for g in gens:
                    b = table[a][g]
                    if b not in reached:
                        reached.add(b)
                        nxt.append(b)
            frontier = nxt
    return gens


def validate_table_spec(spec: TableGroupSpec) -> None:
    """Latin square, identity row/column, and associativity.

    Associativity is verified in full (through a generating set) for n <= 512
    and on sampled triples above that.
    """
    n = spec.n
    table = spec.table
    if len(table) != n or any(len(r) != n for r in table):
        raise MalformedInputError("table shape does not match the declared order")
    full = set(range(n))
    for i in range(n):
        if set(table[i]) != full:
            raise MalformedInputError(f"row {i} is not a permutation")
        if {table[r][i] for r in range(n)} != full:
            raise MalformedInputError(f"column {i} is not a permutation")
    for i in range(n):
        if table[0][i] != i or table[i][0] != i:
            raise MalformedInputError("index 0 must act as the identity")
    if n <= 512:
        # Light's test: checking (a*g)*b == a*(g*b) over a generating set
        # suffices for full associativity.
        for g in _greedy_generators(table):
            for a in range(n):
                row = table[a]
                ag = row[g]
                grow = table[g]
                for b in range(n):
                    if table[ag][b] != table[a][grow[b]]:
                        raise MalformedInputError(
                            f"associativity fails at ({a},{g},{b})"
                        )
    else:
        rng = random.Random(0)
        for _ in range(4096):
            a, b, c = rng.randrange(n), rng.randrange(n), rng.randrange(n)
            if table[table[a][b]][c] != table[a][table[b][c]]:
                raise MalformedInputError(f"associativity fails at ({a},{b},{c})")


def table_group(
    spec: TableGroupSpec, generators: Optional[Sequence[int]] = None, name: str = "table"
) -> GroupHandle:
    validate_table_spec(spec)
    n = spec.n
    width = len(str(n - 1))
    codes = [str(i).zfill(width).encode("ascii") for i in range(n)]
    index = {c: i for i, c in enumerate(codes)}
    inverse = [0] * n
    for i in range(n):
        inverse[i] = spec.table[i].index(0)

    def decode(code: ElementCode) -> int:
        i = index.get(code)
        if i is None:
            raise MalformedInputError(f"unknown element code {code!r}")
        return i

    def mul(a: ElementCode, b: ElementCode) -> ElementCode:
        return codes[spec.table[decode(a)][decode(b)]]

    def inv(a: ElementCode) -> ElementCode:
        return codes[inverse[decode(a)]]

    if generators is None:
        gen_idx = _greedy_generators(spec.table)
    else:
        gen_idx = [int(g) for g in generators]
        if any(not 0 <= g < n for g in gen_idx):
            raise MalformedInputError("generator index out of range")
        reached = {0}
        frontier = [0]
        while frontier:
            nxt = []
            for a in frontier:
                for g in gen_idx:
                    b = spec.table[a][g]
                    if b not in reached:
                        reached.add(b)
                        nxt.append(b)
            frontier = nxt
        if len(reached) != n:
            raise MalformedInputError("given generators do not generate the group")

    def parse_element(text: str) -> ElementCode:
        try:
            i = int(text)
        except ValueError:
            raise MalformedInputError(f"bad table element {text!r}") from None
        if not 0 <= i < n:
            raise MalformedInputError(f"element index {i} out of range")
        return codes[i]

    return GroupHandle(
        codes[0], [codes[g] for g in gen_idx], mul, inv, name=name, parse_element=parse_element
    )


def cyclic_group(n: int, name: Optional[str] = None) -> GroupHandle:
    """Z_n with table-style index codes but a computed law (usable at any n)."""
    if n < 1:
        raise MalformedInputError("cyclic group order must be >= 1")
    width = len(str(n - 1)) if n > 1 else 1

    def encode(i: int) -> ElementCode:
        return str(i).zfill(width).encode("ascii")

    def decode(code: ElementCode) -> int:
        if len(code) != width or not code.isdigit():
            raise MalformedInputError(f"unknown element code {code!r}")
        i = int(code)
        if i >= n:
            raise MalformedInputError(f"unknown element code {code!r}")
        return i

    def mul(a: ElementCode, b: ElementCode) -> ElementCode:
        return encode((decode(a) + decode(b)) % n)

    def inv(a: ElementCode) -> ElementCode:
        return encode(-decode(a) % n)

    def parse_element(text: str) -> ElementCode:
        try:
            i = int(text)
        except ValueError:
            raise MalformedInputError(f"bad element {text!r}") from None
        if not 0 <= i < n:
            raise MalformedInputError(f"element index {i} out of range")
        return encode(i)

    gens = [] if n == 1 else [encode(1)]
    return GroupHandle(encode(0), gens, mul, inv, name=name or f"Z{n}", parse_element=parse_element)


def cyclic_table_spec(n: int) -> TableGroupSpec:
    return TableGroupSpec(n, tuple(tuple((i + j) % n for j in range(n)) for i in range(n)))


# --- Semidirect-product backend ----------------------------------------------


@dataclass(frozen=True)
class SemidirectGroupSpec:
    """A x| Z_m for abelian A given by prime powers qs, action of order | m.

    Elements are pairs (a, j) with a an exponent tuple reduced per coordinate
    and j in {0, ..., m-1}; (a, j) * (b, j') = (a + M^j b, j + j' mod m).
    """

    qs: tuple[int, ...]
    m: int
    action: autring.AutBlocks
    generators: Optional[tuple[tuple[tuple[int, ...], int], ...]] = None


def _split_prime_blocks(qs: Sequence[int]) -> list[tuple[int, int, int, tuple[int, ...]]]:
    """Spans (p, start, stop, exps) of equal-prime runs in the q list."""
    parsed = []
    for q in qs:
        pp = prime_power(q)
        if pp is None:
            raise MalformedInputError(f"{q} is not a prime power")
        parsed.append(pp)
    keys = [(p, e) for p, e in parsed]
    if keys != sorted(keys):
        raise MalformedInputError("prime powers must be ascending (prime, then exponent)")
    spans = []
    start = 0
    for i in range(1, len(parsed) + 1):
        if i == len(parsed) or parsed[i][0] != parsed[start][0]:
            p = parsed[start][0]
            exps = tuple(e for _, e in parsed[start:i])
            spans.append((p, start, i, exps))
            start = i
    return spans


def action_from_rows(qs: Sequence[int], rows: Sequence[Sequence[int]]) -> autring.AutBlocks:
    """Validate a full s x s action matrix and split it into per-prime blocks.

    Entries coupling distinct primes must be zero; each prime block must be an
    invertible endomorphism matrix of its component.
    """
    s = len(qs)
    if len(rows) != s or any(len(r) != s for r in rows):
        raise MalformedInputError(f"action matrix must be {s}x{s}")
    spans = _split_prime_blocks(qs)
    block_of = [0] * s
    for b, (_, start, stop, _) in enumerate(spans):
        for i in range(start, stop):
            block_of[i] = b
    for i in range(s):
        for j in range(s):
            if block_of[i] != block_of[j] and rows[i][j] != 0:
                raise MalformedInputError(
                    f"entry ({i + 1},{j + 1}) couples distinct primes; must be 0"
                )
    blocks = []
    for p, start, stop, exps in spans:
        ptype = autring.PType(p, exps)
        sub = [[rows[i][j] for j in range(start, stop)] for i in range(start, stop)]
        block = autring.validate_M(ptype, sub)
        if not autring.is_in_R(block):
            raise MalformedInputError(f"action block for p={p} is not invertible")
        blocks.append(block)
    return autring.AutBlocks(tuple(blocks))


def semidirect_group(spec: SemidirectGroupSpec, name: str = "semidirect") -> GroupHandle:
    qs = spec.qs
    m = spec.m
    if m < 1:
        raise MalformedInputError("m must be >= 1")
    a_order = math.prod(qs)
    if math.gcd(a_order, m) != 1:
        raise MalformedInputError(f"gcd(|A|={a_order}, m={m}) must be 1")
    spans = _split_prime_blocks(qs)
    if len(spec.action.blocks) != len(spans):
        raise MalformedInputError("action blocks do not match the prime split")
    if not autring.blocks_is_identity(autring.blocks_pow(spec.action, m)):
        raise MalformedInputError("action order does not divide m")
    powers = [autring.blocks_identity([b.ptype for b in spec.action.blocks])]
    for _ in range(1, m):
        powers.append(autring.blocks_star(powers[-1], spec.action))

    s = len(qs)
    widths = [len(str(q - 1)) for q in qs]
    jwidth = len(str(m - 1)) if m > 1 else 1

    def encode(a: Sequence[int], j: int) -> ElementCode:
        parts = [str(a[i]).zfill(widths[i]) for i in range(s)]
        return (",".join(parts) + ";" + str(j).zfill(jwidth)).encode("ascii")

    def decode(code: ElementCode) -> tuple[tuple[int, ...], int]:
        try:
            text = code.decode("ascii")
            apart, jpart = text.split(";")
            coords = apart.split(",")
            if len(coords) != s or len(jpart) != jwidth:
                raise ValueError("shape")
            a = tuple(int(c) for c in coords)
            j = int(jpart)
        except (ValueError, UnicodeDecodeError):
            raise MalformedInputError(f"unknown element code {code!r}") from None
        if any(len(coords[i]) != widths[i] or not 0 <= a[i] < qs[i] for i in range(s)):
            raise MalformedInputError(f"unknown element code {code!r}")
        if not 0 <= j < m:
            raise MalformedInputError(f"unknown element code {code!r}")
        return a, j

    def mul(x: ElementCode, y: ElementCode) -> ElementCode:
        a, j = decode(x)
        b, j2 = decode(y)
        moved = autring.apply_blocks(powers[j], b)
        return encode([(a[i] + moved[i]) % qs[i] for i in range(s)], (j + j2) % m)

    def inv(x: ElementCode) -> ElementCode:
        a, j = decode(x)
        back = autring.apply_blocks(powers[(m - j) % m], a)
        return encode([-back[i] % qs[i] for i in range(s)], (m - j) % m)

    if spec.generators is not None:
        gens = []
        for a, j in spec.generators:
            if len(a) != s or any(not 0 <= a[i] < qs[i] for i in range(s)) or not 0 <= j < m:
                raise MalformedInputError(f"generator {(a, j)} out of range")
            gens.append(encode(a, j))
    else:
        gens = [encode([int(t == i) for t in range(s)], 0) for i in range(s)]
        if m > 1:
            gens.append(encode([0] * s, 1))

    def parse_element(text: str) -> ElementCode:
        try:
            apart, jpart = text.split(";")
            a = [int(c) for c in apart.split(",")]
            j = int(jpart)
        except ValueError:
            raise MalformedInputError(f"bad element {text!r}; want a1,...,as;j") from None
        if len(a) != s or any(not 0 <= a[i] < qs[i] for i in range(s)) or not 0 <= j < m:
            raise MalformedInputError(f"element {text!r} out of range")
        return encode(a, j)

    return GroupHandle(
        encode([0] * s, 0), gens, mul, inv, name=name, parse_element=parse_element
    )


# --- Group description files --------------------------------------------------


def parse_group_file(text: str):
    """Parse the line-oriented group description format.

    Returns a TableGroupSpec or SemidirectGroupSpec. Parsing is strict: any
    out-of-range entry, ordering violation, or invalid action is rejected.
    """
    lines = [ln.strip() for ln in text.splitlines()]
    lines = [ln for ln in lines if ln and not ln.startswith("#")]
    if not lines:
        raise MalformedInputError("empty group file")
    head = lines[0].split()
    if head[0] == "table":
        if len(head) != 2:
            raise MalformedInputError("table header must be `table <n>`")
        try:
            n = int(head[1])
        except ValueError:
            raise MalformedInputError("bad table order") from None
        if n < 1:
            raise MalformedInputError("table order must be >= 1")
        if len(lines) != 1 + n:
            raise MalformedInputError(f"expected {n} table rows, got {len(lines) - 1}")
        rows = []
        for ln in lines[1:]:
            try:
                row = [int(x) for x in ln.split()]
            except ValueError:
                raise MalformedInputError(f"bad table row {ln!r}") from None
            if len(row) != n or any(not 0 <= x < n for x in row):
                raise MalformedInputError(f"bad table row {ln!r}")
            rows.append(tuple(row))
        spec = TableGroupSpec(n, tuple(rows))
        validate_table_spec(spec)
        return spec
    if head[0] == "semidirect":
        if len(head) != 1:
            raise MalformedInputError("semidirect header takes no arguments")
        body = lines[1:]
        if len(body) < 2 or not body[0].startswith("A ") or not body[1].startswith("m "):
            raise MalformedInputError("semidirect body must start with `A ...` then `m ...`")
        try:
            qs = tuple(int(x) for x in body[0].split()[1:])
            m = int(body[1].split()[1])
        except (ValueError, IndexError):
            raise MalformedInputError("bad A or m line") from None
        if not qs:
            raise MalformedInputError("A line needs at least one prime power")
        s = len(qs)
        if len(body) < 2 + s:
            raise MalformedInputError(f"expected {s} action rows")
        rows = []
        for ln in body[2 : 2 + s]:
            try:
                row = [int(x) for x in ln.split()]
            except ValueError:
                raise MalformedInputError(f"bad action row {ln!r}") from None
            if len(row) != s:
                raise MalformedInputError(f"action rows must have {s} entries")
            rows.append(row)
        for i in range(s):
            if any(not 0 <= x < qs[i] for x in rows[i]):
                raise MalformedInputError(f"action row {i + 1} has out-of-range entries")
        gens = []
        for ln in body[2 + s :]:
            parts = ln.split()
            if parts[0] != "gens" or len(parts) != s + 2:
                raise MalformedInputError(f"bad gens line {ln!r}; want `gens a1 ... as j`")
            try:
                vals = [int(x) for x in parts[1:]]
            except ValueError:
                raise MalformedInputError(f"bad gens line {ln!r}") from None
            gens.append((tuple(vals[:s]), vals[s]))
        action = action_from_rows(qs, rows)
        spec = SemidirectGroupSpec(qs, m, action, tuple(gens) if gens else None)
        semidirect_group(spec)  # full validation (gcd, action order, generators)
        return spec
    raise MalformedInputError(f"unknown group kind {head[0]!r}")


def build_group(spec, name: str = "group") -> GroupHandle:
    if isinstance(spec, TableGroupSpec):
        return table_group(spec, name=name)
    if isinstance(spec, SemidirectGroupSpec):
        return semidirect_group(spec, name=name)
    raise MalformedInputError(f"cannot build a group from {type(spec).__name__}")


def load_group(text: str, name: str = "group") -> GroupHandle:
    return build_group(parse_group_file(text), name=name)


def format_semidirect_file(spec: SemidirectGroupSpec, comment: str = "") -> str:
    out = []
    if comment:
        out.append(f"# {comment}")
    out.append("semidirect")
    out.append("A " + " ".join(str(q) for q in spec.qs))
    out.append(f"m {spec.m}")
    s = len(spec.qs)
    full = [[0] * s for _ in range(s)]
    pos = 0
    for block in spec.action.blocks:
        k = block.ptype.s
        for i in range(k):
            for j in range(k):
                full[pos + i][pos + j] = block.rows[i][j]
        pos += k
    for row in full:
        out.append(" ".join(str(x) for x in row))
    if spec.generators:
        for a, j in spec.generators:
            out.append("gens " + " ".join(str(x) for x in a) + f" {j}")
    return "\n".join(out) + "\n"


def materialize_table(G: GroupHandle, limit: int = 4096) -> TableGroupSpec:
    """Cayley table of a small black-box group, identity mapped to index 0."""
    elements = closure(G, G.generators, limit=limit)
    elements.remove(G.identity)
    elements.insert(0, G.identity)
    index = {c: i for i, c in enumerate(elements)}
    n = len(elements)
    table = tuple(
        tuple(index[G.mul(elements[i], elements[j])] for j in range(n)) for i in range(n)
    )
    return TableGroupSpec(n, table)
