"""Shared test corpus: a zoo of small groups plus naive reference oracles.

The oracles here work purely by enumeration over element closures (never
through baby-step tables, basis machinery, or the matrix ring), so they stay
independent of the code paths they are used to check.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from typing import Optional

from grpext import blackbox
from grpext.arith import divisors
from grpext.blackbox import GroupHandle, closure, with_generators


def mixed_generators(G: GroupHandle) -> GroupHandle:
    """A second generating set: fold the first generator into the second."""
    gens = G.generators
    if not gens:
        return with_generators(G, [])
    if len(gens) == 1:
        return with_generators(G, [gens[0], G.mul(gens[0], gens[0])])
    folded = [G.mul(gens[0], gens[1])] + list(gens[1:])
    return with_generators(G, folded)


def semidirect(qs, m, rows, gens=None, name="G"):
    action = blackbox.action_from_rows(qs, rows)
    spec = blackbox.SemidirectGroupSpec(tuple(qs), m, action,
                                        tuple(gens) if gens else None)
    return blackbox.semidirect_group(spec, name=name)


def table_from(handle: GroupHandle, name: str) -> GroupHandle:
    return blackbox.table_group(blackbox.materialize_table(handle), name=name)


@dataclass(frozen=True)
class CorpusEntry:
    name: str
    gamma: int
    order: int


def _builders():
    ident = lambda n: [[int(i == j) for j in range(n)] for i in range(n)]
    return {
        # abelian, gamma = 1
        "Z12_table": (1, 12, lambda: blackbox.table_group(blackbox.cyclic_table_spec(12), name="Z12")),
        "Z72": (1, 72, lambda: semidirect((8, 9), 1, ident(2), name="Z72")),
        "Z2xZ4xZ9": (1, 72, lambda: semidirect((2, 4, 9), 1, ident(3), name="Z2xZ4xZ9")),
        "Z100": (1, 100, lambda: semidirect((4, 25), 1, ident(2), name="Z100")),
        "Z2^3_table": (1, 8, lambda: table_from(semidirect((2, 2, 2), 1, ident(3)), "Z2^3")),
        "Z49": (1, 49, lambda: semidirect((49,), 1, ident(1), name="Z49")),
        "Z75": (1, 75, lambda: semidirect((3, 25), 1, ident(2), name="Z75")),
        # gamma = 2
        "S3_table": (2, 6, lambda: table_from(semidirect((3,), 2, [[2]]), "S3")),
        "D7": (2, 14, lambda: semidirect((7,), 2, [[6]], name="D7")),
        "D7_table": (2, 14, lambda: table_from(semidirect((7,), 2, [[6]]), "D7t")),
        "Z9xZ2_inv": (2, 18, lambda: semidirect((9,), 2, [[8]], name="Z9:Z2")),
        "Z3Z9xZ2_inv": (2, 54, lambda: semidirect((3, 9), 2, [[2, 0], [0, 8]], name="Z3Z9:Z2")),
        "Z15xZ2_inv": (2, 30, lambda: semidirect((3, 5), 2, [[2, 0], [0, 4]], name="Z15:Z2")),
        "Z5xZ2_inv": (2, 10, lambda: semidirect((5,), 2, [[4]], name="Z5:Z2")),
        "Z21xZ2_inv": (2, 42, lambda: semidirect((3, 7), 2, [[2, 0], [0, 6]], name="Z21:Z2")),
        "Z5^2xZ2_inv": (2, 50, lambda: semidirect((5, 5), 2, [[4, 0], [0, 4]], name="Z5^2:Z2")),
        "swap18": (2, 18, lambda: semidirect((3, 3), 2, [[0, 1], [1, 0]], name="swap18")),
        # gamma = 3
        "G21a": (3, 21, lambda: semidirect((7,), 3, [[2]], name="G21a")),
        "G21b": (3, 21, lambda: semidirect((7,), 3, [[4]], name="G21b")),
        "A4": (3, 12, lambda: semidirect((2, 2), 3, [[0, 1], [1, 1]], name="A4")),
        "A4_table": (3, 12, lambda: table_from(semidirect((2, 2), 3, [[0, 1], [1, 1]]), "A4t")),
        "Z20xZ3": (3, 60, lambda: semidirect((2, 2, 5), 3, [[0, 1, 0], [1, 1, 0], [0, 0, 1]], name="Z20:Z3")),
        "Z13xZ3_a": (3, 39, lambda: semidirect((13,), 3, [[3]], name="Z13:Z3a")),
        "Z13xZ3_b": (3, 39, lambda: semidirect((13,), 3, [[9]], name="Z13:Z3b")),
        # gamma = 4
        "Z3xZ4": (4, 12, lambda: semidirect((3,), 4, [[2]], name="Z3:Z4")),
        "Z9xZ4": (4, 36, lambda: semidirect((9,), 4, [[8]], name="Z9:Z4")),
        "Z3^2xZ4_diag": (4, 36, lambda: semidirect((3, 3), 4, [[2, 0], [0, 1]], name="Z3^2:Z4d")),
        "Z3^2xZ4_W": (4, 36, lambda: semidirect((3, 3), 4, [[0, 2], [1, 0]], name="Z3^2:Z4w")),
        "Z3^2xZ4_negI": (4, 36, lambda: semidirect((3, 3), 4, [[2, 0], [0, 2]], name="Z3^2:Z4n")),
        "Z5xZ4_a": (4, 20, lambda: semidirect((5,), 4, [[2]], name="Z5:Z4a")),
        "Z5xZ4_b": (4, 20, lambda: semidirect((5,), 4, [[3]], name="Z5:Z4b")),
        "Z13xZ4": (4, 52, lambda: semidirect((13,), 4, [[5]], name="Z13:Z4")),
        # gamma = 6
        "Z7xZ6_a": (6, 42, lambda: semidirect((7,), 6, [[3]], name="Z7:Z6a")),
        "Z7xZ6_b": (6, 42, lambda: semidirect((7,), 6, [[5]], name="Z7:Z6b")),
        "Z13xZ6": (6, 78, lambda: semidirect((13,), 6, [[4]], name="Z13:Z6")),
    }


def corpus_names() -> list[str]:
    return list(_builders())


def corpus_entry(name: str) -> CorpusEntry:
    gamma, order, _ = _builders()[name]
    return CorpusEntry(name, gamma, order)


def build(name: str) -> GroupHandle:
    return _builders()[name][2]()


# pairs expected isomorphic (all other distinct pairs are not)
ISOMORPHIC_PAIRS = {
    frozenset({"D7", "D7_table"}),
    frozenset({"G21a", "G21b"}),
    frozenset({"A4", "A4_table"}),
    frozenset({"Z13xZ3_a", "Z13xZ3_b"}),
    frozenset({"Z5xZ4_a", "Z5xZ4_b"}),
    frozenset({"Z7xZ6_a", "Z7xZ6_b"}),
}


def expected_isomorphic(name_a: str, name_b: str) -> bool:
    return name_a == name_b or frozenset({name_a, name_b}) in ISOMORPHIC_PAIRS


# --- naive oracles ----------------------------------------------------------


def naive_order(G: GroupHandle, g) -> int:
    n = 1
    w = g
    while w != G.identity:
        w = G.mul(w, g)
        n += 1
    return n


def naive_power(G: GroupHandle, g, n: int):
    out = G.identity
    for _ in range(n):
        out = G.mul(out, g)
    return out


def naive_derived_subgroup(G: GroupHandle, elements) -> list:
    comms = set()
    for a in elements:
        ia = G.inv(a)
        for b in elements:
            comms.add(G.mul(G.mul(a, b), G.mul(ia, G.inv(b))))
    return closure(G, sorted(comms))


def naive_decomposition_exists(G: GroupHandle, elements, derived, m: int) -> bool:
    """Whether the group splits at m: checked from first principles.

    The abelian part of any split at m is forced to be the subgroup generated
    by the derived subgroup and all m-th powers, so it suffices to test that
    subgroup's size, commutativity and coprimality, plus the existence of an
    element of order m.
    """
    n = len(elements)
    if n % m:
        return False
    seeds = set(derived)
    for g in elements:
        seeds.add(naive_power(G, g, m))
    part = closure(G, sorted(seeds))
    if len(part) != n // m or math.gcd(len(part), m) != 1:
        return False
    for a in part:
        for b in part:
            if G.mul(a, b) != G.mul(b, a):
                return False
    return any(naive_order(G, z) == m for z in elements)


def naive_gamma(G: GroupHandle) -> Optional[int]:
    elements = closure(G, G.generators)
    derived = naive_derived_subgroup(G, elements)
    for m in divisors(len(elements)):
        if naive_decomposition_exists(G, elements, derived, m):
            return m
    return None


def _order_profile(G: GroupHandle, elements) -> dict[int, int]:
    profile: dict[int, int] = {}
    for g in elements:
        o = naive_order(G, g)
        profile[o] = profile.get(o, 0) + 1
    return profile


def naive_isomorphic(G: GroupHandle, H: GroupHandle, max_candidates: int = 500_000) -> bool:
    """Brute-force oracle: search all order-respecting generator images.

    A candidate map on the generators is extended over a spanning tree of G
    and accepted only if it is a bijective homomorphism.
    """
    els_g = closure(G, G.generators)
    els_h = closure(H, H.generators)
    if len(els_g) != len(els_h):
        return False
    if _order_profile(G, els_g) != _order_profile(H, els_h):
        return False
    orders_h: dict[int, list] = {}
    for h in els_h:
        orders_h.setdefault(naive_order(H, h), []).append(h)

    gens = G.generators
    pools = [orders_h.get(naive_order(G, g), []) for g in gens]
    total = math.prod(len(p) for p in pools) if pools else 1
    if total > max_candidates:
        raise RuntimeError(f"candidate space too large for the oracle: {total}")

    # spanning tree: each non-identity element reached as parent * generator
    tree: dict = {G.identity: None}
    frontier = [G.identity]
    order_seq = [G.identity]
    while frontier:
        nxt = []
        for a in frontier:
            for idx, g in enumerate(gens):
                b = G.mul(a, g)
                if b not in tree:
                    tree[b] = (a, idx)
                    order_seq.append(b)
                    nxt.append(b)
        frontier = nxt

    n = len(els_g)
    for images in itertools.product(*pools):
        fmap = {G.identity: H.identity}
        for b in order_seq[1:]:
            parent, idx = tree[b]
            fmap[b] = H.mul(fmap[parent], images[idx])
        if len(set(fmap.values())) != n:
            continue
        good = True
        for a in els_g:
            fa = fmap[a]
            for idx, g in enumerate(gens):
                if fmap[G.mul(a, g)] != H.mul(fa, images[idx]):
                    good = False
                    break
            if not good:
                break
        if good:
            return True
    return False
