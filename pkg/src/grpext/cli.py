"""Command-line front end.

Reports are plain UTF-8 key-value lines and are byte-deterministic for fixed
inputs and flags, except for the trailing wall-time field. Exit code 0 means a
definite verdict was reached (either way); malformed input or precondition
violations exit nonzero.
"""

from __future__ import annotations

import argparse
import hashlib
import math
import random
import sys
import time
from pathlib import Path

from . import abelian, autring, blackbox, classes, decomp, iso
from .arith import ModularLinearSystem, solve_modular_system
from .errors import GrpextError


def _digest(path: str) -> str:
    return "sha256:" + hashlib.sha256(Path(path).read_bytes()).hexdigest()


def _load(path: str) -> blackbox.GroupHandle:
    return blackbox.load_group(Path(path).read_text(encoding="utf-8"), name=Path(path).name)


def _emit(lines: list[str], started: float) -> None:
    for line in lines:
        print(line)
    print(f"wall-time-ms {int((time.perf_counter() - started) * 1000)}")


def cmd_order(args) -> int:
    started = time.perf_counter()
    G = _load(args.group)
    g = G.parse_element(args.element)
    order = abelian.element_order(G, g)
    _emit(
        [
            "command order",
            f"input {_digest(args.group)}",
            f"element {args.element}",
            f"order {order}",
            f"oracle-calls {G.operation_count}",
        ],
        started,
    )
    return 0


def cmd_standard_decomposition(args) -> int:
    started = time.perf_counter()
    G = _load(args.group)
    sd, attempts = decomp.standard_decomposition_with_attempts(G)
    lines = [
        "command standard-decomposition",
        f"input {_digest(args.group)}",
        f"gamma {sd.gamma}",
        f"abelian-order {sd.a_basis.group_order}",
        "abelian-type " + (" ".join(str(q) for q in sd.a_basis.orders) or "-"),
        f"group-order {sd.group_order}",
        f"y {sd.y.decode('ascii')}",
    ]
    for att in attempts:
        if att.error is None:
            lines.append(f"attempt {att.m} ok {att.product}")
        else:
            lines.append(f"attempt {att.m} error {att.error}")
    lines.append(f"oracle-calls {G.operation_count}")
    _emit(lines, started)
    return 0


def _psi_block_lines(blocks: autring.AutBlocks) -> list[str]:
    lines = []
    for block in blocks.blocks:
        head = f"psi-block {block.ptype.p} " + " ".join(str(e) for e in block.ptype.exps)
        lines.append(head)
        for row in block.rows:
            lines.append(" ".join(str(x) for x in row))
    if not blocks.blocks:
        lines.append("psi-block trivial")
    return lines


def cmd_isomorphic(args) -> int:
    started = time.perf_counter()
    G = _load(args.group_g)
    H = _load(args.group_h)
    result = iso.isomorphic(G, H)
    lines = [
        "command isomorphic",
        f"input-g {_digest(args.group_g)}",
        f"input-h {_digest(args.group_h)}",
    ]
    if not result.is_isomorphic:
        lines.append("verdict no")
        lines.append(f"reason {result.failed_condition}")
        lines.append(f"oracle-calls-g {G.operation_count}")
        lines.append(f"oracle-calls-h {H.operation_count}")
        _emit(lines, started)
        return 0
    witness = result.witness
    lines.append("verdict yes")
    lines.append(f"gamma {witness.source.gamma}")
    lines.append(f"k {witness.k}")
    lines.extend(_psi_block_lines(witness.psi_blocks))
    mu = iso.build_mu(witness)
    ok = iso.verify_isomorphism(G, H, mu, mode=args.verify, seed=args.seed)
    lines.append(f"mu-check {args.verify} {'pass' if ok else 'fail'}")
    lines.append(f"oracle-calls-g {G.operation_count}")
    lines.append(f"oracle-calls-h {H.operation_count}")
    _emit(lines, started)
    return 0 if ok else 1


def cmd_conjugacy(args) -> int:
    started = time.perf_counter()
    u1 = autring.parse_matrix_file(Path(args.matrix1).read_text(encoding="utf-8"))
    u2 = autring.parse_matrix_file(Path(args.matrix2).read_text(encoding="utf-8"))
    witness = autring.conjugacy(u1, u2, order_cap=args.order_cap)
    lines = [
        "command conjugacy",
        f"input-1 {_digest(args.matrix1)}",
        f"input-2 {_digest(args.matrix2)}",
    ]
    if witness is None:
        lines.append("conjugate no")
    else:
        lines.append("conjugate yes")
        for row in witness.rows:
            lines.append(" ".join(str(x) for x in row))
    _emit(lines, started)
    return 0


def cmd_count_classes(args) -> int:
    started = time.perf_counter()
    triples = classes.class_triples(args.r)
    lines = [
        "command count-classes",
        f"r {args.r}",
        f"count {len(triples)}",
    ]
    for t in triples:
        lines.append(f"triple {t.k1} {t.k2} {t.k3}")
    if args.emit_reps is not None:
        out_dir = Path(args.out_dir)
        out_dir.mkdir(parents=True, exist_ok=True)
        for idx, triple in enumerate(triples):
            spec = classes.representative_group_spec(args.r, args.emit_reps, idx)
            name = f"rep_r{args.r}_i{args.emit_reps}_{idx:02d}.grp"
            text = blackbox.format_semidirect_file(
                spec,
                comment=f"class representative {idx}: blocks {triple.k1} {triple.k2} {triple.k3}",
            )
            (out_dir / name).write_text(text, encoding="utf-8")
            lines.append(f"wrote {name}")
    _emit(lines, started)
    return 0


def _selftest_checks():
    rng = random.Random(0)

    def solver_roundtrip():
        for _ in range(50):
            moduli = tuple(rng.choice([2, 3, 4, 9, 27]) for _ in range(3))
            rows = tuple(tuple(rng.randrange(-9, 10) for _ in range(3)) for _ in range(3))
            hidden = [rng.randrange(27) for _ in range(3)]
            rhs = tuple(
                sum(r[j] * hidden[j] for j in range(3)) % m for r, m in zip(rows, moduli)
            )
            if solve_modular_system(ModularLinearSystem(rows, rhs, moduli)) is None:
                return False
        no_sol = ModularLinearSystem(((3,),), (1,), (9,))
        return solve_modular_system(no_sol) is None

    def order_bsgs():
        G = blackbox.cyclic_group(5040)
        code = G.parse_element("84")
        return abelian.element_order(G, code) == 5040 // math.gcd(5040, 84)

    def decompose_table():
        G = blackbox.semidirect_group(
            blackbox.SemidirectGroupSpec(
                (8, 9, 5),
                1,
                autring.AutBlocks(
                    (
                        autring.identity_matrix(autring.PType(2, (3,))),
                        autring.identity_matrix(autring.PType(3, (2,))),
                        autring.identity_matrix(autring.PType(5, (1,))),
                    )
                ),
            )
        )
        basis = abelian.abelian_basis(G.generators, G)
        table = abelian.DecompositionTable(G, basis)
        for _ in range(40):
            target = [rng.randrange(q) for q in (8, 9, 5)]
            code = G.parse_element(",".join(map(str, target)) + ";0")
            vec = table.decompose(code)
            rebuilt = G.identity
            for e, exp in zip(basis.elements, vec):
                rebuilt = G.mul(rebuilt, blackbox.group_pow(G, e, exp))
            if rebuilt != code:
                return False
        return True

    def psi_homomorphism():
        ptype = autring.PType(3, (1, 2))
        for _ in range(100):
            a = autring.random_unit(ptype, rng)
            b = autring.random_unit(ptype, rng)
            if autring.psi(autring.star_mul(a, b)) != autring.BlockDiagGF(
                3,
                tuple(
                    autring._gf_mul(x, y, 3)
                    for x, y in zip(autring.psi(a).blocks, autring.psi(b).blocks)
                ),
            ):
                return False
        return True

    def unit_counts():
        return (
            len(autring.enumerate_R(autring.PType(3, (2,)))) == 6
            and len(autring.enumerate_R(autring.PType(3, (1, 1)))) == 48
        )

    def small_isomorphism():
        g_text = "semidirect\nA 7\nm 3\n2\n"
        h_text = "semidirect\nA 7\nm 3\n4\n"
        G = blackbox.load_group(g_text)
        H = blackbox.load_group(h_text)
        result = iso.isomorphic(G, H)
        if not result.is_isomorphic or result.witness.k != 2:
            return False
        mu = iso.build_mu(result.witness)
        return iso.verify_isomorphism(G, H, mu, mode="exhaustive")

    def class_counts():
        return (
            classes.count_classes(4) == 9
            and classes.brute_force_class_count(autring.PType(3, (1,)), 4) == 2
        )

    return [
        ("modular-solver", solver_roundtrip),
        ("element-order", order_bsgs),
        ("decompose", decompose_table),
        ("psi-homomorphism", psi_homomorphism),
        ("unit-counts", unit_counts),
        ("order-21-isomorphism", small_isomorphism),
        ("class-counts", class_counts),
    ]


def cmd_selftest(args) -> int:
    started = time.perf_counter()
    lines = ["command selftest"]
    failures = 0
    for name, check in _selftest_checks():
        try:
            ok = check()
        except GrpextError:
            ok = False
        lines.append(f"selftest {name} {'pass' if ok else 'fail'}")
        failures += 0 if ok else 1
    lines.append(f"failures {failures}")
    _emit(lines, started)
    return 0 if failures == 0 else 1


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="grpext",
        description="Isomorphism tooling for coprime cyclic extensions of abelian groups",
    )
    sub = parser.add_subparsers(dest="cmd", required=True)

    p = sub.add_parser("order", help="order of one element of a group file")
    p.add_argument("group")
    p.add_argument("element")
    p.set_defaults(func=cmd_order)

    p = sub.add_parser("standard-decomposition", help="abelian-by-cyclic split of a group file")
    p.add_argument("group")
    p.set_defaults(func=cmd_standard_decomposition)

    p = sub.add_parser("isomorphic", help="decide isomorphism of two group files")
    p.add_argument("group_g")
    p.add_argument("group_h")
    p.add_argument("--verify", choices=["exhaustive", "sampled"], default="sampled")
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_isomorphic)

    p = sub.add_parser("conjugacy", help="conjugate two matrices in the unit ring")
    p.add_argument("matrix1")
    p.add_argument("matrix2")
    p.add_argument("--order-cap", type=int, required=True)
    p.set_defaults(func=cmd_conjugacy)

    p = sub.add_parser("count-classes", help="isomorphism classes of Z_{3^i}^r x| Z_4")
    p.add_argument("--r", type=int, required=True)
    p.add_argument("--emit-reps", type=int, default=None, metavar="I")
    p.add_argument("--out-dir", default=".")
    p.set_defaults(func=cmd_count_classes)

    p = sub.add_parser("selftest", help="run the built-in oracle checks")
    p.set_defaults(func=cmd_selftest)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except GrpextError as exc:
        print(f"error {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"error {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
