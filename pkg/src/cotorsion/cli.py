"""Command-line front end.

Exit codes: 0 success, 1 a check failed, 2 invalid mathematical input,
3 ring mismatch, 4 usage error.
"""

from __future__ import annotations

import argparse
import json
import sys
from typing import Sequence

from .approx import (
    injective_preenvelope,
    special_precover_projective,
    et_run,
    thm39_backward,
    thm39_forward,
    thm311_forward,
    validate_filtration,
)
from .classes import (
    ClassOracle,
    ComplexClassId,
    NoInjectiveCogenerator,
    ClassInclusionError,
    cogenerating_set,
    injective_pair,
    member_class,
    projective_pair,
)
from .complexes import ChainComplex, ComplexError, first_nonexact_degree, homology
from .ext import ext1_ch, ext1_dw, perp_witness
from .linalg import Ring
from .modules import FpModule, RingMismatch, ext1_module
from .suites import SUITES, SuiteConfig, run_suite

EXIT_OK, EXIT_FAIL, EXIT_INPUT, EXIT_RING, EXIT_USAGE = 0, 1, 2, 3, 4

WINDOW_NOTE = (
    "Complexes are bounded: every class-membership and perp claim is made "
    "for the support window of the input (generators cover the window "
    "widened by one degree on each side)."
)


class UsageError(Exception):
    pass


class InputError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _window(text: str) -> tuple[int, int]:
    try:
        lo, hi = (int(x) for x in text.split(":"))
    except ValueError:
        raise argparse.ArgumentTypeError(f"window must be <lo>:<hi>, got {text!r}") from None
    if lo > hi:
        raise argparse.ArgumentTypeError(f"window needs lo <= hi, got {text!r}")
    return lo, hi


def _positive(text: str) -> int:
    try:
        k = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected an integer, got {text!r}") from None
    if k < 1:
        raise argparse.ArgumentTypeError(f"must be at least 1, got {k}")
    return k


def _ring(text: str) -> Ring:
    try:
        return Ring.parse(text)
    except ValueError as e:
        raise argparse.ArgumentTypeError(str(e)) from None


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--ring", type=_ring, help="Z or Zmod:<n>; must match the ring of any input file")
    common.add_argument("--seed", type=int, default=42, help="random seed (default 42)")
    common.add_argument("--window", type=_window, help="support window <lo>:<hi>")
    common.add_argument("--trials", type=_positive, help="number of seeded cases (at least 1)")
    common.add_argument("--max-gens", type=_positive, default=2, help="generators per degree in random inputs")
    common.add_argument("--json", action="store_true", help="machine-readable output")

    p = _Parser(prog="cotorsion", description="Exact homological algebra for bounded complexes over Z and Z/n.",
                epilog=WINDOW_NOTE)
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    s = sub.add_parser("homology", parents=[common], help="homology of a complex")
    s.add_argument("file")
    s.add_argument("n", nargs="?", type=int)

    s = sub.add_parser("exact", parents=[common], help="is the complex exact")
    s.add_argument("file")

    s = sub.add_parser("ext", parents=[common], help="Ext^1 of modules or complexes")
    s.add_argument("kind", choices=["mod", "ch", "dw"])
    s.add_argument("x")
    s.add_argument("y")

    s = sub.add_parser("member", parents=[common], help="class membership (dwP, exI, tildeP, relPM, ... or a JSON file)",
                       epilog=WINDOW_NOTE)
    s.add_argument("cls")
    s.add_argument("file")

    s = sub.add_parser("perp", parents=[common], help="Ext-orthogonality against a cogenerating set", epilog=WINDOW_NOTE)
    s.add_argument("file")
    s.add_argument("--pair-u", choices=["proj", "inj"], default="proj")
    s.add_argument("--pair-x", choices=["proj", "inj"], default="inj")

    s = sub.add_parser("approx", parents=[common], help="run an approximation pipeline", epilog=WINDOW_NOTE)
    s.add_argument("pipeline", choices=["precover", "preenvelope", "thm39-forward", "thm39-backward", "thm311-forward"])
    s.add_argument("file")

    s = sub.add_parser("filtration", parents=[common], help="Eklof-Trlifaj iteration into the perp of a set")
    s.add_argument("file")
    s.add_argument("gens", nargs="?", help="JSON list of generator complexes (default: windowed spheres and disks)")
    s.add_argument("--max-steps", type=_positive, default=20)

    s = sub.add_parser("verify", parents=[common], help="run a seeded verification suite")
    s.add_argument("suite", choices=sorted(SUITES))
    return p


# ---------------------------------------------------------------------------
# Input


def _load_json(path: str):
    try:
        with open(path, encoding="utf-8") as fh:
            return json.load(fh)
    except OSError as e:
        raise UsageError(f"cannot read {path}: {e.strerror}") from None
    except json.JSONDecodeError as e:
        raise InputError(f"{path}: invalid JSON ({e})") from None


def _check_ring(obj_ring: Ring, args) -> None:
    if args.ring is not None and args.ring != obj_ring:
        raise RingMismatch(f"input is over {obj_ring} but --ring is {args.ring}")


def load_complex(path: str, args) -> ChainComplex:
    obj = _load_json(path)
    try:
        C = ChainComplex.from_json(obj)
    except RingMismatch:
        raise
    except ComplexError as e:
        raise InputError(f"{path}: {e}") from None
    except (ValueError, KeyError, TypeError) as e:
        raise InputError(f"{path}: malformed complex ({e})") from None
    _check_ring(C.ring, args)
    return C


def load_module(path: str, args) -> FpModule:
    obj = _load_json(path)
    try:
        M = FpModule.from_json(obj)
    except RingMismatch:
        raise
    except (ValueError, KeyError, TypeError) as e:
        raise InputError(f"{path}: malformed module ({e})") from None
    _check_ring(M.ring, args)
    return M


def parse_class(spec: str, ring: Ring) -> ComplexClassId:
    """Short id such as ``exP``, or a JSON file with flavor/degree/cycle literals."""
    if spec.endswith(".json"):
        obj = _load_json(spec)
        try:
            deg = ClassOracle.from_json(obj["degree"], ring) if "degree" in obj else None
            cyc = ClassOracle.from_json(obj["cycle"], ring) if "cycle" in obj else None
            return ComplexClassId(obj["flavor"], deg, cyc)
        except (KeyError, ValueError, TypeError) as e:
            raise UsageError(f"unknown class spec in {spec}: {e}") from None
    try:
        return ComplexClassId.parse(spec)
    except ValueError as e:
        raise UsageError(str(e)) from None


def _pair(name: str, ring: Ring):
    return projective_pair(ring) if name == "proj" else injective_pair(ring)


def _gen_window(C: ChainComplex, args) -> tuple[int, int]:
    if args.window:
        return args.window
    if C.hi < C.lo:
        return (0, 0)
    return (C.lo, C.hi)


# ---------------------------------------------------------------------------
# Commands.  Each returns (exit code, text lines, json payload).


def cmd_homology(args):
    C = load_complex(args.file, args)
    lo, hi = args.window or (C.lo, C.hi)
    degs = [args.n] if args.n is not None else list(range(lo, hi + 1))
    if not degs:
        return EXIT_OK, ["zero complex: all homology is 0"], {"homology": {}}
    groups = {n: str(homology(C, n)) for n in degs}
    return EXIT_OK, [f"H_{n} = {g}" for n, g in groups.items()], {"homology": {str(n): g for n, g in groups.items()}}


def cmd_exact(args):
    C = load_complex(args.file, args)
    n = first_nonexact_degree(C)
    if n is None:
        return EXIT_OK, ["exact: yes"], {"exact": True}
    H = str(homology(C, n))
    return EXIT_OK, [f"exact: no (H_{n} = {H})"], {"exact": False, "degree": n, "homology": H}


def cmd_ext(args):
    if args.kind == "mod":
        X, Y = load_module(args.x, args), load_module(args.y, args)
        if X.ring != Y.ring:
            raise RingMismatch(f"modules over {X.ring} and {Y.ring}")
        G = str(ext1_module(X, Y))
    else:
        X, Y = load_complex(args.x, args), load_complex(args.y, args)
        if X.ring != Y.ring:
            raise RingMismatch(f"complexes over {X.ring} and {Y.ring}")
        G = str((ext1_ch if args.kind == "ch" else ext1_dw)(X, Y).invariant_factors())
    return EXIT_OK, [G], {"ext": G, "kind": args.kind}


def cmd_member(args):
    C = load_complex(args.file, args)
    cls = parse_class(args.cls, C.ring)
    r = member_class(C, cls)
    if r.member:
        return EXIT_OK, ["yes (exact membership)"], {"member": True, "class": str(cls), "evidence": "exact"}
    return EXIT_OK, [f"no (exact membership): {r.witness}"], {
        "member": False, "class": str(cls), "evidence": "exact", "witness": r.witness, "degree": r.degree}


def cmd_perp(args):
    C = load_complex(args.file, args)
    gens = cogenerating_set(_pair(args.pair_u, C.ring), _pair(args.pair_x, C.ring), _gen_window(C, args))
    k = perp_witness(C, gens)
    if k is None:
        return EXIT_OK, [f"yes: Ext vanishes on {len(gens)} generators"], {"perp": True, "generators": len(gens)}
    G = gens[k]
    E = str(ext1_ch(G, C).invariant_factors())
    line = f"no: Ext^1(G, Y) = {E} for generator {k} of {len(gens)}, G = {G}"
    return EXIT_OK, [line], {"perp": False, "generators": len(gens), "witness": k, "ext": E}


def cmd_approx(args):
    C = load_complex(args.file, args)
    if args.pipeline == "preenvelope":
        seq = injective_preenvelope(C)
        ok = seq.is_valid()
        lines = [f"0 -> {seq.A} => {seq.B} => {seq.C} -> 0 [{'verified' if ok else 'INVALID'}]"]
        return (EXIT_OK if ok else EXIT_FAIL), lines, {"valid": ok}
    run = {
        "precover": special_precover_projective,
        "thm39-forward": thm39_forward,
        "thm39-backward": thm39_backward,
        "thm311-forward": thm311_forward,
    }[args.pipeline]
    a = run(C)
    return (EXIT_OK if a.ok() else EXIT_FAIL), a.report(), a.to_json()


def cmd_filtration(args):
    C = load_complex(args.file, args)
    if args.gens:
        raw = _load_json(args.gens)
        if not isinstance(raw, list):
            raise InputError(f"{args.gens}: expected a JSON list of complexes")
        try:
            S = [ChainComplex.from_json(g) for g in raw]
        except ComplexError as e:
            raise InputError(f"{args.gens}: {e}") from None
        for G in S:
            if G.ring != C.ring:
                raise RingMismatch(f"generator over {G.ring}, complex over {C.ring}")
    else:
        S = cogenerating_set(projective_pair(C.ring), injective_pair(C.ring), _gen_window(C, args))
    r = et_run(C, S, args.max_steps)
    lines = [f"status: {r.status} after {r.steps} steps", f"final: {r.final}"]
    lines += [f"X_{j} = {T}" for j, T in enumerate(r.filtration.terms)]
    lines += [f"step {j + 1} adds generator {k}: {S[k]}" for j, k in enumerate(r.filtration.quotient_idx)]
    valid = None
    if r.status == "Complete":
        valid = validate_filtration(r.filtration, S)
        lines.append(f"filtration conditions: {'verified' if valid else 'FAILED'}")
    lines += r.log
    payload = {"status": r.status, "steps": r.steps, "final": r.final.to_json(),
               "quotients": list(r.filtration.quotient_idx), "valid": valid}
    return (EXIT_FAIL if valid is False else EXIT_OK), lines, payload


def cmd_verify(args):
    cfg = SuiteConfig(ring=args.ring, seed=args.seed, trials=args.trials, window=args.window, max_gens=args.max_gens)
    res = run_suite(args.suite, cfg)
    return (EXIT_OK if res.ok else EXIT_FAIL), res.lines(), res.to_json()


COMMANDS = {
    "homology": cmd_homology,
    "exact": cmd_exact,
    "ext": cmd_ext,
    "member": cmd_member,
    "perp": cmd_perp,
    "approx": cmd_approx,
    "filtration": cmd_filtration,
    "verify": cmd_verify,
}


def _emit(args, code: int, lines: list[str], payload: dict) -> None:
    if args.json:
        doc = {"command": args.command, "seed": args.seed, "exit": code}
        doc.update(payload)
        print(json.dumps(doc, sort_keys=True, ensure_ascii=False))
    else:
        print(f"# cotorsion {args.command} seed={args.seed}")
        for line in lines:
            print(line)


def main(argv: Sequence[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        code, lines, payload = COMMANDS[args.command](args)
    except UsageError as e:
        print(f"usage error: {e}", file=sys.stderr)
        return EXIT_USAGE
    except RingMismatch as e:
        print(f"ring mismatch: {e}", file=sys.stderr)
        return EXIT_RING
    except (InputError, ComplexError, NoInjectiveCogenerator, ClassInclusionError) as e:
        print(f"invalid input: {e}", file=sys.stderr)
        return EXIT_INPUT
    except ValueError as e:
        print(f"invalid input: {e}", file=sys.stderr)
        return EXIT_INPUT
    _emit(args, code, lines, payload)
    return code


if __name__ == "__main__":
    sys.exit(main())
