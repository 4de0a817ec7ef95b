"""Command-line front end.

Exit codes: 0 success, 1 a verification failed, 2 bad input.
"""
from __future__ import annotations

import argparse
import hashlib
import json
import os
import sys
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Callable, Sequence

from . import __version__
from .associahedron import (
    KFace, enumerate_faces_K, format_tree, leaf_count, parse_tree, tamari_leq, tree_of,
)
from .combinatorics import (
    DEFAULT_MAX_N, enumerate_faces_P, format_partition, parse_partition, parse_permutation,
)
from .cube import verify_cubical, verify_maximal_pairs, verify_tiling
from .diagonals import (
    SCHEMA_VERSION, chain_map_check, delta_K_face, delta_K_magical, delta_K_su, mp_to_cp,
    verify_agreement,
)
from .errors import NotationError, NotMatchingPairError, PathNotFoundError
from .permdiag import delta_P_face, delta_P_top, scp, step_matrix

CACHE_ENV = "ASSOCDIAG_CACHE_DIR"
N_CAP = 8
N_CAP_LARGE = 9

VERIFY_CHECKS = ("agreement", "tiling", "chain-map", "cubical", "maximal-pairs")
# default largest n per check, chosen to finish in seconds
VERIFY_DEFAULT_MAX = {"agreement": 6, "tiling": 5, "chain-map": 5, "cubical": 6, "maximal-pairs": 4}


class UsageError(Exception):
    """Bad command line; reported with exit code 2."""


class _Parser(argparse.ArgumentParser):
    def error(self, message: str):  # type: ignore[override]
        raise UsageError(message)


@dataclass
class Command:
    verb: str
    options: dict[str, Any] = field(default_factory=dict)


def _positive(text: str) -> int:
    try:
        v = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}") from None
    if v < 1:
        raise argparse.ArgumentTypeError(f"must be positive: {text!r}")
    return v


def _nonneg(text: str) -> int:
    try:
        v = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}") from None
    if v < 0:
        raise argparse.ArgumentTypeError(f"must not be negative: {text!r}")
    return v


def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--format", choices=("text", "json"), default="text")
    common.add_argument("--jobs", type=_positive, default=1)
    common.add_argument("--cache-dir", default=os.environ.get(CACHE_ENV))
    common.add_argument("--allow-large", action="store_true")
    common.add_argument("--timings", action="store_true", help="include wall-clock times")

    parser = _Parser(prog="assocdiag", description="Diagonals on permutahedra and associahedra.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="verb", required=True, parser_class=_Parser)

    p = sub.add_parser("faces", parents=[common], help="list faces of P_n or K_{n+1}")
    p.add_argument("--polytope", choices=("P", "K"), required=True)
    p.add_argument("--n", type=_positive, required=True)
    p.add_argument("--dim", type=_nonneg)

    p = sub.add_parser("delta", parents=[common], help="diagonal on a top cell or a face")
    p.add_argument("--polytope", choices=("P", "K"), required=True)
    p.add_argument("--n", type=_positive)
    p.add_argument("--face", help="partition (P) or tree (K); defaults to the top cell")
    p.add_argument("--formula", choices=("su", "magical"), default="su")

    for verb, helptext in (("scp", "strong complementary pair of σ"),
                           ("step-matrix", "step matrix of σ")):
        p = sub.add_parser(verb, parents=[common], help=helptext)
        p.add_argument("sigma")

    p = sub.add_parser("tonks", parents=[common], help="project a face of P_n to a tree")
    p.add_argument("face")

    p = sub.add_parser("tamari-leq", parents=[common], help="compare two faces of K_{n+1}")
    p.add_argument("--n", type=_positive)
    p.add_argument("--f", required=True)
    p.add_argument("--g", required=True)

    p = sub.add_parser("mp2cp", parents=[common], help="complementary pair of a matching pair")
    p.add_argument("--n", type=_positive)
    p.add_argument("--f", required=True)
    p.add_argument("--g", required=True)
    p.add_argument("--method", choices=("sweep", "chain"), default="sweep")

    p = sub.add_parser("verify", parents=[common], help="run an exhaustive check")
    p.add_argument("check", choices=VERIFY_CHECKS)
    p.add_argument("--n", type=_positive, help="check this n only")
    p.add_argument("--max-n", type=_positive, help="check every n up to this")
    p.add_argument("--polytope", choices=("P", "K"), help="chain-map only; default both")
    return parser


def _tree_arg(text: str, n: int | None, flag: str):
    # --n may name either P_n (n + 1 leaves) or the associahedron K_n (n leaves)
    t = parse_tree(text)
    if n is not None and leaf_count(t) not in (n, n + 1):
        raise UsageError(f"{flag} {text!r} has {leaf_count(t)} leaves, which fits neither P_{n} nor K_{n}")
    return t


def _check_n(n: int, allow_large: bool) -> None:
    cap = N_CAP_LARGE if allow_large else N_CAP
    if n > cap:
        hint = "" if allow_large or n > N_CAP_LARGE else "; pass --allow-large for n = 9"
        raise UsageError(f"n = {n} exceeds the cap {cap}{hint}")


def parse_command(argv: Sequence[str]) -> Command:
    """Parse and validate argv; raises UsageError or NotationError."""
    ns = build_parser().parse_args(list(argv))
    opts = vars(ns)
    verb = opts.pop("verb")
    n = opts.get("n")

    if verb == "faces":
        _check_n(n, opts["allow_large"] or n <= DEFAULT_MAX_N)
    elif verb == "delta":
        if opts["face"] is not None:
            if opts["polytope"] == "P":
                face = parse_partition(opts["face"])
                size = face.n
            else:
                face = parse_tree(opts["face"])
                size = leaf_count(face) - 1
            if n is not None and n != size:
                raise UsageError(f"--face {opts['face']!r} does not live in dimension n = {n}")
            opts["face"], opts["n"] = face, size
        elif n is None:
            raise UsageError("delta needs --n or --face")
        if opts["polytope"] == "P" and opts["formula"] == "magical":
            raise UsageError("--formula magical applies to --polytope K only")
        _check_n(opts["n"], opts["allow_large"])
    elif verb in ("scp", "step-matrix"):
        opts["sigma"] = parse_permutation(opts["sigma"])
    elif verb == "tonks":
        opts["face"] = parse_partition(opts["face"])
    elif verb in ("tamari-leq", "mp2cp"):
        opts["f"] = _tree_arg(opts["f"], n, "--f")
        opts["g"] = _tree_arg(opts["g"], n, "--g")
        if leaf_count(opts["f"]) != leaf_count(opts["g"]):
            raise UsageError("--f and --g are faces of different associahedra")
    elif verb == "verify":
        if n is not None and opts["max_n"] is not None:
            raise UsageError("give --n or --max-n, not both")
        if opts["polytope"] is not None and opts["check"] != "chain-map":
            raise UsageError("--polytope applies to verify chain-map only")
        top = n or opts["max_n"] or VERIFY_DEFAULT_MAX[opts["check"]]
        _check_n(top, opts["allow_large"])
        first = 2 if opts["check"] in ("agreement", "tiling") else 1
        opts["ns"] = [n] if n is not None else list(range(first, top + 1))
    return Command(verb, opts)


# ---------------------------------------------------------------- cache

def _cache_path(cache_dir: str, kind: str, polytope: str, n: int, extra: str = "") -> Path:
    return Path(cache_dir) / f"{kind}-{polytope}{extra}-n{n}-v{SCHEMA_VERSION}.json"


def _checksum(payload: Any) -> str:
    blob = json.dumps(payload, sort_keys=True, ensure_ascii=False).encode()
    return hashlib.sha256(blob).hexdigest()


def cached(cache_dir: str | None, kind: str, polytope: str, n: int, extra: str,
           compute: Callable[[], Any]) -> Any:
    """Return compute()'s JSON-able payload, reading or filling the cache."""
    if not cache_dir:
        return compute()
    path = _cache_path(cache_dir, kind, polytope, n, extra)
    try:
        entry = json.loads(path.read_text(encoding="utf-8"))
        key_ok = entry.get("key") == [kind, polytope + extra, n, SCHEMA_VERSION]
        if key_ok and entry.get("checksum") == _checksum(entry.get("payload")):
            return entry["payload"]
    except (OSError, ValueError):
        pass
    payload = compute()
    entry = {
        "key": [kind, polytope + extra, n, SCHEMA_VERSION],
        "payload": payload,
        "checksum": _checksum(payload),
    }
    path.parent.mkdir(parents=True, exist_ok=True)
    tmp = path.with_suffix(".tmp")
    tmp.write_text(json.dumps(entry, ensure_ascii=False) + "\n", encoding="utf-8")
    tmp.replace(path)
    return payload


# ---------------------------------------------------------------- verbs

def _fmt_cell(polytope: str, c) -> str:
    return format_partition(c) if polytope == "P" else format_tree(c)


def _do_faces(o: dict) -> tuple[dict, list[str], bool]:
    n, dim, poly = o["n"], o["dim"], o["polytope"]
    if dim is not None and dim > n - 1:
        raise UsageError(f"--dim {dim} exceeds the dimension {n - 1} of the polytope")
    if poly == "P":
        def compute():
            faces = list(enumerate_faces_P(n, dim, max_n=N_CAP_LARGE))
            faces.sort(key=lambda a: (a.dim, len(a), tuple(a)))
            return [{"face": format_partition(a), "dim": a.dim} for a in faces]
    else:
        def compute():
            faces = enumerate_faces_K(n, dim)
            faces.sort(key=lambda F: (F.dim, format_tree(F.tree)))
            return [
                {"face": str(F), "dim": F.dim, "cells": [format_partition(c) for c in F.cells]}
                for F in faces
            ]
    extra = "" if dim is None else f"-d{dim}"
    rows = cached(o["cache_dir"], "faces", poly, n, extra, compute)
    lines = [
        r["face"] if poly == "P" else f"{r['face']}  {' '.join(r['cells'])}" for r in rows
    ]
    return {"polytope": poly, "n": n, "dim": dim, "count": len(rows), "faces": rows}, lines, True


def _do_delta(o: dict) -> tuple[dict, list[str], bool]:
    poly, n, face, formula = o["polytope"], o["n"], o["face"], o["formula"]
    if face is not None:
        ds = delta_P_face(face) if poly == "P" else delta_K_face(face)
        comps = [[_fmt_cell(poly, a), _fmt_cell(poly, b)] for a, b in ds]
        face_str = _fmt_cell(poly, face)
    else:
        def compute():
            if poly == "P":
                ds = delta_P_top(n, o["jobs"])
            elif formula == "su":
                ds = delta_K_su(n, o["jobs"])
            else:
                ds = delta_K_magical(n)
            return [[_fmt_cell(poly, a), _fmt_cell(poly, b)] for a, b in ds]
        comps = cached(o["cache_dir"], "delta", poly, n, "" if poly == "P" else f"-{formula}", compute)
        face_str = None
    report = {
        "polytope": poly, "n": n, "face": face_str,
        "formula": formula if poly == "K" else None,
        "count": len(comps), "components": comps,
    }
    return report, [f"{a} × {b}" for a, b in comps], True


def _do_scp(o: dict) -> tuple[dict, list[str], bool]:
    cp = scp(o["sigma"])
    report = {"sigma": str(cp.sigma), "alpha": str(cp.alpha), "beta": str(cp.beta)}
    return report, [str(cp)], True


def _do_step_matrix(o: dict) -> tuple[dict, list[str], bool]:
    m = step_matrix(o["sigma"])
    report = {"sigma": str(o["sigma"]), "rows": [list(r) for r in m.rows]}
    return report, str(m).splitlines(), True


def _do_tonks(o: dict) -> tuple[dict, list[str], bool]:
    t = tree_of(o["face"])
    report = {"face": str(o["face"]), "tree": format_tree(t), "dim": KFace(t).dim}
    return report, [format_tree(t)], True


def _do_tamari(o: dict) -> tuple[dict, list[str], bool]:
    F, G = KFace(o["f"]), KFace(o["g"])
    leq = tamari_leq(F, G)
    return {"f": str(F), "g": str(G), "leq": leq}, ["true" if leq else "false"], True


def _moves(seq) -> list[list[int]]:
    return [sorted(m) for m in seq.moves]


def _short_moves(seq) -> str:
    inner = ", ".join("{" + ",".join(map(str, sorted(m))) + "}" for m in seq.trimmed())
    return f"({inner})"


def _do_mp2cp(o: dict) -> tuple[dict, list[str], bool]:
    cp = mp_to_cp(o["f"], o["g"], method=o["method"])
    report = {
        "f": format_tree(o["f"]), "g": format_tree(o["g"]),
        "alpha": str(cp.alpha), "beta": str(cp.beta), "sigma": str(cp.sigma),
        "M": _moves(cp.M), "N": _moves(cp.N),
    }
    lines = [str(cp), f"σ = {cp.sigma}", f"M = {_short_moves(cp.M)}", f"N = {_short_moves(cp.N)}"]
    return report, lines, True


def _verify_line(check: str, d: dict) -> str:
    status = "ok" if d["pass"] else "FAIL"
    if check == "agreement":
        return (f"n={d['n']} su={d['su_count']} magical={d['magical_count']} equal={d['equal']}"
                f" bijective={d['preimage_unique'] and d['roundtrip_ok']} {status}")
    if check == "chain-map":
        return (f"{d['polytope']} n={d['n']} chain_map={d['chain_map_ok']}"
                f" boundary_squared={d['boundary_squared_ok']} {status}")
    details = " ".join(f"{k}={v}" for k, v in sorted(d.get("details", {}).items()))
    return f"n={d['n']} {check} {details} {status}".replace("  ", " ")


def _do_verify(o: dict) -> tuple[dict, list[str], bool]:
    check = o["check"]
    results = []
    for n in o["ns"]:
        if check == "agreement":
            cert = verify_agreement(n, o["jobs"])
            d = cert.to_dict(timings=o["timings"])
            d["pass"] = cert.ok
            results.append(d)
        elif check == "chain-map":
            for poly in [o["polytope"]] if o["polytope"] else ["P", "K"]:
                rep = chain_map_check(poly, n)
                d = rep.to_dict()
                d["pass"] = rep.ok
                results.append(d)
        else:
            fn = {"tiling": verify_tiling, "cubical": verify_cubical,
                  "maximal-pairs": verify_maximal_pairs}[check]
            results.append(fn(n).to_dict())
    ok = all(d["pass"] for d in results)
    lines = [_verify_line(check, d) for d in results]
    for d in results:
        for key in ("witnesses", "offending", "missing", "extra", "roundtrip_failures"):
            lines += [f"  {w}" for w in d.get(key, [])]
    return {"check": check, "pass": ok, "results": results}, lines, ok


VERBS = {
    "faces": _do_faces, "delta": _do_delta, "scp": _do_scp, "step-matrix": _do_step_matrix,
    "tonks": _do_tonks, "tamari-leq": _do_tamari, "mp2cp": _do_mp2cp, "verify": _do_verify,
}


def execute(cmd: Command) -> tuple[str, int]:
    """Run a command; returns (standard output text, exit code)."""
    report, lines, ok = VERBS[cmd.verb](cmd.options)
    if cmd.options.get("format") == "json":
        body = {"schema_version": SCHEMA_VERSION, "verb": cmd.verb, **report}
        text = json.dumps(body, indent=2, ensure_ascii=False, sort_keys=True)
    else:
        text = "\n".join(lines)
    return text + "\n", 0 if ok else 1


def main(argv: Sequence[str] | None = None) -> int:
    argv = sys.argv[1:] if argv is None else argv
    try:
        cmd = parse_command(argv)
        out, code = execute(cmd)
    except (UsageError, NotationError, NotMatchingPairError) as exc:
        print(f"assocdiag: error: {exc}", file=sys.stderr)
        return 2
    except PathNotFoundError as exc:
        print(f"assocdiag: verification failed: {exc}", file=sys.stderr)
        return 1
    sys.stdout.write(out)
    return code


if __name__ == "__main__":
    sys.exit(main())
