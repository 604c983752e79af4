"""Command-line driver: ``lsk {analyze,construct,classify,corpus,report}``."""
from __future__ import annotations

import argparse
import json
import os
import sys
from typing import Optional

import numpy as np

from . import report as R
from .corpus import cone_tube_families, generate, load_corpus, synthetic_isoparametric_pencil
from .curvature import NonImmersionError
from .constructions import FocalDistanceError

DEFAULT_SEED = 0


class UsageError(Exception):
    pass


def _value(text: str):
    try:
        return json.loads(text)
    except json.JSONDecodeError:
        return text


def parse_pairs(extra: list) -> dict:
    """``--key value`` patch parameters left over by argparse."""
    out = {}
    it = iter(extra)
    for tok in it:
        if not tok.startswith("--") or len(tok) < 3:
            raise UsageError(f"unexpected argument {tok!r}")
        key = tok[2:].replace("-", "_")
        try:
            val = next(it)
        except StopIteration:
            raise UsageError(f"missing value for {tok}")
        out[key] = _value(val)
    return out


def parse_grid(text: Optional[str]):
    if text is None:
        return None
    try:
        return tuple(int(x) for x in text.lower().split("x"))
    except ValueError:
        raise UsageError(f"bad grid {text!r}; expected e.g. 64x64")


def _seed(args) -> int:
    env = os.environ.get("LSK_SEED")
    if env is not None:
        try:
            return int(env)
        except ValueError:
            raise UsageError(f"LSK_SEED must be an integer, got {env!r}")
    return DEFAULT_SEED if args.seed is None else args.seed


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="lsk", description=__doc__)
    sub = ap.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--grid", help="resolution per axis, e.g. 64x64")
        p.add_argument("--seed", type=int, default=None)
        p.add_argument("--out", help="write the JSON report here instead of stdout")

    a = sub.add_parser("analyze", help="curvature, Dupin and Lie-curvature report")
    a.add_argument("--patch", required=True)
    common(a)

    c = sub.add_parser("construct", help="apply a construction and analyze the result")
    c.add_argument("kind", choices=["revolve", "tube", "cylinder"])
    c.add_argument("--profile", required=True)
    c.add_argument("--classify", action="store_true", help="also run the classification")
    common(c)

    k = sub.add_parser("classify", help="reducibility, construction type, witness search")
    src = k.add_mutually_exclusive_group(required=True)
    src.add_argument("--patch")
    src.add_argument("--synthetic", type=int, metavar="SEED",
                     help="synthetic isoparametric pencil with this seed")
    src.add_argument("--cone-tube", action="store_true",
                     help="tube over a Clifford cone (four curvature spheres)")
    k.add_argument("--conjugate", action="store_true")
    k.add_argument("--trials", type=int, default=256)
    common(k)

    cp = sub.add_parser("corpus", help="run the shipped corpus against its expected values")
    cp.add_argument("--all", action="store_true")
    cp.add_argument("--name", action="append", default=[])
    cp.add_argument("--file")
    cp.add_argument("--seed", type=int, default=None)
    cp.add_argument("--out")

    rp = sub.add_parser("report", help="pretty-print a stored JSON report")
    rp.add_argument("path")
    return ap


def _emit(doc: dict, out: Optional[str]):
    text = R.dumps(doc) + "\n"
    if out:
        with open(out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _patch(name, params):
    try:
        return generate(name, params)
    except KeyError as exc:
        raise UsageError(str(exc.args[0]))
    except TypeError as exc:
        raise UsageError(f"bad parameters for {name}: {exc}")


def cmd_analyze(args, params):
    patch = _patch(args.patch, params)
    body = R.analyze_patch(patch, parse_grid(args.grid))
    return R.envelope("analyze", _seed(args), body)


def cmd_construct(args, params):
    params = dict(params, profile=args.profile)
    patch = _patch(args.kind, params)
    seed = _seed(args)
    grid = parse_grid(args.grid)
    body = {"construction": {"kind": args.kind, "params": R._params(params)}}
    body.update(R.analyze_patch(patch, grid))
    if args.classify:
        body["classification"] = R.classify_patch(patch, grid, seed)
    return R.envelope("construct", seed, body)


def cmd_classify(args, params):
    seed = _seed(args)
    if args.synthetic is not None:
        n = int(params.pop("n", 5))
        sp = synthetic_isoparametric_pencil(args.synthetic, n, conjugate=args.conjugate)
        body = {"input": {"synthetic": args.synthetic, "n": n, "conjugate": args.conjugate}}
        body["classification"] = R.classify_families(sp.families, seed, trials=args.trials)
    elif args.cone_tube:
        p, eps = int(params.pop("p", 1)), float(params.pop("eps", 0.25))
        res = parse_grid(args.grid)
        _, fams = cone_tube_families(p, eps, res[0] if res else 4,
                                     seed if args.conjugate else None)
        body = {"input": {"cone_tube": {"p": p, "eps": eps}, "conjugate": args.conjugate}}
        body["classification"] = R.classify_families(fams, seed, trials=args.trials)
    else:
        patch = _patch(args.patch, params)
        body = {"input": {"patch": patch.name, "params": R._params(patch.params)}}
        body["classification"] = R.classify_patch(patch, parse_grid(args.grid), seed, trials=args.trials)
    return R.envelope("classify", seed, body)


def cmd_corpus(args, params):
    from .runner import run_corpus

    if params:
        raise UsageError(f"corpus takes no patch parameters: {sorted(params)}")
    if not args.all and not args.name:
        raise UsageError("pass --all or at least one --name")
    entries = load_corpus(args.file)
    if args.name:
        known = {e.name for e in entries}
        unknown = set(args.name) - known
        if unknown:
            raise UsageError(f"unknown corpus entries: {sorted(unknown)}")
        entries = [e for e in entries if e.name in args.name]
    seed = _seed(args)
    results = run_corpus(entries, seed)
    doc = R.envelope("corpus", seed, {"entries": results,
                                      "mismatches": sum(not r["ok"] for r in results)})
    return doc


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args, extra = parser.parse_known_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        params = parse_pairs(extra)
        if args.command == "report":
            if params:
                raise UsageError("report takes only a path")
            try:
                with open(args.path) as fh:
                    doc = json.load(fh)
            except (OSError, json.JSONDecodeError) as exc:
                raise UsageError(f"cannot read report: {exc}")
            print("\n".join(R.render(doc)))
            return 0
        handler = {"analyze": cmd_analyze, "construct": cmd_construct,
                   "classify": cmd_classify, "corpus": cmd_corpus}[args.command]
        doc = handler(args, params)
    except UsageError as exc:
        print(f"lsk: error: {exc}", file=sys.stderr)
        return 2
    except (FocalDistanceError, NonImmersionError, ValueError) as exc:
        print(f"lsk: error: {exc}", file=sys.stderr)
        return 2
    _emit(doc, getattr(args, "out", None))
    if args.command == "corpus" and doc["mismatches"]:
        for r in doc["entries"]:
            if not r["ok"]:
                print(f"lsk: corpus mismatch in {r['name']}: {r['mismatched']}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
