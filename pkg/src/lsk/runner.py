"""Run corpus entries and compare against their expected fields."""
from __future__ import annotations

from . import report as R
from .corpus import CorpusEntry, generate, synthetic_isoparametric_pencil

R_TOL = 1e-6


def actual_fields(entry: CorpusEntry, seed: int) -> dict:
    if entry.kind == "synthetic":
        p = entry.params
        sp = synthetic_isoparametric_pencil(int(p.get("seed", 0)), int(p.get("n", 5)),
                                            conjugate=bool(p.get("conjugate", False)))
        cls = R.classify_families(sp.families, seed, immersion=False)
        return {
            "g": len(sp.families),
            "multiplicities": sorted(f.multiplicity for f in sp.families),
            "reducible": cls["reducibility"]["status"],
            "isoparametric": cls["isoparametric_witness"]["status"] == "found",
        }
    patch = generate(entry.generator, entry.params)
    grid = entry.resolution
    ana = R.analyze_patch(patch, grid)
    out = {
        "g": ana["curvature"]["g"] if ana["curvature"]["g_constant"] else None,
        "multiplicities": ana["curvature"]["multiplicities"],
        "dupin": ana["dupin"]["proper"],
    }
    if ana["lie_curvature"] is not None:
        out["lie_curvature"] = ana["lie_curvature"]["r"]["value"]
    need_cls = {"reducible", "construction", "compatible_includes", "isoparametric"} & set(entry.expected)
    if need_cls:
        cls = R.classify_patch(patch, grid, seed, immersion=False)
        red = cls["reducibility"]
        out["reducible"] = red["status"]
        out["construction"] = red.get("construction")
        out["compatible_includes"] = red.get("compatible", [])
        wit = cls.get("isoparametric_witness")
        out["isoparametric"] = bool(wit and wit["status"] == "found")
    return out


def compare(expected: dict, actual: dict) -> list:
    bad = []
    for key, want in expected.items():
        got = actual.get(key)
        if key == "lie_curvature":
            ok = got is not None and abs(got - want) <= R_TOL
        elif key == "compatible_includes":
            ok = set(want) <= set(got or [])
        elif key == "multiplicities":
            ok = got is not None and sorted(got) == sorted(want)
        else:
            ok = got == want
        if not ok:
            bad.append(key)
    return bad


def run_corpus(entries, seed: int = 0) -> list:
    results = []
    for e in entries:
        act = actual_fields(e, seed)
        bad = compare(e.expected, act)
        results.append({"name": e.name, "ok": not bad, "mismatched": bad,
                        "expected": e.expected, "actual": {k: act.get(k) for k in e.expected},
                        "provenance": e.provenance})
    return results
