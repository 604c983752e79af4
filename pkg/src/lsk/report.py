"""Analysis records and their deterministic JSON form."""
from __future__ import annotations

import json
import math
from typing import Optional

import numpy as np

from . import __version__
from .classify import (
    find_immersing_transform, isoparametric_witness, munzner_check, patch_families,
    reducibility_detect,
)
from .curvature import (
    CLUSTER_TOL, DUPIN_TOL, BranchMatchingError, canonical_lie_curvature,
    curvature_pencils, dupin_residual,
)
from .indefinite import RANK_TOL, SIGNATURE_TOL
from .lift import contact_residual, lift

LIE_CURVATURE_TOL = 1e-6
CONTACT_REPORT_TOL = 1e-10
WITNESS_TOL = 1e-8
IMMERSION_TOL = 1e-6
MAX_GRID_POINTS = 20000


def default_resolution(dim: int) -> int:
    """64 per axis for curves and surfaces, 16 in dimension 3, fewer beyond."""
    if dim <= 2:
        return 64
    if dim == 3:
        return 16
    return max(3, int(MAX_GRID_POINTS ** (1.0 / dim)))


def resolution_for(patch, grid=None) -> tuple:
    if grid is None:
        return (default_resolution(patch.dim),) * patch.dim
    grid = tuple(int(g) for g in np.atleast_1d(grid))
    if len(grid) == 1:
        grid = grid * patch.dim
    if len(grid) != patch.dim or min(grid) < 2:
        raise ValueError(f"grid {grid} does not fit a {patch.dim}-parameter patch")
    return grid


def measured(value, tol) -> dict:
    return {"value": value, "tol": tol}


def _params(p) -> dict:
    out = {}
    for k, v in p.items():
        if isinstance(v, np.ndarray):
            v = v.tolist()
        out[k] = v
    return out


def _lie_curvature_block(pencils) -> Optional[dict]:
    if any(pc.g != 4 for pc in pencils):
        return None
    rs, ok = [], True
    for pc in pencils:
        res = canonical_lie_curvature(list(pc.kappas), pc.multiplicities)
        rs.append(res.r)
        ok = ok and munzner_check(list(pc.kappas), pc.multiplicities, LIE_CURVATURE_TOL)
    rs = np.array(rs)
    spread = float(np.max(rs) - np.min(rs))
    return {
        "r": measured(float(np.mean(rs)), LIE_CURVATURE_TOL),
        "spread": measured(spread, LIE_CURVATURE_TOL),
        "constant": spread <= LIE_CURVATURE_TOL,
        "munzner_conditions": bool(ok),
    }


def analyze_patch(patch, grid=None) -> dict:
    """Curvature, Dupin and Lie-curvature summary over a parameter grid."""
    res = resolution_for(patch, grid)
    u = patch.grid(res).reshape(-1, patch.dim)
    pencils = curvature_pencils(patch, u, CLUSTER_TOL)
    g_vals = np.array([pc.g for pc in pencils])
    g = int(g_vals[0])
    mults = sorted(pencils[0].multiplicities) if np.all(g_vals == g) else None
    kap = np.concatenate([pc.kappas for pc in pencils])
    finite = kap[np.isfinite(kap)]
    dup = dupin_residual(patch, u, CLUSTER_TOL, DUPIN_TOL)
    sample = lift(patch, u)
    lie = _lie_curvature_block(pencils) if g == 4 else None
    return {
        "input": {"patch": patch.name, "ambient": patch.ambient, "n": patch.n,
                  "params": _params(patch.params)},
        "grid": {"resolution": list(res), "points": int(len(u))},
        "curvature": {
            "g": g,
            "g_constant": bool(np.all(g_vals == g)),
            "multiplicities": mults,
            "kappa_min": measured(float(finite.min()) if finite.size else 0.0, CLUSTER_TOL),
            "kappa_max": measured(float(finite.max()) if finite.size else 0.0, CLUSTER_TOL),
            "ambiguous_points": int(sum(pc.ambiguous for pc in pencils)),
        },
        "contact_residual": measured(float(np.max(contact_residual(sample))), CONTACT_REPORT_TOL),
        "dupin": {
            "max_residual": measured(dup.max_residual, DUPIN_TOL),
            "branch_residuals": [measured(float(r), DUPIN_TOL) for r in dup.residuals],
            "dupin": dup.is_dupin,
            "proper": dup.is_proper and dup.is_dupin,
        },
        "lie_curvature": lie,
    }


def _reducibility_block(verdict) -> dict:
    return {
        "status": verdict.status,
        "family": verdict.family,
        "span_dims": [int(s) for s in verdict.family_spans],
        "span_dim": int(verdict.span_dim),
        "m": int(verdict.m),
        "signature": list(verdict.signature) if verdict.signature else None,
        "construction": verdict.construction,
        "compatible": list(verdict.compatible),
        "refined_signature": list(verdict.refined_signature) if verdict.refined_signature else None,
        "rank_tol": RANK_TOL,
        "signature_tol": SIGNATURE_TOL,
        "warnings": list(verdict.warnings),
    }


def _witness_block(result) -> dict:
    return {
        "status": result.status,
        "ordering": list(result.ordering) if result.ordering else None,
        "residual": measured(result.witness.residual if result.found else None, WITNESS_TOL),
        "max_nullity": int(max(result.nullity.values())) if result.nullity else 0,
        "note": result.note,
    }


def _immersion_block(result) -> dict:
    return {
        "status": result.status,
        "score": measured(result.score, IMMERSION_TOL),
        "trial": result.trial,
        "v": None if result.v is None else [float(x) for x in result.v],
    }


def classify_families(families, seed: int = 0, witness: bool = True, immersion: bool = True,
                      trials: int = 256) -> dict:
    verdict = reducibility_detect(families, RANK_TOL)
    out = {"reducibility": _reducibility_block(verdict)}
    if witness and len(families) == 4:
        out["isoparametric_witness"] = _witness_block(isoparametric_witness(families, WITNESS_TOL))
    else:
        out["isoparametric_witness"] = None
    if immersion:
        out["immersing_transform"] = _immersion_block(
            find_immersing_transform(families, trials=trials, seed=seed, tol=IMMERSION_TOL))
    else:
        out["immersing_transform"] = None
    return out


def classify_patch(patch, grid=None, seed: int = 0, immersion: bool = True, trials: int = 256) -> dict:
    res = resolution_for(patch, grid)
    try:
        fams = patch_families(patch, res, CLUSTER_TOL)
    except BranchMatchingError as exc:
        return {"reducibility": {"status": "unknown", "warnings": [str(exc)]},
                "isoparametric_witness": None, "immersing_transform": None}
    return classify_families(fams, seed, immersion=immersion, trials=trials)


def envelope(command: str, seed: int, body: dict) -> dict:
    return {"tool": "lsk", "version": __version__, "command": command, "seed": seed, **body}


# ------------------------------------------------------------ serialization

def _fmt_float(x: float) -> str:
    if math.isnan(x):
        raise ValueError("NaN in report")
    if math.isinf(x):
        return '"inf"' if x > 0 else '"-inf"'
    return format(x, ".17g")


def dumps(obj, indent: int = 2, _level: int = 0) -> str:
    """JSON with insertion-ordered keys and floats at 17 significant digits."""
    pad = " " * (indent * (_level + 1))
    end = " " * (indent * _level)
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [f"{pad}{json.dumps(str(k))}: {dumps(v, indent, _level + 1)}" for k, v in obj.items()]
        return "{\n" + ",\n".join(items) + "\n" + end + "}"
    if isinstance(obj, (list, tuple)):
        if not obj:
            return "[]"
        if all(not isinstance(v, (dict, list, tuple)) for v in obj):
            return "[" + ", ".join(dumps(v, indent, _level + 1) for v in obj) + "]"
        return "[\n" + ",\n".join(pad + dumps(v, indent, _level + 1) for v in obj) + "\n" + end + "]"
    if isinstance(obj, (bool, np.bool_)):
        return "true" if obj else "false"
    if obj is None:
        return "null"
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if isinstance(obj, (float, np.floating)):
        return _fmt_float(float(obj))
    if isinstance(obj, str):
        return json.dumps(obj)
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def render(doc: dict, _prefix: str = "") -> list:
    """Flatten a report into 'path: value' lines."""
    lines = []
    for k, v in doc.items():
        key = f"{_prefix}{k}"
        if isinstance(v, dict) and set(v) == {"value", "tol"}:
            val = v["value"]
            lines.append(f"{key}: {val if not isinstance(val, float) else f'{val:.6g}'} (tol {v['tol']:g})")
        elif isinstance(v, dict):
            lines.extend(render(v, key + "."))
        else:
            lines.append(f"{key}: {v}")
    return lines
