"""JSON wire formats for instances, parameters, and solutions.

Complex entries are [re, im] pairs.  General matrices are objects
{"rows": r, "cols": c, "data": [[re, im], ...]} with row-major data;
Nehari taps and solution coefficients are bare row-major pair lists whose
shape is implied by the problem's port dimensions.

Report JSON is canonical: keys sorted, floats printed at 17 significant
digits, so a report is byte-stable for a fixed seed and version.
"""

from __future__ import annotations

import json
import math
from typing import Any

import numpy as np

from . import nehari, schur
from .errors import ParseError
from .hardy import SystemRealization, TaylorSeries
from .lifting import LiftingDataSet
from .linalg import cmatrix


def matrix_to_json(m: np.ndarray) -> dict:
    m = cmatrix(m)
    data = [[float(z.real), float(z.imag)] for z in m.reshape(-1)]
    return {"rows": int(m.shape[0]), "cols": int(m.shape[1]), "data": data}


def matrix_from_json(obj, what: str = "matrix") -> np.ndarray:
    try:
        rows, cols, data = int(obj["rows"]), int(obj["cols"]), obj["data"]
    except (TypeError, KeyError) as exc:
        raise ParseError(f"{what}: expected rows/cols/data object") from exc
    return _pairs_to_matrix(data, rows, cols, what)


def _pairs_to_matrix(data, rows: int, cols: int, what: str) -> np.ndarray:
    if rows < 0 or cols < 0:
        raise ParseError(f"{what}: negative dimensions")
    if not isinstance(data, list) or len(data) != rows * cols:
        raise ParseError(f"{what}: need {rows * cols} [re, im] pairs")
    out = np.zeros(rows * cols, dtype=complex)
    for i, pair in enumerate(data):
        if not isinstance(pair, list) or len(pair) != 2:
            raise ParseError(f"{what}: entry {i} is not an [re, im] pair")
        out[i] = complex(float(pair[0]), float(pair[1]))
    m = out.reshape(rows, cols)
    if m.size and not np.all(np.isfinite(m.view(float))):
        raise ParseError(f"{what}: non-finite entries")
    return m


def _pairs_from_matrix(m: np.ndarray) -> list:
    return [[float(z.real), float(z.imag)] for z in np.asarray(m, complex).reshape(-1)]


# --- instances -----------------------------------------------------------------


def instance_to_json(obj) -> dict:
    if isinstance(obj, LiftingDataSet):
        return {
            "kind": "lifting",
            "a": matrix_to_json(obj.a),
            "t_prime": matrix_to_json(obj.t_prime),
            "r": matrix_to_json(obj.r),
            "q": matrix_to_json(obj.q),
        }
    if isinstance(obj, nehari.NehariProblem):
        return {
            "kind": "nehari",
            "N": obj.n_window,
            "u_dim": obj.u_dim,
            "y_dim": obj.y_dim,
            "taps": [_pairs_from_matrix(t) for t in obj.taps],
        }
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def instance_from_json(obj):
    if not isinstance(obj, dict) or "kind" not in obj:
        raise ParseError("instance file needs a 'kind' discriminator")
    kind = obj["kind"]
    if kind == "lifting":
        try:
            return LiftingDataSet(
                a=matrix_from_json(obj["a"], "a"),
                t_prime=matrix_from_json(obj["t_prime"], "t_prime"),
                r=matrix_from_json(obj["r"], "r"),
                q=matrix_from_json(obj["q"], "q"),
            )
        except KeyError as exc:
            raise ParseError(f"lifting instance missing field {exc}") from exc
    if kind == "nehari":
        try:
            n, u, y = int(obj["N"]), int(obj["u_dim"]), int(obj["y_dim"])
            taps = [
                _pairs_to_matrix(t, y, u, f"tap {i}")
                for i, t in enumerate(obj.get("taps", []))
            ]
        except (KeyError, TypeError, ValueError) as exc:
            raise ParseError(f"malformed nehari instance: {exc}") from exc
        try:
            return nehari.NehariProblem(n, u, y, tuple(taps))
        except Exception as exc:
            raise ParseError(f"invalid nehari instance: {exc}") from exc
    raise ParseError(f"unknown instance kind {kind!r}")


# --- Schur parameters ------------------------------------------------------------


def parameter_to_json(v: schur.SchurParameter) -> dict:
    if v.kind == "zero":
        return {"variant": "zero", "in_dim": v.in_dim, "out_dim": v.out_dim}
    if v.kind == "constant":
        return {"variant": "constant", "matrix": matrix_to_json(v.matrix)}
    sys = v.system
    return {
        "variant": "transfer",
        "a": matrix_to_json(sys.a_s),
        "b": matrix_to_json(sys.b_s),
        "c": matrix_to_json(sys.c_s),
        "d": matrix_to_json(sys.d_s),
    }


def parameter_from_json(obj) -> schur.SchurParameter:
    if not isinstance(obj, dict) or "variant" not in obj:
        raise ParseError("parameter file needs a 'variant' tag")
    variant = obj["variant"]
    try:
        if variant == "zero":
            return schur.zero(int(obj["in_dim"]), int(obj["out_dim"]))
        if variant == "constant":
            return schur.constant(matrix_from_json(obj["matrix"], "matrix"))
        if variant == "transfer":
            sys = SystemRealization(
                a_s=matrix_from_json(obj["a"], "a"),
                b_s=matrix_from_json(obj["b"], "b"),
                c_s=matrix_from_json(obj["c"], "c"),
                d_s=matrix_from_json(obj["d"], "d"),
                contractive_certified=True,
            )
            return schur.from_system(sys)
        if variant == "random":
            return schur.random_schur(
                int(obj["in_dim"]),
                int(obj["out_dim"]),
                int(obj["state_dim"]),
                int(obj["seed"]),
            )
    except ParseError:
        raise
    except Exception as exc:
        raise ParseError(f"invalid {variant} parameter: {exc}") from exc
    raise ParseError(f"unknown parameter variant {variant!r}")


# --- solutions -------------------------------------------------------------------


def nehari_solution_to_json(h: TaylorSeries, sigma_max: float, report: dict) -> dict:
    return {
        "kind": "nehari_solution",
        "H": [_pairs_from_matrix(c) for c in h.coeffs],
        "tail_bound": h.tail_bound,
        "sigma_max": sigma_max,
        "report": report,
    }


def nehari_solution_from_json(obj, u_dim: int, y_dim: int) -> TaylorSeries:
    try:
        coeffs = [
            _pairs_to_matrix(c, y_dim, u_dim, f"H[{i}]")
            for i, c in enumerate(obj["H"])
        ]
        tail = obj.get("tail_bound")
    except (KeyError, TypeError) as exc:
        raise ParseError(f"malformed nehari solution: {exc}") from exc
    return TaylorSeries(tuple(coeffs), tail_bound=None if tail is None else float(tail))


def lifting_solution_to_json(sol, report: dict) -> dict:
    return {
        "kind": "lifting_solution",
        "a_part": matrix_to_json(sol.a_part),
        "gamma": [matrix_to_json(g) for g in sol.gamma_coeffs],
        "tail_bound": sol.tail_bound,
        "report": report,
    }


def lifting_solution_from_json(obj):
    from .hardy import SolutionTaylor

    try:
        a_part = matrix_from_json(obj["a_part"], "a_part")
        gammas = [matrix_from_json(g, f"gamma[{i}]") for i, g in enumerate(obj["gamma"])]
        tail = obj.get("tail_bound")
    except (KeyError, TypeError) as exc:
        raise ParseError(f"malformed lifting solution: {exc}") from exc
    return SolutionTaylor(
        a_part=a_part,
        gamma_coeffs=tuple(gammas),
        tail_bound=None if tail is None else float(tail),
    )


# --- canonical JSON ----------------------------------------------------------------


def _canonize(obj: Any) -> Any:
    """Round-trippable structure with floats fixed to 17 significant digits."""
    if isinstance(obj, dict):
        return {str(k): _canonize(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_canonize(v) for v in obj]
    if isinstance(obj, (bool, int, str)) or obj is None:
        return obj
    if isinstance(obj, (float, np.floating)):
        f = float(obj)
        if math.isnan(f) or math.isinf(f):
            return None
        return float(f"{f:.17g}")
    if isinstance(obj, np.integer):
        return int(obj)
    raise TypeError(f"cannot canonize {type(obj).__name__}")


def canonical_json(obj: Any) -> str:
    """Deterministic JSON text: sorted keys, fixed float formatting."""
    return json.dumps(_canonize(obj), sort_keys=True, separators=(",", ":")) + "\n"


def load_json(path: str) -> Any:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            return json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise ParseError(f"{path}: {exc}") from exc


def dump_json(path: str, obj: Any) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(canonical_json(obj))
