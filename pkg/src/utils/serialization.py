"""
JSON codecs for patterns, multipliers, kernels and results.

Complex numbers are written as [re, im] pairs, matrices as nested lists of
rows. Decoders raise InputError with a dotted field path.
"""

import json
from typing import Any, Dict, List

import numpy as np

from src.entities.errors import InputError
from src.entities.multiplier import BlockMultiplier, PartialBlockMultiplier, ScalarKernel
from src.entities.pattern import Pattern, validate_positivity_domain
from src.engine.completion_engine import (CompletionResult, CounterexampleRecord, ExtensionReport,
                                          GramFactorization)
from src.engine.schur_engine import TwoSidedFactorization


def load_json(path: str) -> Any:
    """Read a JSON document, turning syntax errors into InputError with line/column."""
    try:
        with open(path, "r", encoding="utf-8") as handle:
            return json.load(handle)
    except json.JSONDecodeError as exc:
        raise InputError(f"{path}:{exc.lineno}:{exc.colno}", exc.msg) from exc
    except OSError as exc:
        raise InputError(path, exc.strerror or str(exc)) from exc


def dumps(document: Any) -> str:
    return json.dumps(document, indent=2, sort_keys=True) + "\n"


def _require(doc: Dict, key: str, where: str) -> Any:
    if not isinstance(doc, dict):
        raise InputError(where or "$", "expected an object")
    if key not in doc:
        raise InputError(f"{where}.{key}" if where else key, "missing field")
    return doc[key]


def _int(value: Any, where: str, minimum: int = 0) -> int:
    if isinstance(value, bool) or not isinstance(value, int):
        raise InputError(where, "expected an integer")
    if value < minimum:
        raise InputError(where, f"expected an integer >= {minimum}")
    return value


def encode_matrix(a: np.ndarray) -> List[List[List[float]]]:
    return [[[float(z.real), float(z.imag)] for z in row] for row in np.asarray(a, dtype=np.complex128)]


def decode_matrix(raw: Any, where: str, rows: int = None, cols: int = None) -> np.ndarray:
    if not isinstance(raw, list) or not raw:
        raise InputError(where, "expected a non-empty list of rows")
    width = None
    out = []
    for i, row in enumerate(raw):
        if not isinstance(row, list):
            raise InputError(f"{where}[{i}]", "expected a list of [re, im] pairs")
        if width is None:
            width = len(row)
        elif len(row) != width:
            raise InputError(f"{where}[{i}]", f"expected {width} entries, got {len(row)}")
        values = []
        for j, entry in enumerate(row):
            if (not isinstance(entry, list) or len(entry) != 2
                    or not all(isinstance(v, (int, float)) and not isinstance(v, bool) for v in entry)):
                raise InputError(f"{where}[{i}][{j}]", "expected [re, im]")
            if not all(np.isfinite(entry)):
                raise InputError(f"{where}[{i}][{j}]", "non-finite value")
            values.append(complex(entry[0], entry[1]))
        out.append(values)
    a = np.array(out, dtype=np.complex128)
    if rows is not None and a.shape[0] != rows:
        raise InputError(where, f"expected {rows} rows, got {a.shape[0]}")
    if cols is not None and a.shape[1] != cols:
        raise InputError(where, f"expected {cols} columns, got {a.shape[1]}")
    return a


def pattern_to_json(p: Pattern) -> Dict:
    return {"n": p.n, "pairs": [list(pair) for pair in sorted(p.pairs)]}


def pattern_from_json(doc: Any) -> Pattern:
    """Strict: the diagonal and both orientations of every pair must be listed."""
    n = _int(_require(doc, "n", ""), "n", minimum=1)
    raw_pairs = _require(doc, "pairs", "")
    if not isinstance(raw_pairs, list):
        raise InputError("pairs", "expected a list")
    pairs = []
    for idx, pair in enumerate(raw_pairs):
        if not isinstance(pair, list) or len(pair) != 2:
            raise InputError(f"pairs[{idx}]", "expected [x, y]")
        pairs.append((_int(pair[0], f"pairs[{idx}][0]"), _int(pair[1], f"pairs[{idx}][1]")))
    return validate_positivity_domain(n, pairs)


def multiplier_to_json(phi: PartialBlockMultiplier) -> Dict:
    entries = [{"x": x, "y": y, "block": encode_matrix(phi.block(x, y))}
               for x, y in sorted(phi.pattern.pairs) if x <= y]
    return {"n": phi.n, "d": phi.d, "pairs": entries}


def multiplier_from_json(doc: Any) -> PartialBlockMultiplier:
    """
    Decode Multiplier JSON. Pairs with x <= y suffice; mirrors come from the
    adjoint. The diagonal must be listed. A full pattern gives a BlockMultiplier.
    """
    n = _int(_require(doc, "n", ""), "n", minimum=1)
    d = _int(_require(doc, "d", ""), "d", minimum=1)
    raw_pairs = _require(doc, "pairs", "")
    if not isinstance(raw_pairs, list):
        raise InputError("pairs", "expected a list")

    blocks = {}
    for idx, item in enumerate(raw_pairs):
        where = f"pairs[{idx}]"
        x = _int(_require(item, "x", where), f"{where}.x")
        y = _int(_require(item, "y", where), f"{where}.y")
        if x >= n or y >= n:
            raise InputError(where, f"index out of range for n={n}")
        blocks[(x, y)] = decode_matrix(_require(item, "block", where), f"{where}.block", d, d)
    for (x, y) in list(blocks):
        if (y, x) not in blocks:
            blocks[(y, x)] = blocks[(x, y)].conj().T

    pattern = validate_positivity_domain(n, blocks.keys())
    if pattern.is_full:
        return BlockMultiplier(pattern, d, blocks)
    return PartialBlockMultiplier(pattern, d, blocks)


def kernel_from_json(doc: Any) -> ScalarKernel:
    n = _int(_require(doc, "n", ""), "n", minimum=1)
    return ScalarKernel(decode_matrix(_require(doc, "entries", ""), "entries", n, n))


def completion_to_json(result: CompletionResult) -> Dict:
    doc = multiplier_to_json(result.psi)
    doc["filled"] = [{"x": x, "y": y, "block": encode_matrix(block)} for x, y, block in result.filled]
    doc["min_eig"] = result.min_eig
    doc["added_pairs"] = [list(pair) for pair in result.added_pairs]
    return doc


def completion_from_json(doc: Any) -> CompletionResult:
    psi = multiplier_from_json(doc)
    if not isinstance(psi, BlockMultiplier):
        raise InputError("pairs", "a completion result must specify every pair")
    filled = []
    for idx, item in enumerate(_require(doc, "filled", "")):
        where = f"filled[{idx}]"
        x = _int(_require(item, "x", where), f"{where}.x")
        y = _int(_require(item, "y", where), f"{where}.y")
        filled.append((x, y, decode_matrix(_require(item, "block", where), f"{where}.block", psi.d, psi.d)))
    added = tuple((int(p[0]), int(p[1])) for p in doc.get("added_pairs", []))
    return CompletionResult(psi=psi, filled=tuple(filled), min_eig=float(_require(doc, "min_eig", "")),
                            added_pairs=added)


def _block_table(blocks: np.ndarray, index_name: str) -> List[Dict]:
    m, n = blocks.shape[:2]
    return [{"i": i, index_name: x, "block": encode_matrix(blocks[i, x])}
            for i in range(m) for x in range(n)]


def _decode_table(raw: Any, key: str, index_name: str, m: int, n: int, d: int) -> np.ndarray:
    if not isinstance(raw, list):
        raise InputError(key, "expected a list")
    out = np.zeros((m, n, d, d), dtype=np.complex128)
    for idx, item in enumerate(raw):
        where = f"{key}[{idx}]"
        i = _int(_require(item, "i", where), f"{where}.i")
        x = _int(_require(item, index_name, where), f"{where}.{index_name}")
        if i >= m or x >= n:
            raise InputError(where, "index out of range")
        out[i, x] = decode_matrix(_require(item, "block", where), f"{where}.block", d, d)
    return out


def gram_to_json(fac: GramFactorization) -> Dict:
    return {"d": fac.d, "m": fac.m, "n": fac.n, "row_bound": fac.row_bound,
            "A": _block_table(fac.blocks, "x")}


def gram_from_json(doc: Any) -> GramFactorization:
    d = _int(_require(doc, "d", ""), "d", minimum=1)
    m = _int(_require(doc, "m", ""), "m")
    n = _int(_require(doc, "n", ""), "n", minimum=1)
    blocks = _decode_table(_require(doc, "A", ""), "A", "x", m, n, d)
    return GramFactorization(d=d, m=m, blocks=blocks, row_bound=float(_require(doc, "row_bound", "")))


def factorization_to_json(fac: TwoSidedFactorization) -> Dict:
    return {"d": fac.d, "m": fac.m, "n": fac.n, "symmetric": fac.symmetric,
            "row_bound": fac.row_bound, "col_bound": fac.col_bound,
            "cb_norm_upper": fac.row_bound * fac.col_bound,
            "A": _block_table(fac.a, "x"), "B": _block_table(fac.b, "y")}


def factorization_from_json(doc: Any) -> TwoSidedFactorization:
    d = _int(_require(doc, "d", ""), "d", minimum=1)
    m = _int(_require(doc, "m", ""), "m")
    n = _int(_require(doc, "n", ""), "n", minimum=1)
    return TwoSidedFactorization(d=d, m=m,
                                 a=_decode_table(_require(doc, "A", ""), "A", "x", m, n, d),
                                 b=_decode_table(_require(doc, "B", ""), "B", "y", m, n, d),
                                 row_bound=float(_require(doc, "row_bound", "")),
                                 col_bound=float(_require(doc, "col_bound", "")),
                                 symmetric=bool(doc.get("symmetric", False)))


def extension_report_to_json(report: ExtensionReport) -> Dict:
    return {"passed": report.passed, "restriction_ok": report.restriction_ok,
            "psd_ok": report.psd_ok, "min_eig": report.min_eig,
            "kernel_trials": report.kernel_trials, "kernel_failures": report.kernel_failures,
            "ampliation_failures": {str(m): count for m, count in sorted(report.ampliation_failures.items())},
            "failures": list(report.failures)}


def counterexample_to_json(record: CounterexampleRecord) -> Dict:
    return {"certified": record.certified,
            "edges": [{"x": x, "y": y, "min_eig": value}
                      for (x, y), value in sorted(record.edge_min_eigs.items())],
            "grid_step": record.grid_step, "grid_radius": record.grid_radius,
            "grid_max_min_eig": record.grid_max_min_eig, "grid_argmax": list(record.grid_argmax),
            "phases": record.phases, "phase_max_min_eig": record.phase_max_min_eig,
            "epsilon": record.epsilon}
