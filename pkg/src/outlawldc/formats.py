"""JSON readers and writers for every on-disk object, plus report serialization.

Bitstrings use '1' for a -1 entry: character j of a codeword is coordinate j,
and character r of a decoder table key is the r-th queried coordinate.
"""

from __future__ import annotations

import csv
import dataclasses
import io
import json
from pathlib import Path

import numpy as np

from .codes import Branch, DecoderSpec, LocalCode
from .fourier import BooleanFunction, FourierSpectrum
from .geometry import HomogeneousPoly
from .jenga import Hypergraph, MatchingPartition
from .outlaw import OutlawDistribution


def _load(src) -> dict:
    if isinstance(src, dict):
        return src
    return json.loads(Path(src).read_text())


def to_jsonable(obj):
    """Recursively convert numpy values, dataclasses and tuples to plain JSON types."""
    if hasattr(obj, "to_dict"):
        return to_jsonable(obj.to_dict())
    if dataclasses.is_dataclass(obj) and not isinstance(obj, type):
        return to_jsonable(dataclasses.asdict(obj))
    if isinstance(obj, dict):
        return {str(k): to_jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple, set, frozenset)):
        items = sorted(obj) if isinstance(obj, (set, frozenset)) else obj
        return [to_jsonable(v) for v in items]
    if isinstance(obj, np.ndarray):
        return to_jsonable(obj.tolist())
    if isinstance(obj, np.bool_):
        return bool(obj)
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, np.floating):
        return float(obj)
    return obj


def dumps(report) -> str:
    return json.dumps(to_jsonable(report), sort_keys=True, indent=2) + "\n"


def _flatten(prefix: str, obj, rows: list) -> None:
    if isinstance(obj, dict):
        for k in sorted(obj):
            _flatten(f"{prefix}.{k}" if prefix else str(k), obj[k], rows)
    elif isinstance(obj, list):
        for i, v in enumerate(obj):
            _flatten(f"{prefix}[{i}]", v, rows)
    else:
        rows.append((prefix, obj if isinstance(obj, str) else json.dumps(obj)))


def to_csv(report) -> str:
    """Two-column key,value rendering with dotted keys."""
    rows: list = []
    _flatten("", to_jsonable(report), rows)
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["key", "value"])
    w.writerows(rows)
    return buf.getvalue()


# ---------------------------------------------------------------- Boolean functions


def load_function(src) -> BooleanFunction:
    d = _load(src)
    return BooleanFunction(int(d["n"]), np.array(d["values"], dtype=np.float64))


def function_to_dict(f: BooleanFunction) -> dict:
    return {"n": f.n, "values": f.values.tolist()}


def load_spectrum(src) -> FourierSpectrum:
    d = _load(src)
    return FourierSpectrum(int(d["n"]), np.array(d["coeffs"], dtype=np.float64))


def spectrum_to_dict(s: FourierSpectrum) -> dict:
    return {"n": s.n, "coeffs": s.coeffs.tolist()}


# ---------------------------------------------------------------- codes


def bits_to_word(bits: str) -> np.ndarray:
    if set(bits) - {"0", "1"}:
        raise ValueError(f"bitstring may only contain 0 and 1: {bits!r}")
    return np.array([-1 if b == "1" else 1 for b in bits], dtype=np.int8)


def word_to_bits(word) -> str:
    return "".join("1" if v < 0 else "0" for v in np.asarray(word))


def load_code(src) -> LocalCode:
    d = _load(src)
    words = np.array([bits_to_word(b) for b in d["codewords"]], dtype=np.int8)
    return LocalCode(int(d["k"]), int(d["n"]), words.reshape(-1, int(d["n"])))


def code_to_dict(code: LocalCode) -> dict:
    return {"k": code.k, "n": code.n, "codewords": [word_to_bits(w) for w in code.codewords]}


def _pattern(u: int, width: int) -> str:
    return "".join("1" if u >> r & 1 else "0" for r in range(width))


def load_decoders(src) -> DecoderSpec:
    d = _load(src)
    decs = []
    for branches in d["decoders"]:
        out = []
        for b in branches:
            queries = tuple(int(j) for j in b["queries"])
            table = np.zeros(1 << len(queries))
            given = b["table"]
            if len(given) != len(table):
                raise ValueError(f"table needs {len(table)} patterns, got {len(given)}")
            for key, val in given.items():
                if len(key) != len(queries) or set(key) - {"0", "1"}:
                    raise ValueError(f"bad pattern {key!r}")
                table[sum(1 << r for r, ch in enumerate(key) if ch == "1")] = float(val)
            out.append(Branch(float(b["p"]), queries, table))
        decs.append(tuple(out))
    return DecoderSpec(int(d["q"]), tuple(decs))


def decoders_to_dict(dec: DecoderSpec) -> dict:
    return {
        "q": dec.q,
        "decoders": [
            [
                {
                    "p": float(b.p),
                    "queries": list(b.queries),
                    "table": {_pattern(u, len(b.queries)): float(b.table[u]) for u in range(len(b.table))},
                }
                for b in branches
            ]
            for branches in dec.decoders
        ],
    }


# ---------------------------------------------------------------- distributions


def load_distribution(src) -> OutlawDistribution:
    d = _load(src)
    support = d["support"]
    return OutlawDistribution(
        int(d["n"]),
        np.array([s["w"] for s in support], dtype=np.float64),
        np.array([s["values"] for s in support], dtype=np.float64),
    )


def distribution_to_dict(mu: OutlawDistribution) -> dict:
    return {"n": mu.n, "support": [{"w": float(w), "values": row.tolist()} for w, row in zip(mu.weights, mu.table)]}


# ---------------------------------------------------------------- geometry


def load_point_set(src) -> tuple[int, int, list[list[int]]]:
    d = _load(src)
    return int(d["p"]), int(d["n"]), [[int(v) for v in pt] for pt in d["points"]]


def point_set_to_dict(p: int, n: int, points) -> dict:
    from .geometry import all_points

    coords = all_points(p, n)
    return {"p": p, "n": n, "points": [coords[int(i)].tolist() for i in points]}


def load_polynomial(src) -> HomogeneousPoly:
    d = _load(src)
    monos = d["monomials"]
    return HomogeneousPoly(int(d["p"]), int(d["n"]), int(d["d"]),
                           tuple(tuple(m["exps"]) for m in monos), tuple(int(m["c"]) for m in monos))


# ---------------------------------------------------------------- hypergraphs


def load_partition(src) -> MatchingPartition:
    d = _load(src)
    h = Hypergraph(int(d["v"]), int(d["t"]), tuple(tuple(e) for e in d["edges"]))
    return MatchingPartition(h, tuple(tuple(m) for m in d["matchings"]))
