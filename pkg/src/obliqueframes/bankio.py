"""Deterministic JSON serialization for mask banks and reports."""
from __future__ import annotations

import json
import math
from fractions import Fraction
from pathlib import Path

import numpy as np

from .boxframe import VmrFunction
from .lattice import DilationScheme, build_scheme
from .oepkit import MaskBank
from .trigring import RationalTrigPoly, TrigPoly

FORMAT_TAG = "obliqueframes.maskbank/1"


def _plain(obj):
    """Convert report values to JSON-representable Python objects."""
    if isinstance(obj, dict):
        return {str(k): _plain(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_plain(v) for v in obj]
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, Fraction):
        return str(obj) if obj.denominator != 1 else int(obj)
    if isinstance(obj, (float, np.floating)):
        return float(obj)
    if isinstance(obj, (complex, np.complexfloating)):
        return {"re": float(obj.real), "im": float(obj.imag)}
    if obj is None or isinstance(obj, str):
        return obj
    if hasattr(obj, "as_dict"):
        return _plain(obj.as_dict())
    return str(obj)


def _emit(obj, out: list) -> None:
    if isinstance(obj, dict):
        out.append("{")
        for i, (k, v) in enumerate(obj.items()):
            if i:
                out.append(",")
            out.append(json.dumps(k))
            out.append(":")
            _emit(v, out)
        out.append("}")
    elif isinstance(obj, list):
        out.append("[")
        for i, v in enumerate(obj):
            if i:
                out.append(",")
            _emit(v, out)
        out.append("]")
    elif isinstance(obj, bool) or obj is None:
        out.append(json.dumps(obj))
    elif isinstance(obj, int):
        out.append(str(obj))
    elif isinstance(obj, float):
        if math.isfinite(obj):
            out.append(format(obj, ".17g"))
        else:
            # JSON has no infinity; orders of identically zero functions use this
            out.append(json.dumps("inf" if obj > 0 else ("-inf" if obj < 0 else "nan")))
    else:
        out.append(json.dumps(obj))


def dumps(obj) -> str:
    """Deterministic JSON text: insertion-ordered keys, floats at 17 significant digits."""
    out: list = []
    _emit(_plain(obj), out)
    return "".join(out) + "\n"


def bank_to_json(bank: MaskBank) -> dict:
    return {
        "format": FORMAT_TAG,
        "scheme": bank.scheme.to_json(),
        "lowpass": RationalTrigPoly.lift(bank.lowpass).to_json()
        if isinstance(bank.lowpass, RationalTrigPoly) else bank.lowpass.to_json(),
        "vmr": bank.vmr.to_json(),
        "highpass": [{"tag": t, "mask": q.to_json()} for t, q in zip(bank.provenance, bank.highpass)],
        "counts": {"J": bank.J, "K": bank.K, "M": bank.M_count, "r": bank.r},
        "meta": bank.meta,
        "report": bank.report,
    }


def bank_from_json(obj: dict) -> MaskBank:
    if obj.get("format") != FORMAT_TAG:
        raise ValueError(f"not a mask bank document (format {obj.get('format')!r})")
    scheme: DilationScheme = build_scheme(obj["scheme"]["M"])
    low = obj["lowpass"]
    lowpass = RationalTrigPoly.from_json(low) if "num" in low else TrigPoly.from_json(low)
    counts = obj.get("counts", {})
    return MaskBank(scheme, lowpass, VmrFunction.from_json(obj["vmr"]),
                    [RationalTrigPoly.from_json(h["mask"]) for h in obj["highpass"]],
                    [h["tag"] for h in obj["highpass"]],
                    J=counts.get("J", 0), K=counts.get("K", 1),
                    report=dict(obj.get("report", {})), meta=dict(obj.get("meta", {})))


def sampled_responses(bank: MaskBank, grid: int) -> dict:
    """Row-major samples of every mask at ``2*pi*j/grid``."""
    def sample(f):
        v = RationalTrigPoly.lift(f).eval_grid(grid).ravel()
        return {"re": v.real.tolist(), "im": v.imag.tolist()}

    return {"grid": grid, "order": "row-major",
            "lowpass": sample(bank.lowpass),
            "highpass": [sample(q) for q in bank.highpass]}


def save_json(obj, path: str | Path) -> None:
    Path(path).write_text(dumps(obj))


def load_json(path: str | Path):
    return json.loads(Path(path).read_text())
