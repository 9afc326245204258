"""Single-level periodic filter bank realized on the DFT grid."""
from __future__ import annotations

import csv
import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .lattice import roll_to
from .oepkit import MaskBank
from .specfactor import POLE_GUARD
from .trigring import RationalTrigPoly, tp_dilate

PR_TOL = 1e-9


@dataclass
class PeriodicSignal:
    """Samples on ``Z_{N_1} x ... x Z_{N_n}``."""
    samples: np.ndarray

    def __post_init__(self):
        self.samples = np.asarray(self.samples, dtype=complex)
        if not np.all(np.isfinite(self.samples)):
            raise ValueError("signal contains non-finite samples")

    @property
    def dims(self) -> tuple:
        return self.samples.shape

    def spectrum(self) -> np.ndarray:
        return np.fft.fftn(self.samples)

    def energy(self) -> float:
        return float(np.sum(np.abs(self.samples) ** 2))


@dataclass
class Channels:
    """Analysis output.  Every channel is stored by its spectrum on the full input grid.

    Those spectra are Gamma*-periodic, i.e. they are functions of ``M^T w``.
    """
    coarse: np.ndarray
    details: list
    dims: tuple
    source_spectrum: np.ndarray | None = None
    meta: dict = field(default_factory=dict)

    def energies(self) -> list[float]:
        n = float(np.prod(self.dims))
        return [float(np.sum(np.abs(c) ** 2) / n) for c in [self.coarse, *self.details]]


def _check_dims(bank: MaskBank, dims: tuple) -> list:
    if len(dims) != bank.dim:
        raise ValueError(f"signal has {len(dims)} axes but the bank is {bank.dim}-dimensional")
    try:
        return bank.scheme.grid_shift(dims)
    except ValueError as exc:
        raise ValueError(f"grid {dims} is incompatible with dilation {bank.scheme.M}") from exc


def _eval_masks(bank: MaskBank, dims: tuple):
    def values(f):
        f = RationalTrigPoly.lift(f)
        den = f.den.eval_grid(dims)
        if np.min(np.abs(den)) < POLE_GUARD:
            raise ZeroDivisionError("a mask has a pole on the signal grid")
        return f.num.eval_grid(dims) / den

    return values(bank.lowpass), [values(q) for q in bank.highpass]


def analyze(x: PeriodicSignal, bank: MaskBank) -> Channels:
    """``c^(M^T w) = sum_gamma conj(tau(w+gamma)) x^(w+gamma)`` and likewise for every highpass mask."""
    dims = x.dims
    shifts = _check_dims(bank, dims)
    X = x.spectrum()
    tau, qs = _eval_masks(bank, dims)

    def channel(h):
        prod = np.conj(h) * X
        return sum(roll_to(prod, s) for s in shifts)

    return Channels(coarse=channel(tau), details=[channel(q) for q in qs], dims=dims,
                    source_spectrum=X)


@dataclass(frozen=True)
class SynthesisReport:
    pr_residual: float

    @property
    def passed(self) -> bool:
        return self.pr_residual <= PR_TOL


def synthesize(channels: Channels, bank: MaskBank) -> tuple[PeriodicSignal, SynthesisReport | None]:
    """``r^(w) = S(M^T w) tau(w) c^(M^T w) + sum_l q_l(w) d_l^(M^T w)``; compared against ``S x^``."""
    dims = channels.dims
    _check_dims(bank, dims)
    if len(channels.details) != bank.r:
        raise ValueError(f"{len(channels.details)} detail channels for a bank with {bank.r} masks")
    tau, qs = _eval_masks(bank, dims)
    recip = bank.vmr.reciprocal.eval_grid(dims)
    drecip = tp_dilate(bank.vmr.reciprocal, bank.scheme.M).eval_grid(dims)
    R = tau * channels.coarse / drecip
    for q, d in zip(qs, channels.details):
        R = R + q * d
    out = PeriodicSignal(np.fft.ifftn(R))
    report = None
    if channels.source_spectrum is not None:
        target = channels.source_spectrum / recip
        scale = float(np.max(np.abs(channels.source_spectrum)))
        res = float(np.max(np.abs(R - target))) / scale if scale > 0 else float(np.max(np.abs(R)))
        report = SynthesisReport(pr_residual=res)
    return out, report


def energy_identity_residual(x: PeriodicSignal, channels: Channels, Q: int) -> float:
    """``|sum of channel energies - Q ||x||^2|`` relative to ``||x||^2`` (meaningful when ``S = 1``)."""
    e = x.energy()
    return abs(sum(channels.energies()) - Q * e) / max(e, 1e-300)


def read_signal(path: str | Path) -> PeriodicSignal:
    """Load a signal from JSON (nested arrays, or ``{"re": ..., "im": ...}``) or row-major CSV."""
    path = Path(path)
    if path.suffix.lower() == ".json":
        obj = json.loads(path.read_text())
        if isinstance(obj, dict):
            return PeriodicSignal(np.asarray(obj["re"], float) + 1j * np.asarray(obj.get("im", 0.0), float))
        return PeriodicSignal(np.asarray(obj, dtype=float))
    with path.open(newline="") as fh:
        rows = [[float(v) for v in row] for row in csv.reader(fh) if row]
    arr = np.asarray(rows, dtype=float)
    return PeriodicSignal(arr[:, 0] if arr.shape[1] == 1 else arr)


def write_signal(x: PeriodicSignal, path: str | Path) -> None:
    path = Path(path)
    s = x.samples
    if path.suffix.lower() == ".json":
        obj = {"re": s.real.tolist()}
        if np.any(s.imag):
            obj["im"] = s.imag.tolist()
        path.write_text(json.dumps(obj))
        return
    if s.ndim > 2 or np.any(s.imag):
        raise ValueError("CSV output supports real 1-D or 2-D signals only")
    rows = s.real.reshape(len(s), -1)
    with path.open("w", newline="") as fh:
        csv.writer(fh).writerows([[repr(float(v)) for v in r] for r in rows])
