"""Command line: build, verify and export mask banks, and run the named demos."""
from __future__ import annotations

import argparse
import logging
import sys
from dataclasses import dataclass
from pathlib import Path

from .bankio import bank_from_json, bank_to_json, dumps, load_json, sampled_responses
from .oepkit import OEP_TOL, default_grid
from .pipeline import DEMOS, BuildConfig, build_bank, first_failure, run_demo, verify_bank

log = logging.getLogger("obliqueframes")
COMMANDS = ("build", "verify", "export", "demo")


@dataclass(frozen=True)
class RunConfig:
    command: str
    spec: Path | None = None
    demo: str | None = None
    ell: int | None = None
    grid: int | None = None
    tol: float = OEP_TOL
    out: Path | None = None

    def __post_init__(self):
        if self.command not in COMMANDS:
            raise ValueError(f"unknown command {self.command!r}")
        if not self.tol > 0:
            raise ValueError("tolerance must be positive")
        if self.grid is not None and self.grid < 8:
            raise ValueError("grid must be at least 8")
        if self.command == "demo" and self.demo not in DEMOS:
            raise ValueError(f"demo must be one of {', '.join(DEMOS)}")
        if self.command != "demo" and self.spec is None:
            raise ValueError(f"{self.command} needs --spec")


def _emit(obj, out: Path | None) -> None:
    text = dumps(obj)
    if out is None:
        sys.stdout.write(text)
    else:
        out.write_text(text)
        log.info("wrote %s", out)


def _load_bank_or_build(cfg: RunConfig):
    obj = load_json(cfg.spec)
    if "highpass" in obj:
        return bank_from_json(obj)
    build = BuildConfig.from_json(obj)
    if cfg.ell is not None:
        build = BuildConfig(build.spec, cfg.ell, build.dilation)
    bank, _ = build_bank(build, cfg.grid, cfg.tol)
    return bank


def _print_table(summary: dict) -> None:
    keys = ("demo", "r", "rBound", "minMaskOrder", "oepResidual", "minF", "fOrder", "seconds")
    rows = [(k, summary[k]) for k in keys if k in summary]
    rows += [(f"check:{c['name']}", ("PASS" if c["passed"] else "FAIL") + f"  {c['value']}")
             for c in summary["checks"]]
    width = max(len(k) for k, _ in rows)
    for k, v in rows:
        print(f"{k:<{width}}  {v}")
    for note in summary["notes"]:
        print(f"note: {note}")


def run(cfg: RunConfig) -> int:
    """Execute one command; returns the process exit status."""
    if cfg.command == "demo":
        summary = run_demo(cfg.demo, cfg.grid, cfg.tol)
        _print_table(summary)
        if cfg.out is not None:
            _emit(summary, cfg.out)
        if not summary["passed"]:
            failed = next(c["name"] for c in summary["checks"] if not c["passed"])
            print(f"FAILED: {failed}", file=sys.stderr)
            return 1
        return 0

    if cfg.command == "build":
        build = BuildConfig.from_json(load_json(cfg.spec))
        if cfg.ell is not None:
            build = BuildConfig(build.spec, cfg.ell, build.dilation)
        bank, _ = build_bank(build, cfg.grid, cfg.tol)
        _emit(bank_to_json(bank), cfg.out)
        return 0

    bank = _load_bank_or_build(cfg)
    if cfg.command == "verify":
        checks = verify_bank(bank, cfg.grid, cfg.tol)
        report = {"r": bank.r, "checks": [c.as_dict() for c in checks],
                  "passed": all(c.passed for c in checks)}
        _emit(report, cfg.out)
        failed = first_failure(checks)
        if failed:
            print(f"FAILED: {failed}", file=sys.stderr)
            return 1
        return 0

    # export
    doc = bank_to_json(bank)
    doc["responses"] = sampled_responses(bank, cfg.grid or default_grid(bank.scheme))
    _emit(doc, cfg.out)
    return 0


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="obliqueframes",
                                description="Tight wavelet frame filter banks from box-spline masks.")
    p.add_argument("command", choices=COMMANDS)
    p.add_argument("name", nargs="?", help="demo name (same as --demo)")
    p.add_argument("--spec", type=Path, help="box-spline spec JSON, or a mask bank JSON for verify/export")
    p.add_argument("--demo", choices=DEMOS)
    p.add_argument("--ell", type=int)
    p.add_argument("--grid", type=int)
    p.add_argument("--tol", type=float, default=OEP_TOL)
    p.add_argument("--out", type=Path)
    p.add_argument("-v", "--verbose", action="store_true")
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(message)s")
    try:
        cfg = RunConfig(command=args.command, spec=args.spec, demo=args.demo or args.name,
                        ell=args.ell, grid=args.grid, tol=args.tol, out=args.out)
        return run(cfg)
    except (ValueError, ArithmeticError, KeyError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
