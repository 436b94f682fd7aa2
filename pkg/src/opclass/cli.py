"""Command line front end: ``opclass classify|hardy|gallery|converge``."""

from __future__ import annotations

import argparse
import logging
import os
import sys
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import reports
from .classify import (classify_block_positive, classify_buckholtz, classify_idempotent,
                       classify_positive)
from .config import ConfigError, JobConfig, load, validate
from .errors import OpClassError, UnrepresentableProduct
from .gallery import GalleryMismatch, gallery
from .hardy import (classify_symbol, dual_toeplitz_truncation, hankel_truncation,
                    toeplitz_truncation)
from .truncation import (ConvergenceRow, brute_force_extrema, convergence_table,
                         numeric_min_modulus, numeric_norm, rows_to_csv)

log = logging.getLogger("opclass")

EXIT_OK, EXIT_FAIL, EXIT_SCHEMA, EXIT_UNREPRESENTABLE, EXIT_OPERATOR = 0, 1, 2, 3, 4
VERB_KINDS = {
    "classify": ("classify-structured", "classify-block", "classify-idempotent"),
    "hardy": ("hardy",),
    "gallery": ("gallery",),
    "converge": ("converge",),
}


@dataclass
class Report:
    lines: list[str]
    rows: list[ConvergenceRow] = field(default_factory=list)
    status: int = EXIT_OK

    @property
    def text(self) -> str:
        return "\n".join(self.lines) + "\n"


def _oracle_lines(m: np.ndarray, seed: int) -> list[str]:
    k = min(m.shape[0], 4)
    sub = m[:k, :k]
    hi, lo = brute_force_extrema(sub, samples=20_000, seed=seed)
    return [f"oracle ({k}x{k} section, seed {seed}): sampled max {hi:.10f} vs {numeric_norm(sub):.10f}, "
            f"sampled min {lo:.10f} vs {numeric_min_modulus(sub):.10f}"]


def _classify(cfg: JobConfig) -> Report:
    lines = reports.header(cfg.kind, cfg.seed, cfg.ns)
    rows: list[ConvergenceRow] = []
    if cfg.kind == "classify-structured":
        op = cfg.operator()
        lines += [reports.describe(op), ""]
        lines += reports.verdict_lines(classify_positive(op))
        rows = convergence_table(op, cfg.ns)
        lines += ["", *_oracle_lines(op.matrix(min(4, cfg.ns[0])), cfg.seed)]
    elif cfg.kind == "classify-block":
        t = cfg.block()
        lines += [reports.describe(t), ""]
        lines += reports.verdict_lines(classify_block_positive(t))
        rows = convergence_table(t, cfg.ns)
    else:
        t = cfg.idempotent()
        lines += [f"idempotent [[I, X], [0, 0]], range {t.range_dim}, kernel complement {t.cokernel_dim}, "
                  f"X {t.x.kind}", ""]
        lines += reports.verdict_lines(classify_idempotent(t), "idempotent:")
        lines += [""] + reports.verdict_lines(classify_buckholtz(t), "Buckholtz operator T + T* - I:")
    if rows:
        lines += ["", "truncations:", *reports.table_lines(rows)]
    return Report(lines, rows)


def _hardy(cfg: JobConfig) -> Report:
    phi = cfg.symbol()
    n = cfg.ns[-1]
    r = classify_symbol(phi, min(n, 256))
    lines = reports.header(cfg.kind, cfg.seed, cfg.ns) + reports.symbol_lines(r)
    rows = []
    for k in cfg.ns:
        t = toeplitz_truncation(phi, k)
        rows.append(ConvergenceRow(k, numeric_norm(t), numeric_min_modulus(t), float("nan"), float("nan")))
    lines += ["", "Toeplitz sections:", *reports.table_lines(rows)]
    lines.append(f"Hankel section rank at n={n}: {np.linalg.matrix_rank(hankel_truncation(phi, n), tol=1e-8)}")
    s = dual_toeplitz_truncation(phi, min(n, 64))
    lines.append(f"dual Toeplitz section norm at n={min(n, 64)}: {numeric_norm(s):.12f}")
    return Report(lines, rows)


def _gallery(cfg: JobConfig) -> Report:
    lines = reports.header(cfg.kind, cfg.seed, cfg.ns)
    rows: list[ConvergenceRow] = []
    try:
        items = gallery(cfg.ns)
    except GalleryMismatch as e:
        return Report(lines + [f"GALLERY FAILURE: {e}"], status=EXIT_FAIL)
    for item in items:
        lines += [f"== {item.key}", item.title]
        for name, v in item.verdicts.items():
            lines += reports.verdict_lines(v, f"[{name}]")
        for label, value in item.probes.items():
            lines.append(f"probe {label}: {value:.3e}")
        for note in item.notes:
            lines.append(f"note: {note}")
        for name, tab in item.tables.items():
            lines += [f"truncations ({name}):", *reports.table_lines(tab)]
            rows.extend(tab)
        lines += ["expected verdicts reproduced", ""]
    return Report(lines, rows)


def _converge(cfg: JobConfig) -> Report:
    obj = cfg.operator() if "operator" in cfg.raw else cfg.block()
    rows = convergence_table(obj, cfg.ns)
    lines = reports.header(cfg.kind, cfg.seed, cfg.ns) + [reports.describe(obj), ""] + reports.table_lines(rows)
    return Report(lines, rows)


RUNNERS = {"classify-structured": _classify, "classify-block": _classify, "classify-idempotent": _classify,
           "hardy": _hardy, "gallery": _gallery, "converge": _converge}


def run(cfg: JobConfig) -> Report:
    """Execute one job; errors map to exit statuses instead of exceptions."""
    try:
        return RUNNERS[cfg.kind](cfg)
    except UnrepresentableProduct as e:
        return Report([f"error: {e}", "hint: the product leaves the structured family; "
                       "run a converge job for truncation evidence"], status=EXIT_UNREPRESENTABLE)
    except ConfigError as e:
        return Report([f"config error: {e}"], status=EXIT_SCHEMA)
    except OpClassError as e:
        return Report([f"error: {type(e).__name__}: {e}"], status=EXIT_OPERATOR)


def emit(report: Report, fmt: str, out: Path | None, stem: str) -> None:
    if out is None:
        if fmt in ("text", "both"):
            sys.stdout.write(report.text)
        if fmt in ("csv", "both") and report.rows:
            sys.stdout.write(rows_to_csv(report.rows))
        return
    out.mkdir(parents=True, exist_ok=True)
    if fmt in ("text", "both"):
        (out / f"{stem}.txt").write_text(report.text)
    if fmt in ("csv", "both"):
        (out / f"{stem}.csv").write_text(rows_to_csv(report.rows))


def _ns(text: str) -> list[int]:
    try:
        return [int(x) for x in text.split(",") if x.strip()]
    except ValueError as e:
        raise argparse.ArgumentTypeError(f"bad --ns value {text!r}") from e


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="opclass", description="Decide AN / AM / closure membership for structured operators.")
    sub = p.add_subparsers(dest="verb", required=True)
    for verb in VERB_KINDS:
        sp = sub.add_parser(verb)
        sp.add_argument("--config", type=Path, required=verb != "gallery", help="YAML or JSON job file")
        sp.add_argument("--out", type=Path, help="directory for report files (default: stdout)")
        sp.add_argument("--format", choices=("text", "csv", "both"), default="text")
        sp.add_argument("--ns", type=_ns, help="comma-separated truncation sizes")
        sp.add_argument("--seed", type=int, help="seed for sampled oracles")
    return p


def _setup_logging() -> None:
    level = os.environ.get("OPCLASS_LOG", "WARNING").upper()
    logging.basicConfig(level=getattr(logging, level, logging.WARNING), stream=sys.stderr,
                        format="%(levelname)s %(name)s: %(message)s")


def main(argv: list[str] | None = None) -> int:
    _setup_logging()
    args = build_parser().parse_args(argv)
    try:
        if args.config is not None:
            cfg = load(args.config)
        else:
            cfg = validate({"kind": "gallery", "ns": [8, 32, 128]})
        if cfg.kind not in VERB_KINDS[args.verb]:
            raise ConfigError(f"job kind {cfg.kind!r} does not belong to verb {args.verb!r}")
        if args.ns:
            cfg.ns = tuple(args.ns)
            if list(cfg.ns) != sorted(cfg.ns):
                raise ConfigError("--ns must be ascending")
        if args.seed is not None:
            cfg.seed = args.seed
    except (ConfigError, OSError) as e:
        print(f"config error: {e}", file=sys.stderr)
        return EXIT_SCHEMA
    log.info("running %s job", cfg.kind)
    report = run(cfg)
    if report.status != EXIT_OK:
        sys.stderr.write(report.text)
        return report.status
    emit(report, args.format, args.out, cfg.kind)
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
