"""Command-line experiment runner.

Subcommands::

    cverasure deterministic   fidelities of the feedforward decoder per erasure location
    cverasure filter          postselection sweep over erasure probability and squeezing
    cverasure verify          run the self-check groups
    cverasure plot            two-panel SVG from a ``filter`` CSV

Exit codes: 0 success, 1 verification failure, 2 invalid input.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field, fields
from pathlib import Path

import numpy as np

from . import codec
from .channel import ErasurePattern, erase_modes
from .gaussian import coherent, db_to_r, overlap_fidelity, vacuum
from .postselect import (
    DEFAULT_ORDER,
    ThresholdWindow,
    direct_channel_fidelity,
    filter_analytic,
    filter_monte_carlo,
)

FILTER_COLUMNS = [
    "pe", "squeeze_db", "x_th", "p_th", "eta_hd", "n_e", "engine",
    "fidelity_out1", "fidelity_out1_se", "success_prob", "success_prob_se", "direct_fidelity",
]
DETERMINISTIC_COLUMNS = ["squeeze_db", "erased", "fidelity_out1", "fidelity_out2", "reference_fidelity"]


class SpecError(ValueError):
    pass


def fmt(v) -> str:
    if isinstance(v, str):
        return v
    return format(float(v), ".9g")


@dataclass
class SweepSpec:
    alpha_re: float = 2 * math.sqrt(2)
    alpha_im: float = 2 * math.sqrt(2)
    squeeze_db_list: list = field(default_factory=lambda: [0.0, 3.0, 6.0])
    pe_grid: list = field(default_factory=lambda: [round(0.025 * k, 10) for k in range(21)])
    window_mode: str = "auto"
    eta_hd: float = 0.9
    n_e: float = 0.0
    engine: str = "analytic"
    mc_samples: int = 100000
    seed: int = 12345
    quadrature_order: int = DEFAULT_ORDER
    output_path: str = "-"

    def validate(self):
        if not self.pe_grid or any(not 0.0 <= p <= 1.0 for p in self.pe_grid):
            raise SpecError("pe_grid must be a non-empty subset of [0, 1]")
        if not self.squeeze_db_list or any(db < 0 for db in self.squeeze_db_list):
            raise SpecError("squeeze dB values must be non-negative")
        if self.engine not in ("analytic", "mc", "both"):
            raise SpecError(f"unknown engine {self.engine!r}")
        if self.engine != "analytic" and self.mc_samples < 1:
            raise SpecError("mc_samples must be at least 1")
        if not 0.0 < self.eta_hd <= 1.0 or self.n_e < 0:
            raise SpecError("need 0 < eta_hd <= 1 and n_e >= 0")
        self.window(0.0)
        return self

    def window(self, r: float) -> ThresholdWindow:
        if self.window_mode == "auto":
            return ThresholdWindow.auto(r)
        try:
            x, p = (float(v) for v in self.window_mode.split(","))
            return ThresholdWindow(x, p)
        except ValueError as exc:
            raise SpecError(f"window must be 'auto' or 'x_th,p_th', got {self.window_mode!r}") from exc


def parse_grid(text: str) -> list:
    """``"0,0.1,0.2"`` or an inclusive range ``"start:stop:step"``."""
    text = text.strip()
    try:
        if ":" in text:
            start, stop, step = (float(v) for v in text.split(":"))
            if step <= 0:
                raise SpecError("range step must be positive")
            n = int(math.floor((stop - start) / step + 1e-9))
            return [round(start + k * step, 10) for k in range(n + 1)]
        return [float(v) for v in text.replace(" ", ",").split(",") if v]
    except ValueError as exc:
        raise SpecError(f"cannot parse grid {text!r}") from exc


def read_config(path) -> dict:
    """``key = value`` lines; ``#`` starts a comment."""
    out = {}
    for lineno, raw in enumerate(Path(path).read_text().splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise SpecError(f"{path}:{lineno}: expected key = value")
        key, value = (s.strip() for s in line.split("=", 1))
        out[key.replace("-", "_")] = value
    return out


def _coerce(name: str, value):
    if name in ("squeeze_db_list", "pe_grid"):
        return parse_grid(value) if isinstance(value, str) else [float(v) for v in value]
    if name in ("mc_samples", "seed", "quadrature_order"):
        return int(value)
    if name in ("alpha_re", "alpha_im", "eta_hd", "n_e"):
        return float(value)
    return str(value)


def resolve_spec(args) -> SweepSpec:
    values = {}
    if args.config:
        values.update(read_config(args.config))
    for f in fields(SweepSpec):
        v = getattr(args, f.name, None)
        if v is not None:
            values[f.name] = v
    known = {f.name for f in fields(SweepSpec)}
    unknown = set(values) - known
    if unknown:
        raise SpecError(f"unknown config keys: {', '.join(sorted(unknown))}")
    try:
        spec = SweepSpec(**{k: _coerce(k, v) for k, v in values.items()})
    except ValueError as exc:
        raise SpecError(str(exc)) from exc
    return spec.validate()


def filter_row(spec: SweepSpec, i_pe: int, i_db: int, engine: str) -> list:
    pe, db = spec.pe_grid[i_pe], spec.squeeze_db_list[i_db]
    r = db_to_r(db)
    in1 = coherent(spec.alpha_re, spec.alpha_im)
    cfg = codec.CodecConfig(r, spec.eta_hd, spec.n_e)
    window = spec.window(r)
    if engine == "analytic":
        res = filter_analytic(in1, vacuum(1), pe, cfg, window, spec.quadrature_order)
    else:
        rng = np.random.default_rng([spec.seed, i_pe, i_db])
        res = filter_monte_carlo(in1, vacuum(1), pe, cfg, window, spec.mc_samples, rng)
    return [
        pe, db, window.x_th, window.p_th, spec.eta_hd, spec.n_e, engine,
        res.fidelity_out1, res.fidelity_out1_se, res.success_prob, res.success_prob_se,
        direct_channel_fidelity(in1, pe),
    ]


def _filter_row_star(job):
    return filter_row(*job)


def run_filter(spec: SweepSpec, jobs: int = 1) -> str:
    engines = ["analytic", "mc"] if spec.engine == "both" else [spec.engine]
    tasks = [
        (spec, i, j, e)
        for i in range(len(spec.pe_grid))
        for j in range(len(spec.squeeze_db_list))
        for e in engines
    ]
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            rows = list(pool.map(_filter_row_star, tasks, chunksize=4))
    else:
        rows = [filter_row(*t) for t in tasks]
    buf = io.StringIO()
    buf.write("# spec: " + json.dumps(asdict(spec), sort_keys=True) + "\n")
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(FILTER_COLUMNS)
    for row in rows:
        w.writerow([fmt(v) for v in row])
    return buf.getvalue()


def run_deterministic(db_list, alpha_re, alpha_im, erased_list, eta_hd=1.0, n_e=0.0, symmetrize=False) -> str:
    in1 = coherent(alpha_re, alpha_im)
    in2 = vacuum(1)
    buf = io.StringIO()
    spec = dict(squeeze_db_list=list(db_list), alpha_re=alpha_re, alpha_im=alpha_im,
                erased=list(erased_list), eta_hd=eta_hd, n_e=n_e, symmetrize=symmetrize)
    buf.write("# spec: " + json.dumps(spec, sort_keys=True) + "\n")
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(DETERMINISTIC_COLUMNS)
    for db in db_list:
        r = db_to_r(db)
        cfg = codec.CodecConfig(r, eta_hd, n_e, symmetrize)
        encoded = codec.encode(in1, in2, r, symmetrize)
        for label in erased_list:
            lab = codec._label(label)
            received = encoded if lab is None else erase_modes(encoded, ErasurePattern.of(lab))
            o1, o2 = codec.decode_deterministic(received, lab, cfg)
            w.writerow([
                fmt(db), lab or "none",
                fmt(overlap_fidelity(in1, o1)), fmt(overlap_fidelity(in2, o2)),
                fmt(1.0 / (1.0 + math.exp(-2 * r))),
            ])
    return buf.getvalue()


def _emit(text: str, out: str):
    if out in (None, "-"):
        sys.stdout.write(text)
    else:
        Path(out).write_text(text)


def cmd_deterministic(args) -> int:
    db_list = parse_grid(args.db)
    erased = [s for s in args.erased.split(",") if s]
    for lab in erased:
        try:
            codec._label(lab)
        except ValueError as exc:
            raise SpecError(str(exc)) from exc
    if not db_list or any(db < 0 for db in db_list):
        raise SpecError("squeeze dB values must be non-negative")
    text = run_deterministic(db_list, args.alpha_re, args.alpha_im, erased, args.eta_hd, args.n_e, args.symmetrize)
    _emit(text, args.out)
    return 0


def cmd_filter(args) -> int:
    spec = resolve_spec(args)
    _emit(run_filter(spec, args.jobs), spec.output_path)
    return 0


def cmd_verify(args) -> int:
    from .verify import run_all

    results = run_all(args.group or None)
    for name, ok, detail in results:
        print(f"{'PASS' if ok else 'FAIL'}  {name:<17} {detail}")
    return 0 if all(ok for _, ok, _ in results) else 1


def cmd_plot(args) -> int:
    from .plotting import PlotError, plot_csv

    try:
        plot_csv(args.csv, args.out)
    except PlotError as exc:
        raise SpecError(str(exc)) from exc
    return 0


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="cverasure", description=__doc__.split("\n\n")[0])
    sub = p.add_subparsers(dest="command", required=True)

    d = sub.add_parser("deterministic", help="feedforward decoder fidelities")
    d.add_argument("--db", default="0,3,6", help="squeezing in dB, list or range")
    d.add_argument("--alpha-re", type=float, default=2 * math.sqrt(2))
    d.add_argument("--alpha-im", type=float, default=2 * math.sqrt(2))
    d.add_argument("--erased", default="none,A,B,C,D", help="comma-separated erasure locations")
    d.add_argument("--eta-hd", type=float, default=1.0)
    d.add_argument("--n-e", type=float, default=0.0)
    d.add_argument("--symmetrize", action="store_true")
    d.add_argument("--out", default="-")
    d.set_defaults(func=cmd_deterministic)

    f = sub.add_parser("filter", help="postselection sweep")
    f.add_argument("--config", help="key = value file; flags override it")
    f.add_argument("--alpha-re", type=float)
    f.add_argument("--alpha-im", type=float)
    f.add_argument("--db", dest="squeeze_db_list", help="dB list '0,3,6' or range 'a:b:step'")
    f.add_argument("--pe", dest="pe_grid", help="erasure probabilities, list or range")
    f.add_argument("--window", dest="window_mode", help="'auto' (exp(-r)) or 'x_th,p_th'")
    f.add_argument("--eta-hd", type=float)
    f.add_argument("--n-e", type=float)
    f.add_argument("--engine", choices=["analytic", "mc", "both"])
    f.add_argument("--mc-samples", type=int)
    f.add_argument("--seed", type=int)
    f.add_argument("--order", dest="quadrature_order", type=int)
    f.add_argument("--jobs", type=int, default=1)
    f.add_argument("--out", dest="output_path")
    f.set_defaults(func=cmd_filter)

    v = sub.add_parser("verify", help="run self-checks")
    v.add_argument("--group", action="append", help="run only this group (repeatable)")
    v.set_defaults(func=cmd_verify)

    pl = sub.add_parser("plot", help="SVG from a filter CSV")
    pl.add_argument("csv")
    pl.add_argument("--out", required=True)
    pl.set_defaults(func=cmd_plot)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except SpecError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
