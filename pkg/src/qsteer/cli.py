"""Command-line interface: ``qsteer {quantify,channel,swap,sweep,figure}``."""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .channels import apply_channel, two_qubit_channel
from .errors import DomainError, QsteerError
from .quantifiers import quantify
from .states import DensityOperator, make_almeida
from .sweeps import figure_data, load_config, run_sweep
from .swapping import swap


def _fmt(x: float) -> str:
    return format(float(x), ".12g")


def _read_state(path: str) -> DensityOperator:
    p = Path(path)
    if p.suffix == ".npy":
        return DensityOperator(np.load(p))
    with open(p, encoding="utf-8") as fh:
        data = json.load(fh)
    if isinstance(data, dict):
        m = np.asarray(data["real"], dtype=float) + 1j * np.asarray(data.get("imag", 0.0), dtype=float)
    else:
        arr = np.asarray(data, dtype=float)
        m = arr[..., 0] + 1j * arr[..., 1] if arr.ndim == 3 else arr
    return DensityOperator(m)


def _source_state(args, k_attr="k", theta_attr="theta", state_attr="state") -> DensityOperator:
    path = getattr(args, state_attr, None)
    if path:
        return _read_state(path)
    k, theta = getattr(args, k_attr), getattr(args, theta_attr)
    if k is None or theta is None:
        raise DomainError("give either a state file or both k and theta")
    return make_almeida(k, theta)


def _state_json(rho: DensityOperator) -> dict:
    return {"real": rho.matrix.real.tolist(), "imag": rho.matrix.imag.tolist()}


def _emit(args, record: dict, state: DensityOperator | None = None) -> str:
    if args.format == "json":
        doc = dict(record)
        if state is not None:
            doc["state"] = _state_json(state)
        return json.dumps(doc, indent=2) + "\n"
    if args.format == "csv":
        return ",".join(record) + "\n" + ",".join(_fmt(v) for v in record.values()) + "\n"
    lines = []
    if state is not None:
        lines.append("state:")
        for row in state.matrix:
            lines.append("  " + "  ".join(f"{z.real:+.6f}{z.imag:+.6f}j" for z in row))
    width = max(len(k) for k in record)
    lines += [f"{k:<{width}}  {_fmt(v)}" for k, v in record.items()]
    return "\n".join(lines) + "\n"


def _write(text: str, out: str | None) -> None:
    if out:
        with open(out, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def cmd_quantify(args) -> None:
    rho = _source_state(args)
    _write(_emit(args, quantify(rho)), args.out)


def cmd_channel(args) -> None:
    rho = _source_state(args)
    out = apply_channel(rho, two_qubit_channel(args.channel, args.p, args.gamma))
    _write(_emit(args, quantify(out), out), args.out)


def cmd_swap(args) -> None:
    rho12 = _source_state(args)
    if args.state2 or args.k2 is not None or args.theta2 is not None:
        k2 = args.k if args.k2 is None else args.k2
        theta2 = args.theta if args.theta2 is None else args.theta2
        ns = argparse.Namespace(k=k2, theta=theta2, state=args.state2)
        rho34 = _source_state(ns)
    else:
        rho34 = rho12
    res = swap(rho12, rho34, args.bell)
    record = {"bell": int(res.bell_index), "probability": res.probability, **quantify(res.state)}
    _write(_emit(args, record, res.state if args.format != "csv" else None), args.out)


def cmd_sweep(args) -> None:
    cfg = load_config(args.config)
    res = run_sweep(cfg, workers=args.workers)
    fmt = args.format or cfg.format
    out = args.out or cfg.output
    _write(res.dumps(fmt), out)


def cmd_figure(args) -> None:
    res = figure_data(args.figure, grid=args.grid, workers=args.workers)
    _write(res.dumps(args.format or "csv"), args.out)


def _add_source(p: argparse.ArgumentParser) -> None:
    p.add_argument("--k", type=float, help="Almeida mixture weight in [0, 1]")
    p.add_argument("--theta", type=float, help="Almeida angle in radians, [0, pi/4]")
    p.add_argument("--state", metavar="PATH", help="two-qubit density matrix (.npy or JSON)")


def _add_output(p: argparse.ArgumentParser, formats, default) -> None:
    p.add_argument("--out", metavar="PATH", help="write here instead of stdout")
    p.add_argument("--format", choices=formats, default=default)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="qsteer",
        description="EPR steering (F3), concurrence and interferometric power of two-qubit states.",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("quantify", help="print the three quantifiers of a state")
    _add_source(p)
    _add_output(p, ("text", "csv", "json"), "text")
    p.set_defaults(func=cmd_quantify)

    p = sub.add_parser("channel", help="apply a noisy channel, print state and quantifiers")
    _add_source(p)
    p.add_argument("--channel", choices=("pd", "gad", "sdc"), required=True)
    p.add_argument("--p", type=float, required=True, help="noise strength in [0, 1]")
    p.add_argument("--gamma", type=float, help="GAD loss probability in [0, 1]")
    _add_output(p, ("text", "csv", "json"), "text")
    p.set_defaults(func=cmd_channel)

    p = sub.add_parser("swap", help="entanglement swapping with a Bell outcome")
    _add_source(p)
    p.add_argument("--k2", type=float, help="second source k (default: same as --k)")
    p.add_argument("--theta2", type=float, help="second source theta (default: same as --theta)")
    p.add_argument("--state2", metavar="PATH", help="second source density matrix")
    p.add_argument("--bell", type=int, choices=(1, 2, 3, 4), required=True)
    _add_output(p, ("text", "csv", "json"), "text")
    p.set_defaults(func=cmd_swap)

    p = sub.add_parser("sweep", help="run a sweep config file")
    p.add_argument("config", help="JSON sweep configuration")
    p.add_argument("--workers", type=int, help="process count (default: the config's own setting)")
    _add_output(p, ("csv", "json"), None)
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("figure", help="run a figure preset (1-12, or B1-B3)")
    p.add_argument("figure")
    p.add_argument("--grid", type=int, help="points per axis (default 101; 201 theta points for 8 and 9)")
    p.add_argument("--workers", type=int, default=1)
    _add_output(p, ("csv", "json"), "csv")
    p.set_defaults(func=cmd_figure)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        args.func(args)
    except QsteerError as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 1
    except (OSError, json.JSONDecodeError, KeyError) as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
