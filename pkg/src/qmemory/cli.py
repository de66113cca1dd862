"""Command-line front end: deterministic CSV curves, reports, and validation.

Subcommands
-----------
``trace-distance``  distance and its rate on a uniform time grid (CSV).
``sweep``           distance curves across a parameter family, with a
                    memory-classification flag per family member (CSV).
``blp``             one-line memory-measure report, optional interval CSV.
``entanglement``    entanglement curve, either overlaid with the distance or
                    as a decay-rate family (CSV).
``validate``        run every internal cross-check; exit 0 only if all pass.

All numeric CSV cells use 9-significant-digit scientific notation and ``\\n``
line endings, so identical invocations are byte-identical.  ``#`` metadata
lines (tool version, resolved parameters) precede the header row.

Exit codes: 0 success, 1 invalid arguments, 2 validation failure, 3 I/O error.
"""
from __future__ import annotations

import argparse
import math
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, replace

import numpy as np

from . import __version__
from .dynamics import ModelParams
from .entangle import EntanglementVariant, entanglement_entropy
from .errors import InvariantViolation, QmemoryError
from .nonmarkov import (
    NON_MARKOVIAN,
    classify_dynamics,
    trace_distance_closed_form,
    trace_distance_rate,
)
from .validate import run_validation

_DEFAULTS = {
    "gamma": 0.2,
    "m": 0.5,
    "omega": 0.8,
    "t_max": 20.0,
    "steps": 201,
    "eps": 1e-3,
    "variant": "eq13",
    "out": None,
}

_CONFIG_PARSERS = {
    "gamma": float,
    "m": float,
    "omega": float,
    "t_max": float,
    "steps": int,
    "eps": float,
    "variant": str,
    "out": str,
}


@dataclass(frozen=True)
class RunConfig:
    """Resolved run parameters: defaults, then config file, then flags."""

    params: ModelParams
    t_max: float
    steps: int
    eps: float
    variant: EntanglementVariant
    out_path: str | None

    def __post_init__(self) -> None:
        if not (isinstance(self.steps, int) and self.steps >= 2):
            raise InvariantViolation(f"steps must be an integer >= 2, got {self.steps!r}")
        if not (math.isfinite(self.t_max) and self.t_max > 0):
            raise InvariantViolation(f"t_max must be positive and finite, got {self.t_max!r}")
        if not (math.isfinite(self.eps) and self.eps >= 0):
            raise InvariantViolation(f"eps must be nonnegative and finite, got {self.eps!r}")


class _Parser(argparse.ArgumentParser):
    """argparse exits 2 on bad usage; this tool reserves 2 for validation."""

    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(1, f"{self.prog}: error: {message}\n")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(
        prog="qmemory",
        description=(
            "Dissipative two-atom dynamics: trace-distance memory effects "
            "and entanglement entropy, as deterministic CSV data."
        ),
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, metavar="command",
                                parser_class=_Parser)

    def add_common(p: argparse.ArgumentParser) -> None:
        p.add_argument("--gamma", type=float, help="single-atom decay rate (> 0)")
        p.add_argument("--m", type=float, help="reservoir mean occupation (>= 0)")
        p.add_argument("--omega", type=float, help="exchange coupling strength (>= 0)")
        p.add_argument("--t-max", type=float, help="end of the sampled time window")
        p.add_argument("--steps", type=int, help="number of uniform samples on [0, t-max]")
        p.add_argument("--eps", type=float, help="memory-classification threshold")
        p.add_argument("--variant", choices=[v.value for v in EntanglementVariant],
                       help="entanglement formula: published two-population form "
                            "(eq13) or reduced-state entropy (entropy)")
        p.add_argument("--out", help="output file path (default: stdout)")
        p.add_argument("--config", help="key = value config file; flags override it")

    p = sub.add_parser("trace-distance",
                       help="distance between the two canonical preparations vs time")
    add_common(p)

    p = sub.add_parser("sweep", help="distance curves across a parameter family")
    add_common(p)
    p.add_argument("--param", choices=("gamma", "m", "omega"), required=True,
                   help="which parameter the family varies")
    p.add_argument("--from", dest="sweep_from", type=float, required=True,
                   help="first family value")
    p.add_argument("--to", dest="sweep_to", type=float, required=True,
                   help="last family value")
    p.add_argument("--points", type=int, required=True, help="family size (>= 1)")

    p = sub.add_parser("blp", help="accumulated information-backflow measure")
    add_common(p)

    p = sub.add_parser("entanglement", help="entanglement entropy vs time")
    add_common(p)
    p.add_argument("--gammas",
                   help="comma-separated decay rates; switches to the "
                        "gamma-family output (columns gamma,t,E)")

    sub.add_parser("validate", help="run all internal cross-checks")
    return parser


# --- config resolution -------------------------------------------------------

def load_config_file(path: str) -> dict:
    """Parse a ``key = value`` file; ``#`` starts a comment."""
    with open(path, "r", encoding="utf-8") as fh:
        text = fh.read()
    settings: dict = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise InvariantViolation(f"{path}:{lineno}: expected 'key = value', got {raw!r}")
        key, _, value = line.partition("=")
        key, value = key.strip(), value.strip()
        if key not in _CONFIG_PARSERS:
            raise InvariantViolation(
                f"{path}:{lineno}: unknown key {key!r} "
                f"(known: {', '.join(sorted(_CONFIG_PARSERS))})"
            )
        try:
            settings[key] = _CONFIG_PARSERS[key](value)
        except ValueError as exc:
            raise InvariantViolation(f"{path}:{lineno}: bad value for {key}: {value!r}") from exc
    return settings


def resolve_config(args: argparse.Namespace) -> RunConfig:
    merged = dict(_DEFAULTS)
    if getattr(args, "config", None):
        merged.update(load_config_file(args.config))
    for key in ("gamma", "m", "omega", "t_max", "steps", "eps", "variant", "out"):
        value = getattr(args, key, None)
        if value is not None:
            merged[key] = value
    try:
        variant = EntanglementVariant(merged["variant"])
    except ValueError:
        tokens = ", ".join(repr(v.value) for v in EntanglementVariant)
        raise InvariantViolation(
            f"variant must be one of {tokens}, got {merged['variant']!r}"
        ) from None
    params = ModelParams(gamma=merged["gamma"], m=merged["m"], omega=merged["omega"])
    return RunConfig(
        params=params,
        t_max=float(merged["t_max"]),
        steps=merged["steps"],
        eps=float(merged["eps"]),
        variant=variant,
        out_path=merged["out"],
    )


# --- deterministic CSV -------------------------------------------------------

def _fmt_cell(value) -> str:
    if isinstance(value, str):
        return value
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    return f"{float(value):.8e}"


def _echo_value(value) -> str:
    if isinstance(value, float):
        return repr(value)
    return str(value)


def _csv_text(command: str, echo: dict, header: tuple, rows) -> str:
    lines = [f"# qmemory {__version__}", f"# command: {command}"]
    for key in sorted(echo):
        lines.append(f"# {key} = {_echo_value(echo[key])}")
    lines.append(",".join(header))
    for row in rows:
        lines.append(",".join(_fmt_cell(cell) for cell in row))
    return "\n".join(lines) + "\n"


def _emit(out_path: str | None, text: str) -> None:
    if out_path is None:
        sys.stdout.write(text)
    else:
        with open(out_path, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)


def _common_echo(cfg: RunConfig) -> dict:
    return {
        "gamma": cfg.params.gamma,
        "m": cfg.params.m,
        "omega": cfg.params.omega,
        "t_max": cfg.t_max,
        "steps": cfg.steps,
        "eps": cfg.eps,
        "variant": cfg.variant.value,
    }


def _time_grid(cfg: RunConfig) -> np.ndarray:
    return np.linspace(0.0, cfg.t_max, cfg.steps)


# --- subcommands -------------------------------------------------------------

def cmd_trace_distance(cfg: RunConfig) -> int:
    t = _time_grid(cfg)
    d = np.asarray(trace_distance_closed_form(cfg.params, t))
    sigma = np.asarray(trace_distance_rate(cfg.params, t))
    rows = list(zip(t.tolist(), d.tolist(), sigma.tolist()))
    _emit(cfg.out_path, _csv_text("trace-distance", _common_echo(cfg),
                                  ("t", "D", "sigma"), rows))
    return 0


def cmd_sweep(cfg: RunConfig, param: str, lo: float, hi: float, points: int) -> int:
    if points < 1:
        raise InvariantViolation(f"--points must be >= 1, got {points!r}")
    if not (lo <= hi):
        raise InvariantViolation(f"--from must not exceed --to, got {lo!r} > {hi!r}")
    values = np.linspace(lo, hi, points)
    t = _time_grid(cfg)

    def evaluate(value: float):
        p = replace(cfg.params, **{param: float(value)})
        d = np.asarray(trace_distance_closed_form(p, t))
        flag = 1 if classify_dynamics(p, cfg.eps).regime == NON_MARKOVIAN else 0
        return float(value), d, flag

    # Family members are independent pure computations; the map preserves
    # input order, so assembly stays deterministic.
    with ThreadPoolExecutor(max_workers=min(8, len(values))) as pool:
        evaluated = list(pool.map(evaluate, values.tolist()))

    rows = [
        (param, value, float(ti), float(di), flag)
        for value, d, flag in evaluated
        for ti, di in zip(t.tolist(), d.tolist())
    ]
    echo = _common_echo(cfg)
    del echo[param]  # the swept parameter lives in the sweep_value column
    echo.update({"param": param, "from": float(lo), "to": float(hi), "points": points})
    _emit(cfg.out_path, _csv_text(
        "sweep", echo, ("sweep_param", "sweep_value", "t", "D", "N_flag"), rows
    ))
    return 0


def cmd_blp(cfg: RunConfig) -> int:
    verdict = classify_dynamics(cfg.params, cfg.eps)
    result = verdict.result
    print(
        f"N={result.n_value:.6f} class={verdict.regime} "
        f"intervals={len(result.intervals)} tail<={result.tail_bound:.3e}"
    )
    if cfg.out_path is not None:
        rows = [(iv.t_start, iv.t_end, iv.gain) for iv in result.intervals]
        _emit(cfg.out_path, _csv_text("blp", _common_echo(cfg),
                                      ("t_start", "t_end", "gain"), rows))
    return 0


def parse_gammas(raw: str | None) -> list[float] | None:
    if raw is None:
        return None
    try:
        values = [float(piece) for piece in raw.split(",") if piece.strip() != ""]
    except ValueError as exc:
        raise InvariantViolation(f"--gammas must be comma-separated numbers, got {raw!r}") from exc
    if not values:
        raise InvariantViolation("--gammas must contain at least one value")
    return sorted(values)


def cmd_entanglement(cfg: RunConfig, gammas: list[float] | None) -> int:
    t = _time_grid(cfg)
    echo = _common_echo(cfg)
    if gammas is None:
        e = np.asarray(entanglement_entropy(cfg.params, t, cfg.variant))
        d = np.asarray(trace_distance_closed_form(cfg.params, t))
        rows = list(zip(t.tolist(), e.tolist(), d.tolist()))
        _emit(cfg.out_path, _csv_text("entanglement", echo, ("t", "E", "D"), rows))
        return 0
    rows = []
    for gamma in gammas:
        p = replace(cfg.params, gamma=gamma)
        e = np.asarray(entanglement_entropy(p, t, cfg.variant))
        rows.extend((gamma, float(ti), float(ei)) for ti, ei in zip(t.tolist(), e.tolist()))
    del echo["gamma"]  # per-row column instead
    echo["gammas"] = ",".join(repr(g) for g in gammas)
    _emit(cfg.out_path, _csv_text("entanglement", echo, ("gamma", "t", "E"), rows))
    return 0


def cmd_validate() -> int:
    results = run_validation()
    for result in results:
        status = "PASS" if result.passed else "FAIL"
        print(f"[{status}] {result.name}: {result.detail}")
        for row in result.table:
            print(f"    {row}")
    passed = sum(1 for r in results if r.passed)
    print(f"{passed}/{len(results)} checks passed")
    return 0 if passed == len(results) else 2


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.command == "validate":
            return cmd_validate()
        cfg = resolve_config(args)
        if args.command == "trace-distance":
            return cmd_trace_distance(cfg)
        if args.command == "sweep":
            return cmd_sweep(cfg, args.param, args.sweep_from, args.sweep_to, args.points)
        if args.command == "blp":
            return cmd_blp(cfg)
        if args.command == "entanglement":
            return cmd_entanglement(cfg, parse_gammas(args.gammas))
        raise InvariantViolation(f"unknown command {args.command!r}")  # pragma: no cover
    except QmemoryError as exc:
        print(f"qmemory: error: {exc}", file=sys.stderr)
        return 1
    except ValueError as exc:
        print(f"qmemory: error: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"qmemory: i/o error: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":  # pragma: no cover
    raise SystemExit(main())
