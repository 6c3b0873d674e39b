"""Command-line front end: scenario presets, config files and seed sweeps."""

from __future__ import annotations

import argparse
import configparser
import dataclasses
import logging
import os
import sys
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path
from typing import Dict, List, Optional, Sequence, Tuple

from . import reporting
from .engine import HAVE_COMPILED, RunSummary, run_simulation
from .model import HeterogeneityModel, MultiLevel, NetworkConfig, RadioParams, ThreeLevel, TwoLevel
from .protocols import Protocol, ProtocolKind

log = logging.getLogger("wsnsim")

SCENARIOS: Dict[str, HeterogeneityModel] = {
    "s1": ThreeLevel(m=0.5, m_o=0.4, a=1.5, b=3.0),
    "s2": ThreeLevel(m=0.4, m_o=0.3, a=1.3, b=2.5),
    "s3": ThreeLevel(m=0.3, m_o=0.2, a=1.2, b=2.0),
    "s4": ThreeLevel(m=0.6, m_o=0.5, a=1.6, b=3.2),
    "s5": ThreeLevel(m=0.7, m_o=0.6, a=1.7, b=3.4),
    "multi": MultiLevel(a_max=2.0),
}

_INT_KEYS = {"n_nodes", "max_rounds", "rng_seed", "msg_bits"}
_FLOAT_KEYS = {"field_side", "e_o", "p_opt", "m", "m_o", "a", "b", "a_max",
               "e_elec", "eps_fs", "eps_mp", "e_da", "d_o"}
CONFIG_KEYS = _INT_KEYS | _FLOAT_KEYS | {"heterogeneity", "bs_position"}
_RADIO_KEYS = {f.name for f in dataclasses.fields(RadioParams)}


class ConfigError(ValueError):
    """Bad configuration key or value; the message names the offending key."""


def _convert(key: str, raw: str):
    raw = raw.strip()
    try:
        if key in _INT_KEYS:
            return int(raw)
        if key in _FLOAT_KEYS:
            return float(raw)
        if key == "bs_position":
            x, y = (float(v) for v in raw.split(","))
            return (x, y)
    except ValueError:
        raise ConfigError(f"{key}: cannot parse value {raw!r}") from None
    if key == "heterogeneity":
        kind = raw.lower()
        if kind not in ("two", "three", "multi"):
            raise ConfigError(f"heterogeneity: expected two, three or multi, got {raw!r}")
        return kind
    raise ConfigError(f"unknown config key {key!r}")


def read_config_file(path: str) -> Dict[str, object]:
    """Parse a flat ``key = value`` file (``#`` comments allowed)."""
    parser = configparser.ConfigParser(interpolation=None, comment_prefixes=("#", ";"))
    parser.optionxform = str
    try:
        with open(path) as fh:
            parser.read_string("[config]\n" + fh.read(), source=path)
    except configparser.Error as exc:
        raise ConfigError(f"{path}: {exc}") from None
    values = {}
    for key, raw in parser["config"].items():
        if key not in CONFIG_KEYS:
            raise ConfigError(f"unknown config key {key!r} in {path}")
        values[key] = _convert(key, raw)
    return values


def heterogeneity_from(values: Dict[str, object], base: Optional[HeterogeneityModel]) -> HeterogeneityModel:
    kind = values.get("heterogeneity")
    if kind is None:
        if base is not None:
            kind = {TwoLevel: "two", ThreeLevel: "three", MultiLevel: "multi"}[type(base)]
        elif "a_max" in values:
            kind = "multi"
        elif "b" in values or "m_o" in values:
            kind = "three"
        else:
            kind = "two"
    fields = {"two": ("m", "a"), "three": ("m", "m_o", "a", "b"), "multi": ("a_max",)}[kind]
    cls = {"two": TwoLevel, "three": ThreeLevel, "multi": MultiLevel}[kind]
    current = dataclasses.asdict(base) if isinstance(base, cls) else {}
    params = {}
    for name in fields:
        if name in values:
            params[name] = values[name]
        elif name in current:
            params[name] = current[name]
    stray = {"m", "m_o", "a", "b", "a_max"} & set(values) - set(fields)
    if stray:
        raise ConfigError(f"{sorted(stray)[0]}: not a parameter of {kind}-level heterogeneity")
    try:
        return cls(**params)
    except TypeError:
        missing = [n for n in fields if n not in params]
        raise ConfigError(f"{missing[0]}: required for {kind}-level heterogeneity") from None


def build_config(values: Dict[str, object], base_het: Optional[HeterogeneityModel] = None) -> NetworkConfig:
    """Table-1 defaults overridden by ``values``; validation errors name the key."""
    radio_kw = {k: v for k, v in values.items() if k in _RADIO_KEYS}
    top_kw = {k: v for k, v in values.items()
              if k in ("n_nodes", "field_side", "e_o", "p_opt", "bs_position", "max_rounds", "rng_seed")}
    het = heterogeneity_from(values, base_het)
    config = NetworkConfig(heterogeneity=het, radio=RadioParams(**radio_kw), **top_kw)
    try:
        config.validate()
    except ValueError as exc:
        raise ConfigError(str(exc)) from None
    return config


@dataclasses.dataclass
class RunMatrix:
    configs: List[Tuple[str, NetworkConfig]]
    protocols: List[ProtocolKind]
    seeds: List[int]

    def cells(self):
        for scenario, cfg in self.configs:
            for kind in self.protocols:
                for seed in self.seeds:
                    yield scenario, kind, dataclasses.replace(cfg, rng_seed=seed)


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="wsnsim",
        description="Simulate DEEC, DDEEC, EDEEC and TDEEC on heterogeneous sensor networks.",
    )
    p.add_argument("--protocol", action="append", choices=[*(x.value for x in Protocol), "all"],
                   help="protocol to run; repeatable (default: all)")
    src = p.add_mutually_exclusive_group()
    src.add_argument("--scenario", action="append", choices=[*SCENARIOS, "all"],
                     help="heterogeneity preset; repeatable (default: s1)")
    src.add_argument("--config", metavar="PATH", help="flat key = value config file")
    seeds = p.add_mutually_exclusive_group()
    seeds.add_argument("--seeds", type=int, metavar="N", help="run seeds 0..N-1")
    seeds.add_argument("--seed", type=int, metavar="K", help="run the single seed K (default 0)")
    p.add_argument("--max-rounds", type=int)
    p.add_argument("--n-nodes", type=int)
    p.add_argument("--p-opt", type=float)
    p.add_argument("--e-o", type=float)
    p.add_argument("--ddeec-c", type=float, default=0.02)
    p.add_argument("--a-max", type=float, help="upper bound of the multi-level energy ratio")
    p.add_argument("--no-clamp", action="store_true", help="do not cap TDEEC thresholds at 1")
    p.add_argument("--out", default=os.environ.get("WSNSIM_OUT", "results"),
                   help="output directory (default: $WSNSIM_OUT or ./results)")
    p.add_argument("--json", action="store_true", help="also write a JSON summary per run")
    p.add_argument("--jobs", type=int, default=1, help="concurrent simulations")
    p.add_argument("--backend", choices=["compiled", "python"], default=None)
    p.add_argument("--dry-run", action="store_true", help="print the run matrix and exit")
    p.add_argument("-v", "--verbose", action="store_true")
    return p


def parse_config(argv: Optional[Sequence[str]] = None) -> Tuple[argparse.Namespace, RunMatrix]:
    """Resolve flags, config file and defaults into a run matrix.

    Precedence is flags, then the config file, then Table-1 defaults.
    """
    args = build_parser().parse_args(argv)

    overrides: Dict[str, object] = {}
    for flag, key in (("max_rounds", "max_rounds"), ("n_nodes", "n_nodes"),
                      ("p_opt", "p_opt"), ("e_o", "e_o"), ("a_max", "a_max")):
        value = getattr(args, flag)
        if value is not None:
            overrides[key] = value

    configs: List[Tuple[str, NetworkConfig]] = []
    if args.config:
        values = read_config_file(args.config)
        values.update(overrides)
        configs.append((Path(args.config).stem, build_config(values)))
    else:
        names = args.scenario or ["s1"]
        if "all" in names:
            names = list(SCENARIOS)
        for name in dict.fromkeys(names):
            vals = dict(overrides)
            if not isinstance(SCENARIOS[name], MultiLevel):
                vals.pop("a_max", None)
            configs.append((name, build_config(vals, SCENARIOS[name])))

    names = args.protocol or ["all"]
    protocols = list(Protocol) if "all" in names else [Protocol(n) for n in dict.fromkeys(names)]
    try:
        kinds = [ProtocolKind(p, ddeec_c=args.ddeec_c, clamp_threshold=not args.no_clamp) for p in protocols]
    except ValueError as exc:
        raise ConfigError(f"ddeec_c: {exc}") from None

    if args.seeds is not None:
        if args.seeds < 1:
            raise ConfigError("seeds: must be >= 1")
        seeds = list(range(args.seeds))
    else:
        seeds = [args.seed if args.seed is not None else configs[0][1].rng_seed]
    if args.jobs < 1:
        raise ConfigError("jobs: must be >= 1")
    return args, RunMatrix(configs, kinds, seeds)


def _run_cell(cell, backend):
    scenario, kind, cfg = cell
    return run_simulation(cfg, kind, scenario=scenario, backend=backend)


def round_csv_name(run: RunSummary) -> str:
    return f"{run.scenario}_{run.protocol}_seed{run.seed}.csv"


def run_matrix(args: argparse.Namespace, matrix: RunMatrix) -> int:
    cells = list(matrix.cells())
    if args.dry_run:
        for scenario, kind, cfg in cells:
            print(f"{scenario}\t{kind.name}\tseed={cfg.rng_seed}\tmax_rounds={cfg.max_rounds}")
        print(f"{len(cells)} runs")
        return 0

    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    if args.jobs > 1:
        with ProcessPoolExecutor(max_workers=args.jobs) as pool:
            runs = list(pool.map(_run_cell, cells, [args.backend] * len(cells)))
    else:
        runs = [_run_cell(c, args.backend) for c in cells]

    for run in runs:
        reporting.emit_round_csv(run.per_round, out / round_csv_name(run))
        if args.json:
            reporting.emit_json(run, out / round_csv_name(run).replace(".csv", ".json"))
    table = reporting.summarize(runs)
    reporting.emit_summary_csv(table, out / "summary.csv")
    print(reporting.format_table(table))
    return 0


def main(argv: Optional[Sequence[str]] = None) -> int:
    try:
        args, matrix = parse_config(argv)
    except ConfigError as exc:
        print(f"wsnsim: config error: {exc}", file=sys.stderr)
        return 1
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    if args.backend == "compiled" and not HAVE_COMPILED:
        print("wsnsim: compiled kernel not available", file=sys.stderr)
        return 1
    return run_matrix(args, matrix)


if __name__ == "__main__":
    sys.exit(main())
