"""Command-line driver: ``spin-eraser {no-eraser,eraser,whichway,delayed}``.

Each run writes ``<name>.csv`` and ``<name>.pgm`` per density snapshot and
one ``summary.txt`` into ``--out``. Parameters come from defaults, then an
optional ``key = value`` config file, then command-line flags.
"""
from __future__ import annotations

import argparse
import logging
import sys
import warnings
from dataclasses import dataclass, fields
from pathlib import Path

from . import analytic, fringes, oracle
from .core import DEFAULT_PARAMS, DensityField, GridSpec, ParamError, PhysParams, validate_params
from .output import EmptyDensityError, write_csv, write_pgm, write_summary

log = logging.getLogger("spin_eraser")

SCENARIOS = ("no-eraser", "eraser", "whichway", "delayed")
PARAM_KEYS = tuple(f.name for f in fields(PhysParams))
# parameters that do not enter the eraser-off pattern
_MAGNET_ONLY = ("beta", "b0", "t_i", "t_e")


class ConfigError(ValueError):
    pass


@dataclass(frozen=True)
class RunConfig:
    params: PhysParams
    scenario: str
    grid: GridSpec | None = None
    nx: int = 512
    nz: int = 512
    oracle: bool = False
    dt: float = 0.005
    strict_eq12: bool = False

    def grid_for(self, p: PhysParams, scenario: str) -> GridSpec:
        if self.grid is not None:
            return self.grid
        return analytic.screen_grid(p, self.nx, self.nz, scenario=scenario)


def _parse_bool(text: str) -> bool:
    low = text.strip().lower()
    if low in ("1", "true", "yes", "on"):
        return True
    if low in ("0", "false", "no", "off"):
        return False
    raise ValueError(f"not a boolean: {text!r}")


def parse_grid(text: str) -> GridSpec:
    parts = [s.strip() for s in text.split(",")]
    if len(parts) != 6:
        raise ValueError("grid needs NX,NZ,XMIN,XMAX,ZMIN,ZMAX")
    nx, nz = int(parts[0]), int(parts[1])
    xmin, xmax, zmin, zmax = map(float, parts[2:])
    return GridSpec(xmin, xmax, nx, zmin, zmax, nz)


def _convert(key: str, raw: str):
    if key in PARAM_KEYS or key == "dt":
        return float(raw)
    if key in ("nx", "nz"):
        return int(raw)
    if key in ("oracle", "strict_eq12"):
        return _parse_bool(raw)
    if key == "grid":
        return parse_grid(raw)
    if key == "scenario":
        if raw not in SCENARIOS:
            raise ValueError(f"unknown scenario {raw!r}")
        return raw
    raise KeyError(key)


def read_config_file(path) -> dict:
    """Parse a flat ``key = value`` file; ``#`` starts a comment."""
    path = Path(path)
    try:
        lines = path.read_text().splitlines()
    except OSError as exc:
        raise ConfigError(f"{path}: {exc.strerror or exc}") from exc
    values = {}
    for lineno, line in enumerate(lines, start=1):
        text = line.split("#", 1)[0].strip()
        if not text:
            continue
        if "=" not in text:
            raise ConfigError(f"{path}:{lineno}: expected key = value")
        key, raw = (s.strip() for s in text.split("=", 1))
        key = key.replace("-", "_")
        try:
            values[key] = _convert(key, raw)
        except KeyError:
            raise ConfigError(f"{path}:{lineno}: unknown key {key!r}") from None
        except ValueError as exc:
            raise ConfigError(f"{path}:{lineno}: {key}: {exc}") from None
    return values


def parse_config(path=None, overrides: dict | None = None, scenario: str | None = None) -> RunConfig:
    """Merge defaults, the config file at ``path`` and ``overrides`` (highest precedence)."""
    values = read_config_file(path) if path is not None else {}
    values.update({k: v for k, v in (overrides or {}).items() if v is not None})
    scenario = scenario or values.pop("scenario", None) or "eraser"
    values.pop("scenario", None)
    if scenario not in SCENARIOS:
        raise ConfigError(f"unknown scenario {scenario!r}")
    params = DEFAULT_PARAMS.replace(**{k: values.pop(k) for k in PARAM_KEYS if k in values})
    validate_params(params, magnet=scenario != "no-eraser")
    cfg = RunConfig(params=params, scenario=scenario, **values)
    if cfg.dt <= 0:
        raise ConfigError("dt must be positive")
    return cfg


# -- running ----------------------------------------------------------------

def _params_section(p: PhysParams, scenario: str) -> dict:
    keys = [k for k in PARAM_KEYS if not (scenario == "no-eraser" and k in _MAGNET_ONLY)]
    return {k: float(getattr(p, k)) for k in keys}


def _grid_section(g: GridSpec) -> dict:
    return {"nx": g.nx, "nz": g.nz, "x_min": float(g.x_min), "x_max": float(g.x_max),
            "z_min": float(g.z_min), "z_max": float(g.z_max)}


def _report_section(report, extra: dict | None = None) -> dict:
    out = {
        "lobes": len(report.lobe_centers),
        "lobe_centers": report.lobe_centers,
        "visibility_per_lobe": report.visibility_per_lobe,
        "fringe_period": report.fringe_period,
        "fringe_spacing": report.fringe_spacing,
        "complementarity_visibility": report.complementarity,
        "reference_deviation": report.reference_deviation,
        "distinguishability": report.distinguishability,
        "single_lobe": report.single_lobe,
    }
    out.update(extra or {})
    return out


def _snapshot(cfg: RunConfig, p: PhysParams, kind: str):
    """Analytic density, its analysis, and optionally the oracle residual."""
    g = cfg.grid_for(p, kind)
    if kind == "no-eraser":
        d = analytic.density_no_eraser(p, g)
        report = fringes.analyze(d, d)
    elif kind == "eraser":
        d = analytic.density_eraser(p, g, cfg.strict_eq12)
        report = fringes.analyze(d, analytic.density_no_eraser(p, g))
    else:
        d = analytic.whichway_evolve(p, g, cfg.strict_eq12)
        report = fringes.analyze(d)
    extra = {}
    if kind == "eraser" and p.z0 > 0:
        extra["expected_period"] = analytic.fringe_period_exact(p)
    if cfg.oracle:
        sg = oracle.run_schedule(p, kind, g, cfg.dt)
        extra["oracle_residual"] = oracle.compare_l2(d, sg.density())
        extra["oracle_norm"] = sg.norm()
        extra["oracle_dt"] = cfg.dt
    return g, d, _report_section(report, extra)


def run_scenario(cfg: RunConfig, out_dir) -> dict:
    """Compute the scenario, write its files and return the summary mapping."""
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    p = cfg.params
    summary = {
        "run": {"scenario": cfg.scenario, "strict_eq12": cfg.strict_eq12, "oracle": cfg.oracle,
                "image_normalization": "per-file maximum"},
        "params": _params_section(p, cfg.scenario),
    }
    fields_out = {}
    if cfg.scenario == "delayed":
        # passive density record before the eraser magnet, then the final screen
        mid = p.replace(t=p.t_i)
        for name, q, kind in (("intermediate", mid, "no-eraser"), ("final", p, "eraser")):
            g, d, section = _snapshot(cfg, q, kind)
            section["time"] = float(q.t)
            summary[f"{name}.grid"] = _grid_section(g)
            summary[f"{name}.analysis"] = section
            fields_out[f"delayed_{name}"] = d
    else:
        g, d, section = _snapshot(cfg, p, cfg.scenario)
        summary["grid"] = _grid_section(g)
        summary["analysis"] = section
        fields_out[cfg.scenario] = d
    summary["files"] = emit_outputs(fields_out, out_dir)
    write_summary(summary, out_dir / "summary.txt")
    return summary


def emit_outputs(fields_out: dict, out_dir) -> dict:
    written = {}
    for name, d in fields_out.items():
        write_csv(d, out_dir / f"{name}.csv")
        write_pgm(d, out_dir / f"{name}.pgm")
        written[f"{name}.csv"] = f"{name}.csv"
        written[f"{name}.pgm"] = f"{name}.pgm"
    return written


# -- argument parsing ---------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="spin-eraser",
        description="Spin-1/2 Stern-Gerlach quantum eraser: screen densities and fringe analysis",
    )
    ap.add_argument("scenario", choices=SCENARIOS)
    ap.add_argument("--config", metavar="PATH", help="key = value parameter file")
    ap.add_argument("--out", metavar="DIR", default=".", help="output directory (default: .)")
    ap.add_argument("--grid", metavar="NX,NZ,XMIN,XMAX,ZMIN,ZMAX", type=parse_grid,
                    help="explicit grid; default is a 512x512 box sized to the pattern")
    ap.add_argument("--oracle", action="store_true", default=None,
                    help="also run the split-operator propagation and report the residual")
    ap.add_argument("--dt", type=float, help="oracle time step (default 0.005)")
    ap.add_argument("--strict-eq12", action="store_true", default=None,
                    help="place the lobes at the in-magnet shift only, without post-magnet drift")
    phys = ap.add_argument_group("physical parameters")
    for key in PARAM_KEYS:
        phys.add_argument(f"--{key.replace('_', '-')}", dest=key, type=float, metavar="VALUE",
                          help=f"default {getattr(DEFAULT_PARAMS, key)}")
    ap.add_argument("-v", "--verbose", action="store_true")
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    overrides = {k: getattr(args, k) for k in PARAM_KEYS}
    overrides.update(grid=args.grid, oracle=args.oracle, dt=args.dt, strict_eq12=args.strict_eq12)
    try:
        cfg = parse_config(args.config, overrides, scenario=args.scenario)
        with warnings.catch_warnings():
            warnings.simplefilter("default")
            summary = run_scenario(cfg, args.out)
    except (ConfigError, ParamError) as exc:
        print(f"spin-eraser: error: {exc}", file=sys.stderr)
        return 2
    except (OSError, EmptyDensityError, oracle.GridTooSmallError, oracle.PropagationError, ValueError) as exc:
        print(f"spin-eraser: error: {exc}", file=sys.stderr)
        return 1
    for name in summary["files"]:
        print(Path(args.out) / name)
    print(Path(args.out) / "summary.txt")
    return 0


if __name__ == "__main__":
    sys.exit(main())
