"""Command-line interface.

Every subcommand writes CSV to stdout or ``--out``.  Settings resolve in the
order built-in defaults, then ``--config FILE`` (``key = value`` lines), then
explicit flags.  ``dpflow show-config`` prints the resolved settings in the
config-file format.
"""
from __future__ import annotations

import argparse
import configparser
import logging
import math
import sys
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import diagnostics, laplace, series
from .laplace import StehfestConfig
from .params import BoundaryCase, ReservoirParams
from .series import SeriesConfig
from .specfun import find_roots

log = logging.getLogger("dpflow")

DEFAULTS: dict[str, object] = {
    "case": "dd",
    "omega": 0.1,
    "lambda": 1e-3,
    "rext": 100.0,
    "qext": 0.5,
    "gamma": 1e-3,
    "roots": 200,
    "stehfest_n": 14,
    "compare_stehfest_n": 18,
    "t_start": 1.0,
    "t_stop": 1e6,
    "t_count": 20,
    "t_log": True,
    "r_count": 20,
    "method": "series",
    "no_closed_form": False,
    "no_temporal_terms": False,
    "r_probe": 1.5,
    "t_probe": 10.0,
    "root_counts": "10,100,1000",
    "identity_radii": "",
}

_FLOATS = {"omega", "lambda", "rext", "qext", "gamma", "t_start", "t_stop", "r_probe", "t_probe"}
_INTS = {"roots", "stehfest_n", "compare_stehfest_n", "t_count", "r_count"}
_BOOLS = {"t_log", "no_closed_form", "no_temporal_terms"}


class ConfigError(ValueError):
    pass


@dataclass(frozen=True)
class RunConfig:
    """Resolved settings of one CLI invocation."""

    params: ReservoirParams
    method: str
    n_roots: int
    stehfest_n: int
    compare_stehfest_n: int
    t_start: float
    t_stop: float
    t_count: int
    t_log: bool
    r_count: int
    no_closed_form: bool
    no_temporal_terms: bool
    r_probe: float
    t_probe: float
    root_counts: tuple[int, ...]
    identity_radii: tuple[float, ...]
    out: str | None = None

    @property
    def case(self) -> BoundaryCase:
        return self.params.case

    def times(self) -> np.ndarray:
        if self.t_count < 1:
            raise ConfigError("t-count must be at least 1")
        if self.t_log:
            if not (self.t_start > 0.0 and self.t_stop > 0.0):
                raise ConfigError("log-spaced times need t-start, t-stop > 0")
            return np.geomspace(self.t_start, self.t_stop, self.t_count)
        if self.t_start < 0.0:
            raise ConfigError("times must be non-negative")
        return np.linspace(self.t_start, self.t_stop, self.t_count)

    def radii(self) -> np.ndarray:
        if self.r_count < 2:
            raise ConfigError("r-count must be at least 2")
        R = self.params.r_ext
        r = np.geomspace(1.0, R, self.r_count)
        r[0], r[-1] = 1.0, R
        return r

    def series_config(self) -> SeriesConfig:
        return SeriesConfig(self.n_roots, not self.no_closed_form, not self.no_temporal_terms)


def _convert(key: str, value):
    if value is None:
        return None
    try:
        if key in _FLOATS:
            return float(value)
        if key in _INTS:
            return int(value)
        if key in _BOOLS:
            if isinstance(value, bool):
                return value
            text = str(value).strip().lower()
            if text in ("1", "true", "yes", "on"):
                return True
            if text in ("0", "false", "no", "off"):
                return False
            raise ValueError(value)
    except (TypeError, ValueError):
        raise ConfigError(f"invalid value for {key}: {value!r}") from None
    return str(value).strip()


def read_config_file(path: str | Path) -> dict[str, object]:
    """Read ``key = value`` settings; an optional ``[dpflow]`` header is allowed."""
    text = Path(path).read_text(encoding="utf-8")
    parser = configparser.ConfigParser(interpolation=None)
    if not any(line.strip().startswith("[") for line in text.splitlines()):
        text = "[dpflow]\n" + text
    parser.read_string(text)
    section = parser["dpflow"] if parser.has_section("dpflow") else parser[parser.sections()[0]]
    out = {}
    for key, value in section.items():
        key = key.replace("-", "_")
        if key not in DEFAULTS:
            raise ConfigError(f"unknown config key {key!r}")
        out[key] = _convert(key, value)
    return out


def resolve(args: argparse.Namespace) -> RunConfig:
    values = dict(DEFAULTS)
    if getattr(args, "config", None):
        values.update(read_config_file(args.config))
    for key in DEFAULTS:
        v = getattr(args, key, None)
        if v is not None:
            values[key] = _convert(key, v)
    if values["method"] not in ("series", "stehfest", "both"):
        raise ConfigError(f"unknown method {values['method']!r}")
    params = ReservoirParams(
        omega=values["omega"],
        lambda_=values["lambda"],
        r_ext=values["rext"],
        q_ext=values["qext"],
        gamma=values["gamma"],
        case=BoundaryCase.parse(values["case"]),
    )
    try:
        counts = tuple(int(c) for c in str(values["root_counts"]).split(",") if c.strip())
        radii = tuple(float(c) for c in str(values["identity_radii"]).split(",") if c.strip())
    except ValueError:
        raise ConfigError("root-counts and identity-radii are comma-separated numbers") from None
    return RunConfig(
        params=params,
        method=values["method"],
        n_roots=values["roots"],
        stehfest_n=values["stehfest_n"],
        compare_stehfest_n=values["compare_stehfest_n"],
        t_start=values["t_start"],
        t_stop=values["t_stop"],
        t_count=values["t_count"],
        t_log=values["t_log"],
        r_count=values["r_count"],
        no_closed_form=values["no_closed_form"],
        no_temporal_terms=values["no_temporal_terms"],
        r_probe=values["r_probe"],
        t_probe=values["t_probe"],
        root_counts=counts,
        identity_radii=radii,
        out=getattr(args, "out", None),
    )


def config_text(cfg: RunConfig) -> str:
    p = cfg.params
    values = {
        "case": p.case.value.lower(),
        "omega": p.omega,
        "lambda": p.lambda_,
        "rext": p.r_ext,
        "qext": p.q_ext,
        "gamma": p.gamma,
        "roots": cfg.n_roots,
        "stehfest_n": cfg.stehfest_n,
        "compare_stehfest_n": cfg.compare_stehfest_n,
        "t_start": cfg.t_start,
        "t_stop": cfg.t_stop,
        "t_count": cfg.t_count,
        "t_log": cfg.t_log,
        "r_count": cfg.r_count,
        "method": cfg.method,
        "no_closed_form": cfg.no_closed_form,
        "no_temporal_terms": cfg.no_temporal_terms,
        "r_probe": cfg.r_probe,
        "t_probe": cfg.t_probe,
        "root_counts": ",".join(str(c) for c in cfg.root_counts),
        "identity_radii": ",".join(repr(r) for r in cfg.identity_radii),
    }
    lines = ["[dpflow]"]
    for key, v in values.items():
        if isinstance(v, bool):
            v = "true" if v else "false"
        elif isinstance(v, float):
            v = repr(v)
        lines.append(f"{key} = {v}")
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# commands


def _methods(cfg: RunConfig) -> list[str]:
    return ["series", "stehfest"] if cfg.method == "both" else [cfg.method]


def cmd_head(cfg: RunConfig) -> str:
    times, radii = cfg.times(), cfg.radii()
    methods = _methods(cfg)
    steh = StehfestConfig(cfg.stehfest_n)
    solver = series.SeriesSolver(cfg.params, cfg.series_config()) if "series" in methods else None
    rows = []
    for t in times:
        t = float(t)
        for m in methods:
            if m == "series":
                vals = solver.head(radii, t)
            else:
                vals = [laplace.invert_head(cfg.case, float(r), t, cfg.params, steh) for r in radii]
            rows += [(t, float(r), float(v), m) for r, v in zip(radii, vals)]
    return diagnostics.rows_to_csv(["t", "r", "h2", "method"], rows)


def cmd_flux(cfg: RunConfig) -> str:
    times = cfg.times()
    if np.any(times <= 0.0):
        raise ConfigError("flux needs t > 0")
    methods = _methods(cfg)
    steh = StehfestConfig(cfg.stehfest_n)
    solver = series.SeriesSolver(cfg.params, cfg.series_config()) if "series" in methods else None
    rows = []
    for t in times:
        t = float(t)
        for m in methods:
            v = solver.flux(t) if m == "series" else laplace.invert_flux(cfg.case, t, cfg.params, steh)
            rows.append((t, v, m))
    return diagnostics.rows_to_csv(["t", "j2", "method"], rows)


def cmd_roots(cfg: RunConfig) -> str:
    return find_roots(cfg.case, cfg.params.r_ext, cfg.n_roots).to_csv()


def cmd_compare(cfg: RunConfig) -> tuple[str, str]:
    report = diagnostics.compare_methods(
        cfg.case, cfg.params, cfg.times(), cfg.radii(), cfg.series_config(), StehfestConfig(cfg.compare_stehfest_n)
    )
    return report.to_csv(), report.summary()


def cmd_converge(cfg: RunConfig) -> str:
    rows = diagnostics.convergence_study(
        cfg.case, cfg.params, cfg.r_probe, cfg.t_probe, cfg.root_counts or (cfg.n_roots,),
        StehfestConfig(cfg.compare_stehfest_n), not cfg.no_temporal_terms,
    )
    return diagnostics.rows_to_csv(diagnostics.CONVERGENCE_HEADER, [r.astuple() for r in rows])


def cmd_identities(cfg: RunConfig) -> str:
    radii = cfg.identity_radii or None
    rows = diagnostics.identity_residuals(cfg.params, cfg.n_roots, radii)
    return diagnostics.rows_to_csv(diagnostics.IDENTITY_HEADER, [r.astuple() for r in rows])


_PLOT_TEMPLATES = {
    "head": """for method in sorted(set(data["method"])):
    sub = [row for row in rows if row["method"] == method]
    for t in sorted({{float(row["t"]) for row in sub}}):
        pts = [(float(row["r"]), float(row["h2"])) for row in sub if float(row["t"]) == t]
        plt.semilogx(*zip(*pts), "-" if method == "series" else "o", label=f"{{method}} t={{t:.3g}}")
plt.xlabel("r")
plt.ylabel("h2")
""",
    "flux": """for method in sorted(set(data["method"])):
    pts = [(float(row["t"]), float(row["j2"])) for row in rows if row["method"] == method]
    plt.loglog(*zip(*pts), "-" if method == "series" else "o", label=method)
plt.xlabel("t")
plt.ylabel("j2")
""",
    "roots": """plt.plot([float(row["k"]) for row in rows], ".")
plt.xlabel("index")
plt.ylabel("k")
""",
    "compare": """plt.semilogy([float(row["rel_err"]) for row in rows], ".")
plt.xlabel("grid point")
plt.ylabel("relative error")
""",
    "converge": """n = [int(row["n_roots"]) for row in rows]
plt.loglog(n, [float(row["head_dev"]) + 1e-300 for row in rows], "o-", label="closed form")
plt.loglog(n, [float(row["raw_dev"]) + 1e-300 for row in rows], "s-", label="raw series")
plt.xlabel("roots")
plt.ylabel("deviation")
""",
    "identities": """for name in sorted(set(data["identity"])):
    pts = [(float(row["r"]), float(row["residual"]) + 1e-300) for row in rows if row["identity"] == name]
    plt.semilogy(*zip(*pts), "o", label=name)
plt.xlabel("r")
plt.ylabel("residual")
""",
}


def plot_script(command: str, csv_path: str) -> str:
    """Plain matplotlib script that plots the CSV written by ``command``."""
    body = _PLOT_TEMPLATES[command].format()
    return (
        "import csv\n"
        "import matplotlib.pyplot as plt\n\n"
        f"with open({csv_path!r}, newline='') as fh:\n"
        "    rows = list(csv.DictReader(fh))\n"
        "data = {key: [row[key] for row in rows] for key in rows[0]}\n\n"
        + body
        + "plt.legend(fontsize='small')\nplt.tight_layout()\nplt.show()\n"
    )


# ---------------------------------------------------------------------------
# argument parsing


def _add_common(p: argparse.ArgumentParser) -> None:
    g = p.add_argument_group("model")
    g.add_argument("--case", choices=["dd", "dn", "nd", "nn"], type=str.lower)
    g.add_argument("--omega", type=float, help="fracture storage coefficient (0, 1]")
    g.add_argument("--lambda", dest="lambda", type=float, help="interporosity coefficient >= 0")
    g.add_argument("--rext", type=float, help="dimensionless external radius > 1")
    g.add_argument("--qext", type=float, help="ramp influx factor (dn, nn)")
    g.add_argument("--gamma", type=float, help="ramp time constant (dn, nn)")
    n = p.add_argument_group("numerics")
    n.add_argument("--roots", type=int, metavar="N", help="number of Hankel roots")
    n.add_argument("--stehfest-n", dest="stehfest_n", type=int, metavar="N")
    n.add_argument("--compare-stehfest-n", dest="compare_stehfest_n", type=int, metavar="N",
                   help="Stehfest terms of the reference in compare/converge")
    n.add_argument("--method", choices=["series", "stehfest", "both"])
    n.add_argument("--no-closed-form", dest="no_closed_form", action="store_const", const=True)
    n.add_argument("--no-temporal-terms", dest="no_temporal_terms", action="store_const", const=True)
    s = p.add_argument_group("grid")
    s.add_argument("--t-start", dest="t_start", type=float)
    s.add_argument("--t-stop", dest="t_stop", type=float)
    s.add_argument("--t-count", dest="t_count", type=int)
    s.add_argument("--t-log", dest="t_log", action=argparse.BooleanOptionalAction, default=None,
                   help="log-spaced times (default) or --no-t-log for linear")
    s.add_argument("--r-count", dest="r_count", type=int)
    o = p.add_argument_group("output")
    o.add_argument("--config", metavar="FILE", help="key = value settings file")
    o.add_argument("--out", metavar="PATH", help="write CSV here instead of stdout")
    o.add_argument("--plot-script", dest="plot_script", metavar="PATH",
                   help="also write a matplotlib script plotting the CSV (needs --out)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="dpflow",
        description="Head and flux of radial double-porosity flow by eigenfunction series and Stehfest inversion.",
    )
    parser.add_argument("-v", "--verbose", action="count", default=0)
    sub = parser.add_subparsers(dest="command", required=True)
    helps = {
        "head": "fracture head h2(r, t) on a grid",
        "flux": "bottomhole flux j2(t)",
        "roots": "eigenvalue root table",
        "compare": "series versus Stehfest on a grid",
        "converge": "head and raw series versus root count at a probe point",
        "identities": "closed-form profile identities versus truncated series",
        "show-config": "print the resolved settings",
    }
    for name, text in helps.items():
        p = sub.add_parser(name, help=text, description=text)
        _add_common(p)
        if name == "converge":
            p.add_argument("--r-probe", dest="r_probe", type=float)
            p.add_argument("--t-probe", dest="t_probe", type=float)
            p.add_argument("--root-counts", dest="root_counts", help="comma-separated, e.g. 10,100,1000")
        if name == "identities":
            p.add_argument("--identity-radii", dest="identity_radii", help="comma-separated radii")
    return parser


def _emit(text: str, out: str | None) -> None:
    if out:
        Path(out).write_text(text, encoding="utf-8", newline="\n")
    else:
        sys.stdout.write(text)


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.WARNING - 10 * min(args.verbose, 2), format="%(levelname)s %(name)s: %(message)s")
    try:
        cfg = resolve(args)
        if args.command == "show-config":
            _emit(config_text(cfg), cfg.out)
            return 0
        if args.plot_script and not cfg.out:
            raise ConfigError("--plot-script needs --out so the script can find the CSV")
        summary = None
        if args.command == "head":
            text = cmd_head(cfg)
        elif args.command == "flux":
            text = cmd_flux(cfg)
        elif args.command == "roots":
            text = cmd_roots(cfg)
        elif args.command == "compare":
            text, summary = cmd_compare(cfg)
        elif args.command == "converge":
            text = cmd_converge(cfg)
        else:
            text = cmd_identities(cfg)
        _emit(text, cfg.out)
        if summary is not None:
            print(summary, file=sys.stderr if cfg.out is None else sys.stdout)
        if args.plot_script:
            Path(args.plot_script).write_text(plot_script(args.command, cfg.out), encoding="utf-8")
    except (ValueError, ArithmeticError, RuntimeError, OSError, configparser.Error) as exc:
        print(f"dpflow: error: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
