"""Command-line interface: ``twoatom couplings|figure|evolve``.

Exit codes: 0 success, 1 usage or input error, 2 numerical invariant violated.

Option values are resolved as command-line flag, then ``--config`` file, then
built-in default.
"""
import argparse
import logging
import math
import sys

from .couplings import CAPTION_COUPLINGS, CAPTION_SHIFT_FACTOR, AtomPairConfig, compute_couplings
from .dynamics import ENGINES, NumericalInvariantError, SystemParams
from .scenario import (
    FIGURE_ANGLE,
    FIGURE_PRESETS,
    FIGURE_SEPARATION,
    NAMED_STATES,
    ConfigError,
    CouplingsMode,
    ScenarioSpec,
    figure_preset,
    load_state_file,
    parse_config,
    run_scenario,
    write_csv,
)

EXIT_OK, EXIT_USAGE, EXIT_INVARIANT = 0, 1, 2

# key -> (converter, default)
_OPTIONS = {
    "r12": (float, FIGURE_SEPARATION),
    "angle": (float, math.degrees(FIGURE_ANGLE)),
    "delta": (float, 0.0),
    "omega0": (float, 0.0),
    "t_end": (float, 8.0),
    "dt": (float, 1e-3),
    "stride": (int, 10),
    "engine": (str, "collective"),
    "init": (str, "e1g2"),
    "out": (str, None),
    "gamma12_override": (float, None),
    "omega12_override": (float, None),
    "caption_couplings": (None, None),  # default depends on the subcommand
}


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        raise UsageError(f"{self.prog}: error: {message}")


def _bool(text):
    v = str(text).strip().lower()
    if v in ("1", "true", "yes", "on"):
        return True
    if v in ("0", "false", "no", "off"):
        return False
    raise ValueError(f"not a boolean: {text!r}")


def _common(p, with_caption):
    p.add_argument("--config", help="key = value file; keys mirror the long flags")
    p.add_argument("--r12", type=float, help="separation in wavelengths")
    p.add_argument("--angle", type=float, help="dipole angle to the axis, degrees")
    if with_caption:
        p.add_argument("--dt", type=float, help="RK4 step in units of 1/gamma")
        p.add_argument("--stride", type=int, help="keep every n-th step")
        p.add_argument("--engine", choices=ENGINES)
        p.add_argument("--out", help="CSV output path")
        p.add_argument("--omega0", type=float, help="mean transition frequency")
        p.add_argument("--gamma12-override", type=float)
        p.add_argument("--omega12-override", type=float)
        g = p.add_mutually_exclusive_group()
        g.add_argument("--caption-couplings", dest="caption_couplings", action="store_const", const=True)
        g.add_argument("--no-caption-couplings", dest="caption_couplings", action="store_const", const=False)


def build_parser():
    parser = _Parser(prog="twoatom", description="Two-atom collective emission and entanglement.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("couplings", help="print gamma12 and omega12 for a geometry")
    _common(p, with_caption=False)

    p = sub.add_parser("figure", help="write the CSV for one figure preset")
    p.add_argument("number", type=int, choices=sorted(FIGURE_PRESETS))
    _common(p, with_caption=True)

    p = sub.add_parser("evolve", help="run a custom scenario")
    p.add_argument("--init", help=f"one of {', '.join(NAMED_STATES)} or a state file")
    p.add_argument("--delta", type=float, help="half detuning (omega2 - omega1)/2, units of gamma")
    p.add_argument("--t-end", type=float, help="final time in units of 1/gamma")
    _common(p, with_caption=True)
    return parser


def _resolve(args, keys):
    """Merge flags over config values over defaults."""
    cfg = {}
    if getattr(args, "config", None):
        try:
            with open(args.config, encoding="utf-8") as fh:
                text = fh.read()
        except OSError as exc:
            raise UsageError(f"cannot read config {args.config}: {exc.strerror}") from None
        try:
            cfg = parse_config(text, allowed=set(keys))
        except ConfigError as exc:
            raise UsageError(f"{args.config}: {exc}") from None
    out = {}
    for key in keys:
        conv, default = _OPTIONS[key]
        flag = getattr(args, key, None)
        if flag is not None:
            out[key] = flag
        elif key in cfg:
            try:
                out[key] = (_bool if key == "caption_couplings" else conv)(cfg[key])
            except ValueError:
                raise UsageError(f"config key {key!r}: bad value {cfg[key]!r}") from None
        else:
            out[key] = default
    if "engine" in out and out["engine"] not in ENGINES:
        raise UsageError(f"engine must be one of {ENGINES}")
    return out


def _cmd_couplings(args):
    o = _resolve(args, ("r12", "angle"))
    cfg = AtomPairConfig(o["r12"], math.radians(o["angle"]))
    c = compute_couplings(cfg)
    print(f"r12 = {o['r12']:g} lambda, angle = {o['angle']:g} deg (k r12 = {cfg.kr:.6g})")
    print(f"gamma12 = {c.gamma12:.4f} gamma")
    print(f"omega12 (shift formula) = {c.omega12:.4f} gamma")
    print(f"omega12 (caption convention, x{CAPTION_SHIFT_FACTOR:g}) = "
          f"{CAPTION_SHIFT_FACTOR * c.omega12:.4f} gamma")
    return EXIT_OK


_RUN_KEYS = ("r12", "angle", "dt", "stride", "engine", "out", "omega0",
             "gamma12_override", "omega12_override", "caption_couplings")


def _system_params(o, delta):
    g12_o, w12_o = o["gamma12_override"], o["omega12_override"]
    if o["caption_couplings"]:
        base = CAPTION_COUPLINGS
        mode = CouplingsMode.CAPTION
    else:
        base = compute_couplings(AtomPairConfig(o["r12"], math.radians(o["angle"])))
        mode = CouplingsMode.COMPUTED
    if g12_o is not None or w12_o is not None:
        mode = CouplingsMode.CUSTOM
    g12 = base.gamma12 if g12_o is None else g12_o
    w12 = base.omega12 if w12_o is None else w12_o
    params = SystemParams(g12, w12, delta=delta, omega0=o["omega0"],
                          dicke=g12_o is not None and abs(g12) >= 1.0)
    return params, mode


def _run(spec, out):
    if out is None:
        raise UsageError("--out is required (flag or config key 'out')")
    traj = run_scenario(spec)
    write_csv(traj, out)
    c = traj.derived["concurrence"]
    print(f"wrote {len(traj)} rows to {out} (max concurrence {c.max():.6g})")
    return EXIT_OK


def _cmd_figure(args):
    o = _resolve(args, _RUN_KEYS)
    if o["caption_couplings"] is None:
        o["caption_couplings"] = True
    pre = FIGURE_PRESETS[args.number]
    base = figure_preset(args.number, engine=o["engine"], dt=o["dt"], stride=o["stride"])
    params, mode = _system_params(o, pre.delta)
    spec = ScenarioSpec(base.initial_state, params, mode, base.t_end, o["dt"], o["stride"],
                        o["engine"], base.label)
    return _run(spec, o["out"])


def _cmd_evolve(args):
    o = _resolve(args, _RUN_KEYS + ("init", "delta", "t_end"))
    if o["caption_couplings"] is None:
        o["caption_couplings"] = False
    init = o["init"] if o["init"] in NAMED_STATES else load_state_file(o["init"])
    params, mode = _system_params(o, o["delta"])
    spec = ScenarioSpec(init, params, mode, o["t_end"], o["dt"], o["stride"], o["engine"], "evolve")
    return _run(spec, o["out"])


_COMMANDS = {"couplings": _cmd_couplings, "figure": _cmd_figure, "evolve": _cmd_evolve}


def main(argv=None):
    logging.basicConfig(level=logging.WARNING, format="%(levelname)s %(name)s: %(message)s")
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        return _COMMANDS[args.command](args)
    except UsageError as exc:
        print(exc, file=sys.stderr)
        return EXIT_USAGE
    except NumericalInvariantError as exc:
        print(f"numerical invariant violated: {exc}", file=sys.stderr)
        return EXIT_INVARIANT
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
