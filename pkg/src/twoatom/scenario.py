"""Named experiment presets, observable extraction and CSV output."""
import enum
import math
from dataclasses import dataclass, field

import numpy as np

from .couplings import CAPTION_COUPLINGS, AtomPairConfig, compute_couplings
from .dynamics import DEFAULT_DT, SystemParams, integrate
from .entanglement import measures
from .hilbert import A, E, G, S, BasisTag, DensityMatrix, parse_complex, pure_state_density

__all__ = [
    "CouplingsMode",
    "ScenarioSpec",
    "NAMED_STATES",
    "FIGURE_PRESETS",
    "CSV_COLUMNS",
    "initial_state",
    "load_state_file",
    "figure_preset",
    "run_scenario",
    "write_csv",
    "format_csv",
    "parse_config",
    "ConfigError",
]

FIGURE_SEPARATION = 1.0 / 6.0  # in wavelengths
FIGURE_ANGLE = math.pi / 2  # dipoles perpendicular to the axis
DEFAULT_STRIDE = 10

CSV_COLUMNS = (
    "gamma_t",
    "concurrence",
    "negativity",
    "rho_ee",
    "rho_ss",
    "rho_aa",
    "rho_gg",
    "re_rho_as",
    "im_rho_as",
    "s_squared",
)

# name -> (amplitudes, basis)
NAMED_STATES = {
    "e1g2": ((0, 1, 0, 0), BasisTag.PRODUCT),
    "g1e2": ((0, 0, 1, 0), BasisTag.PRODUCT),
    "e1e2": ((1, 0, 0, 0), BasisTag.PRODUCT),
    "sym": ((0, 1, 0, 0), BasisTag.COLLECTIVE),
    "antisym": ((0, 0, 1, 0), BasisTag.COLLECTIVE),
}


class CouplingsMode(enum.Enum):
    COMPUTED = "computed"
    CAPTION = "caption-override"
    CUSTOM = "custom-override"


@dataclass(frozen=True)
class FigurePreset:
    init: str
    delta: float
    t_end: float


FIGURE_PRESETS = {
    1: FigurePreset("e1g2", 0.0, 8.0),
    2: FigurePreset("e1e2", 0.0, 12.0),
    3: FigurePreset("e1g2", 1.0, 8.0),
    4: FigurePreset("g1e2", 1.0, 8.0),
    5: FigurePreset("sym", 1.0, 8.0),
    6: FigurePreset("antisym", 1.0, 8.0),
}


def initial_state(name):
    try:
        amps, basis = NAMED_STATES[name]
    except KeyError:
        raise ValueError(
            f"unknown initial state {name!r}; expected one of {sorted(NAMED_STATES)}"
        ) from None
    return pure_state_density(amps, basis)


def load_state_file(path):
    """Read an initial state from a text file.

    The first non-comment line is ``basis: product|collective``. It is followed
    either by a single row of four complex amplitudes or by four rows of a
    density matrix (entries written as ``a+bi``).
    """
    try:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise ValueError(f"cannot read state file {path}: {exc.strerror}") from None
    rows = [ln.split("#", 1)[0].strip() for ln in text.splitlines()]
    rows = [ln for ln in rows if ln]
    if len(rows) == 2:
        if not rows[0].lower().startswith("basis:"):
            raise ValueError(f"{path}: first line must be 'basis: <tag>'")
        basis = BasisTag.parse(rows[0].split(":", 1)[1])
        amps = [parse_complex(tok) for tok in rows[1].split()]
        return pure_state_density(amps, basis)
    try:
        return DensityMatrix.from_text(text)
    except ValueError as exc:
        raise ValueError(f"{path}: {exc}") from None


@dataclass(frozen=True)
class ScenarioSpec:
    """Everything needed to reproduce one trajectory.

    `initial_state` is one of the names in ``NAMED_STATES`` or an explicit
    ``DensityMatrix`` (a custom state).
    """

    initial_state: object
    params: SystemParams
    couplings_mode: CouplingsMode = CouplingsMode.CAPTION
    t_end: float = 8.0
    dt: float = DEFAULT_DT
    stride: int = DEFAULT_STRIDE
    engine: str = "collective"
    label: str = field(default="", compare=False)

    def __post_init__(self):
        if isinstance(self.initial_state, str):
            initial_state(self.initial_state)  # validates the name
        elif not isinstance(self.initial_state, DensityMatrix):
            raise TypeError("initial_state must be a state name or a DensityMatrix")
        object.__setattr__(self, "couplings_mode", CouplingsMode(self.couplings_mode))

    @property
    def rho0(self):
        if isinstance(self.initial_state, DensityMatrix):
            return self.initial_state
        return initial_state(self.initial_state)


def figure_params(delta, caption_couplings=True, gamma12=None, omega12=None):
    """SystemParams for the figure geometry (r12 = lambda/6, perpendicular dipoles)."""
    if caption_couplings:
        c = CAPTION_COUPLINGS
    else:
        c = compute_couplings(AtomPairConfig(FIGURE_SEPARATION, FIGURE_ANGLE))
    g12 = c.gamma12 if gamma12 is None else float(gamma12)
    w12 = c.omega12 if omega12 is None else float(omega12)
    return SystemParams(g12, w12, delta=delta, dicke=gamma12 is not None and g12 >= 1.0)


def figure_preset(number, caption_couplings=True, engine="collective", dt=DEFAULT_DT,
                  stride=DEFAULT_STRIDE, gamma12=None, omega12=None):
    """ScenarioSpec reproducing figure `number` (1..6)."""
    try:
        pre = FIGURE_PRESETS[int(number)]
    except (KeyError, ValueError):
        raise ValueError(f"figure must be one of {sorted(FIGURE_PRESETS)}, got {number!r}") from None
    params = figure_params(pre.delta, caption_couplings, gamma12, omega12)
    if gamma12 is not None or omega12 is not None:
        mode = CouplingsMode.CUSTOM
    else:
        mode = CouplingsMode.CAPTION if caption_couplings else CouplingsMode.COMPUTED
    return ScenarioSpec(pre.init, params, mode, pre.t_end, dt, stride, engine, f"figure-{number}")


def observables(traj):
    """Per-time observable columns (keyed by ``CSV_COLUMNS``) for a trajectory."""
    coll = traj.collective()
    prod = traj.product()
    n = len(traj)
    conc = np.empty(n)
    neg = np.empty(n)
    for i in range(n):
        m = measures(DensityMatrix(prod[i], BasisTag.PRODUCT))
        conc[i], neg[i] = m.concurrence, m.negativity
    rho_as = coll[:, A, S]
    aa = coll[:, A, A].real
    return {
        "gamma_t": traj.times * traj.params.gamma,
        "concurrence": conc,
        "negativity": neg,
        "rho_ee": coll[:, E, E].real,
        "rho_ss": coll[:, S, S].real,
        "rho_aa": aa,
        "rho_gg": coll[:, G, G].real,
        "re_rho_as": rho_as.real,
        "im_rho_as": rho_as.imag,
        "s_squared": 2.0 - 2.0 * aa,
    }


def run_scenario(spec):
    """Integrate `spec` and fill ``traj.derived`` with the observable columns."""
    traj = integrate(
        spec.rho0,
        spec.params,
        spec.t_end,
        dt=spec.dt,
        engine=spec.engine,
        stride=spec.stride,
        basis=BasisTag.COLLECTIVE,
    )
    traj.derived.update(observables(traj))
    return traj


def _fmt(x):
    s = f"{x:.12g}"
    return "0" if s == "-0" else s


def format_csv(traj):
    """CSV text for a trajectory whose ``derived`` columns are filled."""
    missing = [c for c in CSV_COLUMNS if c not in traj.derived]
    if missing:
        raise ValueError(f"trajectory lacks derived columns {missing}; use run_scenario")
    cols = [np.asarray(traj.derived[c], dtype=float) for c in CSV_COLUMNS]
    lines = [",".join(CSV_COLUMNS)]
    for row in zip(*cols):
        lines.append(",".join(_fmt(v) for v in row))
    return "\n".join(lines) + "\n"


def write_csv(traj, path):
    text = format_csv(traj)
    try:
        with open(path, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    except OSError as exc:
        raise OSError(exc.errno, f"cannot write CSV to {path}: {exc.strerror}") from None


# ---------------------------------------------------------------------------
# config files
# ---------------------------------------------------------------------------


class ConfigError(ValueError):
    pass


def parse_config(text, allowed=None):
    """Parse ``key = value`` lines; ``#`` starts a comment.

    Keys are normalized to underscores (``t-end`` and ``t_end`` are the same
    key). With `allowed`, unknown keys are rejected.
    """
    out = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        key, sep, value = line.partition("=")
        key = key.strip().lower().replace("-", "_")
        value = value.strip()
        if not sep or not key or not value:
            raise ConfigError(f"line {lineno}: expected 'key = value', got {raw.strip()!r}")
        if allowed is not None and key not in allowed:
            raise ConfigError(f"line {lineno}: unknown key {key!r}")
        if key in out:
            raise ConfigError(f"line {lineno}: duplicate key {key!r}")
        out[key] = value
    return out
