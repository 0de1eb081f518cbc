"""Experiment configuration and its INI file format.

File grammar (parsed with :mod:`configparser`, ``#`` and ``;`` start comments)::

    [experiment]
    name = fig2                   # output file stem
    kind = srp                    # srp | norm-cdf
    trials = 1000
    base_seed = 0
    delta = 0.001
    workers = 1
    output_dir = .

    [matrix]
    source = designed             # designed | gaussian | path to a matrix file
    M = 100
    N = 200
    seed = 0

    [signal]
    model = equal                 # equal | dynamic
    L = 4
    d = 4
    c_min = 2
    c_max =                       # dynamic model only
    c_m =                         # if set, c_min = sqrt(d * c_m) at every point

    [noise]
    model = bounded               # bounded | gaussian | none
    epsilon = 1
    sigma =

    [sweep]
    axis = epsilon                # epsilon | sigma | c_min | L | d | M | ratio
    grid = 0.05:1.0:0.05          # start:stop:step (inclusive) or a comma list
    axis2 =                       # second axis, 2-D mode only
    grid2 =

    [algorithms]
    run = somps, sompt
    tau_rule = auto               # auto | epsilon | tw | chernoff | explicit
    tau =                         # explicit rule only

Every section and key is optional (defaults as above). Unknown sections or keys
are rejected so that typos fail loudly. Empty values mean "unset".
"""

import configparser
import dataclasses
import hashlib
import io
import math
from dataclasses import dataclass, field

import numpy as np

from ..errors import ConfigError

AXES = ("epsilon", "sigma", "c_min", "L", "d", "M", "ratio")
INT_AXES = ("L", "d", "M")
ALGORITHMS = ("somps", "sompt")
TAU_RULES = ("auto", "epsilon", "tw", "chernoff", "explicit")


@dataclass(frozen=True)
class ExperimentConfig:
    name: str = "experiment"
    kind: str = "srp"
    trials: int = 1000
    base_seed: int = 0
    delta: float = 1e-3
    workers: int = 1
    output_dir: str = "."
    matrix: str = "designed"
    M: int = 100
    N: int = 200
    matrix_seed: int = 0
    signal: str = "equal"
    L: int = 4
    d: int = 4
    c_min: float = 2.0
    c_max: float = None
    c_m: float = None
    noise: str = "bounded"
    epsilon: float = None
    sigma: float = None
    axis: str = "epsilon"
    grid: tuple = (1.0,)
    axis2: str = None
    grid2: tuple = ()
    algorithms: tuple = ALGORITHMS
    tau_rule: str = "auto"
    tau: float = None
    notes: tuple = field(default=(), compare=False)

    @property
    def is_2d(self):
        return self.axis2 is not None

    def validate(self):
        def bad(msg):
            raise ConfigError(msg)

        if self.kind not in ("srp", "norm-cdf"):
            bad(f"kind must be srp or norm-cdf, got {self.kind!r}")
        if self.trials < 1:
            bad("trials must be >= 1")
        if self.workers < 1:
            bad("workers must be >= 1")
        if not 0 < self.delta < 1:
            bad("delta must lie in (0, 1)")
        if not 1 <= self.M <= self.N:
            bad(f"need 1 <= M <= N, got M={self.M}, N={self.N}")
        if self.signal not in ("equal", "dynamic"):
            bad(f"signal model must be equal or dynamic, got {self.signal!r}")
        if self.signal == "dynamic" and self.c_max is None:
            bad("dynamic signal model needs c_max")
        if self.noise not in ("bounded", "gaussian", "none"):
            bad(f"noise model must be bounded, gaussian or none, got {self.noise!r}")
        for ax, grid in ((self.axis, self.grid), (self.axis2, self.grid2)):
            if ax is None:
                if grid:
                    bad("grid2 given without axis2")
                continue
            if ax not in AXES:
                bad(f"unknown sweep axis {ax!r}; choose from {', '.join(AXES)}")
            if len(grid) == 0:
                bad(f"grid for axis {ax!r} is empty")
            if any(not math.isfinite(v) for v in grid) or any(b <= a for a, b in zip(grid, grid[1:])):
                bad(f"grid for axis {ax!r} must be finite and strictly increasing")
            if ax in INT_AXES and any(v != int(v) or v < 1 for v in grid):
                bad(f"grid for axis {ax!r} must hold positive integers")
        if self.axis2 == self.axis:
            bad("axis2 must differ from axis")
        axes = {self.axis, self.axis2}
        if self.kind == "srp":
            if self.noise == "bounded" and self.epsilon is None and "epsilon" not in axes:
                bad("bounded noise needs epsilon (or an epsilon sweep)")
            if self.noise == "gaussian" and self.sigma is None and "sigma" not in axes:
                bad("gaussian noise needs sigma (or a sigma sweep)")
            if "epsilon" in axes and self.noise != "bounded":
                bad("an epsilon sweep needs bounded noise")
            if "sigma" in axes and self.noise != "gaussian":
                bad("a sigma sweep needs gaussian noise")
            if "ratio" in axes and self.signal != "dynamic":
                bad("a ratio sweep needs the dynamic signal model")
        if not self.algorithms or any(a not in ALGORITHMS for a in self.algorithms):
            bad(f"algorithms must be a nonempty subset of {ALGORITHMS}")
        if self.tau_rule not in TAU_RULES:
            bad(f"tau_rule must be one of {TAU_RULES}")
        if self.tau_rule == "explicit" and not (self.tau and self.tau > 0):
            bad("explicit tau_rule needs tau > 0")
        if self.tau_rule == "epsilon" and self.noise != "bounded":
            bad("tau_rule epsilon needs bounded noise")
        if self.tau_rule in ("tw", "chernoff") and self.noise != "gaussian":
            bad(f"tau_rule {self.tau_rule} needs gaussian noise")
        if "sompt" in self.algorithms and self.noise == "none" and self.tau_rule not in ("explicit",):
            bad("noiseless SOMPT runs need tau_rule = explicit")
        return self

    def replace(self, **changes):
        return dataclasses.replace(self, **changes).validate()


# INI mapping: (section, key, field name, parser)

def _num(text):
    return float(text)


def _int(text):
    v = float(text)
    if v != int(v):
        raise ValueError(f"{text!r} is not an integer")
    return int(v)


def parse_grid(text):
    """``start:stop:step`` (stop inclusive) or a comma-separated list."""
    text = text.strip()
    if ":" in text:
        parts = [float(p) for p in text.split(":")]
        if len(parts) != 3 or parts[2] <= 0:
            raise ValueError(f"range grid needs start:stop:step with step > 0, got {text!r}")
        start, stop, step = parts
        n = int(math.floor((stop - start) / step + 1e-9)) + 1
        return tuple(float(v) for v in np.round(start + step * np.arange(n), 12))
    return tuple(float(p) for p in text.split(",") if p.strip())


def _grid_text(grid):
    return ", ".join(format(v, ".17g") for v in grid)


def _names(text):
    return tuple(p.strip().lower() for p in text.split(",") if p.strip())


_SCHEMA = (
    ("experiment", "name", "name", str),
    ("experiment", "kind", "kind", str),
    ("experiment", "trials", "trials", _int),
    ("experiment", "base_seed", "base_seed", _int),
    ("experiment", "delta", "delta", _num),
    ("experiment", "workers", "workers", _int),
    ("experiment", "output_dir", "output_dir", str),
    ("matrix", "source", "matrix", str),
    ("matrix", "m", "M", _int),
    ("matrix", "n", "N", _int),
    ("matrix", "seed", "matrix_seed", _int),
    ("signal", "model", "signal", str),
    ("signal", "l", "L", _int),
    ("signal", "d", "d", _int),
    ("signal", "c_min", "c_min", _num),
    ("signal", "c_max", "c_max", _num),
    ("signal", "c_m", "c_m", _num),
    ("noise", "model", "noise", str),
    ("noise", "epsilon", "epsilon", _num),
    ("noise", "sigma", "sigma", _num),
    ("sweep", "axis", "axis", str),
    ("sweep", "grid", "grid", parse_grid),
    ("sweep", "axis2", "axis2", str),
    ("sweep", "grid2", "grid2", parse_grid),
    ("algorithms", "run", "algorithms", _names),
    ("algorithms", "tau_rule", "tau_rule", str),
    ("algorithms", "tau", "tau", _num),
)


def _int_grid_if_needed(values, axis):
    if axis in INT_AXES:
        return tuple(int(v) for v in values)
    return values


def config_from_text(text, base=None):
    """Parse INI text on top of ``base`` (default: :class:`ExperimentConfig` defaults)."""
    cp = configparser.ConfigParser(inline_comment_prefixes=("#", ";"), interpolation=None)
    try:
        cp.read_string(text)
    except configparser.Error as exc:
        raise ConfigError(f"cannot parse config: {exc}") from exc
    known = {}
    for section, key, fname, parser in _SCHEMA:
        known.setdefault(section, {})[key] = (fname, parser)
    changes = {}
    for section in cp.sections():
        if section not in known:
            raise ConfigError(f"unknown section [{section}]")
        for key, raw in cp.items(section):
            if key not in known[section]:
                raise ConfigError(f"unknown key {key!r} in [{section}]")
            fname, parser = known[section][key]
            raw = raw.strip()
            if raw == "":
                changes[fname] = () if fname == "grid2" else None
                continue
            try:
                changes[fname] = parser(raw)
            except ValueError as exc:
                raise ConfigError(f"[{section}] {key} = {raw!r}: {exc}") from exc
    cfg = dataclasses.replace(base or ExperimentConfig(), **changes)
    cfg = dataclasses.replace(
        cfg, grid=_int_grid_if_needed(cfg.grid, cfg.axis), grid2=_int_grid_if_needed(cfg.grid2, cfg.axis2)
    )
    return cfg.validate()


def load_config(path, base=None):
    try:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc.strerror}") from exc
    return config_from_text(text, base)


def _fmt(v):
    if v is None:
        return ""
    if isinstance(v, float):
        return format(v, ".17g")
    if isinstance(v, tuple):
        if all(isinstance(x, str) for x in v):
            return ", ".join(v)
        return _grid_text(v)
    return str(v)


def config_to_text(cfg):
    """Fully resolved INI text; ``config_from_text(config_to_text(c)) == c``."""
    out = io.StringIO()
    current = None
    for section, key, fname, _ in _SCHEMA:
        if section != current:
            if current is not None:
                out.write("\n")
            out.write(f"[{section}]\n")
            current = section
        out.write(f"{key} = {_fmt(getattr(cfg, fname))}\n")
    return out.getvalue()


def config_hash(cfg):
    """Short digest of the settings that determine results (not workers or output_dir)."""
    neutral = dataclasses.replace(cfg, workers=1, output_dir=".")
    return hashlib.sha256(config_to_text(neutral).encode("utf-8")).hexdigest()[:16]
