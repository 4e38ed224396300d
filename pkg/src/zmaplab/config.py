"""Flat key=value run configuration with strict validation.

The config format is deliberately dependency-free: one ``key = value``
per line, ``#`` comment lines, blank lines ignored, dotted prefixes as
namespaces (``band.c_H = 0.5``).  Angle-valued keys additionally accept
the tokens ``pi`` and ``-pi``.  Unknown and duplicate keys are rejected
by name; range violations name the violated constraint.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import ParseError, ValidationError
from .geometry import SpinSpecies

__all__ = ["EXPERIMENTS", "RunConfig", "config_echo", "load_config", "parse_kv_text"]

EXPERIMENTS = ("spin-map", "spin-osc", "band-sweep", "bias-sweep")

_EXPERIMENT_ALIASES = {
    "spin-map": "spin-map", "spinmap": "spin-map",
    "spin-osc": "spin-osc", "spinosc": "spin-osc",
    "band-sweep": "band-sweep", "bandsweep": "band-sweep",
    "bias-sweep": "bias-sweep", "biassweep": "bias-sweep",
}

_METHODS = ("both", "closed-form", "diagonal-ensemble", "iterated")


def _parse_float(key: str, raw: str) -> float:
    tok = raw.strip().lower()
    if tok == "pi":
        return math.pi
    if tok == "-pi":
        return -math.pi
    try:
        return float(raw)
    except ValueError:
        raise ParseError(f"key {key!r}: cannot parse {raw!r} as a number") from None


def _parse_int(key: str, raw: str) -> int:
    try:
        return int(raw.strip(), 10)
    except ValueError:
        raise ParseError(f"key {key!r}: cannot parse {raw!r} as an integer") from None


def _parse_cycles(key: str, raw: str) -> float:
    tok = raw.strip().lower()
    if tok in ("inf", "infinity"):
        return math.inf
    n = _parse_int(key, raw)
    return float(n)


def _parse_float_list(key: str, raw: str) -> tuple[float, ...]:
    parts = [p for p in (s.strip() for s in raw.split(",")) if p]
    if not parts:
        raise ParseError(f"key {key!r}: expected a comma-separated list of numbers")
    return tuple(_parse_float(key, p) for p in parts)


@dataclass
class RunConfig:
    """Fully resolved settings for one run; every field has a default."""

    experiment: str = "spin-map"
    species: str = "half"
    channel: str = ""
    method: str = "both"
    n_cycles: float = math.nan  # resolved per experiment below
    workers: int = 1
    seed: int | None = None
    out_format: str = "csv"
    out_path: str | None = None
    # spin-map grid
    theta_min: float = 0.02
    theta_max: float = math.pi
    theta_points: int = 101
    phi_min: float = -math.pi
    phi_max: float = math.pi
    phi_points: int = 101
    # oscillation sweep
    f_min_hz: float = 2e6
    f_max_hz: float = 5e7
    f_points: int = 2000
    osc_theta_list: tuple[float, ...] = (1.0, 2.0, 3.0, 3.14)
    b_bar_t: float = 0.01
    f0_hz: float = 1e7
    # band model
    c_h_ev: float = 0.5
    eps0: float = -1.0
    a_ph: float = 0.3
    tau_ph_s: float = 1e-12
    k_points: int = 201
    steps: int = 200000
    # bias sweep
    eps0_min: float = -1.4
    eps0_max: float = -0.6
    eps0_points: int = 81

    @property
    def spin_species(self) -> SpinSpecies:
        return SpinSpecies(self.species)


# key -> (RunConfig field, parser, experiments the key affects)
_ALL = EXPERIMENTS
_SPIN = ("spin-map", "spin-osc")
_BANDISH = ("band-sweep", "bias-sweep")
_SCHEMA: dict[str, tuple[str, object, tuple[str, ...]]] = {
    "experiment": ("experiment", None, _ALL),
    "species": ("species", None, _SPIN),
    "channel": ("channel", None, _SPIN),
    "method": ("method", None, ("spin-map",)),
    "n_cycles": ("n_cycles", _parse_cycles, ("spin-map",) + _BANDISH),
    "workers": ("workers", _parse_int, _ALL),
    "seed": ("seed", _parse_int, _ALL),
    "output.format": ("out_format", None, _ALL),
    "output.path": ("out_path", None, _ALL),
    "map.theta_min": ("theta_min", _parse_float, ("spin-map",)),
    "map.theta_max": ("theta_max", _parse_float, ("spin-map",)),
    "map.theta_points": ("theta_points", _parse_int, ("spin-map",)),
    "map.phi_min": ("phi_min", _parse_float, ("spin-map",)),
    "map.phi_max": ("phi_max", _parse_float, ("spin-map",)),
    "map.phi_points": ("phi_points", _parse_int, ("spin-map",)),
    "osc.f_min_hz": ("f_min_hz", _parse_float, ("spin-osc",)),
    "osc.f_max_hz": ("f_max_hz", _parse_float, ("spin-osc",)),
    "osc.f_points": ("f_points", _parse_int, ("spin-osc",)),
    "osc.theta_list": ("osc_theta_list", _parse_float_list, ("spin-osc",)),
    "res.B_bar_T": ("b_bar_t", _parse_float, ("spin-osc",)),
    "res.f0_hz": ("f0_hz", _parse_float, ("spin-osc",)),
    "band.c_H": ("c_h_ev", _parse_float, _BANDISH),
    "band.eps0": ("eps0", _parse_float, ("band-sweep",)),
    "band.A_ph": ("a_ph", _parse_float, _BANDISH),
    "band.tau_ph_s": ("tau_ph_s", _parse_float, _BANDISH),
    "band.k_points": ("k_points", _parse_int, _BANDISH),
    "band.steps": ("steps", _parse_int, _BANDISH),
    "bias.eps0_min": ("eps0_min", _parse_float, ("bias-sweep",)),
    "bias.eps0_max": ("eps0_max", _parse_float, ("bias-sweep",)),
    "bias.eps0_points": ("eps0_points", _parse_int, ("bias-sweep",)),
}


def parse_kv_text(text: str) -> dict[str, str]:
    """Parse ``key = value`` lines into a raw string mapping.

    Raises
    ------
    ParseError
        On a malformed line, an empty key, or a duplicated key; the
        message carries the line number or key name.
    """
    out: dict[str, str] = {}
    for lineno, line in enumerate(text.splitlines(), start=1):
        stripped = line.strip()
        if not stripped or stripped.startswith("#"):
            continue
        if "=" not in stripped:
            raise ParseError(f"line {lineno}: expected 'key = value', got {stripped!r}")
        key, _, value = stripped.partition("=")
        key = key.strip()
        if not key:
            raise ParseError(f"line {lineno}: empty key")
        if key in out:
            raise ParseError(f"line {lineno}: duplicate key {key!r}")
        out[key] = value.strip()
    return out


def _require(cond: bool, message: str) -> None:
    if not cond:
        raise ValidationError(message)


def _resolve(raw: dict[str, str], experiment: str | None,
             overrides: dict[str, object]) -> RunConfig:
    cfg = RunConfig()
    for key, value in raw.items():
        if key not in _SCHEMA:
            raise ParseError(f"unknown key {key!r}")
        attr, parser, _ = _SCHEMA[key]
        setattr(cfg, attr, parser(key, value) if parser else value)
    for attr, value in overrides.items():
        if value is not None:
            setattr(cfg, attr, value)

    tok = _EXPERIMENT_ALIASES.get(str(cfg.experiment).strip().lower().replace("_", "-"))
    if tok is None:
        raise ValidationError(f"experiment must be one of {EXPERIMENTS}, got {cfg.experiment!r}")
    if experiment is not None:
        if "experiment" in raw and tok != experiment:
            raise ValidationError(
                f"config names experiment {tok!r} but the command line ran {experiment!r}"
            )
        tok = experiment
    cfg.experiment = tok

    cfg.species = str(cfg.species).strip().lower()
    _require(cfg.species in ("half", "one"), f"species must be 'half' or 'one', got {cfg.species!r}")
    species = cfg.spin_species
    if not str(cfg.channel).strip():
        cfg.channel = species.flip_level
    else:
        cfg.channel = str(cfg.channel).strip()
        _require(cfg.channel in species.levels,
                 f"channel must be one of {species.levels} for species {cfg.species!r}, "
                 f"got {cfg.channel!r}")

    cfg.method = str(cfg.method).strip().lower().replace("_", "-")
    _require(cfg.method in _METHODS, f"method must be one of {_METHODS}, got {cfg.method!r}")

    if math.isnan(cfg.n_cycles):
        cfg.n_cycles = 100.0 if cfg.experiment == "spin-map" else math.inf
    _require(cfg.n_cycles >= 1, "n_cycles must be at least 1")
    if cfg.experiment == "spin-map":
        _require(math.isfinite(cfg.n_cycles), "n_cycles must be finite for spin-map")

    _require(cfg.workers >= 1, "workers must be at least 1")
    cfg.out_format = str(cfg.out_format).strip().lower()
    _require(cfg.out_format in ("csv", "jsonl"),
             f"output.format must be 'csv' or 'jsonl', got {cfg.out_format!r}")

    _require(0.0 <= cfg.theta_min <= math.pi, "map.theta_min must lie in [0, pi]")
    _require(0.0 <= cfg.theta_max <= math.pi, "map.theta_max must lie in [0, pi]")
    _require(cfg.theta_min <= cfg.theta_max, "map.theta_min must not exceed map.theta_max")
    _require(cfg.phi_min <= cfg.phi_max, "map.phi_min must not exceed map.phi_max")
    for name in ("theta_points", "phi_points", "f_points", "k_points", "eps0_points"):
        _require(getattr(cfg, name) >= 1, f"{name} must be at least 1")

    _require(cfg.f_min_hz > 0 and cfg.f_max_hz > 0, "frequencies must be positive")
    _require(cfg.f_min_hz <= cfg.f_max_hz, "osc.f_min_hz must not exceed osc.f_max_hz")
    _require(cfg.b_bar_t > 0, "res.B_bar_T must be positive")
    _require(cfg.f0_hz > 0, "res.f0_hz must be positive")
    _require(all(0.0 <= t <= math.pi for t in cfg.osc_theta_list),
             "osc.theta_list entries must lie in [0, pi]")

    _require(cfg.c_h_ev > 0, "band.c_H must be positive")
    _require(cfg.a_ph >= 0, "band.A_ph must be nonnegative")
    _require(cfg.tau_ph_s > 0, "band.tau_ph_s must be positive")
    _require(cfg.steps >= 100, "band.steps must be at least 100")
    _require(cfg.eps0_min <= cfg.eps0_max, "bias.eps0_min must not exceed bias.eps0_max")
    return cfg


def load_config(path: str, experiment: str | None = None,
                overrides: dict[str, object] | None = None) -> RunConfig:
    """Read, parse, and validate a config file.

    ``experiment`` (from the CLI subcommand) overrides the file; a
    mismatch between the two is an error rather than a silent pick.
    ``overrides`` maps RunConfig field names to values from command-line
    flags; ``None`` values are ignored.
    """
    try:
        with open(path, "r", encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise ParseError(f"cannot read config file {path!r}: {exc}") from None
    return _resolve(parse_kv_text(text), experiment, overrides or {})


def config_echo(cfg: RunConfig) -> list[tuple[str, str]]:
    """Resolved ``(key, value)`` pairs that affect this run's output.

    Every schema key relevant to the experiment is echoed with its
    final value, defaults included, so an artifact records the complete
    computation inputs.  Worker count is excluded on purpose: it never
    changes the numbers, and artifacts must be byte-identical across
    worker counts.
    """
    skip = {"workers", "seed", "output.path"}
    if cfg.experiment != "spin-map":
        skip.add("method")
    out = [("experiment", cfg.experiment)]
    for key, (attr, _, experiments) in _SCHEMA.items():
        if key in skip or key == "experiment" or cfg.experiment not in experiments:
            continue
        value = getattr(cfg, attr)
        if key == "n_cycles":
            text = "inf" if math.isinf(value) else str(int(value))
        elif isinstance(value, tuple):
            text = ",".join(repr(v) for v in value)
        elif isinstance(value, float):
            text = repr(value)
        else:
            text = str(value)
        out.append((key, text))
    if cfg.seed is not None:
        out.append(("seed", str(cfg.seed)))
    return out
