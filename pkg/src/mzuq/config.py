"""Run configuration: `key = value` config files with command-line
overrides, validated into a RunConfig."""

from dataclasses import dataclass, fields

__all__ = ["ConfigError", "RunConfig", "MODES", "parse_config"]

MODES = ("full", "markovian", "memory", "adaptive", "mc")


class ConfigError(ValueError):
    """Invalid configuration; message names the offending key."""


@dataclass
class RunConfig:
    mode: str
    nu: float = 0.03
    n_modes: int = 196
    n_pc: int = 7
    lam: int = 2
    dt: float = 0.001
    t_end: float = 3.0
    t0: float = None
    n0: int = 1
    lambda_stat: int = 2
    alpha0: float = 1.0
    alpha1: float = 1.0
    warmup: int = 50
    confirm_window: int = 25
    stride: int = 1
    history_cap: int = 200_000
    out_stride: int = 10
    samples: int = 2000
    seed: int = 12345
    out: str = "mzuq"

    def validate(self):
        if self.mode not in MODES:
            raise ConfigError(f"mode must be one of {MODES}, got {self.mode!r}")
        if self.n_modes < 4 or self.n_modes % 2 != 0:
            raise ConfigError("n_modes must be an even integer >= 4")
        if self.n_pc < 2:
            raise ConfigError("n_pc must be >= 2")
        if not 1 <= self.lam <= self.n_pc:
            raise ConfigError(
                f"lambda must satisfy 1 <= lambda <= n_pc, got lambda={self.lam}, n_pc={self.n_pc}")
        if self.mode == "memory" and (self.t0 is None or self.t0 <= 0):
            raise ConfigError("mode=memory requires t0 > 0")
        if self.mode in ("memory", "adaptive") and self.lam >= self.n_pc:
            raise ConfigError(f"mode={self.mode} requires lambda < n_pc")
        if self.dt <= 0 or self.t_end < self.dt:
            raise ConfigError("need dt > 0 and t_end >= dt")
        if self.nu < 0:
            raise ConfigError("nu must be >= 0")
        if self.n0 < 1:
            raise ConfigError("n0 must be >= 1")
        if not 1 <= self.lambda_stat <= self.n_pc:
            raise ConfigError("lambda_stat must satisfy 1 <= lambda_stat <= n_pc")
        if min(self.warmup, self.confirm_window, self.stride, self.out_stride) < 1:
            raise ConfigError("warmup, confirm_window, stride, out_stride must be >= 1")
        if self.samples < 2:
            raise ConfigError("samples must be >= 2")
        return self


# config-file key -> (field name, parser)
def _bool(_):
    raise ConfigError("no boolean keys are defined")


_KEYMAP = {
    "mode": ("mode", str),
    "nu": ("nu", float),
    "n_modes": ("n_modes", int),
    "n_pc": ("n_pc", int),
    "lambda": ("lam", int),
    "dt": ("dt", float),
    "t_end": ("t_end", float),
    "t0": ("t0", float),
    "n0": ("n0", int),
    "lambda_stat": ("lambda_stat", int),
    "alpha0": ("alpha0", float),
    "alpha1": ("alpha1", float),
    "warmup": ("warmup", int),
    "confirm_window": ("confirm_window", int),
    "stride": ("stride", int),
    "history_cap": ("history_cap", int),
    "out_stride": ("out_stride", int),
    "samples": ("samples", int),
    "seed": ("seed", int),
    "out": ("out", str),
}


def _parse_file(path):
    values = {}
    with open(path) as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ConfigError(f"{path}:{lineno}: expected 'key = value', got {raw.strip()!r}")
            key, value = (part.strip() for part in line.split("=", 1))
            if key not in _KEYMAP:
                raise ConfigError(f"{path}:{lineno}: unknown key {key!r}")
            name, caster = _KEYMAP[key]
            try:
                values[name] = caster(value)
            except ValueError:
                raise ConfigError(
                    f"{path}:{lineno}: cannot parse {key} = {value!r} as {caster.__name__}")
    return values


def parse_config(path=None, overrides=None):
    """Build a validated RunConfig from an optional file plus overrides;
    overrides win over file values."""
    values = _parse_file(path) if path else {}
    for name, value in (overrides or {}).items():
        if value is not None:
            values[name] = value
    known = {f.name for f in fields(RunConfig)}
    unknown = set(values) - known
    if unknown:
        raise ConfigError(f"unknown config fields: {sorted(unknown)}")
    if "mode" not in values:
        raise ConfigError("missing required key 'mode'")
    return RunConfig(**values).validate()
