"""Run configuration: a flat JSON document, overridable from the command line.

Precedence, lowest first: built-in defaults, the ``--config`` file, flags.
``power`` is read in dB unless ``power_unit`` is ``"linear"``; in dB it is
P/N0 before the source/relay split, so the source link sees ``eta * P``.
"""

from __future__ import annotations

import dataclasses
import json
import math
from dataclasses import dataclass, field
from pathlib import Path

from .errors import ConfigError, DomainError
from .fbl import Mode
from .outage import RelaySystem, Scheme, SrdBlocklength


def db_to_linear(x_db: float) -> float:
    return 10.0 ** (x_db / 10.0)


def linear_to_db(x: float) -> float:
    return 10.0 * math.log10(x)


@dataclass
class RunConfig:
    schemes: list = field(default_factory=lambda: ["DT", "SC", "MRC"])
    m: list = field(default_factory=lambda: [1.0, 2.0])
    m_sr: float | None = None
    m_rd: float | None = None
    power: float = 10.0
    power_unit: str = "dB"
    eta: float = 0.5
    eta_by_scheme: dict = field(default_factory=dict)
    n_s: int = 500
    n_r: int = 500
    k: float = 250.0
    noise: float = 1.0
    beta: float = 0.5
    mode: str = "consistent"
    srd_blocklength: str = "total"
    mc_samples: int = 0
    seed: int = 1
    format: str = "csv"
    out: str | None = None
    # outage-vs-n
    n_min: int = 200
    n_max: int = 2000
    n_step: int = 100
    # outage-vs-power
    p_min_db: float = 0.0
    p_max_db: float = 20.0
    p_step_db: float = 1.0
    # contour
    n_grid: list = field(default_factory=lambda: list(range(100, 1001, 50)))
    k_grid: list = field(default_factory=lambda: list(range(10, 301, 10)))
    # eta-sweep
    eta_step: float = 0.01
    eta_n_values: list = field(default_factory=lambda: [200, 500, 1000])
    # delay-opt
    targets: list = field(default_factory=lambda: [1e-3, 1e-4])
    symbol_time: float = 8.33e-6
    equal_split: bool = False
    # validate
    timings: bool = False

    @classmethod
    def from_mapping(cls, data: dict, source: str = "<config>") -> "RunConfig":
        cfg = cls()
        cfg.update(data, source)
        return cfg

    @classmethod
    def from_file(cls, path: str) -> "RunConfig":
        text = Path(path).read_text()
        try:
            data = json.loads(text)
        except json.JSONDecodeError as exc:
            raise ConfigError(f"{path}:{exc.lineno}:{exc.colno}: {exc.msg}") from None
        if not isinstance(data, dict):
            raise ConfigError(f"{path}: top level must be a JSON object")
        return cls.from_mapping(data, path)

    def update(self, data: dict, source: str = "<config>") -> None:
        known = {f.name for f in dataclasses.fields(self)}
        for key, value in data.items():
            if key not in known:
                raise ConfigError(f"{source}: unknown key {key!r}")
            setattr(self, key, _coerce(key, value, source))
        self.check(source)

    def check(self, source: str = "<config>") -> None:
        try:
            self.schemes = [Scheme.parse(s).value for s in self.schemes]
            Mode.parse(self.mode)
            SrdBlocklength(self.srd_blocklength)
            self.eta_by_scheme = {Scheme.parse(s).value: float(v) for s, v in self.eta_by_scheme.items()}
            if self.power_unit not in ("dB", "linear"):
                raise ConfigError(f"power_unit must be 'dB' or 'linear', got {self.power_unit!r}")
            if self.format not in ("csv", "json"):
                raise ConfigError(f"format must be 'csv' or 'json', got {self.format!r}")
            if not self.m:
                raise ConfigError("m must list at least one fading figure")
            if self.mc_samples < 0:
                raise ConfigError("mc_samples must be >= 0")
            for m in self.m:
                self.system(m)
        except ConfigError as exc:
            raise ConfigError(f"{source}: {exc}") from None
        except (DomainError, ValueError) as exc:
            raise ConfigError(f"{source}: {exc}") from None

    @property
    def power_linear(self) -> float:
        return db_to_linear(self.power) if self.power_unit == "dB" else self.power

    def eta_for(self, scheme) -> float:
        return self.eta_by_scheme.get(Scheme.parse(scheme).value, self.eta)

    def system(self, m: float, **overrides) -> RelaySystem:
        kw = dict(
            total_power=self.power_linear,
            eta=self.eta,
            n_s=self.n_s,
            n_r=self.n_r,
            k=self.k,
            m_sd=m,
            m_sr=self.m_sr if self.m_sr is not None else m,
            m_rd=self.m_rd if self.m_rd is not None else m,
            noise=self.noise,
            beta=self.beta,
            mode=Mode.parse(self.mode),
            srd_blocklength=SrdBlocklength(self.srd_blocklength),
        )
        kw.update(overrides)
        return RelaySystem(**kw)


_FLOAT_KEYS = {
    "m_sr", "m_rd", "power", "eta", "k", "noise", "beta", "p_min_db", "p_max_db",
    "p_step_db", "eta_step", "symbol_time",
}
_INT_KEYS = {"n_s", "n_r", "mc_samples", "seed", "n_min", "n_max", "n_step"}
_BOOL_KEYS = {"equal_split", "timings"}
_LIST_KEYS = {"schemes": str, "m": float, "n_grid": int, "k_grid": float,
              "eta_n_values": int, "targets": float}


def _coerce(key, value, source):
    where = f"{source}: field {key!r}"
    try:
        if value is None and key in ("m_sr", "m_rd", "out"):
            return None
        if key in _FLOAT_KEYS:
            if isinstance(value, bool):
                raise TypeError
            return float(value)
        if key in _INT_KEYS:
            if isinstance(value, bool) or (isinstance(value, float) and not value.is_integer()):
                raise TypeError
            return int(value)
        if key in _BOOL_KEYS:
            if not isinstance(value, bool):
                raise TypeError
            return value
        if key in _LIST_KEYS:
            if isinstance(value, str) and key == "schemes":
                value = [v for v in value.split(",") if v]
            if not isinstance(value, (list, tuple)):
                raise TypeError
            return [_LIST_KEYS[key](v) for v in value]
        if key == "eta_by_scheme":
            if not isinstance(value, dict):
                raise TypeError
            return dict(value)
        return str(value)
    except (TypeError, ValueError):
        raise ConfigError(f"{where}: invalid value {value!r}") from None
