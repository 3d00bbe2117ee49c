"""Run configuration: sectioned TOML in, validated dataclasses out."""

from __future__ import annotations

import hashlib
from dataclasses import asdict, dataclass, field, fields
from pathlib import Path

import tomli
import tomli_w

from .criterion import CriterionParams, DomainError, delta_max
from .grid import BoxSpec
from .solver import INIT_KINDS, InitSpec, SolverConfig


class ConfigError(ValueError):
    pass


@dataclass(frozen=True)
class GridSection:
    n: int = 32


@dataclass(frozen=True)
class SolverSection:
    nu: float = 0.1
    dt: float = 0.005
    t_end: float = 1.0
    output_every: int = 10
    seed: int = 0


@dataclass(frozen=True)
class CriterionSection:
    s: float = 0.75
    q: float = 12.0
    delta: float = 0.05
    eta: float = 0.01
    c0: float = 1.0
    c_fit: float = 1.0


@dataclass(frozen=True)
class InitSection:
    kind: str = "taylor_green"
    amplitude: float = 0.01
    spectrum_slope: float = -5.0 / 3.0
    peak_k: int = 4


@dataclass(frozen=True)
class OutputSection:
    directory: str = "run"
    emit_spectra: bool = True
    emit_structure: bool = False
    structure_orders: tuple = (2.0, 3.0, 4.0)
    structure_max_r: int = 8
    checkpoint_every: int = 0


_SECTIONS = {
    "grid": GridSection,
    "solver": SolverSection,
    "criterion": CriterionSection,
    "init": InitSection,
    "outputs": OutputSection,
}


@dataclass(frozen=True)
class RunConfig:
    grid: GridSection = field(default_factory=GridSection)
    solver: SolverSection = field(default_factory=SolverSection)
    criterion: CriterionSection = field(default_factory=CriterionSection)
    init: InitSection = field(default_factory=InitSection)
    outputs: OutputSection = field(default_factory=OutputSection)

    def validate(self) -> None:
        try:
            BoxSpec(self.grid.n)
            self.solver_config()
            self.init_spec()
            c = self.criterion
            d0 = delta_max(c.s, c.q)
            if not 0 < c.delta < d0:
                raise ConfigError(
                    f"criterion.delta = {c.delta} violates the regularity-criterion constraint "
                    f"delta in (0, delta_0), delta_0 = min((q-3)/(6q), (2s-1)/(4s)) = {d0:.6g}"
                )
            self.criterion_params()
            if c.c0 <= 0 or c.c_fit <= 0:
                raise ConfigError("criterion.c0 and criterion.c_fit must be positive")
            if self.init.kind not in INIT_KINDS:
                raise ConfigError(f"init.kind must be one of {INIT_KINDS}")
            o = self.outputs
            if o.checkpoint_every < 0:
                raise ConfigError("outputs.checkpoint_every must be >= 0")
            if not 1 <= o.structure_max_r < self.grid.n / 2:
                raise ConfigError("outputs.structure_max_r must lie in [1, n/2)")
        except ConfigError:
            raise
        except (ValueError, DomainError) as exc:
            raise ConfigError(str(exc)) from None

    def solver_config(self) -> SolverConfig:
        s = self.solver
        return SolverConfig(nu=s.nu, dt=s.dt, t_end=s.t_end, output_every=s.output_every, seed=s.seed)

    def init_spec(self) -> InitSpec:
        i = self.init
        return InitSpec(i.kind, i.amplitude, i.spectrum_slope, i.peak_k, seed=self.solver.seed)

    def criterion_params(self) -> CriterionParams:
        c = self.criterion
        return CriterionParams(c.s, c.q, c.delta, c.eta, self.solver.nu)

    def to_dict(self) -> dict:
        out = {}
        for name in _SECTIONS:
            d = asdict(getattr(self, name))
            out[name] = {k: list(v) if isinstance(v, tuple) else v for k, v in d.items()}
        return out

    def dumps(self) -> str:
        return tomli_w.dumps(self.to_dict())

    def digest(self) -> str:
        return hashlib.sha256(self.dumps().encode()).hexdigest()


def from_dict(data: dict) -> RunConfig:
    unknown = set(data) - set(_SECTIONS)
    if unknown:
        raise ConfigError(f"unknown config sections: {sorted(unknown)}")
    kwargs = {}
    for name, cls in _SECTIONS.items():
        raw = dict(data.get(name, {}))
        allowed = {f.name: f for f in fields(cls)}
        extra = set(raw) - set(allowed)
        if extra:
            raise ConfigError(f"unknown keys in [{name}]: {sorted(extra)}")
        for key, value in list(raw.items()):
            default = allowed[key].default
            if isinstance(default, tuple):
                raw[key] = tuple(float(v) for v in value)
            elif isinstance(default, bool):
                raw[key] = bool(value)
            elif isinstance(default, int):
                if isinstance(value, float) and not value.is_integer():
                    raise ConfigError(f"[{name}].{key} must be an integer")
                raw[key] = int(value)
            elif isinstance(default, float):
                raw[key] = float(value)
        kwargs[name] = cls(**raw)
    cfg = RunConfig(**kwargs)
    cfg.validate()
    return cfg


def loads(text: str) -> RunConfig:
    try:
        data = tomli.loads(text)
    except tomli.TOMLDecodeError as exc:
        raise ConfigError(f"config parse error: {exc}") from None
    return from_dict(data)


def load(path: str | Path) -> RunConfig:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from None
    return loads(text)


def bundled_config_path(name: str = "small_data_tg.toml") -> Path:
    return Path(__file__).parent / "data" / name
