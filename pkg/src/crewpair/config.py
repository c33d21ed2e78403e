"""Plain-text ``key = value`` configuration with ``[rules] [cost] [ifs] [cg] [engine]`` sections."""

from __future__ import annotations

import configparser
import dataclasses
from dataclasses import dataclass, field
from pathlib import Path

from .errors import ConfigError
from .rules import CostModel, RuleSet


@dataclass(frozen=True)
class Config:
    rules: RuleSet = field(default_factory=RuleSet)
    cost: CostModel = field(default_factory=CostModel)
    ifs: "object" = None
    cg: "object" = None
    engine: "object" = None

    def __post_init__(self):
        # late imports keep rules/config free of solver dependencies
        from .colgen import CgConfig
        from .engine import EngineConfig
        from .ifs import IfsConfig
        if self.ifs is None:
            object.__setattr__(self, "ifs", IfsConfig())
        if self.cg is None:
            object.__setattr__(self, "cg", CgConfig())
        if self.engine is None:
            object.__setattr__(self, "engine", EngineConfig())

    def with_seed(self, seed: int) -> "Config":
        return dataclasses.replace(
            self,
            ifs=dataclasses.replace(self.ifs, seed=seed),
            cg=dataclasses.replace(self.cg, seed=seed),
            engine=dataclasses.replace(self.engine, seed=seed),
        )


def _coerce(raw: str, typ, where: str):
    typ = typ if isinstance(typ, str) else typ.__name__
    raw = raw.strip()
    if "None" in typ and raw.lower() in ("none", ""):
        return None
    try:
        if typ.startswith("bool"):
            low = raw.lower()
            if low in ("1", "true", "yes", "on"):
                return True
            if low in ("0", "false", "no", "off"):
                return False
            raise ValueError(raw)
        if typ.startswith("int"):
            return int(raw)
        if "float" in typ:
            return float(raw)
        if typ.startswith("str"):
            return raw
    except ValueError:
        raise ConfigError(f"{where}: cannot parse {raw!r} as {typ}") from None
    raise ConfigError(f"{where}: unsupported field type {typ}")


def _build(cls, items: dict[str, str], section: str):
    fields = {f.name: f for f in dataclasses.fields(cls) if not f.name.startswith("_")}
    kwargs = {}
    for key, raw in items.items():
        if key not in fields:
            raise ConfigError(f"[{section}] unknown key {key!r}")
        kwargs[key] = _coerce(raw, fields[key].type, f"[{section}] {key}")
    try:
        return cls(**kwargs)
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"[{section}] {exc}") from None


def parse_config(text: str, source: str = "<config>") -> Config:
    from .colgen import CgConfig
    from .engine import EngineConfig
    from .ifs import IfsConfig

    parser = configparser.ConfigParser(interpolation=None, delimiters=("=",),
                                       comment_prefixes=("#", ";"))
    parser.optionxform = str
    try:
        parser.read_string(text, source=source)
    except configparser.Error as exc:
        raise ConfigError(str(exc)) from None
    classes = {"rules": RuleSet, "cost": CostModel, "ifs": IfsConfig,
               "cg": CgConfig, "engine": EngineConfig}
    built = {}
    for section in parser.sections():
        if section not in classes:
            raise ConfigError(f"{source}: unknown section [{section}]")
        built[section] = _build(classes[section], dict(parser.items(section)), section)
    return Config(**built)


def load_config(path: str | Path | None) -> Config:
    if path is None:
        return Config()
    path = Path(path)
    return parse_config(path.read_text(), source=str(path))
