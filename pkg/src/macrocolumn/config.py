"""Flat ``key = value`` run configuration with command-line overrides."""

from __future__ import annotations

from dataclasses import dataclass, fields

from .benchmark import BenchConfig
from .neural import SdpParams


class ConfigError(ValueError):
    pass


def _int(v: str) -> int:
    return int(v)


def _bool(v: str) -> bool:
    low = v.strip().lower()
    if low in ("1", "true", "yes", "on"):
        return True
    if low in ("0", "false", "no", "off"):
        return False
    raise ValueError(f"not a boolean: {v!r}")


def _int_list(v: str) -> tuple[int, ...]:
    return tuple(int(x) for x in v.replace(" ", "").split(",") if x)


def _segments(v: str):
    return None if v.strip().lower() == "auto" else int(v)


def _composite(v: str):
    return None if v.strip().lower() in ("none", "") else _int_list(v)


def _recall(v: str) -> str:
    if v not in ("exact", "threshold"):
        raise ValueError("recall must be 'exact' or 'threshold'")
    return v


def _walk(v: str) -> str:
    if v not in ("edges", "cells"):
        raise ValueError("walk must be 'edges' or 'cells'")
    return v


# key -> (parser, default)
SCHEMA = {
    "seeds": (_int_list, (0, 1, 2)),
    "n_envs": (_int, 40),
    "n_features": (_int, 10),
    "width": (_int, 30),
    "episode_len": (_int, 100),
    "visits": (_int, 4),
    "segments": (_segments, None),
    "sweep_segments": (_int_list, (16, 12, 8, 4)),
    "theta": (_int, 8),
    "w_b": (_int, 6),
    "w_max": (_int, 8),
    "capture": (_int, 1),
    "backoff": (_int, 4),
    "search": (_int, 0),
    "composite": (_composite, None),
    "recall": (_recall, "exact"),
    "learn_partial": (_bool, False),
    "walk": (_walk, "edges"),
    "check": (_bool, True),
    "out_dir": (str, "."),
}


@dataclass
class RunConfig:
    values: dict

    def __getitem__(self, key):
        return self.values[key]

    def params(self) -> SdpParams:
        return SdpParams(**{f.name: self.values[f.name] for f in fields(SdpParams)})

    def bench(self, seed: int) -> BenchConfig:
        v = self.values
        return BenchConfig(seed=seed, n_envs=v["n_envs"], n_features=v["n_features"],
                           width=v["width"], episode_len=v["episode_len"], visits=v["visits"],
                           segments=v["segments"], params=self.params(),
                           composite=v["composite"], recall=v["recall"],
                           learn_partial=v["learn_partial"], walk=v["walk"])

    def echo(self) -> dict[str, str]:
        out = {}
        for k, v in self.values.items():
            if v is None:
                out[k] = "auto" if k == "segments" else "none"
            elif isinstance(v, tuple):
                out[k] = ",".join(str(x) for x in v)
            else:
                out[k] = str(v).lower() if isinstance(v, bool) else str(v)
        return out


def parse_pairs(lines, source: str) -> dict[str, str]:
    raw = {}
    for n, line in enumerate(lines, 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"{source}:{n}: expected 'key = value'")
        k, v = (s.strip() for s in line.split("=", 1))
        raw[k] = v
    return raw


def load_config(path: str | None = None, overrides: list[str] = ()) -> RunConfig:
    raw = {}
    if path:
        try:
            with open(path) as fh:
                raw.update(parse_pairs(fh, path))
        except OSError as exc:
            raise ConfigError(f"cannot read config: {exc}") from None
    raw.update(parse_pairs(overrides, "--set"))
    values = {k: d for k, (_, d) in SCHEMA.items()}
    for k, v in raw.items():
        if k not in SCHEMA:
            raise ConfigError(f"unknown config key {k!r}")
        try:
            values[k] = SCHEMA[k][0](v)
        except ValueError as exc:
            raise ConfigError(f"bad value for {k}: {exc}") from None
    cfg = RunConfig(values)
    try:
        cfg.bench(0)
    except ValueError as exc:
        raise ConfigError(str(exc)) from None
    return cfg
