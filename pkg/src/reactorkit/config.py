"""Runtime configuration for the gateway and the three demo apps.

Config files are flat key=value text with dotted keys; the REACTORKIT_PORT
environment variable overrides the port. Defaults: a 0..10 counter, a 99s
timer with a 3s idle timeout and 1s ticks, and a prime checker with a pool
of two workers, 1000-iteration chunks, and four slots.
"""

from __future__ import annotations

import os
from dataclasses import dataclass, field
from pathlib import Path

DEFAULT_PORT = 8765
PORT_ENV_VAR = "REACTORKIT_PORT"


@dataclass(frozen=True)
class CounterConfig:
    min_value: int = 0
    max_value: int = 10


@dataclass(frozen=True)
class TimerConfig:
    max_time: int = 99
    idle_timeout_s: int = 3
    tick_period_s: int = 1


@dataclass(frozen=True)
class PrimeConfig:
    pool_size: int = 2
    chunk_budget: int = 1000
    slots: int = 4


@dataclass(frozen=True)
class RuntimeConfig:
    port: int = DEFAULT_PORT
    counter: CounterConfig = field(default_factory=CounterConfig)
    timer: TimerConfig = field(default_factory=TimerConfig)
    prime: PrimeConfig = field(default_factory=PrimeConfig)

    def __post_init__(self):
        if self.port < 0:
            raise ValueError(f"port must be >= 0 (0 binds an ephemeral port), got {self.port}")
        positive = {
            "timer.max_time": self.timer.max_time,
            "timer.idle_timeout_s": self.timer.idle_timeout_s,
            "timer.tick_period_s": self.timer.tick_period_s,
            "prime.pool_size": self.prime.pool_size,
            "prime.chunk_budget": self.prime.chunk_budget,
            "prime.slots": self.prime.slots,
        }
        for name, value in positive.items():
            if value < 1:
                raise ValueError(f"{name} must be positive, got {value}")
        if self.counter.min_value > self.counter.max_value:
            raise ValueError("counter.min must not exceed counter.max")


_KEYS = {
    "port",
    "counter.min", "counter.max",
    "timer.max_time", "timer.idle_timeout_s", "timer.tick_period_s",
    "prime.pool_size", "prime.chunk_budget", "prime.slots",
}


def parse_config(text: str) -> RuntimeConfig:
    values: dict[str, int] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        key, sep, value = line.partition("=")
        key, value = key.strip(), value.strip()
        if not sep or key not in _KEYS:
            raise ValueError(f"line {lineno}: unknown config entry {raw!r}")
        try:
            values[key] = int(value)
        except ValueError:
            raise ValueError(f"line {lineno}: {key} needs an integer, got {value!r}")
    return build_config(values)


def build_config(values: dict[str, int]) -> RuntimeConfig:
    defaults = RuntimeConfig()
    config = RuntimeConfig(
        port=values.get("port", defaults.port),
        counter=CounterConfig(
            min_value=values.get("counter.min", defaults.counter.min_value),
            max_value=values.get("counter.max", defaults.counter.max_value),
        ),
        timer=TimerConfig(
            max_time=values.get("timer.max_time", defaults.timer.max_time),
            idle_timeout_s=values.get("timer.idle_timeout_s", defaults.timer.idle_timeout_s),
            tick_period_s=values.get("timer.tick_period_s", defaults.timer.tick_period_s),
        ),
        prime=PrimeConfig(
            pool_size=values.get("prime.pool_size", defaults.prime.pool_size),
            chunk_budget=values.get("prime.chunk_budget", defaults.prime.chunk_budget),
            slots=values.get("prime.slots", defaults.prime.slots),
        ),
    )
    return config


def load_config(path: str | Path | None = None) -> RuntimeConfig:
    """Read a config file (if given) and apply the port environment override."""
    config = parse_config(Path(path).read_text()) if path else RuntimeConfig()
    env_port = os.environ.get(PORT_ENV_VAR)
    if env_port:
        try:
            port = int(env_port)
        except ValueError:
            raise ValueError(f"{PORT_ENV_VAR} must be an integer, got {env_port!r}")
        config = RuntimeConfig(port=port, counter=config.counter,
                               timer=config.timer, prime=config.prime)
    return config
