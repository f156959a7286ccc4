"""Blinky case study: the Blinky and Generator atomics and BlinkySystem.

Blinky phases::

    S1 <-> S2   internal, period sigma1 (fast branch)
    S3 <-> S4   internal, period sigma2 (slow branch)
    S1 <-> S3, S2 <-> S4   external (any input switches branch)

S1 and S3 emit 1, S2 and S4 emit 0.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, replace
from typing import Sequence, Union

from .core import Atomic, Bag, Coupled
from .drivers import DigitalInput, DigitalOutput, PinSink, PinSource
from .timebase import INFINITY, check_time, format_seconds, seconds

INTERNAL = {"S1": "S2", "S2": "S1", "S3": "S4", "S4": "S3"}
EXTERNAL = {"S1": "S3", "S3": "S1", "S2": "S4", "S4": "S2"}
EMITS = {"S1": True, "S2": False, "S3": True, "S4": False}

DEFAULT_SIGMA1 = seconds("0.5")
DEFAULT_SIGMA2 = seconds("1")
DEFAULT_POLL = seconds("0.1")


class ConfigurationError(ValueError):
    pass


@dataclass(frozen=True)
class BlinkyState:
    phase: str
    sigma1: int
    sigma2: int

    @property
    def sigma(self) -> int:
        return self.sigma1 if self.phase in ("S1", "S2") else self.sigma2

    @property
    def led(self) -> int:
        # level currently shown: the opposite of what the next output will be
        return 0 if EMITS[self.phase] else 1

    def __str__(self):
        return f"Status:, {self.led}, sigma: {format_seconds(self.sigma)}"


class Blinky(Atomic):
    inputs = {"in": bool}
    outputs = {"out": bool}

    def __init__(self, sigma1: int = DEFAULT_SIGMA1, sigma2: int = DEFAULT_SIGMA2, name: str = "blinky"):
        super().__init__(name)
        for sigma in (sigma1, sigma2):
            check_time(sigma)
            if sigma is INFINITY or sigma <= 0:
                raise ValueError("blinky periods must be finite and positive")
        self.sigma1 = sigma1
        self.sigma2 = sigma2

    def initial_state(self):
        return BlinkyState("S1", self.sigma1, self.sigma2)

    def ta(self, s):
        return s.sigma

    def delta_int(self, s):
        return replace(s, phase=INTERNAL[s.phase])

    def delta_ext(self, s, e, bag):
        # payload values are irrelevant; any input switches the period branch
        return replace(s, phase=EXTERNAL[s.phase])

    def output(self, s):
        return Bag.of("out", EMITS[s.phase])


def blinky_atomic(sigma1: int = DEFAULT_SIGMA1, sigma2: int = DEFAULT_SIGMA2) -> Blinky:
    return Blinky(sigma1, sigma2)


@dataclass(frozen=True)
class Scripted:
    instants: tuple[int, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "instants", tuple(check_time(t) for t in self.instants))
        if any(b <= a for a, b in zip(self.instants, self.instants[1:])):
            raise ValueError("generator instants must be strictly increasing")
        if self.instants and self.instants[0] == 0:
            raise ValueError("generator instants must be after 0")


@dataclass(frozen=True)
class RandomGaps:
    seed: int
    min_gap: int
    max_gap: int

    def __post_init__(self):
        check_time(self.min_gap)
        check_time(self.max_gap)
        if not 0 < self.min_gap <= self.max_gap:
            raise ValueError("need 0 < min_gap <= max_gap")


GeneratorConfig = Union[Scripted, RandomGaps]


@dataclass(frozen=True)
class GeneratorState:
    fired: int
    last: int
    gap: object  # int or INFINITY
    value: bool = False
    rng: tuple | None = None

    def __str__(self):
        return f"fired: {self.fired}"


class Generator(Atomic):
    """Input source used in simulation.

    ``Scripted`` fires ``False`` at each listed instant and then goes passive.
    ``RandomGaps`` fires a random boolean after uniform integer gaps drawn
    from a seeded generator; the generator state is part of the model state,
    so a given seed always produces the same trace.
    """

    inputs = {}
    outputs = {"out": bool}

    def __init__(self, config, name: str = "generator"):
        super().__init__(name)
        if not isinstance(config, (Scripted, RandomGaps)):
            raise TypeError(f"unknown generator config {config!r}")
        self.config = config

    def initial_state(self):
        cfg = self.config
        if isinstance(cfg, Scripted):
            gap = cfg.instants[0] if cfg.instants else INFINITY
            return GeneratorState(0, 0, gap)
        return self._draw(GeneratorState(0, 0, INFINITY, rng=random.Random(cfg.seed).getstate()), 0)

    def _draw(self, s: GeneratorState, now: int) -> GeneratorState:
        rng = random.Random()
        rng.setstate(s.rng)
        gap = rng.randint(self.config.min_gap, self.config.max_gap)
        value = rng.random() < 0.5
        return GeneratorState(s.fired, now, gap, value, rng.getstate())

    def ta(self, s):
        return s.gap

    def output(self, s):
        return Bag.of("out", s.value)

    def delta_int(self, s):
        now = s.last + s.gap
        fired = s.fired + 1
        cfg = self.config
        if isinstance(cfg, Scripted):
            gap = cfg.instants[fired] - now if fired < len(cfg.instants) else INFINITY
            return GeneratorState(fired, now, gap)
        return self._draw(replace(s, fired=fired), now)

    def delta_ext(self, s, e, bag):
        return s


def generator_atomic(cfg) -> Generator:
    return Generator(cfg)


def blinky_system(
    mode: str = "simulation",
    *,
    sigma1: int = DEFAULT_SIGMA1,
    sigma2: int = DEFAULT_SIGMA2,
    generator: Scripted | RandomGaps | None = None,
    source: PinSource | None = None,
    sink: PinSink | None = None,
    poll_period: int = DEFAULT_POLL,
) -> Coupled:
    """Build the BlinkySystem coupled model.

    ``simulation`` wires generator -> blinky; ``deployment`` wires
    digitalInput -> blinky -> digitalOutput. Component order fixes the model
    ids: blinky first, then generator or digitalOutput, digitalInput last.
    """
    blinky = Blinky(sigma1, sigma2)
    if mode == "simulation":
        if source is not None or sink is not None:
            raise ConfigurationError("pin backends are not used in simulation mode")
        gen = Generator(generator if generator is not None else Scripted())
        return Coupled(
            "blinkySystem",
            [blinky, gen],
            ic=[(("generator", "out"), ("blinky", "in"))],
        )
    if mode == "deployment":
        if generator is not None:
            raise ConfigurationError("the generator is not used in deployment mode")
        if source is None or sink is None:
            raise ConfigurationError("deployment mode needs a pin source and a pin sink")
        return Coupled(
            "blinkySystem",
            [blinky, DigitalOutput("digitalOutput", sink), DigitalInput("digitalInput", source, poll_period)],
            ic=[
                (("digitalInput", "out"), ("blinky", "in")),
                (("blinky", "out"), ("digitalOutput", "in")),
            ],
        )
    raise ConfigurationError(f"unknown mode {mode!r}")


def scripted(instants: Sequence) -> Scripted:
    """``Scripted`` from decimal-second values, e.g. ``scripted(["28.5947"])``."""
    return Scripted(tuple(seconds(t) for t in instants))
