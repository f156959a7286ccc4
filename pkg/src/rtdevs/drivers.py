"""Pin drivers: digital input/output atomics and host-side pin backends."""

from __future__ import annotations

import bisect
import sys
import threading
from dataclasses import dataclass
from typing import Callable, Iterable, Protocol

from .core import Atomic, Bag
from .timebase import INFINITY, check_time, seconds


class PinSource(Protocol):
    def read(self) -> bool: ...


class PinSink(Protocol):
    def write(self, level: bool) -> None: ...


class ScriptedPinSource:
    """Pin level following a script of ``(instant_us, level)`` changes.

    ``clock`` returns the current instant in microseconds. Bind it to
    ``coordinator.now``-style virtual time under simulation, or to
    ``RealTimeExecutor.elapsed`` under real-time execution, so one script
    serves both.
    """

    def __init__(self, schedule: Iterable[tuple[int, bool]] = (), initial: bool = False,
                 clock: Callable[[], int] | None = None):
        self.schedule = [(check_time(t), bool(level)) for t, level in schedule]
        times = [t for t, _ in self.schedule]
        if any(b <= a for a, b in zip(times, times[1:])):
            raise ValueError("pin script instants must be strictly increasing")
        self._times = times
        self.initial = bool(initial)
        self.clock = clock

    def level_at(self, t: int) -> bool:
        i = bisect.bisect_right(self._times, t)
        return self.schedule[i - 1][1] if i else self.initial

    def read(self) -> bool:
        if self.clock is None:
            raise RuntimeError("ScriptedPinSource has no clock bound")
        return self.level_at(self.clock())


def load_pin_script(lines: Iterable[str]) -> list[tuple[int, bool]]:
    """Parse ``<seconds> <0|1>`` lines; blank lines and ``#`` comments are skipped."""
    schedule: list[tuple[int, bool]] = []
    for lineno, raw in enumerate(lines, start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        if len(parts) != 2 or parts[1] not in ("0", "1"):
            raise ValueError(f"line {lineno}: expected '<seconds> <0|1>', got {raw.strip()!r}")
        t = seconds(parts[0])
        if schedule and t <= schedule[-1][0]:
            raise ValueError(f"line {lineno}: time {parts[0]} is not after the previous entry")
        schedule.append((t, parts[1] == "1"))
    return schedule


class RecordingPinSink:
    """Records every write, optionally stamped by ``clock``."""

    def __init__(self, clock: Callable[[], int] | None = None):
        self.clock = clock
        self.recorded: list[tuple[int | None, bool]] = []

    def write(self, level: bool) -> None:
        self.recorded.append((self.clock() if self.clock else None, bool(level)))

    @property
    def levels(self) -> list[bool]:
        return [lv for _, lv in self.recorded]


class StdinPinSource:
    """Interactive pin: every line read from ``stream`` toggles the level.

    A daemon thread feeds the level; ``read`` returns the latest value.
    """

    def __init__(self, stream=None, initial: bool = False):
        self.stream = stream if stream is not None else sys.stdin
        self._level = bool(initial)
        self._lock = threading.Lock()
        self._thread = threading.Thread(target=self._feed, daemon=True)
        self._thread.start()

    def _feed(self) -> None:
        for _ in self.stream:
            with self._lock:
                self._level = not self._level

    def read(self) -> bool:
        with self._lock:
            return self._level


@dataclass(frozen=True)
class InputState:
    emitted: bool

    def __str__(self):
        return f"Pin: {int(self.emitted)}"


class DigitalInput(Atomic):
    """Polls a pin every ``poll_period`` and emits the level when it changes.

    The pin is sampled in ``output`` (the poll instant); the transition that
    follows records that same sample as the last emitted level.
    """

    inputs = {}
    outputs = {"out": bool}

    def __init__(self, name: str, source: PinSource, poll_period: int, initial: bool = False):
        super().__init__(name)
        check_time(poll_period)
        if poll_period is INFINITY or poll_period <= 0:
            raise ValueError("poll period must be finite and positive")
        self.source = source
        self.poll_period = poll_period
        self.initial = bool(initial)
        self._sample: bool | None = None

    def initial_state(self):
        return InputState(self.initial)

    def ta(self, s):
        return self.poll_period

    def output(self, s):
        self._sample = bool(self.source.read())
        if self._sample != s.emitted:
            return Bag.of("out", self._sample)
        return Bag()

    def delta_int(self, s):
        sample, self._sample = self._sample, None
        if sample is None:
            sample = bool(self.source.read())
        return InputState(sample)

    def delta_ext(self, s, e, bag):
        return s


@dataclass(frozen=True)
class OutputState:
    level: bool

    def __str__(self):
        return f"Pin: {int(self.level)}"


class DigitalOutput(Atomic):
    """Passive model that writes every received level to a pin."""

    inputs = {"in": bool}
    outputs = {}

    def __init__(self, name: str, sink: PinSink, initial: bool = False):
        super().__init__(name)
        self.sink = sink
        self.initial = bool(initial)

    def initial_state(self):
        return OutputState(self.initial)

    def ta(self, s):
        return INFINITY

    def delta_int(self, s):
        return s

    def delta_ext(self, s, e, bag):
        level = s.level
        for v in bag["in"]:
            level = bool(v)
            self.sink.write(level)
        return OutputState(level)


def digital_input_atomic(source: PinSource, poll_period: int, name: str = "digitalInput") -> DigitalInput:
    return DigitalInput(name, source, poll_period)


def digital_output_atomic(sink: PinSink, name: str = "digitalOutput") -> DigitalOutput:
    return DigitalOutput(name, sink)
