"""Wall-clock execution with scheduler slip accounting.

After each step the executor compares the instant the step finished with the
wall deadline of the next event. A late finish is a miss: it is reported,
added to the accumulated slip, and the next event starts at once, unless the
accumulated slip now exceeds the tolerance, in which case execution halts. An
early finish subtracts the time left from the accumulated slip (never below
zero) and the executor waits for the deadline.

Deadlines are ``anchor + virtual time`` with the anchor fixed at start, so a
miss never shifts the ideal schedule.
"""

from __future__ import annotations

import abc
import logging
import time
from dataclasses import dataclass, field
from typing import Iterable, Union

from .coordinator import Coordinator, as_coordinator, start_log
from .timebase import INFINITY, Time, check_time

log = logging.getLogger(__name__)


# -- clocks ------------------------------------------------------------------


class WallClock(abc.ABC):
    """Monotonic microsecond clock the executor runs against."""

    @abc.abstractmethod
    def now(self) -> int:
        """Current instant in microseconds; never decreases."""

    @abc.abstractmethod
    def wait_until(self, instant: int) -> None:
        """Block until ``now() >= instant``; return at once if already past."""

    def step_executed(self) -> None:
        """Called by the executor right after a step's transitions.

        Real clocks ignore it; test clocks use it to charge execution cost.
        """


class HostClock(WallClock):
    """``time.monotonic_ns`` backend.

    ``wait_until`` sleeps to within ``spin_us`` of the target and busy-waits
    the rest.
    """

    def __init__(self, spin_us: int = 2000):
        self.spin_us = spin_us

    def now(self) -> int:
        return time.monotonic_ns() // 1000

    def wait_until(self, instant: int) -> None:
        remaining = instant - self.now()
        if remaining > self.spin_us:
            time.sleep((remaining - self.spin_us) / 1e6)
        while self.now() < instant:
            pass


class MockClock(WallClock):
    """Deterministic clock driven by a script of per-step execution costs.

    Time moves only when a step is charged (``step_executed``), when
    :meth:`advance` is called, or when ``wait_until`` jumps forward. Once the
    script runs out, further steps cost nothing. Not thread-safe.
    """

    def __init__(self, costs: Iterable[int] = (), start: int = 0):
        self._costs = [int(c) for c in costs]
        if any(c < 0 for c in self._costs):
            raise ValueError("execution costs must be non-negative")
        self._now = int(start)
        self._next_cost = 0

    def now(self) -> int:
        return self._now

    def wait_until(self, instant: int) -> None:
        if instant > self._now:
            self._now = instant

    def advance(self, us: int) -> None:
        if us < 0:
            raise ValueError("cannot move a monotonic clock backwards")
        self._now += us

    def step_executed(self) -> None:
        if self._next_cost < len(self._costs):
            self._now += self._costs[self._next_cost]
        self._next_cost += 1


def mock_clock_script(steps: Iterable[int] = ()) -> MockClock:
    return MockClock(steps)


# -- slip ledger ---------------------------------------------------------------


@dataclass
class SlipLedger:
    """Accumulated slip in microseconds; ``tolerance=None`` never halts."""

    tolerance: int | None = None
    accumulated_slip: int = 0

    def __post_init__(self):
        if self.tolerance is not None and self.tolerance < 0:
            raise ValueError("tolerance must be non-negative")


@dataclass(frozen=True)
class OnTime:
    waited: int


@dataclass(frozen=True)
class Missed:
    by: int


@dataclass(frozen=True)
class Halt:
    total_slip: int
    by: int


DeadlineOutcome = Union[OnTime, Missed, Halt]


def reconcile_deadline(ledger: SlipLedger, scheduled_next_wall: int, finish_wall: int) -> DeadlineOutcome:
    """Update ``ledger`` for a step that finished at ``finish_wall``."""
    if finish_wall > scheduled_next_wall:
        miss = finish_wall - scheduled_next_wall
        ledger.accumulated_slip += miss
        if ledger.tolerance is not None and ledger.accumulated_slip > ledger.tolerance:
            return Halt(ledger.accumulated_slip, miss)
        return Missed(miss)
    remaining = scheduled_next_wall - finish_wall
    ledger.accumulated_slip = max(0, ledger.accumulated_slip - remaining)
    return OnTime(remaining)


# -- executor ------------------------------------------------------------------


@dataclass(frozen=True)
class StepRecord:
    """Timing of one executed instant.

    ``virtual`` is the instant processed; ``start``/``finish`` are the
    execution timer readings; ``deadline`` is the wall deadline of the next
    event (``None`` when there is none within the horizon).
    """

    virtual: int
    start: int
    finish: int
    deadline: int | None
    outcome: DeadlineOutcome | None
    slip_after: int


@dataclass
class RealTimeResult:
    status: str  # "completed" or "halted"
    ledger: SlipLedger
    last_time: int
    anchor: int
    steps: list[StepRecord] = field(default_factory=list)

    @property
    def halted(self) -> bool:
        return self.status == "halted"


class RealTimeExecutor:
    """Runs a coordinator against a :class:`WallClock`.

    ``elapsed()`` gives wall microseconds since the anchor, which is what a
    wall-time pin script should be read against.
    """

    def __init__(self, root, clock: WallClock, ledger: SlipLedger | None = None,
                 logger=None, *, event_cap: int | None = None, keep_steps: bool = True):
        self.coordinator: Coordinator = as_coordinator(root, event_cap)
        self.clock = clock
        self.ledger = ledger if ledger is not None else SlipLedger()
        self.logger = logger
        self.keep_steps = keep_steps
        self.anchor: int | None = None

    def elapsed(self) -> int:
        if self.anchor is None:
            return 0
        return self.clock.now() - self.anchor

    def run(self, t_end: Time) -> RealTimeResult:
        check_time(t_end)
        coord, clock, ledger = self.coordinator, self.clock, self.ledger
        self.anchor = anchor = clock.now()
        result = RealTimeResult("completed", ledger, 0, anchor)
        start_log(self.logger)
        self._emit(coord.initialize())

        t = coord.next_event_time()
        if t is INFINITY or t > t_end:
            return result
        # initialization counts as step zero: its deadline is the first event
        outcome = self._reconcile(anchor + t, clock.now())
        if isinstance(outcome, Halt):
            result.status = "halted"
            return result

        while True:
            start = clock.now()
            self._emit(coord.step(t))
            clock.step_executed()
            finish = clock.now()
            result.last_time = t

            t_next = coord.next_event_time()
            if t_next is INFINITY or t_next > t_end:
                self._record(result, t, start, finish, None, None)
                return result
            deadline = anchor + t_next
            outcome = self._reconcile(deadline, finish)
            self._record(result, t, start, finish, deadline, outcome)
            if isinstance(outcome, Halt):
                result.status = "halted"
                log.info("halting: accumulated slip %d us exceeds tolerance %s us",
                     outcome.total_slip, ledger.tolerance)
                return result
            t = t_next

    def _reconcile(self, deadline: int, finish: int) -> DeadlineOutcome:
        outcome = reconcile_deadline(self.ledger, deadline, finish)
        if isinstance(outcome, (Missed, Halt)):
            if self.logger is not None:
                self.logger.deadline_miss(outcome.by)
        elif outcome.waited > 0:
            self.clock.wait_until(deadline)
        return outcome

    def _record(self, result, t, start, finish, deadline, outcome) -> None:
        if self.keep_steps:
            result.steps.append(
                StepRecord(t, start, finish, deadline, outcome, self.ledger.accumulated_slip)
            )

    def _emit(self, events) -> None:
        if self.logger is None:
            return
        for ev in events:
            self.logger.emit(ev)


def execute_realtime(root, t_end: Time, clock: WallClock, ledger: SlipLedger | None = None,
                     logger=None, *, event_cap: int | None = None) -> RealTimeResult:
    """Execute ``root`` in wall-clock time until ``t_end`` or a halt."""
    return RealTimeExecutor(root, clock, ledger, logger, event_cap=event_cap).run(t_end)
