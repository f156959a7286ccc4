"""Parallel DEVS abstract simulator.

:class:`Coordinator` owns the runtime state of every atomic in a model tree
and executes one instant at a time: collect outputs of the imminent
components, route them through the coupling tables, then apply the right
transition to every affected component. :func:`simulate` drives it in
virtual time.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any, Protocol

from .core import (
    Atomic,
    Bag,
    Coupled,
    Model,
    ModelError,
    assign_model_ids,
    check_coupled,
    conforms,
    positive_ta,
)
from .timebase import INFINITY, Time, check_time, time_add

DEFAULT_EVENT_CAP = 10**7

OUTPUT = "output"
STATE = "state"


class EventCapExceeded(RuntimeError):
    pass


@dataclass(frozen=True)
class TraceEvent:
    """One trace record.

    Output events carry the port name and the tuple of payloads emitted on
    it; state events have ``port_name=None`` and the model's state text as
    ``data``.
    """

    time: int
    model_id: int
    model_name: str
    port_name: str | None
    data: Any

    @property
    def kind(self) -> str:
        return STATE if self.port_name is None else OUTPUT


class TraceListener(Protocol):
    def emit(self, event: TraceEvent) -> None: ...


@dataclass
class ComponentRuntime:
    model: Atomic
    model_id: int
    state: Any
    t_last: int = 0
    t_next: Time = INFINITY
    inbox: Bag = field(default_factory=Bag)


class Coordinator:
    """Executes a validated model tree instant by instant.

    ``now`` is the instant currently being (or last) processed. Routing is
    resolved by walking the coupling tables upward through EOC and downward
    through EIC from each emitting atomic; the walk is cached per
    (atomic, port).
    """

    def __init__(self, root: Model, *, event_cap: int = DEFAULT_EVENT_CAP):
        check_coupled(root)
        self.root = root
        self.event_cap = event_cap
        self.now = 0
        self.steps = 0
        self.ids = assign_model_ids(root)
        self.runtimes: list[ComponentRuntime] = []
        self._by_model: dict[int, ComponentRuntime] = {}
        self._parents: dict[int, list[Coupled]] = {}
        self._routes: dict[tuple[int, str], list[tuple[ComponentRuntime, str]]] = {}
        self._index_parents(root, [])
        self._initialized = False

    def _index_parents(self, model: Model, chain: list[Coupled]) -> None:
        if isinstance(model, Atomic):
            self._parents[id(model)] = chain
            return
        for c in model.components:
            self._index_parents(c, chain + [model])

    # -- setup -------------------------------------------------------------

    def initialize(self) -> list[TraceEvent]:
        """Create runtimes at t=0 and return the initial state events."""
        if self._initialized:
            raise RuntimeError("coordinator already initialized")
        self._initialized = True
        events = []
        for mid, model in self.ids.items():
            s = _call(model, model.initial_state)
            rt = ComponentRuntime(model, mid, s, 0, positive_ta(model, s))
            self.runtimes.append(rt)
            self._by_model[id(model)] = rt
            ev = _state_event(rt, 0)
            if ev is not None:
                events.append(ev)
        return events

    # -- one instant -------------------------------------------------------

    def next_event_time(self) -> Time:
        """Earliest scheduled internal event; INFINITY when all are passive."""
        if not self.runtimes:
            return INFINITY
        return min(rt.t_next for rt in self.runtimes)

    def imminent(self, t: Time) -> list[ComponentRuntime]:
        return [rt for rt in self.runtimes if rt.t_next == t]

    def collect_outputs(self, t: int) -> list[TraceEvent]:
        """Invoke ``output`` on each imminent atomic and route the results."""
        events = []
        for rt in self.imminent(t):
            model = rt.model
            bag = _call(model, model.output, rt.state)
            if bag is None:
                continue
            if not isinstance(bag, Bag):
                raise ModelError(model.name, f"output() must return a Bag, got {bag!r}")
            for port, values in bag.items():
                kind = model.outputs.get(port)
                if kind is None:
                    raise ModelError(model.name, f"output on undeclared port {port!r}")
                for v in values:
                    if not conforms(v, kind):
                        raise ModelError(
                            model.name, f"payload {v!r} on port {port!r} is not {kind.__name__}"
                        )
                events.append(TraceEvent(t, rt.model_id, model.name, port, tuple(values)))
                for dest, dport in self._route(model, port):
                    for v in values:
                        dest.inbox.add(dport, v)
        return events

    def advance_state(self, t: int) -> list[TraceEvent]:
        """Apply delta_int / delta_ext / delta_con wherever due at ``t``."""
        events = []
        for rt in self.runtimes:
            model = rt.model
            imminent = rt.t_next == t
            if imminent and not rt.inbox:
                rt.state = _call(model, model.delta_int, rt.state)
            elif imminent:
                rt.state = _call(model, model.delta_con, rt.state, rt.inbox)
            elif rt.inbox:
                rt.state = _call(model, model.delta_ext, rt.state, t - rt.t_last, rt.inbox)
            else:
                continue
            rt.inbox = Bag()
            rt.t_last = t
            try:
                rt.t_next = time_add(t, positive_ta(model, rt.state))
            except OverflowError as exc:
                raise ModelError(model.name, str(exc)) from exc
            ev = _state_event(rt, t)
            if ev is not None:
                events.append(ev)
        return events

    def step(self, t: int) -> list[TraceEvent]:
        """Process instant ``t``; returns its trace events in model_id order.

        Within one model, output events precede its state event.
        """
        if not self._initialized:
            raise RuntimeError("initialize() must run first")
        if t != self.next_event_time():
            raise ValueError(f"instant {t} is not the next event time {self.next_event_time()}")
        if self.steps >= self.event_cap:
            raise EventCapExceeded(f"event cap of {self.event_cap} instants reached at t={t} us")
        self.now = t
        outs = self.collect_outputs(t)
        states = self.advance_state(t)
        self.steps += 1
        # sort is stable; outputs were appended before states
        return sorted(outs + states, key=lambda e: (e.model_id, e.kind == STATE))

    # -- routing -----------------------------------------------------------

    def _route(self, model: Atomic, port: str) -> list[tuple[ComponentRuntime, str]]:
        key = (id(model), port)
        cached = self._routes.get(key)
        if cached is None:
            cached = []
            chain = self._parents[id(model)]
            self._route_up(chain, model.name, port, cached)
            self._routes[key] = cached
        return cached

    def _route_up(self, chain: list[Coupled], child: str, port: str, out: list) -> None:
        if not chain:
            return
        parent = chain[-1]
        for (src, sport), (dst, dport) in parent.ic:
            if src == child and sport == port:
                self._route_down(parent.child(dst), dport, out)
        # EOC of the root leads out of the system: legal, nothing to deliver
        for (src, sport), pport in parent.eoc:
            if src == child and sport == port:
                self._route_up(chain[:-1], parent.name, pport, out)

    def _route_down(self, model: Model, port: str, out: list) -> None:
        if isinstance(model, Atomic):
            out.append((self._by_model[id(model)], port))
            return
        for pport, (dst, dport) in model.eic:
            if pport == port:
                self._route_down(model.child(dst), dport, out)


def _call(model: Atomic, fn, *args):
    try:
        return fn(*args)
    except ModelError:
        raise
    except Exception as exc:
        raise ModelError(model.name, f"{fn.__name__} raised {exc!r}") from exc


def _state_event(rt: ComponentRuntime, t: int) -> TraceEvent | None:
    text = _call(rt.model, rt.model.state_text, rt.state)
    if text is None:
        return None
    return TraceEvent(t, rt.model_id, rt.model.name, None, str(text))


def as_coordinator(model, event_cap: int | None = None) -> Coordinator:
    if isinstance(model, Coordinator):
        if event_cap is not None:
            model.event_cap = event_cap
        return model
    return Coordinator(model, event_cap=DEFAULT_EVENT_CAP if event_cap is None else event_cap)


def simulate(
    root,
    t_end: Time,
    logger: TraceListener | None = None,
    *,
    event_cap: int | None = None,
) -> int:
    """Run ``root`` in virtual time up to and including ``t_end``.

    ``root`` may be a model or an un-initialized :class:`Coordinator` (useful
    when a pin source needs ``coordinator.now``). Returns the last processed
    instant, or 0 if nothing beyond initialization happened.
    """
    check_time(t_end)
    coord = as_coordinator(root, event_cap)
    start_log(logger)
    _emit_all(logger, coord.initialize())
    last = 0
    while True:
        t = coord.next_event_time()
        if t is INFINITY or t > t_end:
            return last
        _emit_all(logger, coord.step(t))
        last = t


def start_log(logger) -> None:
    """Let a logger that writes a header do so before any record."""
    start = getattr(logger, "start", None)
    if start is not None:
        start()


def _emit_all(logger, events) -> None:
    if logger is None:
        return
    for ev in events:
        logger.emit(ev)
