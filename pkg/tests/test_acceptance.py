"""Acceptance criteria, one test per criterion.

A PASS/FAIL line per criterion is printed in the terminal summary.
"""

import io
import random
import time

import pytest

from rtdevs import (
    Bag,
    Coordinator,
    Coupled,
    Halt,
    HostClock,
    MockClock,
    RealTimeExecutor,
    RecordingPinSink,
    Scripted,
    ScriptedPinSource,
    SlipLedger,
    TraceRecorder,
    blinky_system,
    default_confluent,
    seconds,
    simulate,
)
from rtdevs.cli import parse_args, run
from rtdevs.rtclock import Missed
from rtdevs.timebase import INFINITY
from rtdevs.trace import ListSink, TraceLogger, parse_line, render_deadline_miss

from .models import S, Feeder, Toggle, passthrough, random_atomic, random_feeder, random_hierarchy
from .oracle import flat_oracle, ledger_oracle


def criterion(number, title):
    return pytest.mark.criterion(number, title)


def run_cli(argv):
    out, err = io.StringIO(), io.StringIO()
    code = run(parse_args(argv), stdout=out, stderr=err)
    return code, out.getvalue().splitlines()


def records(lines):
    return [parse_line(line) for line in lines[1:] if not line.startswith("MISSED")]


@criterion(1, "simulation trace pattern")
def test_c1_simulation_pattern():
    t0 = time.perf_counter()
    code, lines = run_cli(["simulate", "blinky", "--duration", "32", "--gen-script", "28.5947",
                           "--sigma1", "0.5", "--sigma2", "1"])
    elapsed = time.perf_counter() - t0
    assert code == 0
    for row in ["28.5947;2;generator;out;0", "29.5947;1;blinky;out;0",
                "30.5947;1;blinky;out;1", "31.5947;1;blinky;out;0"]:
        assert row in lines, row
    outs = [(t, data) for t, _, name, port, data in records(lines) if name == "blinky" and port == "out"]
    values = [d for _, d in outs]
    assert values == ["1", "0"] * (len(values) // 2) + ["1"] * (len(values) % 2)
    flip = seconds("28.5947")
    before = [t for t, _ in outs if t < flip]
    after = [t for t, _ in outs if t > flip]
    assert {b - a for a, b in zip(before, before[1:])} == {seconds("0.5")}
    assert {b - a for a, b in zip(after, after[1:])} == {seconds(1)}
    assert elapsed < 1.0


# deployment rows from 172 s on, as (offset, model_id, name, port)
DEPLOYMENT_ROWS = [
    ("0", 1, "blinky", "out"), ("0", 2, "digitalOutput", None),
    ("0.5", 1, "blinky", "out"), ("0.5", 2, "digitalOutput", None),
    ("1", 1, "blinky", "out"), ("1", 2, "digitalOutput", None),
    ("1.5", 1, "blinky", "out"), ("1.5", 2, "digitalOutput", None),
    ("1.6", 3, "digitalInput", "out"),
    ("2.6", 1, "blinky", "out"), ("2.6", 2, "digitalOutput", None),
    ("3.6", 1, "blinky", "out"),
]


@criterion(2, "deployment trace pattern")
def test_c2_deployment_pattern(tmp_path):
    flips = tmp_path / "flips.txt"
    flips.write_text("173.55 1\n")
    t0 = time.perf_counter()
    code, lines = run_cli(["simulate", "blinky", "--duration", "176", "--pin-script", str(flips)])
    elapsed = time.perf_counter() - t0
    assert code == 0
    base = seconds(172)
    window = [
        r for r in records(lines)
        if base <= r[0] <= seconds("175.6")
        and (r[3] is not None or r[2] == "digitalOutput")
    ]
    shape = [(r[0] - base, r[1], r[2], r[3]) for r in window][: len(DEPLOYMENT_ROWS)]
    expected = [(seconds(off), mid, name, port) for off, mid, name, port in DEPLOYMENT_ROWS]
    assert shape == expected
    # field formats and relations between rows
    by_time = {}
    for t, mid, name, port, data in window:
        by_time.setdefault(t, {})[name] = data
    blinky_vals = [by_time[t]["blinky"] for t in sorted(by_time) if "blinky" in by_time[t]]
    assert all(a != b for a, b in zip(blinky_vals, blinky_vals[1:]))
    for row in by_time.values():
        if "digitalOutput" in row:
            assert row["digitalOutput"] == f"Pin: {row['blinky']}"
    assert by_time[seconds("173.6")] == {"digitalInput": "1"}
    assert sum(1 for r in records(lines) if r[2] == "digitalInput" and r[3] == "out") == 1
    assert elapsed < 1.0


@criterion(3, "miss message byte-exactness")
def test_c3_miss_message():
    sigma = seconds("0.75")
    source = ScriptedPinSource()
    root = blinky_system("deployment", sigma1=sigma, source=source, sink=RecordingPinSink(), poll_period=sigma)
    sink = ListSink()
    # step 2 (t=1.5 s) runs 0.75 s + 85 629 us: ends 85 629 us after the 2.25 s deadline
    clock = MockClock([0, sigma + 85_629])
    ex = RealTimeExecutor(root, clock, SlipLedger(100_000), TraceLogger(sink))
    source.clock = ex.elapsed
    res = ex.run(seconds(6))
    misses = [i for i, line in enumerate(sink.lines) if line.startswith("MISSED")]
    assert len(misses) == 1
    assert sink.lines[misses[0]] == "MISSED SCHEDULED TIME ADVANCE DEADLINE BY:85629 microseconds"
    assert sink.lines[misses[0]] == render_deadline_miss(85629)
    after = records(sink.lines[misses[0]:])
    assert any(port == "out" and t > seconds("1.5") for t, _, _, port, _ in after)
    assert res.status == "completed" and res.last_time == seconds(6)


def _instants(root_factory, horizon):
    coord = Coordinator(root_factory())
    coord.initialize()
    out = []
    while True:
        t = coord.next_event_time()
        if t is INFINITY or t > horizon:
            return out
        coord.step(t)
        out.append(t)


@criterion(4, "slip ledger oracle")
def test_c4_ledger_oracle():
    rng = random.Random(20240601)
    mismatches = 0
    halts = 0
    for trial in range(1000):
        sigma1 = rng.choice([seconds("0.05"), seconds("0.25"), seconds("0.75")])
        sigma2 = rng.choice([seconds("0.1"), seconds("1")])
        gen = sorted(rng.sample(range(1, 200), rng.randint(0, 5)))
        gen_instants = [g * seconds("0.05") + rng.randint(1, 999) for g in gen]
        horizon = seconds(10)

        def factory():
            return blinky_system("simulation", sigma1=sigma1, sigma2=sigma2,
                                 generator=Scripted(tuple(gen_instants)))

        instants = _instants(factory, horizon)
        costs = []
        for k in range(len(instants)):
            gap = instants[k + 1] - instants[k] if k + 1 < len(instants) else sigma1
            costs.append(rng.choice([0, rng.randint(0, gap), rng.randint(gap // 2, gap + gap // 2),
                                     rng.randint(0, 2 * gap)]))
        tolerance = rng.choice([None, 0, rng.randint(0, 200_000), rng.randint(0, 2_000_000)])
        anchor = rng.randint(0, 10**9)

        res = RealTimeExecutor(factory(), MockClock(costs, start=anchor), SlipLedger(tolerance)).run(horizon)
        slips, halt_at = ledger_oracle(instants, costs, tolerance)
        got_slips = [s.slip_after for s in res.steps]
        got_halt = next((i for i, s in enumerate(res.steps) if isinstance(s.outcome, Halt)), None)
        if got_slips != slips or got_halt != halt_at or res.halted != (halt_at is not None):
            mismatches += 1
        halts += halt_at is not None
    assert mismatches == 0
    assert 50 < halts < 950  # both outcomes well represented


def _steps(root, n):
    coord = Coordinator(root)
    events = list(coord.initialize())
    for _ in range(n):
        t = coord.next_event_time()
        if t is INFINITY:
            break
        events.extend(coord.step(t))
    return [(e.time, e.model_name, e.port_name, e.data) for e in events]


@criterion(5, "coordinator flat-oracle equivalence")
def test_c5_flat_oracle():
    rng = random.Random(5150)
    mismatches = 0
    for _ in range(200):
        root = random_hierarchy(rng, max_depth=3)
        if _steps(root, 500) != flat_oracle(root, 500):
            mismatches += 1
    assert mismatches == 0


class Instrumented(Toggle):
    """Toggle that logs top-level transition calls made by the coordinator."""

    def __init__(self, name, period):
        super().__init__(name, period)
        self.log = []
        self._depth = 0

    def _wrap(self, kind, fn, *args):
        self._depth += 1
        try:
            return fn(*args)
        finally:
            self._depth -= 1
            if self._depth == 0:
                self.log.append(kind)

    def delta_int(self, s):
        return self._wrap("int", super().delta_int, s)

    def delta_ext(self, s, e, bag):
        return self._wrap("ext", super().delta_ext, s, e, bag)

    def delta_con(self, s, bag):
        return self._wrap("con", super().delta_con, s, bag)


@criterion(6, "confluent precedence")
def test_c6_confluent_precedence():
    from hypothesis import given, settings
    from hypothesis import strategies as st

    @settings(max_examples=200, deadline=None)
    @given(
        period=st.sampled_from([S, 2 * S, 3 * S]),
        feed=st.lists(st.integers(1, 60), min_size=1, max_size=25, unique=True),
        values=st.lists(st.booleans(), min_size=25, max_size=25),
    )
    def check(period, feed, values):
        probe = Instrumented("probe", period)
        script = [(t * S, values[i]) for i, t in enumerate(sorted(feed))]
        root = Coupled("r", [probe, Feeder("feed", script)], ic=[(("feed", "out"), ("probe", "in"))])
        coord = Coordinator(root)
        coord.initialize()
        rt_probe, rt_feed = coord.runtimes
        coincided = 0
        while True:
            t = coord.next_event_time()
            if t is INFINITY or t > 70 * S:
                break
            imminent = rt_probe.t_next == t
            has_input = rt_feed.t_next == t
            before = rt_probe.state
            bag = Bag.of("in", script[rt_feed.state][1]) if has_input else None
            del probe.log[:]
            coord.step(t)
            if imminent and has_input:
                coincided += 1
                assert probe.log == ["con"]
                plain = Toggle("ref", period)
                expected = plain.delta_ext(plain.delta_int(before), 0, bag)
                assert rt_probe.state == expected == default_confluent(plain, before, bag)
            elif imminent:
                assert probe.log == ["int"]
            elif has_input:
                assert probe.log == ["ext"]
            else:
                assert probe.log == []

    check()


@criterion(7, "closure under coupling")
def test_c7_closure():
    rng = random.Random(777)
    for i in range(50):
        seed = rng.randrange(10**9)

        def build(wrapped):
            r = random.Random(seed)
            atom = random_atomic(r, "m")
            kind = atom.inputs["in"]
            feed = random_feeder(r, "feed", kind)
            inner = passthrough(atom) if wrapped else atom
            return Coupled(
                "top",
                [inner, feed],
                ic=[(("feed", "out"), (inner.name, "in"))],
                eoc=[((inner.name, "out"), "out")],
                outputs={"out": atom.outputs["out"]},
            )

        bare, wrapped = TraceRecorder(), TraceRecorder()
        simulate(build(False), 80 * S, bare)
        simulate(build(True), 80 * S, wrapped)
        assert bare.events == wrapped.events, f"atomic #{i}"
        assert len(bare.events) > 20


@criterion(8, "real-time and virtual equivalence")
def test_c8_realtime_equivalence():
    rng = random.Random(8)
    flips = sorted(rng.sample(range(1, 11_000), 40))
    schedule = [(t * seconds("0.1") - rng.randint(0, 99_999), i % 2 == 0) for i, t in enumerate(flips)]
    horizon = seconds(1100)

    def system():
        source = ScriptedPinSource(schedule)
        root = blinky_system("deployment", source=source, sink=RecordingPinSink())
        return root, source

    root, source = system()
    coord = Coordinator(root)
    source.clock = lambda: coord.now
    sim = TraceRecorder()
    simulate(coord, horizon, sim)

    root, source = system()
    anchor = 987_654_321
    rt = TraceRecorder()
    ex = RealTimeExecutor(root, MockClock(start=anchor), SlipLedger(0), rt)
    source.clock = ex.elapsed
    res = ex.run(horizon)

    assert res.status == "completed"
    assert rt.misses == []
    assert rt.events == sim.events
    assert len(res.steps) >= 10_000
    assert all(s.start == anchor + s.virtual for s in res.steps)
    assert all(s.slip_after == 0 for s in res.steps)


@pytest.mark.soak
@criterion(9, "host soft-timing smoke")
def test_c9_host_smoke():
    source = ScriptedPinSource([(seconds("0.5"), True), (seconds("1.2"), False)])
    root = blinky_system("deployment", sigma1=seconds("0.05"), source=source, sink=RecordingPinSink())
    ex = RealTimeExecutor(root, HostClock(), SlipLedger(), None)
    source.clock = ex.elapsed
    res = ex.run(seconds(2))
    total_missed = sum(s.outcome.by for s in res.steps if isinstance(s.outcome, Missed))
    assert res.status == "completed"
    assert res.steps[-1].virtual == seconds(2)
    assert res.ledger.accumulated_slip < 10_000
    assert total_missed < 10_000
