"""Command line entry point.

Examples::

    rtdevs simulate blinky --duration 40 --gen-script 28.5947
    rtdevs run-rt blinky --duration 10 --tolerance-us 100000 --pin-script flips.txt
    rtdevs run-rt blinky --duration 5 --pin-script stdin      # Enter toggles the pin
"""

from __future__ import annotations

import argparse
import sys
from dataclasses import dataclass, field

from .blinky import RandomGaps, Scripted, blinky_system
from .coordinator import DEFAULT_EVENT_CAP, Coordinator, EventCapExceeded, simulate
from .core import ModelError
from .drivers import RecordingPinSink, ScriptedPinSource, StdinPinSource, load_pin_script
from .rtclock import HostClock, MockClock, RealTimeExecutor, SlipLedger
from .timebase import seconds
from .trace import FileSink, StreamSink, TraceLogger

SYSTEMS = ("blinky",)


@dataclass
class RunConfig:
    mode: str  # "simulate" or "run-rt"
    system: str
    duration: int  # microseconds
    wiring: str = "simulation"
    tolerance: int | None = None
    sigma1: int = seconds("0.5")
    sigma2: int = seconds("1")
    gen_script: tuple[int, ...] | None = None
    gen_seed: int | None = None
    gen_gaps: tuple[int, int] = (seconds("1"), seconds("5"))
    pin_script: str | None = None
    poll_period: int = seconds("0.1")
    log: str | None = None
    event_cap: int = DEFAULT_EVENT_CAP
    clock: str = "host"
    mock_costs: tuple[int, ...] = field(default_factory=tuple)


def _seconds_arg(text: str) -> int:
    try:
        return seconds(text)
    except (ValueError, TypeError, OverflowError) as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def _seconds_list(text: str) -> tuple[int, ...]:
    return tuple(_seconds_arg(part) for part in text.replace(",", " ").split())


def _int_list(text: str) -> tuple[int, ...]:
    try:
        return tuple(int(part) for part in text.replace(",", " ").split())
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def _tolerance(text: str) -> int | None:
    if text.lower() in ("unlimited", "inf", "none"):
        return None
    try:
        value = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"tolerance must be microseconds or 'unlimited', got {text!r}") from None
    if value < 0:
        raise argparse.ArgumentTypeError("tolerance must be >= 0")
    return value


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="rtdevs", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="mode", required=True)
    for mode, help_text in (("simulate", "run in virtual time"), ("run-rt", "run against the wall clock")):
        p = sub.add_parser(mode, help=help_text)
        p.add_argument("system", choices=SYSTEMS)
        p.add_argument("--duration", type=_seconds_arg, required=True, help="seconds of model time")
        p.add_argument("--sigma1", type=_seconds_arg, default=seconds("0.5"), help="fast period, s")
        p.add_argument("--sigma2", type=_seconds_arg, default=seconds("1"), help="slow period, s")
        p.add_argument("--wiring", choices=("simulation", "deployment"),
                       help="generator -> blinky, or pins -> blinky -> pin")
        p.add_argument("--gen-script", type=_seconds_list, action="extend",
                       help="generator firing instants, s (comma separated, repeatable)")
        p.add_argument("--gen-seed", type=int, help="random generator seed")
        p.add_argument("--gen-min-gap", type=_seconds_arg, default=seconds("1"))
        p.add_argument("--gen-max-gap", type=_seconds_arg, default=seconds("5"))
        p.add_argument("--pin-script", help="file of '<seconds> <0|1>' lines, or 'stdin'")
        p.add_argument("--poll-period", type=_seconds_arg, default=seconds("0.1"))
        p.add_argument("--log", help="trace file (default stdout)")
        p.add_argument("--event-cap", type=int, default=DEFAULT_EVENT_CAP)
        if mode == "run-rt":
            p.add_argument("--tolerance-us", type=_tolerance, default=None,
                           help="slip allowance in microseconds, or 'unlimited' (default)")
            p.add_argument("--clock", choices=("host", "mock"), default="host")
            p.add_argument("--mock-costs", type=_int_list, default=(),
                           help="per-step execution costs in microseconds (implies --clock mock)")
    return parser


def parse_args(argv=None) -> RunConfig:
    """Parse ``argv`` into a :class:`RunConfig`; usage errors exit with status 2."""
    parser = build_parser()
    ns = parser.parse_args(argv)
    if ns.duration <= 0:
        parser.error("--duration must be > 0")
    if ns.event_cap <= 0:
        parser.error("--event-cap must be > 0")
    gen_given = ns.gen_script is not None or ns.gen_seed is not None
    if gen_given and ns.pin_script is not None:
        parser.error("generator options and --pin-script are mutually exclusive")
    wiring = ns.wiring
    if wiring is None:
        if ns.pin_script is not None:
            wiring = "deployment"
        elif gen_given:
            wiring = "simulation"
        else:
            wiring = "simulation" if ns.mode == "simulate" else "deployment"
    if wiring == "simulation" and ns.pin_script is not None:
        parser.error("--pin-script needs deployment wiring")
    if wiring == "deployment" and gen_given:
        parser.error("generator options need simulation wiring")
    if ns.gen_script is not None and ns.gen_seed is not None:
        parser.error("--gen-script and --gen-seed are mutually exclusive")
    if ns.gen_script is not None:
        script = ns.gen_script
        if any(b <= a for a, b in zip(script, script[1:])) or (script and script[0] == 0):
            parser.error("--gen-script instants must be positive and strictly increasing")
    if not 0 < ns.gen_min_gap <= ns.gen_max_gap:
        parser.error("need 0 < --gen-min-gap <= --gen-max-gap")
    if ns.poll_period <= 0:
        parser.error("--poll-period must be > 0")
    if ns.pin_script == "stdin" and ns.mode == "simulate":
        parser.error("--pin-script stdin only makes sense with run-rt")

    cfg = RunConfig(
        mode=ns.mode,
        system=ns.system,
        duration=ns.duration,
        wiring=wiring,
        sigma1=ns.sigma1,
        sigma2=ns.sigma2,
        gen_script=tuple(ns.gen_script) if ns.gen_script is not None else None,
        gen_seed=ns.gen_seed,
        gen_gaps=(ns.gen_min_gap, ns.gen_max_gap),
        pin_script=ns.pin_script,
        poll_period=ns.poll_period,
        log=ns.log,
        event_cap=ns.event_cap,
    )
    if ns.mode == "run-rt":
        cfg.tolerance = ns.tolerance_us
        cfg.mock_costs = tuple(ns.mock_costs)
        if any(c < 0 for c in cfg.mock_costs):
            parser.error("--mock-costs must be non-negative")
        cfg.clock = "mock" if cfg.mock_costs else ns.clock
    if ns.pin_script not in (None, "stdin"):
        try:
            with open(ns.pin_script, encoding="utf-8") as fh:
                load_pin_script(fh)
        except OSError as exc:
            parser.error(f"cannot read pin script: {exc}")
        except ValueError as exc:
            parser.error(f"bad pin script {ns.pin_script}: {exc}")
    return cfg


def _build(cfg: RunConfig):
    """Returns (root, scripted pin source or None)."""
    if cfg.wiring == "simulation":
        if cfg.gen_seed is not None:
            gen = RandomGaps(cfg.gen_seed, *cfg.gen_gaps)
        else:
            gen = Scripted(cfg.gen_script or ())
        return blinky_system("simulation", sigma1=cfg.sigma1, sigma2=cfg.sigma2, generator=gen), None
    if cfg.pin_script == "stdin":
        source = StdinPinSource()
    else:
        schedule = []
        if cfg.pin_script is not None:
            with open(cfg.pin_script, encoding="utf-8") as fh:
                schedule = load_pin_script(fh)
        source = ScriptedPinSource(schedule)
    root = blinky_system("deployment", sigma1=cfg.sigma1, sigma2=cfg.sigma2,
                         source=source, sink=RecordingPinSink(), poll_period=cfg.poll_period)
    return root, source if isinstance(source, ScriptedPinSource) else None


def run(cfg: RunConfig, stdout=None, stderr=None) -> int:
    """Execute ``cfg``; returns 0 on completion, 1 on halt or failure."""
    stdout = stdout if stdout is not None else sys.stdout
    stderr = stderr if stderr is not None else sys.stderr
    sink = None
    try:
        sink = FileSink(cfg.log) if cfg.log else StreamSink(stdout)
        logger = TraceLogger(sink)
        root, source = _build(cfg)
        coord = Coordinator(root, event_cap=cfg.event_cap)
        if cfg.mode == "simulate":
            if source is not None:
                source.clock = lambda: coord.now
            simulate(coord, cfg.duration, logger)
            return 0
        clock = MockClock(cfg.mock_costs) if cfg.clock == "mock" else HostClock()
        executor = RealTimeExecutor(coord, clock, SlipLedger(cfg.tolerance), logger, keep_steps=False)
        if source is not None:
            source.clock = executor.elapsed
        result = executor.run(cfg.duration)
        if result.halted:
            print(
                f"rtdevs: halted at t={result.last_time} us: accumulated slip "
                f"{result.ledger.accumulated_slip} us exceeds tolerance {cfg.tolerance} us",
                file=stderr,
            )
            return 1
        return 0
    except OSError as exc:
        print(f"rtdevs: I/O error: {exc}", file=stderr)
        return 1
    except (ModelError, EventCapExceeded) as exc:
        print(f"rtdevs: {exc}", file=stderr)
        return 1
    finally:
        if isinstance(sink, FileSink):
            sink.close()


def main(argv=None) -> int:
    return run(parse_args(argv))


if __name__ == "__main__":
    sys.exit(main())
