"""Semicolon-delimited trace format and log sinks.

Record kinds::

    time;model_id;model_name;port_name;data
    4;1;blinky;out;1                            output event
    0;1;blink;;Status:, 0, sigma: 0.75          state event
    MISSED SCHEDULED TIME ADVANCE DEADLINE BY:85629 microseconds
"""

from __future__ import annotations

import sys
from typing import IO, Any, Protocol

from .coordinator import TraceEvent
from .timebase import INFINITY, format_seconds, seconds

HEADER = "time;model_id;model_name;port_name;data"
MISS_PREFIX = "MISSED SCHEDULED TIME ADVANCE DEADLINE BY:"
MISS_SUFFIX = " microseconds"


class LogSink(Protocol):
    def write_line(self, text: str) -> None: ...


class StreamSink:
    """Writes lines to a text stream, flushing after each one."""

    def __init__(self, stream: IO[str] | None = None):
        self.stream = stream if stream is not None else sys.stdout

    def write_line(self, text: str) -> None:
        self.stream.write(text + "\n")
        self.stream.flush()


class FileSink(StreamSink):
    """Line-buffered UTF-8 file sink; usable as a context manager."""

    def __init__(self, path):
        super().__init__(open(path, "w", encoding="utf-8", buffering=1, newline="\n"))

    def close(self) -> None:
        self.stream.close()

    def __enter__(self):
        return self

    def __exit__(self, *exc):
        self.close()


class ListSink:
    def __init__(self):
        self.lines: list[str] = []

    def write_line(self, text: str) -> None:
        self.lines.append(text)


def render_time(t: int) -> str:
    if t is INFINITY:
        raise ValueError("INFINITY is never logged")
    return format_seconds(t)


def render_value(v: Any) -> str:
    if isinstance(v, bool):
        return "1" if v else "0"
    return str(v)


def render_data(data: Any) -> str:
    if isinstance(data, tuple):
        return ",".join(render_value(v) for v in data)
    return render_value(data)


def render_output_event(ev: TraceEvent) -> str:
    if ev.port_name is None:
        raise ValueError("output event needs a port name")
    return f"{render_time(ev.time)};{ev.model_id};{ev.model_name};{ev.port_name};{render_data(ev.data)}"


def render_state_event(ev: TraceEvent) -> str:
    if ev.port_name is not None:
        raise ValueError("state event must not carry a port name")
    return f"{render_time(ev.time)};{ev.model_id};{ev.model_name};;{ev.data}"


def render_event(ev: TraceEvent) -> str:
    return render_state_event(ev) if ev.port_name is None else render_output_event(ev)


def render_deadline_miss(by: int) -> str:
    if by <= 0:
        raise ValueError("a miss is strictly positive")
    return f"{MISS_PREFIX}{int(by)}{MISS_SUFFIX}"


def parse_line(line: str) -> tuple[int, int, str, str | None, str]:
    """Split a rendered event line back into ``(time_us, id, name, port, data)``.

    ``port`` is ``None`` for state lines. Data stays as text.
    """
    fields = line.split(";", 4)
    if len(fields) != 5:
        raise ValueError(f"not a trace record: {line!r}")
    t, mid, name, port, data = fields
    return seconds(t), int(mid), name, (port or None), data


def render_parsed(rec: tuple[int, int, str, str | None, str]) -> str:
    t, mid, name, port, data = rec
    return f"{render_time(t)};{mid};{name};{port or ''};{data}"


def write_header(sink: LogSink) -> None:
    sink.write_line(HEADER)


class TraceLogger:
    """Renders trace events and miss notices to a sink, header first.

    The header goes out on the first record (or an explicit
    :meth:`start`) and never again.
    """

    def __init__(self, sink: LogSink | None = None):
        self.sink = sink if sink is not None else StreamSink()
        self._started = False

    def start(self) -> None:
        if not self._started:
            self._started = True
            write_header(self.sink)

    def emit(self, event: TraceEvent) -> None:
        self.start()
        self.sink.write_line(render_event(event))

    def deadline_miss(self, by: int) -> None:
        self.start()
        self.sink.write_line(render_deadline_miss(by))


class TraceRecorder:
    """In-memory listener keeping events and misses as values."""

    def __init__(self):
        self.events: list[TraceEvent] = []
        self.misses: list[int] = []

    def emit(self, event: TraceEvent) -> None:
        self.events.append(event)

    def deadline_miss(self, by: int) -> None:
        self.misses.append(by)


class Tee:
    """Fans every record out to several listeners."""

    def __init__(self, *listeners):
        self.listeners = listeners

    def emit(self, event: TraceEvent) -> None:
        for listener in self.listeners:
            listener.emit(event)

    def deadline_miss(self, by: int) -> None:
        for listener in self.listeners:
            listener.deadline_miss(by)
