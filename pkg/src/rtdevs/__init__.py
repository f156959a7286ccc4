"""Parallel DEVS kernel with virtual-time simulation and real-time execution."""

from .blinky import (
    Blinky,
    ConfigurationError,
    Generator,
    RandomGaps,
    Scripted,
    blinky_atomic,
    blinky_system,
    generator_atomic,
    scripted,
)
from .coordinator import (
    ComponentRuntime,
    Coordinator,
    EventCapExceeded,
    TraceEvent,
    simulate,
)
from .core import (
    Atomic,
    Bag,
    Coupled,
    ModelError,
    Port,
    StructureError,
    assign_model_ids,
    check_coupled,
    default_confluent,
    flatten,
    validate_coupled,
)
from .drivers import (
    DigitalInput,
    DigitalOutput,
    RecordingPinSink,
    ScriptedPinSource,
    StdinPinSource,
    digital_input_atomic,
    digital_output_atomic,
    load_pin_script,
)
from .rtclock import (
    Halt,
    HostClock,
    Missed,
    MockClock,
    OnTime,
    RealTimeExecutor,
    RealTimeResult,
    SlipLedger,
    WallClock,
    execute_realtime,
    mock_clock_script,
    reconcile_deadline,
)
from .timebase import INFINITY, format_seconds, seconds, time_add
from .trace import (
    FileSink,
    ListSink,
    StreamSink,
    TraceLogger,
    TraceRecorder,
    parse_line,
    render_deadline_miss,
    render_event,
    render_output_event,
    render_state_event,
    render_time,
    write_header,
)

__version__ = "0.1.0"
