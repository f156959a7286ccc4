"""Deployment wiring with scripted pins, still in virtual time.

The generator is replaced by a polled digital input and the LED output
drives a digital output. A pin script plays the role of the button.
"""
import sys

from rtdevs import (
    Coordinator,
    RecordingPinSink,
    ScriptedPinSource,
    StreamSink,
    TraceLogger,
    blinky_system,
    load_pin_script,
    seconds,
    simulate,
)

# %% One button press at 3.05 s; the 100 ms poll sees it at 3.1 s
schedule = load_pin_script(["# seconds level", "3.05 1"])
source = ScriptedPinSource(schedule)
sink = RecordingPinSink()
system = blinky_system("deployment", source=source, sink=sink)

# %% The pin source reads the coordinator's virtual clock
coord = Coordinator(system)
source.clock = lambda: coord.now

# state lines for the input poller are noisy, so show only rows with a port or Pin text
class Filtered(TraceLogger):
    def emit(self, event):
        if event.port_name or event.model_name == "digitalOutput":
            super().emit(event)


simulate(coord, seconds(6), Filtered(StreamSink(sys.stdout)))

# %% What the LED pin saw
print("\nLED pin writes:", ["1" if v else "0" for v in sink.levels])
