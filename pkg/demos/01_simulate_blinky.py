"""Simulating the blinky system in virtual time.

A generator stands in for the button. Blinky toggles its LED output
every 0.5 s until an input arrives, then switches to a 1 s period.
Run with: python3 demos/01_simulate_blinky.py
"""
import sys

from rtdevs import StreamSink, TraceLogger, TraceRecorder, blinky_system, scripted, seconds, simulate

# %% Build the coupled model: blinky (id 1) fed by a scripted generator (id 2)
system = blinky_system("simulation", generator=scripted(["28.5947"]))
print("components:", [c.name for c in system.components])

# %% Run 32 s of virtual time and print the trace as it is produced
rec = TraceRecorder()
logger = TraceLogger(StreamSink(sys.stdout))


class Both:
    def start(self):
        logger.start()

    def emit(self, event):
        rec.emit(event)
        logger.emit(event)


last = simulate(system, seconds(32), Both())

# %% Gaps between LED outputs before and after the button press
outs = [e.time for e in rec.events if e.model_name == "blinky" and e.port_name == "out"]
gaps = sorted({b - a for a, b in zip(outs, outs[1:])})
print(f"\nlast instant {last} us, {len(outs)} LED outputs, distinct gaps (us): {gaps}")
