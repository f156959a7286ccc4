"""Real-time execution against a mock wall clock.

The executor pins every step to a deadline measured from a fixed anchor.
A mock clock lets us charge each step an arbitrary cost, so one slow step
produces a deadline miss without needing a slow machine.
"""
import sys

from rtdevs import MockClock, SlipLedger, StreamSink, TraceLogger, blinky_system, execute_realtime, scripted, seconds

# %% Blinky at 0.75 s with no button presses
system = blinky_system("simulation", sigma1=seconds("0.75"), generator=scripted([]))

# %% Step costs in microseconds: the second step overruns its 0.75 s budget by 85629 us
clock = MockClock([0, 750_000 + 85_629], start=5_000_000)
result = execute_realtime(system, seconds(4), clock, SlipLedger(tolerance=100_000),
                          TraceLogger(StreamSink(sys.stdout)))

# %% The ledger after each step
print()
for step in result.steps:
    deadline = "-" if step.deadline is None else step.deadline  # last step has no next deadline
    print(f"virtual {step.virtual:>8} us  deadline {deadline:>8}  finish {step.finish:>8}  "
          f"{type(step.outcome).__name__ if step.outcome else '-':<6} slip {step.slip_after}")
print("status:", result.status)
