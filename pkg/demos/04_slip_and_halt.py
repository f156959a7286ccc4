"""How slip accumulates and when execution halts.

Late finishes add to the accumulated slip, early finishes pay it back
(never below zero). Once the slip is strictly above the tolerance the
run stops and reports where.
"""
from rtdevs import MockClock, SlipLedger, blinky_system, execute_realtime, reconcile_deadline, scripted, seconds

# %% The bookkeeping rule on its own
ledger = SlipLedger(tolerance=100_000)
for deadline, finish in [(750_000, 790_000), (1_500_000, 1_470_000), (2_250_000, 2_340_000)]:
    outcome = reconcile_deadline(ledger, deadline, finish)
    print(f"deadline {deadline:>9}  finish {finish:>9}  -> {outcome}  slip now {ledger.accumulated_slip}")

# %% A blinky run whose steps alternately run 790 ms and 700 ms against a 750 ms period
system = blinky_system("simulation", sigma1=seconds("0.75"), generator=scripted([]))
costs = [0, 790_000, 700_000, 790_000, 700_000, 790_000, 790_000]
result = execute_realtime(system, seconds(10), MockClock(costs), SlipLedger(tolerance=100_000))
print("\nslip after each step:", [s.slip_after for s in result.steps])
print(f"status {result.status} at virtual t={result.last_time} us")

# %% The same costs with no tolerance configured never halt
fresh = blinky_system("simulation", sigma1=seconds("0.75"), generator=scripted([]))
result = execute_realtime(fresh, seconds(10), MockClock(costs), SlipLedger())
print(f"unbounded: status {result.status}, final slip {result.ledger.accumulated_slip} us")
