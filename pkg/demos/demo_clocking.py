"""Chemical clocking walkthrough: color traces to gated decisions.

Seven cells emit synthetic color excursions (the stand-in for the camera
feed). Per frame, each cell's recognition FSM latches a chemical state on
every completed Red-to-Red excursion, local clocks tick while a cell is
non-Red and tock when it returns, and the global clock fires once all
cells are back at Red with enough tocks banked. A decision is released
only every second global fire.
"""

import numpy as np

from chemca.signals import ClockedCellBank, ColorState, synthesize_trace

rng = np.random.default_rng(42)
cells = 7
cycles = 6

# jitter desynchronizes the cells within a cycle, exactly the drift the
# clock logic exists to tolerate; cycle starts stay aligned (the weak
# coupling of the physical medium re-synchronizes between oscillations)
targets_per_cycle = [[int(rng.integers(2)) for _ in range(cells)] for _ in range(cycles)]
traces = {i: [] for i in range(cells)}
for cycle in targets_per_cycle:
    bursts = [synthesize_trace(t, period_frames=12, jitter=1, rng=rng) for t in cycle]
    span = max(len(b) for b in bursts)
    for i, burst in enumerate(bursts):
        traces[i].extend(burst + [ColorState.RED] * (span - len(burst)))

n_frames = min(len(t) for t in traces.values())
bank = ClockedCellBank(cells, mode="1d", confirmations=2)

print(f"{cells} cells, {cycles} oscillation cycles, decision every 2nd global tock\n")
for frame in range(n_frames):
    colors = [traces[i][frame] for i in range(cells)]
    decision = bank.step_frame(colors)
    if decision is not None:
        print(f"frame {frame:3d}: decision gated, chemical states = {decision}")

print("\nintended targets per cycle:")
for k, cycle in enumerate(targets_per_cycle):
    print(f"  cycle {k}: {cycle}")
print("(each decision reports the latest completed excursion per cell)")

# a raw trace segment, to show what the recognition FSM consumes
segment = "".join(
    {ColorState.RED: ".", ColorState.LIGHT_BLUE: "o", ColorState.BLUE: "#"}[c]
    for c in traces[0][:48]
)
print(f"\ncell 0 raw colors (. red, o light blue, # blue):\n  {segment}")
