"""1D chemical cellular automata: from a pure ECA to coupled-rule rasters.

Rule "A-1" leaves every interfacial stirrer off, so the chemical states
mirror the stirrer commands one-to-one and the raster is exactly the
elementary CA. Higher interface rules couple neighbors through the
chemistry and the same cell rule starts producing stochastic variants.
"""

import numpy as np

from chemca.cca1d import MODE_DISPLAY, Rule1D, default_chain, raster_to_text, run_1d, single_seed

grid = default_chain(15)
init = single_seed(15)
steps = 16

print("rule 30-1 in display mode (pure elementary CA):")
raster = run_1d(grid, init, Rule1D.from_label("30-1"), steps, mode=MODE_DISPLAY)
print(raster_to_text(raster))

print("rule 30-1 probabilistic (identical: interfaces off):")
raster = run_1d(grid, init, Rule1D.from_label("30-1"), steps, rng=np.random.default_rng(0))
print(raster_to_text(raster))

for label in ("30-8", "30-16"):
    print(f"rule {label} probabilistic, three seeds side by side:")
    rasters = [
        run_1d(grid, init, Rule1D.from_label(label), steps, rng=np.random.default_rng(seed))
        for seed in (1, 2, 3)
    ]
    rows = [raster_to_text(r).splitlines() for r in rasters]
    for lines in zip(*rows):
        print("   ".join(lines))
    print()

print("every rule label round-trips: e.g.", Rule1D.from_label("110-13"))
