"""Configuration-space counting for the cell array.

A stirrer command word assigns one of p levels to each of the n^2 cell
stirrers and one of q levels to each of the 2n(n-1) interfacial stirrers,
so the input space is p^(n^2) * q^(2n(n-1)) while the readable chemical
space is only k^(n^2). The gap between the two is what the probabilistic
many-to-many mapping gets to play with.
"""

from chemca.lattice import (
    chemical_state_count,
    expansion_ratio,
    format_scientific,
    input_state_count,
)

# the experimental rig: 7x7 cells, four cell-stirrer levels, binary
# interfacial stirrers, binary chemical states
n, p, q, k = 7, 4, 2, 2

inputs = input_state_count(n, p, q)
chems = chemical_state_count(n, k)

print(f"{n}x{n} array, {p} cell levels, {q} interface levels, {k} chemical states")
print(f"  input states:    {format_scientific(inputs, 3)}  ({inputs})")
print(f"  chemical states: {format_scientific(chems, 2)}  ({chems})")

print("\nstate expansion with binary stirrers everywhere (p = q = k = 2):")
ratio = expansion_ratio(n, 2, 2, 2)
print(f"  inputs / chemical states = {format_scientific(ratio, 2)} = 2^84")

print("\nscaling with grid side (p=4, q=2, k=2):")
for side in (1, 2, 3, 5, 7, 10):
    i = input_state_count(side, 4, 2)
    c = chemical_state_count(side, 2)
    print(f"  n={side:2d}: inputs {format_scientific(i, 3):>10}   chemical {format_scientific(c, 2):>8}")
