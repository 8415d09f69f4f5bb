#!/usr/bin/env python3
"""The two-level minimizer on its own: cubes, parity merges, don't-cares.

Works through three hand-checkable examples: a threshold node's truth table,
the effect of don't-care rows, and the XOR family that plain cube merging
cannot compress. Implicants print one symbol per input position: 0/1 fixed,
'-' free, '^'/'~' members of an XOR/XNOR group.
"""

import numpy as np

from ttrules import logic

print("1) a 4-input threshold node: weights [-0.5, 1.7, -1.2, -2.2], bias -0.4")
w = np.array([-0.5, 1.7, -1.2, -2.2])
minterms = {v for v in range(16)
            if sum(((v >> i) & 1) * w[i] for i in range(4)) - 0.4 > 0}
print("   active assignments (x1 x2 x3 x4):",
      sorted(f"{v & 1}{v >> 1 & 1}{v >> 2 & 1}{v >> 3 & 1}" for v in minterms))
terms = logic.minimize(minterms, set(), 4)
print("   minimized DNF:", " OR ".join(str(t) for t in terms))
print("   i.e. (x2 AND NOT x3 AND NOT x4) OR (NOT x1 AND x2 AND NOT x4)")

tt = logic.TruthTable(k=4, minterms=minterms, dont_cares=set(),
                      input_map=[0, 1, 2, 3])
print("\n   the same table in PLA form (first four rows):")
for line in logic.export_pla(tt).splitlines()[:4]:
    print("    ", line)

print("\n2) don't-care rows let the minimizer choose freely:")
print("   on-set {11}, every other row forced:",
      [str(t) for t in logic.minimize({3}, set(), 2)])
print("   on-set {11}, rows 01 and 10 never observed:",
      [str(t) for t in logic.minimize({3}, {1, 2}, 2)],
      "(a single literal suffices)")

print("\n3) parity merges:")
odd3 = {v for v in range(8) if bin(v).count('1') % 2 == 1}
print("   3-bit odd parity, cubes only:  ",
      [str(t) for t in logic.minimize(odd3, set(), 3, use_xor=False)])
print("   3-bit odd parity, with merges: ",
      [str(t) for t in logic.minimize(odd3, set(), 3, use_xor=True)])
print("   four product terms collapse into one XOR chain.")

print("\n4) every answer is exact: cover all minterms, touch nothing outside")
print("   the on-set plus don't-cares, and carry no removable implicant;")
print("   for small tables the total literal cost equals the optimum found")
print("   by exhaustive search (see tests/test_logic.py for the oracles).")
