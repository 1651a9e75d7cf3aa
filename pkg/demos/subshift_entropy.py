"""Golden-mean shift: entropy, word counts, short cycles, block recoding.

The shift forbidding the word 11 has Perron root (1+sqrt 5)/2, counts its
n-words by Fibonacci numbers, and its shortest periodic orbit is far below
the 1 + M e^(1-h) period bound.  Recoding into n-blocks multiplies the
entropy by n while preserving window-legality of projected cycles.
"""

import numpy as np

from torusdyn import (
    GOLDEN_MEAN,
    block_recode,
    bq_bound,
    count_words,
    d_a_distance,
    project_cycle,
    shortest_cycle,
    top_entropy,
)
from torusdyn.sft import cylinder_growth

phi = (1 + np.sqrt(5)) / 2
h = top_entropy(GOLDEN_MEAN)
print(f"h_top = {h:.12f}   log(phi) = {np.log(phi):.12f}")

print("n-word counts:", [count_words(GOLDEN_MEAN, n) for n in range(1, 9)],
      " (Fibonacci)")
print("word-count rates (1/n) log N_n, decreasing to h:")
print("  ", [round(float(np.log(count_words(GOLDEN_MEAN, n))) / n, 4) for n in (2, 4, 8, 12)])

orbit = shortest_cycle(GOLDEN_MEAN)
print(f"shortest cycle: {orbit.cycle} (period {orbit.period}); "
      f"Bressaud-Quas bound {bq_bound(GOLDEN_MEAN):.3f}")

# --- block recoding: symbols of Z^(n) are the legal n-words
for n in (2, 4, 6):
    rec = block_recode(GOLDEN_MEAN, n)
    hz = top_entropy(rec.matrix)
    print(f"Z^({n}): {rec.matrix.m} symbols, h = {hz:.6f} >= {n} * h = {n * h:.6f}")

rec = block_recode(GOLDEN_MEAN, 2)
z = shortest_cycle(rec.matrix)
proj = project_cycle(rec, z, source=GOLDEN_MEAN)
print(f"shortest Z^(2) cycle projects to {proj.cycle} (all 2-windows legal)")

print("measured K_n = N_n e^(-n h):",
      [round(float(cylinder_growth(GOLDEN_MEAN, n)), 4) for n in (2, 6, 10)])

# --- the cylinder metric on windows
u = (0, 1, 0, 0, 1, 0, 0)
w = (0, 1, 0, 0, 1, 0, 1)
print(f"d_2(u, w) with agreement up to |i|<=2: {d_a_distance(u, w, a=2.0)}")
