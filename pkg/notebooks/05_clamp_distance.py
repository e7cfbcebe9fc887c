"""
How short can the finger gap get?
==================================

Stiff paper needs more traction than the roller supplies once the clamp sits
close to the roller. Bisection finds the crossover.
"""

# %%
import math

from layersep import load_database
from layersep.mechanics import ClampSpec, OutcomeKind, SeparationScenario, predict

db = load_database()


def kind(pair, l, fn=2.0):
    s = SeparationScenario(db.stack(pair), db.friction, normal_force=fn, clamp=ClampSpec.finger(l))
    return predict(s).kind


# %%
for pair in db.stacks:
    lo, hi = 1e-4, 0.05
    if kind(pair, lo) is not OutcomeKind.TOP_STUCK or kind(pair, hi) is OutcomeKind.TOP_STUCK:
        print(f"{pair:16s} no crossover in [{lo}, {hi}] m")
        continue
    for _ in range(60):
        mid = 0.5 * (lo + hi)
        lo, hi = (mid, hi) if kind(pair, mid) is OutcomeKind.TOP_STUCK else (lo, mid)
    print(f"{pair:16s} TopStuck below {hi * 1e3:.3f} mm")

# %% Compare with inverting the closed form for paper
paper = db.sheet("bag-paper")
traction = (0.80 - 0.26) * 2.0
print("closed form:", 1e3 * math.pi * math.sqrt(paper.flexural_rigidity / traction), "mm")
