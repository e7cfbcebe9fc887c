"""
Friction balance and buckling thresholds
=========================================

Walks through the force balance on a two-layer stack under the roller, then
shows how holding the stack at a finite distance adds a buckling threshold.
"""

# %%
import numpy as np

from layersep import load_database
from layersep.mechanics import (
    ClampSpec, SeparationScenario, buckling_critical_load, numerical_buckling_oracle, predict,
)

db = load_database()
for name, (top, bottom, substrate) in db.stacks.items():
    print(f"{name:16s} top={top:18s} bottom={bottom:18s} on {substrate}")

# %% Unclamped: the sign pattern of the three friction forces decides the outcome
for name in db.stacks:
    out = predict(SeparationScenario(db.stack(name), db.friction, normal_force=1.0))
    b = out.balance
    print(f"{name:16s} f1={b.f_fr1:.3f} f2={b.f_fr2:.3f} f3={b.f_fr3:.3f} -> {out.kind.value}")

# %% Buckling load against clamp distance for the bag paper
paper = db.sheet("bag-paper")
for l in np.linspace(0.005, 0.04, 8):
    fb = buckling_critical_load(paper.youngs_modulus, paper.width, paper.thickness, l)
    fd = numerical_buckling_oracle(paper.youngs_modulus, paper.width, paper.thickness, l)
    print(f"l={l * 1e3:5.1f} mm  F_B={fb:8.4f} N  finite-difference {fd:8.4f} N")

# %% Finger clamp at the bench gap rescues the plastic-over-paper pouch
s = SeparationScenario(db.stack("plastic-paper"), db.friction, normal_force=2.0)
print("unclamped:", predict(s).kind.value)
print("finger-clamped:", predict(s.replace(clamp=ClampSpec.finger())).kind.value)
