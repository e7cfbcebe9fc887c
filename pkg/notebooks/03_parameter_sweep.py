"""
Seeded sweeps over penetration and roller speed
================================================

Penetration maps linearly to normal force, speed changes drag timing and how
forgiving a smooth roller is once the edge is reached.
"""

# %%
from layersep import load_database
from layersep.graspfsm import EpisodeConfig
from layersep.mechanics import ClampSpec, RollerSurface, SeparationScenario
from layersep.sweep import NoiseModel, SweepAxes, clamp_comparison, dominance, format_heatmap, run_sweep

db = load_database()
base = EpisodeConfig(SeparationScenario(db.stack("plastic-paper"), db.friction,
                                        clamp=ClampSpec.finger()))

# %% Clamped versus unclamped without noise
free, held = clamp_comparison(SweepAxes(), base, noise=NoiseModel(0.0, 0.0, 0))
print("unclamped\n" + format_heatmap(free))
print("finger clamp\n" + format_heatmap(held))

# %% Dented against smooth under default noise
axes = SweepAxes(roller_types=(RollerSurface.DENTED, RollerSurface.SMOOTH))
grid = run_sweep(axes, base, noise=NoiseModel(seed=42))
print(format_heatmap(grid))
print("dented >= smooth everywhere, strictly better cells:", dominance(grid))

# %% Each material pair, clamped, zero noise
for pair in db.stacks:
    _, g = clamp_comparison(SweepAxes(repetitions=1), EpisodeConfig(
        SeparationScenario(db.stack(pair), db.friction, clamp=ClampSpec.finger())),
        noise=NoiseModel(0.0, 0.0, 0))
    print(f"{pair:16s} clamped success cells: {int((g.success > 0).sum())}/25")
