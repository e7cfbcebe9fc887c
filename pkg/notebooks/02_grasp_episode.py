"""
One grasp episode, phase by phase
==================================
"""

# %%
import dataclasses

from layersep import load_database
from layersep.graspfsm import EpisodeConfig, FingerSpec, Coating, format_trace, run_episode
from layersep.mechanics import ClampSpec, RollerSpec, RollerSurface, SeparationScenario

db = load_database()
scenario = SeparationScenario(db.stack("plastic-paper"), db.friction, normal_force=1.0,
                              clamp=ClampSpec.finger())
config = EpisodeConfig(scenario)
trace = run_episode(config)
print(format_trace(trace))

# %% A smooth roller that keeps turning too long drags the bottom layer in
smooth = scenario.replace(roller=RollerSpec(surface=RollerSurface.SMOOTH))
print(run_episode(EpisodeConfig(smooth, roller_stop_delay=0.5)).terminal)

# %% Pull force against grasp capacity, plain vs silicone fingers
for coating in Coating:
    for pull in (40.0, 70.0, 90.0):
        cfg = dataclasses.replace(config, fingers=FingerSpec(coating=coating), pull_force=pull)
        t = run_episode(cfg)
        print(f"{coating.value:9s} pull={pull:5.1f} N capacity={t.holding_capacity:5.1f} N -> {t.terminal}")
