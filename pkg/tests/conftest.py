import pytest

from layersep.graspfsm import EpisodeConfig, FingerSpec
from layersep.materials import FrictionTable, LayerStack, MaterialSheet, load_database
from layersep.mechanics import ClampSpec, RollerSpec, SeparationScenario


@pytest.fixture(scope="session")
def db():
    return load_database()


@pytest.fixture
def scenario_for(db):
    def make(pair="plastic-paper", **kw):
        return SeparationScenario(db.stack(pair), db.friction, **kw)

    return make


@pytest.fixture
def nominal_config(scenario_for):
    """Plastic-paper bag flap, dented roller, fingers at the bench gap."""
    s = scenario_for("plastic-paper", normal_force=1.0, clamp=ClampSpec.finger())
    return EpisodeConfig(s, FingerSpec(), roller_stop_delay=0.1, pull_force=40.0)


def make_sheet(name="s", E=1e9, h=1e-4, w=0.1, top="a", bottom="b"):
    return MaterialSheet(name, E, h, w, 0.5, top, bottom)


def synthetic_scenario(mu_roller, mu_layers, mu_table, fn, clamp=None, adhesion=0.0,
                       top=None, bottom=None):
    """Scenario on made-up surfaces so each interface coefficient is set directly."""
    top = top or make_sheet("top", top="t-up", bottom="t-down")
    bottom = bottom or make_sheet("bottom", top="b-up", bottom="b-down")
    table = FrictionTable({
        ("roller", top.top_surface): mu_roller,
        (top.bottom_surface, bottom.top_surface): mu_layers,
        (bottom.bottom_surface, "table"): mu_table,
    })
    return SeparationScenario(
        LayerStack(top, bottom, "table"), table,
        roller=RollerSpec(roller_surface_id="roller"),
        normal_force=fn,
        clamp=clamp or ClampSpec.unclamped(),
        interlayer_adhesion=adhesion,
    )
