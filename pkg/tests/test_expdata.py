import dataclasses
import math
import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from layersep.graspfsm import Coating, Done, FailureReason, FingerSpec, holding_capacity
from layersep.expdata import (
    LOG_COLUMNS,
    LogFormatError,
    TrialRecord,
    bundled_log_path,
    fit_holding_model,
    format_group_table,
    format_log,
    format_pull_table,
    format_summary,
    ingest_log,
    read_log,
    summarize,
    write_log,
)
from layersep.mechanics import RollerSurface

HEADER = ",".join(LOG_COLUMNS)


@pytest.fixture(scope="module")
def table1():
    return ingest_log(bundled_log_path("table1_trials.csv"))


@pytest.fixture(scope="module")
def fig9():
    return ingest_log(bundled_log_path("fig9_pull.csv"))


def record(i=0, coating=Coating.PLAIN, close=100.0, pull=None, outcome=Done(), pair="x"):
    return TrialRecord(f"t{i}", pair, 0.002, 18.3, 0.01, RollerSurface.DENTED, coating,
                       close, outcome, pull)


def linear_records(mu, rc, forces, coating, count=2):
    return [record(i, coating, f, mu * f * count + rc) for i, f in enumerate(forces)]


# -- ingestion ---------------------------------------------------------------------

def test_bundled_table1_has_62_records(table1):
    assert len(table1) == 62
    assert {r.material_pair for r in table1} == {"fully-sealed-bag", "pre-opened-bag"}
    assert table1[0].line == 2


def test_empty_file_reports_no_records(tmp_path):
    p = tmp_path / "empty.csv"
    p.write_text("", encoding="utf-8")
    with pytest.raises(LogFormatError, match="no records"):
        ingest_log(p)
    with pytest.raises(LogFormatError, match="no records"):
        read_log(HEADER + "\n")


def test_unknown_outcome_reports_its_line():
    good = "a,x,0.002,18.3,0.01,Dented,Silicone,100,Success,"
    bad = "b,x,0.002,18.3,0.01,Dented,Silicone,100,Exploded,"
    with pytest.raises(LogFormatError, match=r"line 3: unknown outcome 'Exploded'") as info:
        read_log("\n".join([HEADER, good, bad]) + "\n")
    assert info.value.line == 3


@pytest.mark.parametrize("row, msg", [
    ("a,x,0.002,18.3,0.01,Bumpy,Silicone,100,Success,", "unknown roller"),
    ("a,x,0.002,18.3,0.01,Dented,Velvet,100,Success,", "unknown coating"),
    ("a,x,0.002,18.3,0.01,Dented,Plain,-5,Success,", "close_force"),
    ("a,x,abc,18.3,0.01,Dented,Plain,100,Success,", "line 2"),
    ("a,x,0.002,18.3", "expected 10 fields"),
])
def test_malformed_rows(row, msg):
    with pytest.raises(LogFormatError, match=msg):
        read_log(HEADER + "\n" + row + "\n")


def test_wrong_header():
    with pytest.raises(LogFormatError, match="line 1: header"):
        read_log("id,outcome\n1,Success\n")


def test_failure_outcomes_parse():
    recs = read_log(HEADER + "\na,x,0,1,0,Smooth,Plain,0,BottomLayerCaptured,\n")
    assert recs[0].outcome == Done(FailureReason.BOTTOM_LAYER_CAPTURED)
    assert recs[0].max_pull_force is None


@pytest.mark.parametrize("name", ["table1_trials.csv", "fig9_pull.csv"])
def test_write_back_round_trip(tmp_path, name):
    records = ingest_log(bundled_log_path(name))
    out = tmp_path / name
    write_log(out, records)
    assert ingest_log(out) == records
    assert b"\r" not in out.read_bytes()


# -- summaries ------------------------------------------------------------------------

def test_table1_rates(table1):
    report = summarize(table1)
    sealed = report.groups[("fully-sealed-bag",)]
    opened = report.groups[("pre-opened-bag",)]
    assert (sealed.successes, sealed.trials, sealed.percent()) == (29, 31, "93.55%")
    assert (opened.successes, opened.trials, opened.percent()) == (30, 31, "96.77%")
    assert sum(g.trials for g in report.groups.values()) == report.total == 62


def test_plain_fingers_exceed_55n_near_edge(fig9):
    near = [r for r in fig9 if r.coating is Coating.PLAIN and r.edge_distance <= 0.005]
    assert summarize(near).pull[Coating.PLAIN].max >= 55.0


def test_singleton_success():
    report = summarize([record()])
    assert report.groups[("x",)].rate == 1.0


def test_summarize_errors():
    with pytest.raises(ValueError, match="no records"):
        summarize([])
    with pytest.raises(ValueError, match="cannot group by"):
        summarize([record()], group_by=("colour",))


def test_multi_key_grouping(fig9):
    report = summarize(fig9, group_by=("coating", "edge_distance"))
    assert len(report.groups) == 10
    assert all(g.trials == 3 for g in report.groups.values())


def test_summary_text_sections(table1, fig9):
    text = format_summary(summarize(table1 + fig9, fit=True))
    for section in ("[summary]", "[groups]", "[pull_force]", "[calibration]"):
        assert section in text
    assert "fully-sealed-bag=29/31 (93.55%)" in text
    assert "contact_stiffness=unavailable" in text


def test_csv_tables(fig9):
    report = summarize(fig9, group_by=("coating",))
    groups = format_group_table(report).splitlines()
    assert groups[0] == "coating,successes,trials,rate"
    assert len(groups) == 3
    pulls = format_pull_table(report).splitlines()
    assert pulls[0] == "coating,count,min_n,max_n,mean_n" and len(pulls) == 3


@settings(max_examples=30)
@given(st.randoms(use_true_random=False))
def test_summarize_is_permutation_invariant(rnd):
    records = ingest_log(bundled_log_path("table1_trials.csv")) + \
        ingest_log(bundled_log_path("fig9_pull.csv"))
    shuffled = records[:]
    rnd.shuffle(shuffled)
    assert summarize(shuffled, fit=True) == summarize(records, fit=True)


# -- calibration -------------------------------------------------------------------------

def test_bundled_calibration_gap_and_recovery(fig9):
    cal = fit_holding_model(fig9)
    assert cal.median_close_force == 100.0
    assert 15.0 <= cal.coating_gap() <= 20.0
    plain, sil = cal.fits[Coating.PLAIN], cal.fits[Coating.SILICONE]
    assert (plain.mu_eff, plain.roller_contribution) == pytest.approx((0.20, 20.0), rel=1e-9)
    assert (sil.mu_eff, sil.roller_contribution) == pytest.approx((0.28, 22.0), rel=1e-9)
    assert not plain.rank_deficient


@settings(max_examples=50)
@given(st.floats(0.05, 1.0), st.floats(0.0, 50.0),
       st.lists(st.floats(10.0, 300.0), min_size=2, max_size=12, unique=True))
def test_exact_linear_data_is_recovered(mu, rc, forces):
    if max(forces) - min(forces) < 1.0:
        return
    records = linear_records(mu, rc, forces, Coating.PLAIN)
    fit = fit_holding_model(records).fits[Coating.PLAIN]
    assert fit.mu_eff == pytest.approx(mu, rel=1e-9)
    assert fit.roller_contribution == pytest.approx(rc, rel=1e-9, abs=1e-9)
    assert fit.residual_norm <= 1e-9 * max(r.max_pull_force for r in records)


def test_coincident_points_fall_back_to_intercept_only():
    records = [record(0, Coating.PLAIN, 100.0, 60.0), record(1, Coating.PLAIN, 100.0, 64.0)]
    fit = fit_holding_model(records).fits[Coating.PLAIN]
    assert fit.rank_deficient
    assert fit.mu_eff == 0.0
    assert fit.roller_contribution == pytest.approx(62.0)
    assert fit.residual_norm == pytest.approx(math.sqrt(8.0))


def test_fit_needs_two_records_per_coating():
    records = linear_records(0.2, 20, [80.0, 120.0], Coating.PLAIN) + [
        record(9, Coating.SILICONE, 100.0, 80.0)]
    with pytest.raises(ValueError, match="need >= 2 pull records for Silicone"):
        fit_holding_model(records)
    with pytest.raises(ValueError, match="no records with max_pull_force"):
        fit_holding_model([record()])


def test_missing_coating_in_calibration():
    cal = fit_holding_model(linear_records(0.2, 20, [80.0, 120.0], Coating.PLAIN))
    with pytest.raises(KeyError, match="Silicone"):
        cal.capacity(Coating.SILICONE, 100.0)


def test_capacity_reproduces_records_within_residual_bound():
    # noisy data: capacity from the FSM helper stays within each fit's reported max residual
    rng = random.Random(5)
    records = []
    for coating, mu, rc in ((Coating.PLAIN, 0.2, 20.0), (Coating.SILICONE, 0.28, 22.0)):
        for i, f in enumerate((60.0, 80.0, 100.0, 120.0, 140.0)):
            records.append(record(i, coating, f, mu * 2 * f + rc + rng.uniform(-3, 3)))
    cal = fit_holding_model(records)
    for r in records:
        fit = cal.fits[r.coating]
        predicted = holding_capacity(FingerSpec(coating=r.coating, close_force=r.close_force), cal)
        assert abs(predicted - r.max_pull_force) <= fit.max_abs_residual + 1e-9
        assert fit.max_abs_residual <= fit.residual_norm + 1e-12


def test_record_validation():
    with pytest.raises(ValueError):
        record(pull=-1.0)
    assert dataclasses.replace(record(), line=7) == record()
