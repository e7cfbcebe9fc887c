"""
Trial logs: success rates and the holding-force fit
====================================================
"""

# %%
from layersep.expdata import (
    bundled_log_path, fit_holding_model, format_summary, ingest_log, summarize,
)
from layersep.graspfsm import Coating

table1 = ingest_log(bundled_log_path("table1_trials.csv"))
print(format_summary(summarize(table1)))

# %%
pulls = ingest_log(bundled_log_path("fig9_pull.csv"))
cal = fit_holding_model(pulls)
for coating, fit in cal.fits.items():
    print(f"{coating.value:9s} mu_eff={fit.mu_eff:.4f} roller={fit.roller_contribution:.2f} N "
          f"residual={fit.residual_norm:.2e} N")
print(f"gap at {cal.median_close_force:g} N close force: {cal.coating_gap():.2f} N")

# %% Capacity over closing force
for f in (60, 80, 100, 120, 140):
    print(f, *(f"{cal.capacity(c, f):6.1f}" for c in Coating))
