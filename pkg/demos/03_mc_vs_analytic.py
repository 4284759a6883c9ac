"""Monte Carlo check of the analytic TOSD-SSK error rate.

With two antennas the union bound is exact, so the simulated BER must
scatter around the analytic curve inside its Wilson confidence interval.
With more antennas the analytic value is an upper bound.
"""

from sskcsi import montecarlo as mc
from sskcsi.config import SystemConfig

rule = mc.StoppingRule(min_errors=300)
for nt in (2, 8):
    cfg = SystemConfig(n_tx=nt, n_rx=1, n_pilots=3)
    print(f"Nt = {nt}, Nr = 1, Np = 3")
    for p in mc.sweep(cfg, "tosd_ssk", [0, 5, 10, 15, 20, 25], rule, base_seed=1):
        if nt == 2:
            verdict = "inside CI" if p.ci_low <= p.abep_analytic <= p.ci_high else "outside CI"
        else:
            # the bound is loose (even above 1) at low SNR and tightens as errors get rare
            verdict = f"{p.abep_mc / p.abep_analytic:.2f} of the bound"
        print(f"  {p.snr_db:4.1f} dB  mc {p.abep_mc:.3e} [{p.ci_low:.3e}, {p.ci_high:.3e}]"
              f"  analytic {p.abep_analytic:.3e}  {verdict}")
