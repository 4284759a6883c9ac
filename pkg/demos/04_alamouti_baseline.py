"""Alamouti with M-PSK under the same pilot budget.

Both schemes use the same estimator, so the comparison isolates the
modulation. At rate 1 Alamouti/BPSK needs less SNR than TOSD-SSK but pays a
larger Np = 1 penalty. From rate 2 upward TOSD-SSK wins, because
its constellation is the channel itself.
"""

from sskcsi import analytic, montecarlo as mc
from sskcsi.config import SystemConfig

rule = mc.StoppingRule(min_errors=200)
print("Required SNR (dB) for BER 1e-4, Nr = 1")
print("rate   Np   TOSD-SSK (analytic)   Alamouti (Monte Carlo)")
for rate in (1, 2):
    for npil in (1, None):
        cfg = SystemConfig(n_tx=2**rate, n_rx=1, n_pilots=npil)
        t = analytic.snr_for_abep(1e-4, cfg)
        a = mc.mc_snr_for_ber(cfg, "alamouti", 1e-4, rule, seed=3, start_db=15.0)
        label = "pcsi" if npil is None else npil
        print(f"{rate:4d} {label!s:>4}   {t:19.2f}   {a:22.2f}")
