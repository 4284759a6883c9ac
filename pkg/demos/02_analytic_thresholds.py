"""Required SNR for ABEP 1e-4 from the closed-form analysis.

The pairwise error probability with pilot-based channel estimates is a
single numerical integral, so a whole threshold table takes seconds. The
pilot count Np controls how far each row sits above the perfect-CSI column.
"""

from sskcsi import analytic
from sskcsi.config import SystemConfig

print("TOSD-SSK: Em/N0 (dB) for ABEP = 1e-4")
print("rate  Nr    Np=1   Np=3  Np=10   PCSI")
for rate in (1, 2, 3, 4):
    for nr in (1, 2):
        cells = [analytic.snr_for_abep(1e-4, SystemConfig(n_tx=2**rate, n_rx=nr, n_pilots=n))
                 for n in (1, 3, 10, None)]
        print(f"{rate:4d} {nr:3d}  " + "  ".join(f"{v:5.2f}" for v in cells))

print("\nABEP vs SNR, Nt = 2, Nr = 2: the slope of every curve approaches 2 Nr = 4")
for db in (10, 20, 30, 40):
    vals = [analytic.abep(SystemConfig(n_rx=2, n_pilots=n, snr_db=db)) for n in (1, 10, None)]
    print(f"  {db:2d} dB  Np=1 {vals[0]:.3e}  Np=10 {vals[1]:.3e}  PCSI {vals[2]:.3e}")
