# %% [markdown]
# # Main and secondary terms
#
# With Pi = sqrt(T) the diagonal term D is Pi T / pi^(3/2) to rounding. The
# excess of the full arithmetic side over that main term is fitted as
# a Pi T^b and compared with the candidate constants 2/pi, 2 zeta(1/2)/pi
# and 0. The three heights take a few minutes for the even parity.

# %%
import math

from maassmean import explicit

T = [100.0, 400.0, 1600.0]
for delta in (0, 1):
    rows, fit = explicit.asymptotic_table(delta, T, "sqrt")
    print(f"delta = {delta}")
    for r in rows:
        main = r.Pi * r.T / math.pi ** 1.5
        print(f"  T={r.T:6.0f}  D/main-1={r.D / main - 1:+.1e}  excess={r.value - main:+.4f}")
    print(f"  exponent {fit.exponent:.4f}  coefficient {fit.coefficient:+.6f} +- {fit.stderr:.1e}")
    print("  candidates", {k: round(v, 6) for k, v in fit.candidates.items()})

# %% [markdown]
# The sharp-cutoff prediction is related to the smooth one through dyadic
# windows; summing the windows telescopes back to the restricted count.

# %%
Tbig = 1e4
blocks = math.fsum(explicit.sharp_prediction("window", 3 * Tbig / 2 ** (k + 2), Tbig / 2 ** (k + 2))
                   for k in range(80))
print(blocks, explicit.sharp_prediction("delta_restricted", Tbig))
