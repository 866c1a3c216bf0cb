# %% [markdown]
# # The trace formula on the bundled forms
#
# The bundled fixture holds every level-one Maass cusp form with spectral
# parameter below 30. With a Gaussian test pair centred well inside that
# range, the cusp side and the Kloosterman side of the trace formula must
# agree up to the reported tail budget.

# %%
from maassmean import spectral
from maassmean.numkernel import SeriesBudget

forms = spectral.load_dataset(spectral.bundled_dataset_path())
print(len(forms), "forms; largest t =", max(f.t for f in forms))
print("even:", sum(f.parity == 0 for f in forms), " odd:", sum(f.parity == 1 for f in forms))

# %% [markdown]
# Hecke multiplicativity holds to roughly the precision the coefficients
# were computed with.

# %%
worst = max(spectral.hecke_deviation(f)[0] for f in forms)
print(f"largest Hecke deviation over the fixture: {worst:.1e}")

# %% [markdown]
# Both sides for a few (m, n), with a modest modulus cutoff so the cell runs
# in seconds. The residual sits far below the budget.

# %%
h = spectral.GaussianPair(12, 3)
budget = SeriesBudget(c_max=1000)
for m, n in [(1, 1), (1, 2), (2, 3)]:
    for delta in (0, 1):
        rep = spectral.kuznetsov_sides(delta, m, n, h, forms, budget, t_max=spectral.BUNDLED_T_MAX)
        print(f"m={m} n={n} delta={delta}: cusp {rep.cusp.real:+.6f}  residual {abs(rep.residual):.1e}"
              f"  budget {rep.tail_budget:.1e}")
