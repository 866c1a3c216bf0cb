# %% [markdown]
# # Explicit formula at small height
#
# The first moment of L(1/2, f) against the modified Gaussian weight at
# T = 12, Pi = 2 is computed twice: once from the spectral data, once from
# the arithmetic side term by term.

# %%
from maassmean import explicit, spectral

forms = spectral.load_dataset(spectral.bundled_dataset_path())
w = explicit.TestWeight(12, 2)

# %%
for delta in (0, 1):
    bd = explicit.rhs_total(delta, w)
    lhs, lhs_tail = spectral.lhs_mean(delta, w, forms, t_max=spectral.BUNDLED_T_MAX)
    print(f"delta = {delta}")
    for name, tv in bd.terms.items():
        print(f"  {name:9s} {explicit.TERM_SIGNS[name]:+d}  {tv.value.real:+.10f} {tv.value.imag:+.10f}i")
    print(f"  total      {bd.total:.12f}")
    print(f"  spectral   {lhs:.12f}   difference {abs(lhs - bd.total):.1e}")

# %% [markdown]
# The breakdown serialises to a versioned JSON object that reads back
# without loss.

# %%
text = explicit.rhs_total(0, w, m=2).to_json()
print(text[:160], "...")
print(explicit.TermBreakdown.from_json(text).total)
