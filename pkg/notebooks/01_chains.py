# %% [markdown]
# # Markov chains and their classical statistics
#
# Every quantity the quantum protocol cares about starts classically: the
# stationary distribution, the spectral gap, and two time scales (mixing and
# hitting).  This walk-through builds a few chains and inspects them.

# %%
import numpy as np

from qssamp import markov_core as mc

# %% [markdown]
# A birth-death chain on four states drifts upward, so the bottom state is rare.

# %%
chain = mc.gen_family("birth-death", 4, up=0.33, down=0.2)
print(chain.P)
pi = mc.stationary_distribution(chain)
print("pi      =", np.round(pi, 4))
print("pi P    =", np.round(pi @ chain.P, 4))

# %% [markdown]
# Birth-death chains satisfy detailed balance, which is what makes the
# symmetric discriminant (and hence a real spectrum) available.

# %%
print("reversible:", mc.is_reversible(chain, pi))
sp = mc.spectrum(chain, pi)
print("eigenvalues:", np.round(sp.eigenvalues, 4))
print("gap 1 - |lambda_2| =", mc.spectral_gap(chain, pi))

# %% [markdown]
# Mixing time is worst-case over starting states; hitting time starts from pi.
# The relaxation-time bounds bracket the mixing time.

# %%
delta = mc.spectral_gap(chain)
for eps_mix in (0.25, 0.01):
    t = mc.mixing_time(chain, eps_mix)
    lo = (1 / delta - 1) * np.log(1 / (2 * eps_mix))
    hi = (1 / delta) * np.log(1 / (eps_mix * pi.min()))
    print(f"eps_mix={eps_mix}: {lo:.2f} <= t_mix={t} <= {hi:.2f}")
print("T_hit(state 0) =", round(mc.hitting_time(chain, 0), 3))

# %% [markdown]
# Lazifying halves the gap but pushes every eigenvalue to be nonnegative.

# %%
lazy = mc.lazify(chain)
print("lazy gap:", mc.spectral_gap(lazy), "vs", delta / 2)
