# %% [markdown]
# # Interpolating toward a marked state, and the matching Hamiltonian
#
# Mixing the chain with a copy in which state j is absorbing moves stationary
# mass onto j.  At s* exactly half the mass sits on j, which is what lets a
# quantum walk start from the basis state |j> with constant overlap.

# %%
import numpy as np

from qssamp import interpolation as ip
from qssamp import markov_core as mc
from qssamp import spectral_hamiltonian as sh

chain = mc.gen_family("birth-death", 4, up=0.33, down=0.2)
pi = mc.stationary_distribution(chain)
j = 0
s_star = ip.s_star(pi[j])
print(f"pi_j = {pi[j]:.4f}, s* = {s_star:.4f}")

# %%
for s in (0.0, 0.5, s_star, 0.95):
    print(f"s = {s:.3f}  pi(s) = {np.round(ip.interpolated_stationary(chain, j, s), 4)}")

# %% [markdown]
# The Hamiltonian keeps the discriminant's eigenvectors and maps each
# eigenvalue lambda to sqrt(1 - lambda^2).  Its kernel is sqrt(pi(s)).

# %%
H = sh.hamiltonian_for(chain, j, s_star)
print("mu =", np.round(H.mu, 4))
print("ground state      =", np.round(H.ground_state, 4))
print("sqrt(pi(s*))      =", np.round(np.sqrt(ip.interpolated_stationary(chain, j, s_star)), 4))
print("<j|ground>^2      =", H.ground_state[j] ** 2)

# %% [markdown]
# The Hamiltonian gap relates to the chain gap by gap^2 = Delta (2 - Delta),
# never smaller than sqrt(Delta).

# %%
H0 = sh.hamiltonian_for(chain)
d = mc.spectral_gap(chain)
print(f"Delta = {d:.4f}, H gap = {H0.gap:.4f}, sqrt(Delta) = {np.sqrt(d):.4f}")
