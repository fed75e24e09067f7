# %% [markdown]
# # Filtering with a pointer register
#
# Coupling the system to a pointer through H (x) p shifts the pointer by
# mu_k t on the k-th eigencomponent.  Post-selecting the pointer at x = 0
# keeps the zero-energy part and suppresses the rest.

# %%
import numpy as np

from qssamp import analog_sim as asim
from qssamp import markov_core as mc
from qssamp import spectral_hamiltonian as sh

H = sh.hamiltonian_for(mc.gen_family("two-state", 2, p=0.5, q=0.5))  # mu = {0, 1}
ptr = asim.init_pointer(16)
psi = 0.6 * H.U[:, 0] + 0.8 * H.U[:, 1]
joint = asim.evolve(H, asim.joint_state(psi, ptr), 3.0)
weights = np.sum(np.abs(joint.amplitudes) ** 2, axis=0)
print("pointer distribution:", dict(zip(ptr.positions.astype(int), np.round(weights, 3))))
kept, prob = asim.postselect_zero(joint)
print("acceptance", round(prob, 6), "= |alpha_0|^2 =", 0.36)

# %% [markdown]
# One stage repeats this ceil(log2(4/eps)) times with t = 1/sqrt(Delta).

# %%
chain = mc.gen_family("birth-death", 4, up=0.33, down=0.2)
H = sh.hamiltonian_for(chain)
state, diag = asim.filter_stage(H, np.eye(4)[0], eps=0.05)
print(f"rounds {diag.rounds}, t/round {diag.t_per_round:.3f}, overlap {diag.overlap_in:.3f} -> {diag.overlap_out:.10f}")
print("round acceptance:", np.round(diag.round_probs, 4))

# %% [markdown]
# The full protocol runs stage 1 at s* from |j>, then stage 2 on the original
# chain.  Using the exact s* needs pi_j, which is why the output labels it as
# oracle-assisted.

# %%
result = asim.run_protocol(chain, 0, asim.ProtocolConfig(eps=0.05))
print(f"fidelity^2 {result.fidelity_sq:.12f}, success {result.success_prob:.4f}, source {result.s_prime_source}")
off = asim.run_protocol(chain, 0, asim.ProtocolConfig(eps=0.05, s_prime=result.s_prime + 0.08))
print(f"s* + 0.08: fidelity^2 {off.fidelity_sq:.12f}, success {off.success_prob:.4f}")

# %% [markdown]
# Sampled mode restarts a stage whenever a post-selection fails and counts the
# repetitions.

# %%
sampled = asim.run_protocol(chain, 0, asim.ProtocolConfig(mode="sampled", seed=1))
print("attempts per stage:", sampled.stage1.attempts, sampled.stage2.attempts)
