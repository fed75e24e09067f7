# %% [markdown]
# # How the cost depends on s'
#
# With a guessed s' instead of s*, the overlaps alpha = <j|sqrt(pi(s'))> and
# beta = <sqrt(pi(s'))|sqrt(pi)> drift and the total cost
# A sqrt(T_hit) + B sqrt(T_mix) changes.

# %%
from qssamp import cost_model as cm
from qssamp import interpolation as ip

for eps, pi_j in cm.FIGURE1_PRESETS:
    rows = cm.sweep_AB(pi_j, eps)
    s = cm.sweep_summary(pi_j, eps, rows)
    print(f"eps={eps}, pi_j={pi_j}: s*={s['s_star']:.4f}, argmin A={s['argmin_A']:.4f}, "
          f"A(s*)={s['A_at_s_star']:.3f}, min A={s['min_A']:.3f}")

# %% [markdown]
# Note that the minimum of A lies to the right of s*.  A still grows sharply
# on either side:

# %%
pi_j, eps = 0.1, 0.01
star = ip.s_star(pi_j)
def A(s):
    return cm.coefficients_AB(cm.overlap_alpha(pi_j, s), cm.overlap_beta(pi_j, 0, s), eps)[0]
for d in (-0.1, -0.02, 0.0, 0.02, 0.05, 0.1):
    print(f"s' = s* {d:+.2f}: A = {A(star + d):8.3f} ({(A(star + d) / A(star) - 1) * 100:+.1f}%)")

# %% [markdown]
# The CSV written by the `figure1` command holds the same rows.

# %%
print(cm.sweep_to_csv(cm.sweep_AB(0.1, 0.01, 16)).splitlines()[:4])
