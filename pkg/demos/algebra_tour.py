"""A tour of the two local representations and the relations they satisfy."""
# %%
import numpy as np

from twinblob import make_params, qgroup_rep, tower, twin_rep, xxz_rep
from twinblob.algebra import check_blob, theta_closed_form, theta_product
from twinblob.tensor import comm_residual

np.set_printoptions(precision=3, suppress=True, linewidth=110)

# %% Parameters: everything follows from mu and the boundary label Q.
p = make_params(0.7, 2.0, model="twin", boundary="i")
print("q =", np.round(p.q, 4), " delta =", np.round(p.delta, 4), " kappa =", np.round(p.kappa, 4))

# %% The twin generator acts on two 4-dim sites. Built from two XXZ generators
# with a leg shuffle, it agrees with the closed-form 16x16 matrix.
theta = theta_closed_form(p.r, p.r_hat)
print("rank:", np.linalg.matrix_rank(theta))
print("shuffle vs closed form:", np.abs(theta - theta_product(p.r, p.r_hat)).max())

# %% Relations on a 3-site twin chain with boundary element e.
rep = twin_rep(p, 3, "i")
for r in check_blob(rep):
    print(f"  {r.check_id:<34} {r.residual:.1e}")

# %% The XXZ chain commutes with the rho tower of U_q(sl2).
px = make_params(0.7, 2.0, model="xxz", boundary="trivial")
chain = xxz_rep(px, 4, "trivial")
tw = tower(qgroup_rep("rho", px), 4)
worst = max(comm_residual(tw.E_N, U) for U in chain.U_gens)
print("max |[E, U_l]| on 4 sites:", f"{worst:.1e}")
