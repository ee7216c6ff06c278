"""From the generators to spectral-parameter dependent R and K matrices."""
# %%
import numpy as np

from twinblob import LaxFactory, make_params, sample_pairs, twin_rep
from twinblob.algebra import perturbed_rep
from twinblob.baxter import check_re, check_unitarity_crossing, check_ybe

p = make_params(0.7, 2.0, model="twin", boundary="ii")
lax = LaxFactory(twin_rep(p, 2, "ii"))
pairs = sample_pairs(7, 5, lax.mu)

# %% Yang-Baxter and reflection equations at random spectral parameters.
ybe = max(r.residual for r in check_ybe(lax, pairs))
re = max(r.residual for r in check_re(lax, pairs))
print(f"YBE worst {ybe:.1e}   RE worst {re:.1e}")

# %% Shift a single entry of the generator: YBE breaks visibly.
bad = LaxFactory(perturbed_rep(lax.rep, 1e-2))
print(f"perturbed YBE smallest {min(r.residual for r in check_ybe(bad, pairs)):.1e}")

# %% R is unitary up to a scalar; R-hat is its rescaled inverse.
lam = 0.4 + 0.1j
print("R(l) R21(-l) / scalar - 1:",
      np.abs(lax.R(lam) @ lax.R21(-lam) / lax.unitarity_scalar(lam) - np.eye(16)).max())
print("closed-form R-hat vs inverse:", np.abs(lax.Rhat(lam) - lax.Rhat_by_inverse(lam)).max())
for r in check_unitarity_crossing(lax, [lam]):
    print(f"  {r.check_id:<34} {r.residual:.1e}")
