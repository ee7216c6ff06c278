"""Double-row transfer matrices: commutation, Hamiltonian, and boundary symmetries."""
# %%
from twinblob import DoubleRow, LaxFactory, make_params, sample_lambdas, twin_rep
from twinblob.tensor import comm_residual
from twinblob.transfer import check_hamiltonian, check_symmetry_suite

p = make_params(0.7, 2.0, model="twin", boundary="iii")
dr = DoubleRow(LaxFactory(twin_rep(p, 3, "iii")))
l1, l2 = 0.3 + 0.2j, -0.5 + 0.1j

# %% A one-parameter family of commuting operators.
print(f"[t(l1), t(l2)] = {comm_residual(dr.transfer_t(l1), dr.transfer_t(l2)):.1e}")

# %% The derivative at zero is a sum of local terms.
for r in check_hamiltonian(dr, sample_lambdas(3, 2, dr.lax.mu)):
    print(f"  {r.check_id:<34} {r.residual:.1e}")

# %% Which tower generators survive this boundary, and which do not.
for r in check_symmetry_suite(dr, sample_lambdas(4, 2, dr.lax.mu)):
    tag = "(control, expected large)" if r.is_negative else ""
    print(f"  {r.check_id:<42} {r.residual:.1e} {tag}")
