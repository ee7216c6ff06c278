"""Hamiltonian spectra of the twin chain and their degeneracies."""
# %%
from twinblob import DoubleRow, LaxFactory, make_params, twin_rep
from twinblob.transfer import multiplicities, spectrum

for boundary in ("trivial", "i", "plus"):
    for N in (2, 3):
        p = make_params(0.7, 2.0, model="twin", boundary=boundary)
        H = DoubleRow(LaxFactory(twin_rep(p, N, boundary))).hamiltonian()
        groups = multiplicities(spectrum(H))
        mult = sorted((m for _, m in groups), reverse=True)
        print(f"{boundary:>8} N={N}: {len(groups):>3} levels, multiplicities {mult}")

# %% With no boundary the twin generator has rank one per bond, so the
# spectrum collapses onto very few levels.
