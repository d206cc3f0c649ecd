"""Three delta interactions converging to a delta-prime interaction.

Run with ``python3 demos/deltaprime_limit.py``.
"""
import numpy as np

from deltaprime import ArrayResolvent, CouplingConfig, DeltaPrimeResolvent, study
from deltaprime.spectra import find_bound_states

beta, kappa = -1.0, 4.0
target = DeltaPrimeResolvent(beta, kappa)
x = np.array([-1.0, -0.2, 0.3, 1.5])
X, XP = np.meshgrid(x, x, indexing="ij")

print("pointwise kernel error, O(a):")
for a in (0.1, 0.01, 0.001):
    triple = ArrayResolvent.cheon_shigehara(CouplingConfig(beta, a), kappa)
    print(f"  a={a:<6} max |K_a - K| = {np.max(np.abs(triple(X, XP) - target(X, XP))):.3e}")

# the shallow bound state tends to -4/beta²; a second, deep one escapes to -infinity
for a in (0.1, 0.01):
    states = find_bound_states(CouplingConfig(beta, a), kappa_max=10.0)
    print(f"  a={a:<6} bound states in kappa <= 10: {[round(s.energy, 6) for s in states]}")

rep = study("triple-to-deltaprime", {"beta": beta, "kappa": kappa})
print("\nHilbert-Schmidt distances:")
print(rep.to_csv(), end="")
print(f"fitted rate {rep.fitted_rate:.3f}")
