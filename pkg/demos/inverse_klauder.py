"""Disbalanced triples collapse to the Dirichlet decoupling.

Run with ``python3 demos/inverse_klauder.py``.
"""
from deltaprime import study
from deltaprime.convergence import negative_control

rep = study("alpha-to-dirichlet", {"alpha": 2.0, "beta": -1.0, "kappa": 2.0})
print("alpha = 2, distance to the Dirichlet kernel:")
for r in rep.rows:
    print(f"  a={r.param:<9.6g} hs={r.hs_distance:.4e} op={r.op_norm:.4e}")
print(f"fitted rate {rep.fitted_rate:.3f}")

# the same arrays stay a fixed distance away from the delta-prime kernel
control, floor = negative_control({"beta": -1.0, "kappa": 3.0, "alpha": 2.0})
print("\ndistance to the delta-prime kernel (kappa = 3):")
for a, d in control:
    print(f"  a={a:<9.6g} hs={d:.5f}")
print(f"closed-form plateau {floor:.5f}")
