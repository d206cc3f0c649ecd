"""Squeezed potentials approaching the three-delta array.

Run with ``python3 demos/squeezed_potential.py``.
"""
from deltaprime import study

rep = study("potential-to-triple", {"beta": 0.5, "kappa": 2.0, "shapes": "box:h=0.5",
                                    "eps_grid": [1e-4, 1e-6, 1e-8], "rule_nu": 1 / 16})
print(f"measured Krein constant C = {rep.config['c_gamma']:.4f}")
print(f"{'eps':>8} {'a':>8} {'tau':>9} {'hs':>10} {'op':>10} {'bound':>9}")
for r in rep.rows:
    print(f"{r.param:8.0e} {r.extra['a']:8.4f} {r.tau:9.4g} {r.hs_distance:10.3e} "
          f"{r.op_norm:10.3e} {r.extra.get('neumann_bound', float('inf')):9.3g}")
