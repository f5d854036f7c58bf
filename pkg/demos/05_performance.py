"""
Why the bandpass route scales
=============================

The eigenfunction route needs an eigendecomposition whose cost climbs
steeply with the number of modes, while the recurrence route costs one
sparse multiply per Chebyshev order: wall clock grows linearly in the
order and never touches eigenvectors. On large meshes that difference
is the whole story.

Uses a moderate mesh so the demo finishes in about a minute; bump
``RES`` to see the gap widen.
"""

import time

import numpy as np

import surfaug as sa

RES = 51  # uv-sphere resolution; V = RES*(RES-1) + 2

mesh = sa.uv_sphere(RES)
print("mesh:", mesh)
op = sa.assemble(mesh)
lam = sa.spectral_radius(op)
opn = sa.normalize(op)

rng = np.random.default_rng(0)
n = 8
signals = sa.SignalSet(data=rng.normal(size=(n, mesh.num_vertices)),
                       labels=np.zeros(n, dtype=int))

# %% Bandpass route: time grows like K (one sparse multiply per order).
print("\nc-pda (8 bands + mean):")
for order in (250, 500, 1000, 2000):
    bank = sa.design_uniform(lam, lam / 8, order=order)
    plan = sa.make_plan(n, bank.num_bands + 1, seed=0)
    t0 = time.perf_counter()
    sa.c_pda(opn, bank, signals, plan)
    print(f"  K={order:>5d}: {time.perf_counter() - t0:6.2f} s")

# %% Eigenfunction route: the decomposition dominates and grows much
# faster than linearly in the number of modes.
print("\nlb-eigda (eigendecomposition included):")
for num in (200, 400, 800):
    t0 = time.perf_counter()
    basis = sa.eigendecompose(op, num)
    plan = sa.make_plan(n, num, seed=0)
    sa.lb_eig_da(basis, signals, plan)
    print(f"  J={num:>5d}: {time.perf_counter() - t0:6.2f} s")

print("\nThe CLI 'bench' subcommand writes the same comparison as CSV.")
