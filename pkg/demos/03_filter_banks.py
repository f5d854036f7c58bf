"""
Chebyshev bandpass filter banks
===============================

Band indicators on the normalized spectrum are expanded in Chebyshev
polynomials with closed-form coefficients. Higher truncation orders
sharpen the transition between stopband and passband; a bank whose
bands tile the spectrum is a partition of unity, so the filtered pieces
add back up to the original signal.

Writes response plots to ``demos/output/`` when matplotlib is available.
"""

from pathlib import Path

import numpy as np

import surfaug as sa
from surfaug.filters import evaluate_response

LAMBDA_MAX = 10.9

# %% Two designs: uniform tiling (here 109 bands of width 0.1) and the
# dyadic tiling that spends its bands in the low spectrum (109 again at
# depth 5).
uniform = sa.design_uniform(LAMBDA_MAX, 0.1, order=1000)
dyadic = sa.design_dyadic(LAMBDA_MAX, 5, order=1000)
print(uniform)
print(dyadic)
print("finest dyadic band:", dyadic.bands[0], "coarsest:", dyadic.bands[-1])

# %% A filter's sharpness is its 10-90% transition width at the lower
# band edge, measured on a dense grid in normalized units. It shrinks
# roughly like 1/K.
band = (0.05 * LAMBDA_MAX, 0.10 * LAMBDA_MAX)
for order in (500, 2000, 5000):
    theta = sa.band_coefficients(band, LAMBDA_MAX, order)
    width = sa.transition_width(theta, LAMBDA_MAX)
    print(f"order {order:>4d}: transition width {width:.2e}")

# %% Tiling banks telescope: the coefficient rows sum to the identity
# filter, so responses sum to one everywhere, not just asymptotically.
summed = dyadic.theta.sum(axis=0)
print("telescoped coefficients: theta_0 =", summed[0],
      " max|theta_k>0| =", np.abs(summed[1:]).max())

# %% Applying a bank via the fused recurrence and adding the mean
# channel reconstructs the input.
mesh = sa.icosphere(2)
op = sa.assemble(mesh)
lam = sa.spectral_radius(op)
opn = sa.normalize(op)
bank = sa.design_dyadic(lam, 3, order=500)
rng = np.random.default_rng(1)
f = rng.normal(size=(3, mesh.num_vertices))
back = sa.reconstruct(opn, bank, f)
print("bank reconstruction error:", np.abs(back - f).max())

# %% Optional: plot a few responses and the Gibbs ringing they carry.
try:
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt
except ImportError:
    print("matplotlib not installed; skipping plots")
else:
    out_dir = Path(__file__).parent / "output"
    out_dir.mkdir(exist_ok=True)
    grid = np.linspace(-1, 1, 20001)

    fig, axes = plt.subplots(1, 2, figsize=(11, 4))
    for order in (500, 2000, 5000):
        theta = sa.band_coefficients(band, LAMBDA_MAX, order)
        axes[0].plot(grid, evaluate_response(theta, grid), lw=0.8,
                     label=f"K={order}")
    axes[0].set_xlim(-0.95, -0.75)
    axes[0].set_title("band indicator approximations")
    axes[0].set_xlabel("normalized eigenvalue")
    axes[0].legend()

    small = sa.design_dyadic(LAMBDA_MAX, 3, order=2000)
    resp = evaluate_response(small.theta, grid)
    for row in resp:
        axes[1].plot(grid, row, lw=0.6)
    axes[1].plot(grid, resp.sum(axis=0), "k--", lw=1.2, label="sum")
    axes[1].set_title("dyadic bank (depth 3) and its partition of unity")
    axes[1].set_xlabel("normalized eigenvalue")
    axes[1].legend()
    fig.tight_layout()
    fig.savefig(out_dir / "filter_responses.png", dpi=120)
    print("wrote", out_dir / "filter_responses.png")
