"""
Meshes and the surface Laplacian
================================

Build triangle meshes, assemble the cotangent Laplace-Beltrami operator,
and look at the numbers that every later stage depends on: zero row
sums, positive mixed vertex areas, and the spectral radius that
normalizes the operator onto [-1, 1].
"""

import numpy as np

import surfaug as sa

# %% Synthetic meshes come in three deterministic flavors. The icosphere
# is the workhorse: nearly uniform triangles at any resolution.
tetra = sa.tetrahedron()
sphere = sa.icosphere(3)
grid_sphere = sa.uv_sphere(17)

for mesh in (tetra, sphere, grid_sphere):
    print(mesh, "Euler characteristic:", mesh.euler_characteristic())

# %% Meshes round-trip exactly through OFF and ASCII PLY.
sa.save_mesh(sphere, "/tmp/sphere.off")
back = sa.load_mesh("/tmp/sphere.off")
print("round-trip exact:", np.array_equal(back.vertices, sphere.vertices))

# %% The operator factors into a stiffness matrix C (cotangent weights)
# and a vector A of mixed per-vertex areas. Row sums of C vanish, so
# constants are annihilated; the areas add up to the surface area.
op = sa.assemble(sphere)
print("max |row sum of C|:", np.abs(np.asarray(op.stiffness.sum(axis=1))).max())
print("total vertex area :", op.areas.sum())
print("total triangle area:", sphere.triangle_areas().sum())

# %% On the unit-edge tetrahedron everything is known in closed form:
# off-diagonal weights -1/sqrt(3), areas sqrt(3)/4, eigenvalues
# {0, 16/3, 16/3, 16/3}.
op_t = sa.assemble(tetra)
print("tetrahedron C[0, 1]:", op_t.stiffness[0, 1], "(-1/sqrt(3) =", -1 / np.sqrt(3), ")")
lam_t = sa.spectral_radius(op_t)
print("tetrahedron spectral radius:", lam_t, "(16/3 =", 16 / 3, ")")

# %% The spectral radius scales like 1/length^2: doubling the mesh
# coordinates divides every eigenvalue by four.
doubled = sa.TriMesh(tetra.vertices * 2, tetra.triangles)
print("doubled mesh radius:", sa.spectral_radius(sa.assemble(doubled)))

# %% Normalization maps the spectrum onto [-1, 1]: constants (eigenvalue
# 0) go to -1 times themselves, the top of the spectrum to +1 times
# itself. This is the operator the Chebyshev recurrence drives.
lam = sa.spectral_radius(op)
opn = sa.normalize(op)
const = np.ones(sphere.num_vertices)
print("normalized operator on a constant (should be -1):",
      (opn.apply(const) / const)[0])
