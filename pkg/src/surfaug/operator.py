"""Discrete Laplace-Beltrami operator on a triangle mesh.

The operator is factored as ``delta = A^-1 C`` with a sparse symmetric
stiffness matrix ``C`` of cotangent weights and a positive vector ``A``
of per-vertex mixed areas. Off-diagonal entries are
``C_ij = -(cot(t) + cot(p)) / 2`` over the angles opposite edge (i, j)
in its one or two incident triangles; diagonals make every row sum to
zero. A vertex's area collects, per incident triangle, the Voronoi
corner area when the triangle is nonobtuse, and area/2 at an obtuse
corner or area/4 at the other two corners otherwise.

The generalized problem ``C psi = lambda A psi`` is positive
semidefinite with a constant nullspace. ``normalize`` rescales the
spectrum onto [-1, 1], the domain of the Chebyshev recurrence in
:mod:`surfaug.filters`.
"""

from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
from scipy import sparse
from scipy.sparse.linalg import ArpackNoConvergence, eigsh

from .mesh import TriMesh

_DENSE_RADIUS_CUTOFF = 32


class ConvergenceError(RuntimeError):
    """Eigenvalue iteration hit its cap; carries the last estimate and residual."""

    def __init__(self, message, estimate=None, residual=None):
        super().__init__(message)
        self.estimate = estimate
        self.residual = residual


@dataclass
class LBOperator:
    """Assembled operator: stiffness ``C``, areas ``A``, and spectral radius.

    ``lambda_max`` is None until :func:`spectral_radius` stores it. The
    sparse matrix and area vector are never mutated after assembly, so
    the operator may be applied concurrently from several threads.
    """

    stiffness: sparse.csr_matrix
    areas: np.ndarray
    lambda_max: float | None = None

    @property
    def num_vertices(self) -> int:
        return self.areas.shape[0]


class NormalizedOperator:
    """Spectrum-normalized operator ``2 * A^-1 C / lambda_max - I``.

    Application costs a single sparse matrix-vector (or matrix-matrix)
    product: the row scaling by ``2 / (lambda_max * A)`` and the identity
    shift are folded into one precomputed CSR matrix. ``A^-1 C`` is never
    formed densely.
    """

    def __init__(self, matrix, areas, lambda_max):
        self._matrix = matrix
        self.areas = areas
        self.lambda_max = lambda_max

    @property
    def num_vertices(self) -> int:
        return self.areas.shape[0]

    def apply(self, x: np.ndarray) -> np.ndarray:
        """Apply to a vertex vector (V,) or a block of columns (V, m)."""
        if x.shape[0] != self.num_vertices:
            raise ValueError(
                f"signal has {x.shape[0]} vertices, operator has "
                f"{self.num_vertices}"
            )
        return self._matrix @ x

    def __matmul__(self, x):
        return self.apply(x)


def assemble(mesh: TriMesh) -> LBOperator:
    """Build stiffness matrix and mixed vertex areas from a mesh.

    Deterministic: the same mesh yields bit-identical ``C`` and ``A``.

    Raises
    ------
    MeshError-like ValueError
        If a triangle has (numerically) zero area; the message names it.
    """
    v = mesh.vertices
    t = mesh.triangles
    nv = mesh.num_vertices

    p0, p1, p2 = v[t[:, 0]], v[t[:, 1]], v[t[:, 2]]
    double_area = np.linalg.norm(np.cross(p1 - p0, p2 - p0), axis=1)
    tiny = double_area <= 2e-12
    if tiny.any():
        bad = int(np.nonzero(tiny)[0][0])
        raise ValueError(f"cannot assemble: triangle {bad} has zero area")

    # cot of the interior angle at each corner
    cot0 = np.einsum("ij,ij->i", p1 - p0, p2 - p0) / double_area
    cot1 = np.einsum("ij,ij->i", p0 - p1, p2 - p1) / double_area
    cot2 = np.einsum("ij,ij->i", p0 - p2, p1 - p2) / double_area
    cots = np.stack([cot0, cot1, cot2], axis=1)

    # edge (j, k) opposite corner c gets -cot(c)/2 from this triangle
    rows = np.concatenate([t[:, 1], t[:, 2], t[:, 0]])
    cols = np.concatenate([t[:, 2], t[:, 0], t[:, 1]])
    vals = -0.5 * np.concatenate([cot0, cot1, cot2])
    off = sparse.coo_matrix(
        (np.concatenate([vals, vals]),
         (np.concatenate([rows, cols]), np.concatenate([cols, rows]))),
        shape=(nv, nv),
    ).tocsr()
    diag = -np.asarray(off.sum(axis=1)).ravel()
    stiffness = (off + sparse.diags(diag)).tocsr()
    stiffness.sum_duplicates()

    # mixed per-vertex areas
    area = 0.5 * double_area
    sq01 = np.einsum("ij,ij->i", p1 - p0, p1 - p0)
    sq12 = np.einsum("ij,ij->i", p2 - p1, p2 - p1)
    sq20 = np.einsum("ij,ij->i", p0 - p2, p0 - p2)
    # Voronoi corner area: each edge at the corner weighted by the cot of
    # the angle opposite that edge
    vor = np.empty_like(cots)
    vor[:, 0] = (sq01 * cot2 + sq20 * cot1) / 8.0
    vor[:, 1] = (sq01 * cot2 + sq12 * cot0) / 8.0
    vor[:, 2] = (sq20 * cot1 + sq12 * cot0) / 8.0

    areas = np.zeros(nv)
    nonobtuse = (cots >= 0.0).all(axis=1)
    obtuse_corner = np.argmin(cots, axis=1)
    for c in range(3):
        contrib = np.where(
            nonobtuse,
            vor[:, c],
            np.where(obtuse_corner == c, area / 2.0, area / 4.0),
        )
        np.add.at(areas, t[:, c], contrib)

    return LBOperator(stiffness=stiffness, areas=areas)


def symmetrized(op: LBOperator) -> sparse.csr_matrix:
    """Similarity transform ``A^-1/2 C A^-1/2`` sharing the generalized spectrum."""
    d = 1.0 / np.sqrt(op.areas)
    return (sparse.diags(d) @ op.stiffness @ sparse.diags(d)).tocsr()


def spectral_radius(op: LBOperator, tol: float = 1e-8, maxiter: int | None = None) -> float:
    """Largest generalized eigenvalue of ``C psi = lambda A psi``.

    Runs a Lanczos iteration (the Krylov acceleration of the power
    method) on the symmetrized operator; small problems fall back to a
    dense solve. The result is stored on ``op.lambda_max``.

    Parameters
    ----------
    tol : float
        Relative accuracy, in (0, 1e-2].
    maxiter : int, optional
        Iteration cap; on non-convergence a :class:`ConvergenceError` is
        raised carrying the best estimate and its residual norm.
    """
    if not 0.0 < tol <= 1e-2:
        raise ValueError(f"tol must be in (0, 1e-2], got {tol}")
    s = symmetrized(op)
    n = s.shape[0]
    if n <= _DENSE_RADIUS_CUTOFF:
        lam = float(np.linalg.eigvalsh(s.toarray())[-1])
    else:
        try:
            vals = eigsh(
                s, k=1, which="LA", tol=tol, maxiter=maxiter,
                return_eigenvectors=False,
            )
            lam = float(vals[0])
        except ArpackNoConvergence as err:
            estimate = residual = None
            if err.eigenvalues is not None and len(err.eigenvalues):
                estimate = float(err.eigenvalues[-1])
                vec = err.eigenvectors[:, -1]
                residual = float(np.linalg.norm(s @ vec - estimate * vec))
            raise ConvergenceError(
                f"spectral radius did not converge within the iteration cap "
                f"(last estimate {estimate}, residual {residual})",
                estimate=estimate,
                residual=residual,
            ) from err
    op.lambda_max = lam
    return lam


def normalize(op: LBOperator, safety: float = 1.0) -> NormalizedOperator:
    """Rescale the operator so its spectrum lies in [-1, 1].

    ``safety`` > 1 inflates the normalization constant, pushing the
    spectrum strictly inside the interval; useful when ``lambda_max`` is
    a rough estimate. Requires :func:`spectral_radius` to have run.
    """
    if op.lambda_max is None:
        raise ValueError("lambda_max not computed; run spectral_radius first")
    if op.lambda_max <= 0.0:
        raise ValueError(f"lambda_max must be positive, got {op.lambda_max}")
    if safety < 1.0:
        raise ValueError(f"safety factor must be >= 1, got {safety}")
    lam = op.lambda_max * safety
    scale = 2.0 / (lam * op.areas)
    matrix = (sparse.diags(scale) @ op.stiffness - sparse.eye(op.num_vertices)).tocsr()
    return NormalizedOperator(matrix=matrix, areas=op.areas, lambda_max=lam)


def export_operator(op: LBOperator, stiffness_path, areas_path) -> None:
    """Dump ``C`` as 'row col value' text (CSR order) and ``A`` as one-column CSV."""
    coo = op.stiffness.tocoo()
    order = np.lexsort((coo.col, coo.row))
    lines = [
        f"{coo.row[i]} {coo.col[i]} {float(coo.data[i])!r}" for i in order
    ]
    Path(stiffness_path).write_text("\n".join(lines) + "\n")
    Path(areas_path).write_text("".join(f"{float(a)!r}\n" for a in op.areas))
