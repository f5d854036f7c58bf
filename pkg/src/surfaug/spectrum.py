"""Eigenbasis of the Laplace-Beltrami operator and spectral transforms.

Eigenpairs solve the generalized problem ``C psi = lambda A psi``. The
basis is orthonormal in the area-weighted inner product
``<f, g> = sum_v A_v f(v) g(v)``, which makes the forward transform the
A-weighted projection and keeps Parseval's identity exact at full order.

Basis file format (little-endian)
---------------------------------
``b"SAEB0001"`` magic (8 bytes), uint64 V, uint64 J, float64
eigenvalues (J), float64 eigenvectors (V x J, column-major), float64
areas (V). The area vector rides along so a reloaded basis can project
signals without re-assembling the operator.
"""

from dataclasses import dataclass
from pathlib import Path

import numpy as np
import scipy.linalg
from scipy.sparse.linalg import ArpackNoConvergence, eigsh

from .operator import ConvergenceError, LBOperator, symmetrized

_MAGIC = b"SAEB0001"

#: meshes at or below this vertex count use the dense symmetric solver
DENSE_CUTOFF = 2000


@dataclass
class EigenBasis:
    """First J generalized eigenpairs, A-orthonormal, eigenvalues ascending.

    Signs are fixed so each eigenvector's largest-magnitude entry is
    positive, making repeated decompositions reproducible.
    """

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray
    areas: np.ndarray

    @property
    def num_modes(self) -> int:
        return self.eigenvalues.shape[0]

    @property
    def num_vertices(self) -> int:
        return self.eigenvectors.shape[0]


def eigendecompose(op: LBOperator, num_modes: int) -> EigenBasis:
    """Compute the lowest ``num_modes`` eigenpairs of ``C psi = lambda A psi``.

    Small problems (V <= 2000) or near-complete requests are solved
    densely on the symmetrized matrix ``A^-1/2 C A^-1/2``; larger ones
    use shift-inverted Lanczos, which targets the bottom of the
    spectrum.
    """
    nv = op.num_vertices
    if not 1 <= num_modes <= nv:
        raise ValueError(f"num_modes must be in [1, {nv}], got {num_modes}")
    s = symmetrized(op)
    if nv <= DENSE_CUTOFF or num_modes > nv - 2:
        vals, vecs = scipy.linalg.eigh(s.toarray())
        vals, vecs = vals[:num_modes], vecs[:, :num_modes]
    else:
        try:
            vals, vecs = eigsh(s.tocsc(), k=num_modes, sigma=-1e-8, which="LM")
        except ArpackNoConvergence as err:
            raise ConvergenceError(
                f"eigendecomposition did not converge "
                f"({len(err.eigenvalues)} of {num_modes} pairs found)"
            ) from err
        order = np.argsort(vals)
        vals, vecs = vals[order], vecs[:, order]

    psi = vecs / np.sqrt(op.areas)[:, None]
    # sign convention: largest-magnitude entry positive
    anchor = np.abs(psi).argmax(axis=0)
    flip = psi[anchor, np.arange(psi.shape[1])] < 0
    psi[:, flip] *= -1.0
    return EigenBasis(eigenvalues=vals, eigenvectors=psi, areas=op.areas.copy())


def forward(basis: EigenBasis, signals) -> np.ndarray:
    """Project signals onto the basis: ``c_ij = sum_v A_v f_i(v) psi_j(v)``.

    ``signals`` is an (n, V) array or anything with a ``.data`` attribute
    holding one (e.g. :class:`surfaug.augment.SignalSet`). Returns the
    (n, J) coefficient matrix.
    """
    data = np.atleast_2d(getattr(signals, "data", signals))
    if data.shape[1] != basis.num_vertices:
        raise ValueError(
            f"signals have {data.shape[1]} vertices, basis has "
            f"{basis.num_vertices}"
        )
    return (data * basis.areas) @ basis.eigenvectors


def inverse(basis: EigenBasis, coeffs: np.ndarray) -> np.ndarray:
    """Synthesize signals from coefficients: ``f_i(v) = sum_j c_ij psi_j(v)``."""
    coeffs = np.atleast_2d(coeffs)
    if coeffs.shape[1] != basis.num_modes:
        raise ValueError(
            f"coefficient width {coeffs.shape[1]} does not match basis "
            f"size {basis.num_modes}"
        )
    return coeffs @ basis.eigenvectors.T


def save_basis(basis: EigenBasis, path) -> None:
    """Write the basis in the documented little-endian binary layout."""
    with open(path, "wb") as fh:
        fh.write(_MAGIC)
        fh.write(np.array([basis.num_vertices, basis.num_modes], dtype="<u8").tobytes())
        fh.write(basis.eigenvalues.astype("<f8").tobytes())
        fh.write(np.asfortranarray(basis.eigenvectors.astype("<f8")).tobytes(order="F"))
        fh.write(basis.areas.astype("<f8").tobytes())


def load_basis(path) -> EigenBasis:
    """Read a basis written by :func:`save_basis`."""
    raw = Path(path).read_bytes()
    if raw[: len(_MAGIC)] != _MAGIC:
        raise ValueError(f"{path}: not a basis file (bad magic)")
    head = len(_MAGIC)
    nv, nj = np.frombuffer(raw, dtype="<u8", count=2, offset=head)
    nv, nj = int(nv), int(nj)
    off = head + 16
    vals = np.frombuffer(raw, dtype="<f8", count=nj, offset=off).copy()
    off += 8 * nj
    vecs = np.frombuffer(raw, dtype="<f8", count=nv * nj, offset=off)
    vecs = vecs.reshape((nv, nj), order="F").copy()
    off += 8 * nv * nj
    areas = np.frombuffer(raw, dtype="<f8", count=nv, offset=off).copy()
    return EigenBasis(eigenvalues=vals, eigenvectors=vecs, areas=areas)
