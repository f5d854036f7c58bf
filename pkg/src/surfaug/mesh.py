"""Triangulated surface meshes: validation, synthesis, and OFF / ASCII-PLY file I/O.

File grammars
-------------
OFF::

    OFF
    <V> <T> <E>            # E is ignored on read, written as 0
    x y z                  # V vertex rows, whitespace-delimited floats
    3 i j k                # T face rows, leading vertex count must be 3

Blank lines and lines starting with ``#`` are skipped. The ``OFF`` keyword
may share its line with the counts (``OFF 4 4 0``).

ASCII PLY::

    ply
    format ascii 1.0
    element vertex <V>
    property float x       # x, y, z must be present; extra scalar
    property float y       # properties are read and ignored
    property float z
    element face <T>
    property list uchar int vertex_indices
    end_header
    x y z ...              # V rows, one value per declared property
    3 i j k                # T rows, leading count must be 3

Binary PLY and attribute payloads (normals, colors, textures) are not
supported.
"""

import logging
import math
from pathlib import Path

import numpy as np

logger = logging.getLogger(__name__)

#: triangles with area at or below this (in squared mesh units) are rejected
DEGENERATE_AREA = 1e-12

_SYNTHETIC_KINDS = ("tetrahedron", "icosphere", "unit-sphere-uv")


class MeshError(ValueError):
    """Mesh data violates a structural invariant."""


class MeshParseError(MeshError):
    """A mesh file could not be parsed; the message names the offending line."""


class TriMesh:
    """Immutable triangle mesh over 3D vertices.

    Parameters
    ----------
    vertices : array_like
        (V, 3) float coordinates.
    triangles : array_like
        (T, 3) integer indices into ``vertices``, 0-based.

    Raises
    ------
    MeshError
        If any index is out of range, a triangle repeats a vertex, a
        triangle is degenerate (area <= 1e-12), or a vertex is referenced
        by no triangle. The message names the offending element.

    Notes
    -----
    The vertex and triangle arrays are frozen after construction, so a
    mesh can be shared read-only across threads.
    """

    def __init__(self, vertices, triangles):
        v = np.ascontiguousarray(vertices, dtype=np.float64)
        t = np.ascontiguousarray(triangles, dtype=np.int64)
        if v.ndim != 2 or v.shape[1] != 3:
            raise MeshError(f"vertices must be (V, 3), got {v.shape}")
        if t.ndim != 2 or t.shape[1] != 3:
            raise MeshError(f"triangles must be (T, 3), got {t.shape}")
        if t.shape[0] == 0:
            raise MeshError("mesh has no triangles")
        if not np.all(np.isfinite(v)):
            bad = int(np.nonzero(~np.isfinite(v).all(axis=1))[0][0])
            raise MeshError(f"vertex {bad} has non-finite coordinates")

        nv = v.shape[0]
        out = (t < 0) | (t >= nv)
        if out.any():
            bad = int(np.nonzero(out.any(axis=1))[0][0])
            raise MeshError(
                f"triangle {bad} = {t[bad].tolist()} references a vertex "
                f"outside [0, {nv})"
            )
        rep = (t[:, 0] == t[:, 1]) | (t[:, 1] == t[:, 2]) | (t[:, 2] == t[:, 0])
        if rep.any():
            bad = int(np.nonzero(rep)[0][0])
            raise MeshError(f"triangle {bad} = {t[bad].tolist()} repeats a vertex")

        areas = _triangle_areas(v, t)
        small = areas <= DEGENERATE_AREA
        if small.any():
            bad = int(np.nonzero(small)[0][0])
            raise MeshError(
                f"triangle {bad} is degenerate (area {areas[bad]:.3e} <= "
                f"{DEGENERATE_AREA:g})"
            )

        used = np.zeros(nv, dtype=bool)
        used[t.ravel()] = True
        if not used.all():
            bad = int(np.nonzero(~used)[0][0])
            raise MeshError(f"vertex {bad} is not referenced by any triangle")

        v.setflags(write=False)
        t.setflags(write=False)
        self.vertices = v
        self.triangles = t
        self._edges = None

    @property
    def num_vertices(self) -> int:
        return self.vertices.shape[0]

    @property
    def num_triangles(self) -> int:
        return self.triangles.shape[0]

    @property
    def edges(self) -> np.ndarray:
        """(E, 2) array of unique undirected edges, each row sorted."""
        if self._edges is None:
            t = self.triangles
            pairs = np.concatenate([t[:, [0, 1]], t[:, [1, 2]], t[:, [2, 0]]])
            pairs = np.sort(pairs, axis=1)
            e = np.unique(pairs, axis=0)
            e.setflags(write=False)
            self._edges = e
        return self._edges

    def euler_characteristic(self) -> int:
        """V - E + T; equals 2 for a closed genus-0 surface."""
        return self.num_vertices - self.edges.shape[0] + self.num_triangles

    def triangle_areas(self) -> np.ndarray:
        return _triangle_areas(self.vertices, self.triangles)

    def vertex_neighbors(self) -> list:
        """Adjacency as a list of sorted neighbor index arrays."""
        e = self.edges
        order = [[] for _ in range(self.num_vertices)]
        for i, j in e:
            order[i].append(j)
            order[j].append(i)
        return [np.array(sorted(n), dtype=np.int64) for n in order]

    def __repr__(self):
        return f"TriMesh(V={self.num_vertices}, T={self.num_triangles})"


def _triangle_areas(v, t):
    a = v[t[:, 1]] - v[t[:, 0]]
    b = v[t[:, 2]] - v[t[:, 0]]
    return 0.5 * np.linalg.norm(np.cross(a, b), axis=1)


# ---------------------------------------------------------------------------
# synthetic meshes


def tetrahedron() -> TriMesh:
    """Regular tetrahedron with unit edge length, centered at the origin."""
    s = 1.0 / (2.0 * math.sqrt(2.0))
    v = s * np.array(
        [[1, 1, 1], [1, -1, -1], [-1, 1, -1], [-1, -1, 1]], dtype=np.float64
    )
    t = np.array([[0, 1, 2], [0, 3, 1], [0, 2, 3], [1, 3, 2]], dtype=np.int64)
    return TriMesh(v, t)


def icosphere(level: int) -> TriMesh:
    """Unit sphere obtained by subdividing an icosahedron ``level`` times.

    Each subdivision splits every triangle in four and reprojects the new
    midpoint vertices onto the sphere, giving V = 10 * 4**level + 2.
    Construction is deterministic: the same level always yields bitwise
    identical arrays.

    Parameters
    ----------
    level : int
        Subdivision depth, 0 (icosahedron, V=12) through 7.
    """
    if not 0 <= level <= 7:
        raise ValueError(f"icosphere level must be in [0, 7], got {level}")
    phi = (1.0 + math.sqrt(5.0)) / 2.0
    verts = np.array(
        [
            [-1, phi, 0], [1, phi, 0], [-1, -phi, 0], [1, -phi, 0],
            [0, -1, phi], [0, 1, phi], [0, -1, -phi], [0, 1, -phi],
            [phi, 0, -1], [phi, 0, 1], [-phi, 0, -1], [-phi, 0, 1],
        ],
        dtype=np.float64,
    )
    verts /= np.linalg.norm(verts, axis=1, keepdims=True)
    faces = [
        (0, 11, 5), (0, 5, 1), (0, 1, 7), (0, 7, 10), (0, 10, 11),
        (1, 5, 9), (5, 11, 4), (11, 10, 2), (10, 7, 6), (7, 1, 8),
        (3, 9, 4), (3, 4, 2), (3, 2, 6), (3, 6, 8), (3, 8, 9),
        (4, 9, 5), (2, 4, 11), (6, 2, 10), (8, 6, 7), (9, 8, 1),
    ]
    verts = list(verts)
    for _ in range(level):
        midpoint = {}

        def midpoint_index(i, j):
            key = (i, j) if i < j else (j, i)
            idx = midpoint.get(key)
            if idx is None:
                m = verts[i] + verts[j]
                m /= np.linalg.norm(m)
                verts.append(m)
                idx = len(verts) - 1
                midpoint[key] = idx
            return idx

        next_faces = []
        for a, b, c in faces:
            ab = midpoint_index(a, b)
            bc = midpoint_index(b, c)
            ca = midpoint_index(c, a)
            next_faces += [(a, ab, ca), (b, bc, ab), (c, ca, bc), (ab, bc, ca)]
        faces = next_faces
    return TriMesh(np.array(verts), np.array(faces, dtype=np.int64))


def uv_sphere(res: int) -> TriMesh:
    """Unit sphere from a longitude/latitude grid with ``res`` divisions.

    V = res * (res - 1) + 2 (two poles plus res-1 latitude rings of res
    vertices). The elongated quads near the poles produce obtuse
    triangles, which exercises the mixed-area rule of the operator
    assembly. Deterministic like :func:`icosphere`.

    Parameters
    ----------
    res : int
        Number of longitude divisions (and latitude bands), 3 through 512.
    """
    if not 3 <= res <= 512:
        raise ValueError(f"uv-sphere resolution must be in [3, 512], got {res}")
    verts = [np.array([0.0, 0.0, 1.0])]
    for i in range(1, res):
        theta = math.pi * i / res
        st, ct = math.sin(theta), math.cos(theta)
        for j in range(res):
            az = 2.0 * math.pi * j / res
            verts.append(np.array([st * math.cos(az), st * math.sin(az), ct]))
    verts.append(np.array([0.0, 0.0, -1.0]))
    south = len(verts) - 1

    def ring(i, j):
        return 1 + (i - 1) * res + (j % res)

    faces = []
    for j in range(res):  # north cap
        faces.append((0, ring(1, j), ring(1, j + 1)))
    for i in range(1, res - 1):
        for j in range(res):
            a, b = ring(i, j), ring(i, j + 1)
            c, d = ring(i + 1, j), ring(i + 1, j + 1)
            faces.append((a, c, d))
            faces.append((a, d, b))
    for j in range(res):  # south cap
        faces.append((south, ring(res - 1, j + 1), ring(res - 1, j)))
    return TriMesh(np.array(verts), np.array(faces, dtype=np.int64))


def make_synthetic(kind: str) -> TriMesh:
    """Build a deterministic test mesh from a textual spec.

    Accepted forms: ``"tetrahedron"``, ``"icosphere:<level>"``,
    ``"unit-sphere-uv:<res>"``.
    """
    name, _, arg = kind.partition(":")
    name = name.strip().lower()
    if name == "tetrahedron":
        if arg:
            raise ValueError("tetrahedron takes no parameter")
        return tetrahedron()
    if name == "icosphere":
        return icosphere(_int_arg(kind, arg))
    if name == "unit-sphere-uv":
        return uv_sphere(_int_arg(kind, arg))
    raise ValueError(
        f"unsupported synthetic mesh kind {kind!r}; expected one of "
        f"{', '.join(_SYNTHETIC_KINDS)}"
    )


def _int_arg(kind, arg):
    try:
        return int(arg)
    except ValueError:
        raise ValueError(f"synthetic mesh spec {kind!r} needs an integer parameter")


# ---------------------------------------------------------------------------
# file I/O


def load_mesh(path, format: str | None = None) -> TriMesh:
    """Read a mesh from an OFF or ASCII-PLY file.

    Parameters
    ----------
    path : str or Path
        File to read.
    format : {"off", "ply-ascii"}, optional
        Defaults to the file extension (.off / .ply).

    Raises
    ------
    FileNotFoundError
        If ``path`` does not exist.
    MeshParseError
        On malformed content; the message names the offending line.
    MeshError
        If the parsed mesh violates a TriMesh invariant.
    """
    path = Path(path)
    fmt = _resolve_format(path, format)
    text = path.read_text()
    if fmt == "off":
        mesh = _parse_off(text, str(path))
    else:
        mesh = _parse_ply(text, str(path))
    logger.info(
        "loaded %s: %d vertices, %d triangles", path, mesh.num_vertices,
        mesh.num_triangles,
    )
    return mesh


def save_mesh(mesh: TriMesh, path, format: str | None = None) -> None:
    """Write a mesh as OFF or ASCII PLY; the format defaults to the extension.

    Coordinates are written with shortest round-trip precision, so
    ``load_mesh(save_mesh(m))`` reproduces the vertex array exactly.
    """
    path = Path(path)
    fmt = _resolve_format(path, format)
    if fmt == "off":
        lines = ["OFF", f"{mesh.num_vertices} {mesh.num_triangles} 0"]
        lines += [_coord_row(p) for p in mesh.vertices]
        lines += [f"3 {a} {b} {c}" for a, b, c in mesh.triangles]
    else:
        lines = [
            "ply",
            "format ascii 1.0",
            f"element vertex {mesh.num_vertices}",
            "property double x",
            "property double y",
            "property double z",
            f"element face {mesh.num_triangles}",
            "property list uchar int vertex_indices",
            "end_header",
        ]
        lines += [_coord_row(p) for p in mesh.vertices]
        lines += [f"3 {a} {b} {c}" for a, b, c in mesh.triangles]
    path.write_text("\n".join(lines) + "\n")


def _coord_row(p):
    # repr of a Python float is the shortest exact round-trip form
    return f"{float(p[0])!r} {float(p[1])!r} {float(p[2])!r}"


def _resolve_format(path, format):
    if format is None:
        suffix = path.suffix.lower()
        if suffix == ".off":
            return "off"
        if suffix == ".ply":
            return "ply-ascii"
        raise ValueError(
            f"cannot infer mesh format from {path.name!r}; pass format="
        )
    if format not in ("off", "ply-ascii"):
        raise ValueError(f"unsupported mesh format {format!r}")
    return format


def _content_lines(text):
    """Yield (1-based line number, stripped content), skipping blanks/comments."""
    for num, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if line and not line.startswith("#"):
            yield num, line


def _parse_off(text, name):
    lines = _content_lines(text)

    def take(what):
        try:
            return next(lines)
        except StopIteration:
            raise MeshParseError(f"{name}: unexpected end of file, expected {what}")

    num, line = take("OFF header")
    tokens = line.split()
    if tokens[0].upper() != "OFF":
        raise MeshParseError(f"{name}:{num}: expected 'OFF' header, got {line!r}")
    counts = tokens[1:]
    if not counts:
        num, line = take("vertex/face counts")
        counts = line.split()
    if len(counts) < 2:
        raise MeshParseError(f"{name}:{num}: counts line needs V T [E], got {line!r}")
    try:
        nv, nt = int(counts[0]), int(counts[1])
    except ValueError:
        raise MeshParseError(f"{name}:{num}: non-integer counts in {line!r}")

    verts = np.empty((nv, 3), dtype=np.float64)
    for i in range(nv):
        num, line = take(f"vertex row {i}")
        parts = line.split()
        if len(parts) != 3:
            raise MeshParseError(
                f"{name}:{num}: vertex row must have 3 coordinates, got {line!r}"
            )
        try:
            verts[i] = [float(x) for x in parts]
        except ValueError:
            raise MeshParseError(f"{name}:{num}: bad vertex coordinate in {line!r}")

    tris = np.empty((nt, 3), dtype=np.int64)
    for i in range(nt):
        num, line = take(f"face row {i}")
        parts = line.split()
        try:
            sizes = [int(x) for x in parts]
        except ValueError:
            raise MeshParseError(f"{name}:{num}: bad face index in {line!r}")
        if len(sizes) != 4 or sizes[0] != 3:
            raise MeshParseError(
                f"{name}:{num}: only triangular faces ('3 i j k') are "
                f"supported, got {line!r}"
            )
        tris[i] = sizes[1:]
    return TriMesh(verts, tris)


def _parse_ply(text, name):
    lines = _content_lines(text)

    def take(what):
        try:
            return next(lines)
        except StopIteration:
            raise MeshParseError(f"{name}: unexpected end of file, expected {what}")

    num, line = take("'ply' magic")
    if line != "ply":
        raise MeshParseError(f"{name}:{num}: not a PLY file (first line {line!r})")
    num, line = take("format line")
    if line.split()[:2] != ["format", "ascii"]:
        raise MeshParseError(f"{name}:{num}: only 'format ascii 1.0' is supported")

    # header: ordered elements with their property lists
    elements = []  # (name, count, [property names]) in declaration order
    while True:
        num, line = take("header line")
        parts = line.split()
        if parts[0] == "end_header":
            break
        if parts[0] == "comment":
            continue
        if parts[0] == "element":
            if len(parts) != 3:
                raise MeshParseError(f"{name}:{num}: malformed element line {line!r}")
            elements.append((parts[1], int(parts[2]), []))
        elif parts[0] == "property":
            if not elements:
                raise MeshParseError(f"{name}:{num}: property before any element")
            elements[-1][2].append(parts[-1])
        else:
            raise MeshParseError(f"{name}:{num}: unexpected header line {line!r}")

    by_name = {e[0]: e for e in elements}
    if "vertex" not in by_name or "face" not in by_name:
        raise MeshParseError(f"{name}: header must declare vertex and face elements")
    vprops = by_name["vertex"][2]
    if not all(axis in vprops for axis in "xyz"):
        raise MeshParseError(f"{name}: vertex element must have x, y, z properties")
    xyz_cols = [vprops.index(axis) for axis in "xyz"]

    verts = None
    tris = None
    for elem_name, count, props in elements:
        if elem_name == "vertex":
            verts = np.empty((count, 3), dtype=np.float64)
            for i in range(count):
                num, line = take(f"vertex row {i}")
                parts = line.split()
                if len(parts) != len(props):
                    raise MeshParseError(
                        f"{name}:{num}: vertex row has {len(parts)} values, "
                        f"header declares {len(props)}"
                    )
                try:
                    verts[i] = [float(parts[c]) for c in xyz_cols]
                except ValueError:
                    raise MeshParseError(
                        f"{name}:{num}: bad vertex coordinate in {line!r}"
                    )
        elif elem_name == "face":
            tris = np.empty((count, 3), dtype=np.int64)
            for i in range(count):
                num, line = take(f"face row {i}")
                parts = line.split()
                try:
                    sizes = [int(x) for x in parts]
                except ValueError:
                    raise MeshParseError(f"{name}:{num}: bad face index in {line!r}")
                if len(sizes) != 4 or sizes[0] != 3:
                    raise MeshParseError(
                        f"{name}:{num}: only triangular faces are supported, "
                        f"got {line!r}"
                    )
                tris[i] = sizes[1:]
        else:
            for i in range(count):  # skip unknown elements
                take(f"{elem_name} row {i}")
    return TriMesh(verts, tris)
