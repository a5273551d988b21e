"""Closed triangle meshes and their piecewise-linear Laplace spectrum."""

from __future__ import annotations

import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np
import scipy.sparse as sp
from scipy.sparse.linalg import ArpackError, ArpackNoConvergence, eigsh

__all__ = [
    "MeshError",
    "ConvergenceError",
    "TriangleMesh",
    "SpectralResult",
    "build_icosphere",
    "mesh_area",
    "triangle_areas",
    "cotangent_stiffness",
    "lumped_mass",
    "laplace_spectrum",
    "read_mesh",
    "write_mesh",
]

MAX_DEPTH = 7
AREA_FLOOR = 1e-14
ZERO_MODE_RTOL = 1e-8


class MeshError(ValueError):
    pass


class ConvergenceError(RuntimeError):
    pass


@dataclass
class TriangleMesh:
    vertices: np.ndarray  # (n, 3) float
    triangles: np.ndarray  # (f, 3) int, counter-clockwise seen from outside

    def __post_init__(self):
        self.vertices = np.ascontiguousarray(self.vertices, dtype=float)
        self.triangles = np.ascontiguousarray(self.triangles, dtype=np.int64)
        if self.vertices.ndim != 2 or self.vertices.shape[1] != 3:
            raise MeshError("vertices must have shape (n, 3)")
        if self.triangles.ndim != 2 or self.triangles.shape[1] != 3:
            raise MeshError("triangles must have shape (f, 3)")

    @property
    def n_vertices(self) -> int:
        return len(self.vertices)

    def scaled(self, c: float) -> TriangleMesh:
        return TriangleMesh(self.vertices * c, self.triangles.copy())

    def validate(self, area_floor: float = AREA_FLOOR) -> None:
        """Raise MeshError unless this is an oriented closed 2-manifold."""
        t = self.triangles
        if t.size == 0:
            raise MeshError("empty mesh")
        if t.min() < 0 or t.max() >= self.n_vertices:
            raise MeshError("triangle index out of range")
        if np.any((t[:, 0] == t[:, 1]) | (t[:, 1] == t[:, 2]) | (t[:, 0] == t[:, 2])):
            raise MeshError("triangle with repeated vertex")
        areas = triangle_areas(self)
        if np.any(areas <= area_floor):
            raise MeshError(f"{int(np.sum(areas <= area_floor))} degenerate triangle(s)")

        # each directed edge once, and its reverse exactly once
        directed = np.concatenate([t[:, [0, 1]], t[:, [1, 2]], t[:, [2, 0]]])
        n = self.n_vertices
        keys = directed[:, 0] * n + directed[:, 1]
        uniq, counts = np.unique(keys, return_counts=True)
        if np.any(counts != 1):
            raise MeshError("inconsistent orientation or non-manifold edge")
        reverse = directed[:, 1] * n + directed[:, 0]
        if not np.all(np.isin(reverse, uniq, assume_unique=False)):
            raise MeshError("mesh has boundary edges")
        used = np.zeros(n, dtype=bool)
        used[t.ravel()] = True
        if not used.all():
            raise MeshError("unreferenced vertices")


@dataclass
class SpectralResult:
    eigenvalues: list[float]
    area: float
    lambda1: float
    multiplicity1: int
    residuals: list[float]


_PHI = (1 + math.sqrt(5)) / 2

_ICOSAHEDRON_VERTICES = np.array([
    [-1, _PHI, 0], [1, _PHI, 0], [-1, -_PHI, 0], [1, -_PHI, 0],
    [0, -1, _PHI], [0, 1, _PHI], [0, -1, -_PHI], [0, 1, -_PHI],
    [_PHI, 0, -1], [_PHI, 0, 1], [-_PHI, 0, -1], [-_PHI, 0, 1],
])

_ICOSAHEDRON_FACES = np.array([
    [0, 11, 5], [0, 5, 1], [0, 1, 7], [0, 7, 10], [0, 10, 11],
    [1, 5, 9], [5, 11, 4], [11, 10, 2], [10, 7, 6], [7, 1, 8],
    [3, 9, 4], [3, 4, 2], [3, 2, 6], [3, 6, 8], [3, 8, 9],
    [4, 9, 5], [2, 4, 11], [6, 2, 10], [8, 6, 7], [9, 8, 1],
])


def build_icosphere(depth: int) -> TriangleMesh:
    """Icosahedron refined ``depth`` times by midpoint subdivision, on the unit sphere."""
    if not isinstance(depth, (int, np.integer)) or not 0 <= depth <= MAX_DEPTH:
        raise MeshError(f"depth must be an integer in [0, {MAX_DEPTH}], got {depth!r}")
    verts = _ICOSAHEDRON_VERTICES / np.linalg.norm(_ICOSAHEDRON_VERTICES, axis=1)[:, None]
    faces = _ICOSAHEDRON_FACES.copy()
    for _ in range(depth):
        verts, faces = _subdivide(verts, faces)
    return TriangleMesh(verts, faces)


def _subdivide(verts, faces):
    n = len(verts)
    edges = np.concatenate([faces[:, [0, 1]], faces[:, [1, 2]], faces[:, [2, 0]]])
    edges.sort(axis=1)
    uniq, inverse = np.unique(edges, axis=0, return_inverse=True)
    inverse = inverse.ravel()
    mids = verts[uniq[:, 0]] + verts[uniq[:, 1]]
    mids /= np.linalg.norm(mids, axis=1)[:, None]
    f = len(faces)
    a, b, c = faces.T
    ab, bc, ca = (n + inverse[:f], n + inverse[f:2 * f], n + inverse[2 * f:])
    new_faces = np.concatenate([
        np.stack([a, ab, ca], axis=1),
        np.stack([b, bc, ab], axis=1),
        np.stack([c, ca, bc], axis=1),
        np.stack([ab, bc, ca], axis=1),
    ])
    return np.vstack([verts, mids]), new_faces


def triangle_areas(mesh: TriangleMesh) -> np.ndarray:
    p = mesh.vertices[mesh.triangles]
    return 0.5 * np.linalg.norm(np.cross(p[:, 1] - p[:, 0], p[:, 2] - p[:, 0]), axis=1)


def mesh_area(mesh: TriangleMesh) -> float:
    return float(math.fsum(triangle_areas(mesh)))


def cotangent_stiffness(mesh: TriangleMesh) -> sp.csr_matrix:
    """P1 stiffness matrix: K_ij = -(cot a_ij + cot b_ij)/2, rows summing to zero."""
    p = mesh.vertices[mesh.triangles]
    t = mesh.triangles
    n = mesh.n_vertices
    double_area = np.linalg.norm(np.cross(p[:, 1] - p[:, 0], p[:, 2] - p[:, 0]), axis=1)
    rows, cols, vals = [], [], []
    for k in range(3):
        i, j = (k + 1) % 3, (k + 2) % 3
        # cotangent of the angle at corner k, opposite edge (i, j)
        u, v = p[:, i] - p[:, k], p[:, j] - p[:, k]
        cot = np.einsum("ij,ij->i", u, v) / double_area
        rows += [t[:, i], t[:, j]]
        cols += [t[:, j], t[:, i]]
        vals += [-0.5 * cot, -0.5 * cot]
    off = sp.coo_matrix(
        (np.concatenate(vals), (np.concatenate(rows), np.concatenate(cols))), shape=(n, n)
    ).tocsr()
    diag = -np.asarray(off.sum(axis=1)).ravel()
    return (off + sp.diags(diag)).tocsr()


def lumped_mass(mesh: TriangleMesh) -> np.ndarray:
    """Diagonal of the barycentric lumped mass matrix (one third of each incident area)."""
    areas = triangle_areas(mesh)
    return np.bincount(mesh.triangles.ravel(), weights=np.repeat(areas / 3, 3), minlength=mesh.n_vertices)


def laplace_spectrum(
    mesh: TriangleMesh,
    k: int = 5,
    tol: float = 1e-10,
    *,
    maxiter: int | None = None,
    cluster_rtol: float = 1e-6,
    seed: int = 0,
) -> SpectralResult:
    """Lowest ``k`` eigenvalues of the pencil (stiffness, lumped mass).

    The pencil is reduced to the symmetric matrix M^-1/2 K M^-1/2 and solved
    by shift-invert Lanczos with a negative shift, so the constant mode is
    returned as eigenvalue 0. Each eigenpair must reach a scaled residual
    ||A y - lam y|| / ||A||_1 below ``tol``.
    """
    mesh.validate()
    n = mesh.n_vertices
    if not 1 <= k <= n - 1:
        raise ValueError(f"k must be in [1, {n - 1}], got {k}")
    if tol <= 0:
        raise ValueError("tol must be positive")

    area = mesh_area(mesh)
    K = cotangent_stiffness(mesh)
    m_inv_sqrt = 1 / np.sqrt(lumped_mass(mesh))
    D = sp.diags(m_inv_sqrt)
    A = (D @ K @ D).tocsc()
    A = (A + A.T) * 0.5

    nev = max(k, 2)
    # spectrum scales like 1/area; shift sits just below zero
    sigma = -1.0 / area
    v0 = np.random.default_rng(seed).standard_normal(n)
    try:
        vals, vecs = eigsh(A, k=nev, sigma=sigma, which="LM", v0=v0, tol=0.0, maxiter=maxiter)
    except (ArpackNoConvergence, ArpackError) as exc:
        raise ConvergenceError(f"eigensolver did not converge: {exc}") from exc

    order = np.argsort(vals)
    vals, vecs = vals[order], vecs[:, order]
    a_norm = abs(A).sum(axis=0).max()
    resid = np.linalg.norm(A @ vecs - vecs * vals, axis=0) / a_norm
    if np.any(resid > tol):
        raise ConvergenceError(f"residual {resid.max():.3e} exceeds tol {tol:.1e}")

    threshold = ZERO_MODE_RTOL * np.max(np.abs(vals))
    nonzero = vals[vals > threshold]
    if nonzero.size == 0:
        raise ConvergenceError("no eigenvalue above the zero-mode threshold; increase k")
    lam1 = float(nonzero[0])
    mult = int(np.sum(np.abs(vals - lam1) <= cluster_rtol * lam1))
    return SpectralResult(
        eigenvalues=[float(v) for v in vals[:k]],
        area=area,
        lambda1=lam1,
        multiplicity1=mult,
        residuals=[float(r) for r in resid[:k]],
    )


def write_mesh(mesh: TriangleMesh, path) -> None:
    """Write ``v x y z`` / ``f i j k`` lines (1-based indices, OBJ-compatible)."""
    lines = [f"# {mesh.n_vertices} vertices, {len(mesh.triangles)} triangles"]
    lines += [f"v {x!r} {y!r} {z!r}" for x, y, z in mesh.vertices.tolist()]
    lines += [f"f {i + 1} {j + 1} {k + 1}" for i, j, k in mesh.triangles.tolist()]
    Path(path).write_text("\n".join(lines) + "\n")


def read_mesh(path) -> TriangleMesh:
    verts, faces = [], []
    for lineno, line in enumerate(Path(path).read_text().splitlines(), 1):
        parts = line.split()
        if not parts or parts[0].startswith("#"):
            continue
        try:
            if parts[0] == "v" and len(parts) == 4:
                verts.append([float(x) for x in parts[1:]])
            elif parts[0] == "f" and len(parts) == 4:
                faces.append([int(i) - 1 for i in parts[1:]])
            else:
                raise ValueError(parts[0])
        except ValueError as exc:
            raise MeshError(f"{path}:{lineno}: bad line {line!r}") from exc
    return TriangleMesh(np.array(verts).reshape(-1, 3), np.array(faces, dtype=np.int64).reshape(-1, 3))
