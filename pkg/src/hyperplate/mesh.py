"""Structured trilinear hexahedral plate mesh and its mass matrices.

Nodes are numbered lexicographically with x1 fastest; degrees of freedom are
interleaved as ``3 * node + component``.
"""
from dataclasses import dataclass, field

import numpy as np
import scipy.sparse as sp

from .errors import DegenerateExtent

__all__ = [
    "PlateMesh",
    "QuadraturePoint",
    "build_plate",
    "assemble_mass",
    "assemble_boundary_mass",
    "eval_gradient",
    "quadrature_points",
]

_GAUSS = np.array([-1.0, 1.0]) / np.sqrt(3.0)
# local node a = i1 + 2*i2 + 4*i3, signs of the reference coordinates
_SIGNS = np.array([[2 * ((a >> d) & 1) - 1 for d in range(3)] for a in range(8)], dtype=float)
# reference quadrature points, same ordering as the local nodes
_XI = _GAUSS[((np.arange(8)[:, None] >> np.arange(3)[None, :]) & 1)]


def _shape(xi):
    """Trilinear shape values (8,) and reference gradients (8, 3) at ``xi``."""
    f = 0.5 * (1.0 + _SIGNS * xi)  # (8, 3)
    N = f.prod(axis=1)
    dN = np.empty((8, 3))
    for d in range(3):
        others = [e for e in range(3) if e != d]
        dN[:, d] = 0.5 * _SIGNS[:, d] * f[:, others[0]] * f[:, others[1]]
    return N, dN


@dataclass(frozen=True)
class QuadraturePoint:
    element: int
    ref: np.ndarray
    x: np.ndarray
    weight: float


@dataclass(eq=False)
class PlateMesh:
    """Box ``[a1,b1]x[a2,b2]x[a3,b3]`` split into ``cells`` equal hexahedra.

    Attributes
    ----------
    nodes : ndarray, shape (n_nodes, 3)
    elements : ndarray, shape (n_elements, 8)
        Node ids in local order ``i1 + 2 i2 + 4 i3``.
    boundary_faces : ndarray, shape (n_faces, 5)
        Owning element, then the 4 face node ids.
    in_layer : ndarray of bool, shape (n_elements,)
        Whether the dictionary weighting is active in the element.
    """

    extents: tuple
    cells: tuple
    nodes: np.ndarray
    elements: np.ndarray
    boundary_faces: np.ndarray
    in_layer: np.ndarray
    h: np.ndarray
    # cached per-mesh quadrature data (identical for all elements)
    qp_shape: np.ndarray = field(repr=False, default=None)
    qp_grad: np.ndarray = field(repr=False, default=None)
    qp_weight: float = 0.0
    qp_coords: np.ndarray = field(repr=False, default=None)

    @property
    def n_nodes(self):
        return len(self.nodes)

    @property
    def n_elements(self):
        return len(self.elements)

    @property
    def n_dofs(self):
        return 3 * len(self.nodes)

    @property
    def element_dofs(self):
        """Global dof ids per element, shape (n_elements, 24), local ``3a + i``."""
        return (3 * self.elements[:, :, None] + np.arange(3)).reshape(len(self.elements), 24)

    @property
    def boundary_nodes(self):
        return np.unique(self.boundary_faces[:, 1:])

    def node_index(self, i1, i2, i3):
        n1, n2, _ = self.cells
        return i1 + (n1 + 1) * (i2 + (n2 + 1) * i3)

    def node_position(self, node):
        """Grid indices (i1, i2, i3) of a node id."""
        n1, n2, _ = self.cells
        i1 = node % (n1 + 1)
        rest = node // (n1 + 1)
        return i1, rest % (n2 + 1), rest // (n2 + 1)


def build_plate(extents=((-0.1, 0.1), (-15.0, 15.0), (-15.0, 15.0)), cells=(2, 8, 8), layers="outer"):
    """Build the structured plate mesh.

    ``layers`` selects where the dictionary is active: ``"outer"`` marks the
    elements touching either x1 face, ``"all"`` every element, ``"none"`` no
    element, or an explicit boolean array per element.
    """
    extents = tuple((float(a), float(b)) for a, b in extents)
    cells = tuple(int(c) for c in cells)
    if len(extents) != 3 or len(cells) != 3:
        raise DegenerateExtent("need three extents and three cell counts")
    if any(c < 1 for c in cells) or any(not b > a for a, b in extents):
        raise DegenerateExtent(f"degenerate mesh: extents={extents}, cells={cells}")
    n1, n2, n3 = cells
    axes = [np.linspace(a, b, c + 1) for (a, b), c in zip(extents, cells)]
    g3, g2, g1 = np.meshgrid(axes[2], axes[1], axes[0], indexing="ij")
    nodes = np.column_stack([g1.ravel(), g2.ravel(), g3.ravel()])

    def nid(i1, i2, i3):
        return i1 + (n1 + 1) * (i2 + (n2 + 1) * i3)

    e3, e2, e1 = np.meshgrid(np.arange(n3), np.arange(n2), np.arange(n1), indexing="ij")
    e1, e2, e3 = e1.ravel(), e2.ravel(), e3.ravel()
    elements = np.column_stack(
        [nid(e1 + ((a >> 0) & 1), e2 + ((a >> 1) & 1), e3 + ((a >> 2) & 1)) for a in range(8)]
    )

    faces = []
    # local faces as (axis, side) -> local node ids on that face
    for axis in range(3):
        for side in (0, 1):
            local = [a for a in range(8) if ((a >> axis) & 1) == side]
            idx = (e1, e2, e3)[axis]
            on = idx == (0 if side == 0 else cells[axis] - 1)
            for e in np.flatnonzero(on):
                faces.append([e, *elements[e, local]])
    boundary_faces = np.array(sorted(faces), dtype=np.int64)

    if isinstance(layers, str):
        if layers == "outer":
            in_layer = (e1 == 0) | (e1 == n1 - 1)
        elif layers == "all":
            in_layer = np.ones(len(elements), dtype=bool)
        elif layers == "none":
            in_layer = np.zeros(len(elements), dtype=bool)
        else:
            raise ValueError(f"unknown layer spec {layers!r}")
    else:
        in_layer = np.asarray(layers, dtype=bool)
        if in_layer.shape != (len(elements),):
            raise ValueError("layer mask must have one entry per element")

    h = np.array([(b - a) / c for (a, b), c in zip(extents, cells)])
    shapes, grads = zip(*(_shape(xi) for xi in _XI))
    qp_shape = np.array(shapes)  # (8 qp, 8 nodes)
    qp_grad = np.array(grads) * (2.0 / h)  # physical gradients (8 qp, 8 nodes, 3)
    qp_weight = float(np.prod(h) / 8.0)
    qp_coords = np.einsum("qa,ead->eqd", qp_shape, nodes[elements])

    return PlateMesh(
        extents=extents,
        cells=cells,
        nodes=nodes,
        elements=elements.astype(np.int64),
        boundary_faces=boundary_faces,
        in_layer=in_layer,
        h=h,
        qp_shape=qp_shape,
        qp_grad=qp_grad,
        qp_weight=qp_weight,
        qp_coords=qp_coords,
    )


def quadrature_points(mesh, element):
    """The 2x2x2 Gauss points of one element."""
    return [
        QuadraturePoint(element, _XI[q].copy(), mesh.qp_coords[element, q].copy(), mesh.qp_weight)
        for q in range(8)
    ]


def _scatter(mesh_dofs, blocks, n):
    rows = np.repeat(mesh_dofs, mesh_dofs.shape[1], axis=1).ravel()
    cols = np.tile(mesh_dofs, (1, mesh_dofs.shape[1])).ravel()
    mat = sp.coo_matrix((blocks.ravel(), (rows, cols)), shape=(n, n)).tocsr()
    mat.sum_duplicates()
    mat.sort_indices()
    return mat


def assemble_mass(mesh):
    """Consistent mass matrix ``M_rs = <phi_r, phi_s>``, CSR, shape (L, L)."""
    Ms = mesh.qp_weight * mesh.qp_shape.T @ mesh.qp_shape  # (8, 8) scalar block
    Me = np.kron(Ms, np.eye(3))
    blocks = np.broadcast_to(Me, (mesh.n_elements, 24, 24))
    return _scatter(mesh.element_dofs, blocks, mesh.n_dofs)


def assemble_boundary_mass(mesh):
    """Boundary mass ``int_dOmega <phi_r, phi_s> dxi`` with 2x2 Gauss per face."""
    n = mesh.n_dofs
    if len(mesh.boundary_faces) == 0:
        return sp.csr_matrix((n, n))
    blocks = []
    dofs = []
    # bilinear face mass on a rectangle of area |f|: |f|/36 * [[4,2,1,2],...] in
    # tensor ordering; computed by Gauss so the face node ordering is generic
    g = _GAUSS
    fN = np.array([[0.25 * (1 + s * u) * (1 + t * v) for s, t in ((-1, -1), (1, -1), (-1, 1), (1, 1))]
                   for u in g for v in g])
    for face in mesh.boundary_faces:
        fn = face[1:]
        pts = mesh.nodes[fn]
        span = pts.max(axis=0) - pts.min(axis=0)
        area = np.prod(span[span > 0])
        # order face nodes by their two in-plane coordinates to match fN
        axes = np.flatnonzero(span > 0)
        key = np.lexsort((pts[:, axes[0]], pts[:, axes[1]]))
        ordered = fn[key]
        Mf = (area / 4.0) * fN.T @ fN
        blocks.append(np.kron(Mf, np.eye(3)))
        dofs.append((3 * ordered[:, None] + np.arange(3)).ravel())
    return _scatter(np.array(dofs), np.array(blocks), n)


def element_gradients(mesh, U):
    """Displacement gradients at every quadrature point, shape (n_elements, 8, 3, 3)."""
    Ue = np.asarray(U)[mesh.element_dofs].reshape(mesh.n_elements, 8, 3)
    return np.einsum("eai,qaj->eqij", Ue, mesh.qp_grad)


def eval_gradient(mesh, U, qp):
    """``(d_j u_i)`` of the interpolated field at one quadrature point."""
    U = np.asarray(U, dtype=float)
    if U.shape != (mesh.n_dofs,):
        raise ValueError(f"expected a vector of length {mesh.n_dofs}")
    _, dN = _shape(qp.ref)
    dN = dN * (2.0 / mesh.h)
    Ue = U[mesh.element_dofs[qp.element]].reshape(8, 3)
    return Ue.T @ dN
