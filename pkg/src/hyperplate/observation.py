"""Boundary sensors: the observation matrix ``Gbar M_dOmega`` and its transpose."""
import re
from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp

from .errors import InteriorNode
from .mesh import assemble_boundary_mass

__all__ = [
    "SensorArray",
    "make_sensor_array",
    "perimeter_nodes",
    "layout_nodes",
    "observe",
    "observe_adjoint",
    "write_sensor_csv",
    "read_sensor_csv",
]

COMPONENTS = {"x1": 0, "x2": 1, "x3": 2, 0: 0, 1: 1, 2: 2}


@dataclass(eq=False)
class SensorArray:
    """Point-supported sensors, each reading one component at one boundary node.

    Attributes
    ----------
    selection : scipy.sparse.csr_matrix, shape (l, L)
        Coefficients of the sensor weight functions in the nodal basis.
    boundary_mass : scipy.sparse.csr_matrix, shape (L, L)
    node_ids, components : ndarray, shape (l,)
    coords : ndarray, shape (l, 3)
    """

    selection: sp.csr_matrix
    boundary_mass: sp.csr_matrix
    node_ids: np.ndarray
    components: np.ndarray
    coords: np.ndarray

    @property
    def count(self):
        return len(self.node_ids)

    @property
    def matrix(self):
        """``G = Gbar M_dOmega``, shape (l, L)."""
        return (self.selection @ self.boundary_mass).tocsr()

    def observe_history(self, U):
        U = np.atleast_2d(U)
        return (self.matrix @ U.T).T

    def adjoint_history(self, W):
        W = np.atleast_2d(W)
        return (self.matrix.T @ W.T).T


def make_sensor_array(mesh, node_ids, components="x3", boundary_mass=None):
    """Sensors at the given boundary nodes.

    ``components`` is a single component (``"x1"``, ``"x2"``, ``"x3"`` or
    0..2) applied to all sensors, or a sequence with one entry per node.
    """
    node_ids = np.asarray(node_ids, dtype=np.int64).reshape(-1)
    boundary = set(mesh.boundary_nodes.tolist())
    for nid in node_ids:
        if int(nid) not in boundary:
            raise InteriorNode(int(nid))
    if isinstance(components, (str, int, np.integer)):
        comps = np.full(len(node_ids), COMPONENTS[components], dtype=np.int64)
    else:
        comps = np.array([COMPONENTS[c] for c in components], dtype=np.int64)
        if len(comps) != len(node_ids):
            raise ValueError("need one component per sensor node")
    L = mesh.n_dofs
    l = len(node_ids)
    sel = sp.csr_matrix((np.ones(l), (np.arange(l), 3 * node_ids + comps)), shape=(l, L))
    Mb = assemble_boundary_mass(mesh) if boundary_mass is None else boundary_mass
    return SensorArray(sel, Mb, node_ids, comps, mesh.nodes[node_ids].copy())


def perimeter_nodes(mesh, per_edge):
    """Equally spaced nodes along the four edges of both x1 faces.

    Corner nodes are shared by two edges, so each face carries
    ``4 * per_edge - 4`` sensors.
    """
    n1, n2, n3 = mesh.cells
    if per_edge < 2 or per_edge > min(n2, n3) + 1:
        raise ValueError(f"{per_edge} sensors per edge do not fit on {n2 + 1}x{n3 + 1} edge nodes")
    s2 = np.unique(np.rint(np.linspace(0, n2, per_edge)).astype(int))
    s3 = np.unique(np.rint(np.linspace(0, n3, per_edge)).astype(int))
    if len(s2) != per_edge or len(s3) != per_edge:
        raise ValueError("sensor positions collide on this mesh")
    nodes = set()
    for i1 in (0, n1):
        for i2 in s2:
            nodes.add(mesh.node_index(i1, i2, 0))
            nodes.add(mesh.node_index(i1, i2, n3))
        for i3 in s3:
            nodes.add(mesh.node_index(i1, 0, i3))
            nodes.add(mesh.node_index(i1, n2, i3))
    return np.array(sorted(nodes), dtype=np.int64)


def layout_nodes(mesh, layout):
    """Node ids of a named layout ``R<k>d``: ``k`` sensors per plate edge, both faces."""
    match = re.fullmatch(r"R(\d+)d", str(layout))
    if not match:
        raise ValueError(f"unknown sensor layout {layout!r}")
    return perimeter_nodes(mesh, int(match.group(1)))


def observe(sensors, U):
    """Sensor readings ``Gbar M_dOmega U`` of one nodal vector."""
    U = np.asarray(U, dtype=float)
    if U.shape != (sensors.boundary_mass.shape[0],):
        raise ValueError("displacement vector length does not match the mesh")
    return sensors.selection @ (sensors.boundary_mass @ U)


def observe_adjoint(sensors, a):
    """Dual load vector ``M_dOmega Gbar^T a``."""
    a = np.asarray(a, dtype=float)
    if a.shape != (sensors.count,):
        raise ValueError(f"expected {sensors.count} sensor values")
    return sensors.boundary_mass @ (sensors.selection.T @ a)


def write_sensor_csv(path, series):
    """Rows are time levels, columns sensors; 17 significant digits."""
    series = np.atleast_2d(np.asarray(series, dtype=float))
    with open(path, "w", newline="\n") as fh:
        for row in series:
            fh.write(",".join(f"{v:.17g}" for v in row) + "\n")


def read_sensor_csv(path):
    return np.loadtxt(path, delimiter=",", ndmin=2)
