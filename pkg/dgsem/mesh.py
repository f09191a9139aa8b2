"""
Conforming hexahedral meshes with master/slave faces, the warped periodic box
factory, the line-oriented mesh file format and 1D element meshes.
"""
import logging
from dataclasses import dataclass, field
from typing import Callable, Dict, List, Optional, Sequence, Tuple

import numpy as np

from .basis import OperatorSet, build_operators
from .errors import MeshError
from .metrics import (
    MetricData,
    SIDES,
    check_metric_identities,
    compute_metrics_curl_form,
    face_geometry,
)

logger = logging.getLogger(__name__)

WATERTIGHT_TOLERANCE = 1e-12

# side -> (neighbour offset axis, direction of the offset)
_BOX_NEIGHBOURS = {2: (0, 1), 4: (1, 1), 6: (2, 1)}


@dataclass
class Face:
    """One conforming face. The master side defines the normal orientation."""
    master: int
    master_side: int
    slave: int
    slave_side: int
    orientation: int = 0
    periodic: bool = False


@dataclass
class Mesh:
    """Curvilinear hexahedral mesh with metric terms and face geometry."""
    ops: OperatorSet
    geometry: np.ndarray                      # (K, n, n, n, 3)
    metrics: MetricData
    faces: List[Face]
    periodic: Tuple[bool, bool, bool] = (True, True, True)
    # per-face arrays in master point order, filled by finalize()
    normals: np.ndarray = field(default=None, repr=False)           # (F, n*n, 3)
    surface: np.ndarray = field(default=None, repr=False)           # (F, n*n)
    slave_points: np.ndarray = field(default=None, repr=False)      # (F, n*n)

    @property
    def degree(self) -> int:
        return self.ops.degree

    @property
    def n_elements(self) -> int:
        return self.geometry.shape[0]

    @property
    def master_elements(self) -> np.ndarray:
        return np.array([f.master for f in self.faces], dtype=int)

    @property
    def master_sides(self) -> np.ndarray:
        return np.array([f.master_side for f in self.faces], dtype=int)

    @property
    def slave_elements(self) -> np.ndarray:
        return np.array([f.slave for f in self.faces], dtype=int)

    @property
    def slave_sides(self) -> np.ndarray:
        return np.array([f.slave_side for f in self.faces], dtype=int)

    def volume(self) -> float:
        w = self.ops.weights
        weights = w[:, None, None] * w[None, :, None] * w[None, None, :]
        return float(np.sum(weights[None] * self.metrics.jacobian))

    def finalize(self) -> "Mesh":
        """Compute face normals, surface elements and slave point permutations."""
        n = self.ops.size
        side_geometry: Dict[int, Tuple[np.ndarray, np.ndarray]] = {
            side: face_geometry(self.metrics, side) for side in SIDES
        }
        normals, surface, permutations = [], [], []
        for face in self.faces:
            normal, area = side_geometry[face.master_side]
            normals.append(normal[face.master].reshape(n * n, 3))
            surface.append(area[face.master].reshape(n * n))
            permutations.append(orientation_permutation(face.orientation, n))
        self.normals = np.array(normals)
        self.surface = np.array(surface)
        self.slave_points = np.array(permutations, dtype=int)
        self._check_conformity()
        mismatch = check_watertight(self)
        if mismatch > WATERTIGHT_TOLERANCE * max(1.0, float(np.max(self.surface))):
            logger.warning("Face geometry is not watertight: max mismatch %.3e", mismatch)
        return self

    def _check_conformity(self) -> None:
        seen = set()
        for index, face in enumerate(self.faces):
            for element, side in ((face.master, face.master_side), (face.slave, face.slave_side)):
                if not 0 <= element < self.n_elements or side not in SIDES:
                    raise MeshError(f"Face {index} references invalid element side ({element}, {side})")
                if (element, side) in seen:
                    raise MeshError(f"Element side ({element}, {side}) is connected twice")
                seen.add((element, side))
        missing = 6 * self.n_elements - len(seen)
        if missing:
            raise MeshError(f"{missing} element sides have no neighbour; only periodic meshes are supported")


def orientation_permutation(code: int, n: int) -> np.ndarray:
    """
    Map master face points (p, q) to flat slave point indices for one of the
    8 tensor-product face symmetries: bit 2 transposes, bit 0 flips p, bit 1 flips q.
    """
    if not 0 <= code < 8:
        raise MeshError(f"Invalid face orientation code {code}")
    p, q = np.meshgrid(np.arange(n), np.arange(n), indexing="ij")
    if code & 4:
        p, q = q, p
    if code & 1:
        p = n - 1 - p
    if code & 2:
        q = n - 1 - q
    return (p * n + q).reshape(n * n)


def element_side_traces(field: np.ndarray) -> np.ndarray:
    """Stack the six side traces of a nodal field -> (K, 6, n*n, ...)."""
    K, n = field.shape[0], field.shape[1]
    traces = []
    for side in sorted(SIDES):
        direction, upper = SIDES[side]
        trace = np.take(field, -1 if upper else 0, axis=direction + 1)
        traces.append(trace.reshape((K, n * n) + field.shape[4:]))
    return np.stack(traces, axis=1)


def face_pairs(mesh: Mesh, traces: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    """Gather master and slave side values in master point order -> (F, n*n, ...)."""
    left = traces[mesh.master_elements, mesh.master_sides - 1]
    right = traces[mesh.slave_elements, mesh.slave_sides - 1]
    rows = np.arange(len(mesh.faces))[:, None]
    return left, right[rows, mesh.slave_points]


def scatter_to_sides(mesh: Mesh, master_values: np.ndarray, slave_values: np.ndarray) -> np.ndarray:
    """Place per-face values (master point order) on the element sides -> (K, 6, n*n, ...)."""
    n2 = master_values.shape[1]
    sides = np.zeros((mesh.n_elements, 6, n2) + master_values.shape[2:])
    sides[mesh.master_elements, mesh.master_sides - 1] = master_values
    rows = mesh.slave_elements[:, None]
    columns = (mesh.slave_sides - 1)[:, None]
    sides[rows, columns, mesh.slave_points] = slave_values
    return sides


def lift_sides(ops: OperatorSet, sides: np.ndarray) -> np.ndarray:
    """
    Add side contributions (K, 6, n*n, ...) to the boundary layers of a nodal
    field, divided by the end-point quadrature weight of the normal direction.
    """
    K, n = sides.shape[0], ops.size
    tail = sides.shape[3:]
    volume = np.zeros((K, n, n, n) + tail)
    end_weight = ops.weights[0]
    for side in sorted(SIDES):
        direction, upper = SIDES[side]
        index = n - 1 if upper else 0
        values = sides[:, side - 1].reshape((K, n, n) + tail) / end_weight
        selector = [slice(None)] * 4
        selector[direction + 1] = index
        volume[tuple(selector)] += values
    return volume


def check_watertight(mesh: Mesh) -> float:
    """Max mismatch of s*n between master and slave sides (slave normal flipped)."""
    n = mesh.ops.size
    side_geometry = {side: face_geometry(mesh.metrics, side) for side in SIDES}
    mismatch = 0.0
    for face in mesh.faces:
        normal_m, area_m = side_geometry[face.master_side]
        normal_s, area_s = side_geometry[face.slave_side]
        master = (normal_m[face.master] * area_m[face.master][..., None]).reshape(n * n, 3)
        slave = (normal_s[face.slave] * area_s[face.slave][..., None]).reshape(n * n, 3)
        slave = slave[orientation_permutation(face.orientation, n)]
        mismatch = max(mismatch, float(np.max(np.abs(master + slave))))
    return mismatch


# ---------------------------------------------------------------------------
# Box factory
# ---------------------------------------------------------------------------

def _warp_none(s: np.ndarray, amplitude: float) -> np.ndarray:
    return s


def _warp_sine(s: np.ndarray, amplitude: float) -> np.ndarray:
    """Periodic product-of-sines displacement in unit-box coordinates."""
    sin = np.sin(2.0 * np.pi * s)
    warped = s.copy()
    warped[..., 0] += amplitude * sin[..., 1] * sin[..., 2]
    warped[..., 1] += amplitude * sin[..., 0] * sin[..., 2]
    warped[..., 2] += amplitude * sin[..., 0] * sin[..., 1]
    return warped


WARPS: Dict[str, Callable[[np.ndarray, float], np.ndarray]] = {
    "none": _warp_none,
    "sine": _warp_sine,
}


def _element_index(ix: int, iy: int, iz: int, counts: Sequence[int]) -> int:
    return ix + counts[0] * (iy + counts[1] * iz)


def build_box_mesh(extent: Sequence[Sequence[float]], elements_per_axis: Sequence[int], degree: int,
                   warp: str = "none", amplitude: float = 0.0) -> Mesh:
    """
    Fully periodic box [x0, x1] x [y0, y1] x [z0, z1] split into
    nx * ny * nz hexahedra, optionally warped by an analytic map that is
    sampled at the LGL nodes.
    """
    counts = [int(c) for c in elements_per_axis]
    if len(counts) != 3 or min(counts) < 1:
        raise MeshError(f"Need at least one element per axis, got {elements_per_axis}")
    if warp not in WARPS:
        raise MeshError(f"Unknown warp '{warp}', expected one of {sorted(WARPS)}")
    lower = np.array([float(bounds[0]) for bounds in extent])
    length = np.array([float(bounds[1]) - float(bounds[0]) for bounds in extent])
    if np.any(length <= 0.0):
        raise MeshError(f"Box extent must be increasing, got {extent}")

    ops = build_operators(degree)
    n = ops.size
    reference = 0.5 * (ops.nodes + 1.0)
    unit = np.stack(np.meshgrid(reference, reference, reference, indexing="ij"), axis=-1)

    K = counts[0] * counts[1] * counts[2]
    geometry = np.empty((K, n, n, n, 3))
    for iz in range(counts[2]):
        for iy in range(counts[1]):
            for ix in range(counts[0]):
                offset = np.array([ix, iy, iz], dtype=float)
                s = (offset + unit) / np.array(counts, dtype=float)
                s = WARPS[warp](s, amplitude)
                geometry[_element_index(ix, iy, iz, counts)] = lower + length * s

    metrics = compute_metrics_curl_form(geometry, ops)

    faces: List[Face] = []
    for iz in range(counts[2]):
        for iy in range(counts[1]):
            for ix in range(counts[0]):
                element = _element_index(ix, iy, iz, counts)
                for upper_side, (axis, _) in _BOX_NEIGHBOURS.items():
                    position = [ix, iy, iz]
                    wraps = position[axis] + 1 == counts[axis]
                    position[axis] = (position[axis] + 1) % counts[axis]
                    neighbour = _element_index(*position, counts)
                    lower_side = upper_side - 1
                    # lower element id is master; on a self-periodic face the lower side number
                    if element < neighbour:
                        face = Face(element, upper_side, neighbour, lower_side, 0, wraps)
                    else:
                        face = Face(neighbour, lower_side, element, upper_side, 0, wraps)
                    faces.append(face)

    mesh = Mesh(ops=ops, geometry=geometry, metrics=metrics, faces=faces).finalize()
    logger.info("Built %dx%dx%d box mesh, N=%d, warp=%s(%g), metric residual %.2e",
                counts[0], counts[1], counts[2], degree, warp, amplitude,
                check_metric_identities(metrics, ops))
    return mesh


# ---------------------------------------------------------------------------
# Mesh file format
# ---------------------------------------------------------------------------

def nodes_in_file_order(values: np.ndarray) -> np.ndarray:
    """(n, n, n, c) nodal values -> (n^3, c) rows with i fastest."""
    n = values.shape[0]
    return values.transpose(2, 1, 0, 3).reshape(n ** 3, values.shape[-1])


def nodes_from_file_order(rows: np.ndarray, n: int) -> np.ndarray:
    return rows.reshape(n, n, n, rows.shape[-1]).transpose(2, 1, 0, 3)


def write_mesh_file(mesh: Mesh, path: str) -> None:
    """Write the line-oriented mesh file (header, geometry nodes, faces)."""
    flags = " ".join("1" if flag else "0" for flag in mesh.periodic)
    with open(path, "w", encoding="utf-8") as stream:
        stream.write("# dgsem hexahedral mesh\n")
        stream.write(f"degree {mesh.degree}\n")
        stream.write(f"elements {mesh.n_elements}\n")
        stream.write(f"periodic {flags}\n")
        for element in range(mesh.n_elements):
            stream.write(f"element {element}\n")
            for x, y, z in nodes_in_file_order(mesh.geometry[element]):
                stream.write(f"{x:.17g} {y:.17g} {z:.17g}\n")
        stream.write(f"faces {len(mesh.faces)}\n")
        for face in mesh.faces:
            stream.write(f"{face.master} {face.master_side} {face.slave} {face.slave_side} {face.orientation}\n")


def _data_lines(path: str) -> List[str]:
    with open(path, "r", encoding="utf-8") as stream:
        return [line.strip() for line in stream if line.strip() and not line.lstrip().startswith("#")]


def read_mesh_file(path: str) -> Mesh:
    """Read a mesh file and rebuild metrics and face geometry."""
    lines = _data_lines(path)
    cursor = 0

    def expect(keyword: str) -> List[str]:
        nonlocal cursor
        if cursor >= len(lines):
            raise MeshError(f"{path}: unexpected end of file, expected '{keyword}'")
        tokens = lines[cursor].split()
        if tokens[0] != keyword:
            raise MeshError(f"{path}:{cursor + 1}: expected '{keyword}', found '{tokens[0]}'")
        cursor += 1
        return tokens[1:]

    try:
        degree = int(expect("degree")[0])
        n_elements = int(expect("elements")[0])
        periodic = tuple(bool(int(flag)) for flag in expect("periodic"))
        ops = build_operators(degree)
        n = ops.size
        geometry = np.empty((n_elements, n, n, n, 3))
        for element in range(n_elements):
            expect("element")
            rows = np.array([[float(value) for value in lines[cursor + row].split()]
                             for row in range(n ** 3)])
            cursor += n ** 3
            geometry[element] = nodes_from_file_order(rows, n)
        n_faces = int(expect("faces")[0])
        faces = []
        for _ in range(n_faces):
            master, master_side, slave, slave_side, orientation = (int(v) for v in lines[cursor].split())
            cursor += 1
            faces.append(Face(master, master_side, slave, slave_side, orientation))
    except (ValueError, IndexError) as error:
        raise MeshError(f"{path}: malformed mesh file ({error})") from error

    metrics = compute_metrics_curl_form(geometry, ops)
    mesh = Mesh(ops=ops, geometry=geometry, metrics=metrics, faces=faces, periodic=periodic)
    _mark_periodic_faces(mesh)
    logger.info("Read mesh %s: %d elements, %d faces, N=%d", path, n_elements, n_faces, degree)
    return mesh.finalize()


def _mark_periodic_faces(mesh: Mesh) -> None:
    traces = element_side_traces(mesh.geometry)
    n = mesh.ops.size
    scale = float(np.max(np.abs(mesh.geometry)))
    for face in mesh.faces:
        master = traces[face.master, face.master_side - 1]
        slave = traces[face.slave, face.slave_side - 1][orientation_permutation(face.orientation, n)]
        face.periodic = bool(np.max(np.abs(master - slave)) > 1e-10 * max(1.0, scale))


# ---------------------------------------------------------------------------
# 1D meshes
# ---------------------------------------------------------------------------

@dataclass
class Mesh1D:
    """Line of elements [x_{k-1}, x_k]; periodic meshes wrap the last face."""
    ops: OperatorSet
    vertices: np.ndarray
    periodic: bool = False

    @property
    def degree(self) -> int:
        return self.ops.degree

    @property
    def n_elements(self) -> int:
        return len(self.vertices) - 1

    @property
    def dx(self) -> np.ndarray:
        return np.diff(self.vertices)

    @property
    def jacobian(self) -> np.ndarray:
        return 0.5 * self.dx

    @property
    def length(self) -> float:
        return float(self.vertices[-1] - self.vertices[0])

    def physical_nodes(self) -> np.ndarray:
        """Node coordinates (K, n)."""
        return self.vertices[:-1, None] + self.jacobian[:, None] * (self.ops.nodes[None, :] + 1.0)


def build_line_mesh(length: float, elements: int, degree: int, periodic: bool = False,
                    origin: float = 0.0, vertices: Optional[Sequence[float]] = None) -> Mesh1D:
    """Uniform (or explicitly given) 1D element mesh on [origin, origin + length]."""
    if vertices is None:
        if elements < 1 or length <= 0.0:
            raise MeshError(f"Invalid 1D mesh: {elements} elements on length {length}")
        vertices = origin + np.linspace(0.0, length, elements + 1)
    vertices = np.asarray(vertices, dtype=float)
    if np.any(np.diff(vertices) <= 0.0):
        index = int(np.argmin(np.diff(vertices)))
        raise MeshError("Zero or negative element length", element=index)
    return Mesh1D(ops=build_operators(degree), vertices=vertices, periodic=periodic)
