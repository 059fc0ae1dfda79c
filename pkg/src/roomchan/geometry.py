"""Mirror-source geometry for a rectangular room.

The room spans ``[0, Lx) x [0, Ly) x [0, Lz)`` in a corner-anchored Cartesian
frame. Reflecting the transmitter repeatedly in the six walls tiles space with
image ("mirror") sources, one per ``Lx x Ly x Lz`` cell, indexed by a signed
triplet ``k = (kx, ky, kz)`` of per-axis reflection counts. Index ``(0, 0, 0)``
is the direct path.

Walls are paired per axis: wall 1 is the plane ``x = 0``, wall 2 is ``x = Lx``,
walls 3/4 are the analogous ``y`` planes and walls 5/6 the ``z`` planes.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DegenerateGeometryError, ResourceLimitError

MirrorIndex = tuple[int, int, int]

#: Default cap on candidate index cells scanned by :func:`enumerate_indices`.
DEFAULT_MAX_CELLS = 20_000_000


@dataclass(frozen=True)
class Room:
    """Rectangular room with per-wall power reflectances.

    Parameters
    ----------
    lengths : array_like
        Side lengths ``(Lx, Ly, Lz)`` in meters, all positive.
    wall_gains : float or array_like
        Power reflectance of the six walls, each in ``[0, 1]``, ordered
        ``(x=0, x=Lx, y=0, y=Ly, z=0, z=Lz)``. A scalar applies to all walls.
    """

    lengths: np.ndarray
    wall_gains: np.ndarray

    def __post_init__(self) -> None:
        lengths = np.asarray(self.lengths, dtype=float)
        if lengths.shape != (3,):
            raise ValueError("room lengths must be three values")
        if not np.all(lengths > 0.0):
            raise ValueError("room lengths must be positive")
        gains = np.asarray(self.wall_gains, dtype=float)
        if gains.ndim == 0:
            gains = np.full(6, float(gains))
        if gains.shape != (6,):
            raise ValueError("wall_gains must be a scalar or six values")
        if np.any(gains < 0.0) or np.any(gains > 1.0):
            raise ValueError("wall gains must lie in [0, 1]")
        object.__setattr__(self, "lengths", lengths)
        object.__setattr__(self, "wall_gains", gains)

    @property
    def volume(self) -> float:
        return float(np.prod(self.lengths))

    @property
    def surface_area(self) -> float:
        lx, ly, lz = self.lengths
        return float(2.0 * (lx * ly + lx * lz + ly * lz))

    @property
    def diagonal(self) -> float:
        return float(np.sqrt(np.sum(self.lengths**2)))

    @property
    def uniform_gain(self) -> float:
        """Common wall reflectance; raises if the walls differ."""
        g = self.wall_gains
        if not np.all(g == g[0]):
            raise ValueError("walls have distinct gains; no single reflectance")
        return float(g[0])

    def contains(self, position) -> bool:
        p = np.asarray(position, dtype=float)
        return bool(np.all(p >= 0.0) and np.all(p < self.lengths))


def mirror_source_position(room: Room, source, k) -> np.ndarray:
    """Position of the image of ``source`` with reflection index ``k``.

    Per axis the image sits at ``ceil(k/2) * 2L + (-1)**k * coordinate``;
    ``k = (0, 0, 0)`` returns ``source`` unchanged.
    """
    k = np.asarray(k, dtype=np.int64)
    source = np.asarray(source, dtype=float)
    offsets = ((k + 1) // 2) * 2.0 * room.lengths
    signs = 1.0 - 2.0 * (k % 2)
    return offsets + signs * source


def mirror_receiver_index(k) -> np.ndarray:
    """Index of the receiver image that belongs to the same path as ``k``.

    Mirroring the receiver instead of the source describes the same path with
    even axis components negated; odd components are unchanged. The map is an
    involution.
    """
    k = np.asarray(k, dtype=np.int64)
    return np.where(k % 2 == 0, -k, k)


def mirror_receiver_position(room: Room, receiver, k) -> np.ndarray:
    """Position of the receiver image belonging to path ``k``."""
    return mirror_source_position(room, receiver, mirror_receiver_index(k))


def path_delay(point_a, point_b, speed: float) -> float:
    """Propagation delay between two points: Euclidean distance over speed."""
    if speed <= 0.0:
        raise ValueError("propagation speed must be positive")
    diff = np.asarray(point_a, dtype=float) - np.asarray(point_b, dtype=float)
    return float(np.sqrt(np.sum(diff * diff)) / speed)


def arrival_direction(mirror_position, receiver) -> np.ndarray:
    """Unit vector from the receiver toward the mirror source of a path."""
    diff = np.asarray(mirror_position, dtype=float) - np.asarray(receiver, dtype=float)
    norm = float(np.sqrt(np.sum(diff * diff)))
    if norm == 0.0:
        raise DegenerateGeometryError("mirror source and receiver coincide")
    return diff / norm

def departure_from_arrival(k, doa) -> np.ndarray:
    """Direction of departure implied by a direction of arrival for path ``k``.

    Folding the straight mirror-space ray back into the room flips each axis
    once per reflection, so per axis ``dod_i = -(-1)**k_i * doa_i``. For the
    direct path this reduces to ``dod = -doa``. Matches the direct
    construction from the receiver image position and preserves transmit /
    receive reciprocity.
    """
    k = np.asarray(k, dtype=np.int64)
    doa = np.asarray(doa, dtype=float)
    return (2.0 * (k % 2) - 1.0) * doa


def wall_interaction_counts(k) -> tuple[int, int, int, int, int, int]:
    """Number of interactions of path ``k`` with each of the six walls.

    Per axis the near wall (through the origin) is hit ``|floor(k/2)|`` times
    and the far wall ``|ceil(k/2)|`` times; the two counts sum to ``|k|``.
    """
    k = np.asarray(k, dtype=np.int64)
    near = np.abs(k // 2)
    far = np.abs((k + 1) // 2)
    return (
        int(near[0]), int(far[0]),
        int(near[1]), int(far[1]),
        int(near[2]), int(far[2]),
    )


def reflection_gain(room: Room, k) -> float:
    """Power gain accumulated by the wall reflections of path ``k``.

    Product of per-wall reflectances raised to the interaction counts; for
    identical walls with gain ``g`` this equals ``g ** (|kx|+|ky|+|kz|)``.
    """
    counts = np.asarray(wall_interaction_counts(k), dtype=float)
    return float(np.prod(room.wall_gains**counts))


def _axis_image_positions(length: float, coordinate: float, k_values: np.ndarray) -> np.ndarray:
    offsets = ((k_values + 1) // 2) * 2.0 * length
    signs = 1.0 - 2.0 * (k_values % 2)
    return offsets + signs * coordinate


def enumerate_indices(
    room: Room,
    source,
    receiver,
    tau_max: float,
    speed: float,
    max_cells: int = DEFAULT_MAX_CELLS,
) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """All mirror-source indices whose path delay is at most ``tau_max``.

    Parameters
    ----------
    room : Room
    source, receiver : array_like
        Positions inside the room.
    tau_max : float
        Delay horizon in seconds; the comparison is closed (``<=``).
    speed : float
        Propagation speed in m/s.
    max_cells : int
        Cap on the scanned index cube; exceeding it raises
        :class:`ResourceLimitError`.

    Returns
    -------
    indices : (N, 3) int64 array
        Reflection triplets in lexicographic order.
    positions : (N, 3) float array
        Mirror-source positions.
    delays : (N,) float array
        Path delays in seconds.

    Notes
    -----
    A per-axis index bound of ``ceil(speed * tau_max / L) + 2`` covers every
    image within the horizon: axis images satisfy ``|position| >= (|k|-1)*L``,
    so any admissible index obeys ``|k| <= speed*tau_max/L + 2``.
    """
    source = np.asarray(source, dtype=float)
    receiver = np.asarray(receiver, dtype=float)
    if tau_max < 0.0:
        raise ValueError("tau_max must be non-negative")
    if speed <= 0.0:
        raise ValueError("propagation speed must be positive")
    if not room.contains(source) or not room.contains(receiver):
        raise ValueError("source and receiver must lie inside the room")

    radius = speed * tau_max
    bounds = np.ceil(radius / room.lengths).astype(np.int64) + 2
    cells = int(np.prod(2 * bounds + 1))
    if cells > max_cells:
        raise ResourceLimitError(
            f"index cube holds {cells} cells, above the cap of {max_cells}"
        )

    axes = [np.arange(-b, b + 1, dtype=np.int64) for b in bounds]
    offsets = [
        _axis_image_positions(room.lengths[i], source[i], axes[i]) - receiver[i]
        for i in range(3)
    ]
    dist_sq = (
        (offsets[0] ** 2)[:, None, None]
        + (offsets[1] ** 2)[None, :, None]
        + (offsets[2] ** 2)[None, None, :]
    )
    mask = dist_sq <= radius * radius

    # argwhere scans in C order, i.e. lexicographically over (kx, ky, kz).
    hits = np.argwhere(mask)
    indices = hits - bounds[None, :]
    positions = np.stack(
        [offsets[i][hits[:, i]] + receiver[i] for i in range(3)], axis=1
    )
    delays = np.sqrt(dist_sq[mask]) / speed
    return indices, positions, delays
