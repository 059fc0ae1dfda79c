"""Path lists, band-limited signal synthesis, and instantaneous moments.

A path carries the reflection index, delay, directions of departure and
arrival, a power gain, and a phase. The power gain combines wall reflectance,
both antenna gains, and spherical spreading; for the direct path with
isotropic antennas it reduces to the free-space (Friis) value.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np

from . import geometry
from .antenna import AntennaPattern
from .errors import DegenerateGeometryError, OutOfHorizonError, ZeroEnergyError
from .geometry import Room

_FMT = "{:.17g}".format

# Fixed accumulation block so synthesized traces never depend on scheduling.
_SYNTH_CHUNK = 512


@dataclass(frozen=True)
class RadioConfig:
    """Carrier wavelength, bandwidth, and propagation speed (SI units)."""

    wavelength: float
    bandwidth: float
    speed_of_light: float = 3.0e8

    def __post_init__(self) -> None:
        if self.wavelength <= 0.0:
            raise ValueError("wavelength must be positive")
        if self.bandwidth <= 0.0:
            raise ValueError("bandwidth must be positive")
        if self.speed_of_light <= 0.0:
            raise ValueError("speed of light must be positive")

    @classmethod
    def from_center_frequency(
        cls, center_frequency: float, bandwidth: float, speed_of_light: float = 3.0e8
    ) -> "RadioConfig":
        if center_frequency <= 0.0:
            raise ValueError("center frequency must be positive")
        return cls(speed_of_light / center_frequency, bandwidth, speed_of_light)

    @property
    def center_frequency(self) -> float:
        return self.speed_of_light / self.wavelength


@dataclass(frozen=True)
class PathComponent:
    """One propagation path of a mirror-source channel."""

    index: geometry.MirrorIndex
    delay: float
    dod: np.ndarray
    doa: np.ndarray
    power_gain: float
    phase: float


class PathList:
    """Delay-sorted paths for one transmitter/receiver arrangement.

    Array-backed for speed; indexing yields :class:`PathComponent` views.
    ``horizon`` records the enumeration delay limit so count queries beyond
    it can be rejected.
    """

    __slots__ = ("indices", "delays", "dods", "doas", "power_gains", "phases", "horizon")

    def __init__(self, indices, delays, dods, doas, power_gains, phases, horizon):
        self.indices = np.asarray(indices, dtype=np.int64).reshape(-1, 3)
        self.delays = np.asarray(delays, dtype=float)
        self.dods = np.asarray(dods, dtype=float).reshape(-1, 3)
        self.doas = np.asarray(doas, dtype=float).reshape(-1, 3)
        self.power_gains = np.asarray(power_gains, dtype=float)
        self.phases = np.asarray(phases, dtype=float)
        self.horizon = float(horizon)

    def __len__(self) -> int:
        return self.delays.shape[0]

    def __getitem__(self, i: int) -> PathComponent:
        return PathComponent(
            index=tuple(int(v) for v in self.indices[i]),
            delay=float(self.delays[i]),
            dod=self.dods[i],
            doa=self.doas[i],
            power_gain=float(self.power_gains[i]),
            phase=float(self.phases[i]),
        )

    def __iter__(self):
        for i in range(len(self)):
            yield self[i]

    def to_csv(self, path) -> None:
        header = "kx,ky,kz,tau_s,gain_pow,dod_x,dod_y,dod_z,doa_x,doa_y,doa_z,phase_rad"
        lines = [header]
        for i in range(len(self)):
            k = self.indices[i]
            vals = [
                self.delays[i], self.power_gains[i],
                *self.dods[i], *self.doas[i], self.phases[i],
            ]
            lines.append(
                f"{k[0]},{k[1]},{k[2]}," + ",".join(_FMT(v) for v in vals)
            )
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write("\n".join(lines) + "\n")


def _wall_gain_products(room: Room, indices: np.ndarray) -> np.ndarray:
    near = np.abs(indices // 2)
    far = np.abs((indices + 1) // 2)
    gains = room.wall_gains
    out = np.ones(indices.shape[0])
    for axis in range(3):
        out *= gains[2 * axis] ** near[:, axis]
        out *= gains[2 * axis + 1] ** far[:, axis]
    return out


def enumerate_paths(
    room: Room,
    tx_position,
    tx_pattern: AntennaPattern,
    rx_position,
    rx_pattern: AntennaPattern,
    radio: RadioConfig,
    tau_max: float,
    max_cells: int = geometry.DEFAULT_MAX_CELLS,
) -> PathList:
    """All paths within ``tau_max`` that fall in both antenna beams.

    Power gain per path is
    ``g_k * G_tx(dod) * G_rx(doa) / (4*pi*c*tau/wavelength)**2``; the phase
    stored with each path is the carrier phase ``-2*pi*c*tau/wavelength``
    wrapped to ``[0, 2*pi)``. Paths are sorted by delay (ties by index).
    """
    tx_position = np.asarray(tx_position, dtype=float)
    rx_position = np.asarray(rx_position, dtype=float)
    if np.array_equal(tx_position, rx_position):
        raise DegenerateGeometryError("transmitter and receiver coincide")
    if radio.wavelength > 0.1 * float(np.min(room.lengths)):
        warnings.warn(
            "carrier wavelength is not small against the room dimensions; "
            "the specular mirror-source model may not apply",
            stacklevel=2,
        )

    indices, positions, delays = geometry.enumerate_indices(
        room, tx_position, rx_position, tau_max, radio.speed_of_light, max_cells
    )
    if np.any(delays == 0.0):
        raise DegenerateGeometryError("receiver sits exactly on a mirror source")

    distances = delays * radio.speed_of_light
    doas = (positions - rx_position) / distances[:, None]
    dods = (2.0 * (indices % 2) - 1.0) * doas

    keep = np.asarray(tx_pattern.in_support(dods)) & np.asarray(rx_pattern.in_support(doas))
    indices, delays, doas, dods = indices[keep], delays[keep], doas[keep], dods[keep]

    spreading = (4.0 * np.pi * delays * radio.speed_of_light / radio.wavelength) ** 2
    power = (
        _wall_gain_products(room, indices)
        * np.asarray(tx_pattern.gain(dods))
        * np.asarray(rx_pattern.gain(doas))
        / spreading
    )
    phases = (-2.0 * np.pi * radio.speed_of_light * delays / radio.wavelength) % (
        2.0 * np.pi
    )

    order = np.lexsort((indices[:, 2], indices[:, 1], indices[:, 0], delays))
    return PathList(
        indices[order], delays[order], dods[order], doas[order],
        power[order], phases[order], tau_max,
    )


def arrival_count(paths: PathList, tau: float) -> int:
    """Number of paths with delay at most ``tau`` (closed comparison)."""
    if tau > paths.horizon:
        raise OutOfHorizonError(
            f"tau={tau} exceeds the enumeration horizon {paths.horizon}"
        )
    return int(np.searchsorted(paths.delays, tau, side="right"))


def arrival_count_curve(paths: PathList, taus) -> np.ndarray:
    """Arrival count evaluated on an array of delays."""
    taus = np.asarray(taus, dtype=float)
    if taus.size and float(np.max(taus)) > paths.horizon:
        raise OutOfHorizonError("count grid exceeds the enumeration horizon")
    return np.searchsorted(paths.delays, taus, side="right").astype(np.int64)


def sinc_pulse(radio: RadioConfig, t):
    """Unit-peak sinc pulse ``sin(pi*B*t) / (pi*B*t)`` with flat band spectrum."""
    return np.sinc(radio.bandwidth * np.asarray(t, dtype=float))


@dataclass(frozen=True)
class SampleGrid:
    """Uniform time grid: ``start + step * arange(count)``."""

    start: float
    step: float
    count: int

    def __post_init__(self) -> None:
        if self.step <= 0.0:
            raise ValueError("grid step must be positive")
        if self.count < 1:
            raise ValueError("grid needs at least one sample")

    @classmethod
    def spanning(cls, start: float, stop: float, step: float) -> "SampleGrid":
        count = int(np.floor((stop - start) / step + 1e-9)) + 1
        return cls(start, step, count)

    def times(self) -> np.ndarray:
        return self.start + self.step * np.arange(self.count)


@dataclass(frozen=True)
class SignalTrace:
    """Complex baseband samples on a uniform grid."""

    start: float
    step: float
    samples: np.ndarray

    def times(self) -> np.ndarray:
        return self.start + self.step * np.arange(self.samples.shape[0])

    @property
    def abs2(self) -> np.ndarray:
        return np.abs(self.samples) ** 2

    @property
    def energy(self) -> float:
        return float(np.trapezoid(self.abs2, dx=self.step))

    def window(self, t_min: float | None = None, t_max: float | None = None) -> "SignalTrace":
        """Sub-trace with sample times inside ``[t_min, t_max]`` (inclusive)."""
        t = self.times()
        mask = np.ones(t.shape, dtype=bool)
        if t_min is not None:
            mask &= t >= t_min
        if t_max is not None:
            mask &= t <= t_max
        idx = np.flatnonzero(mask)
        if idx.size == 0:
            raise ValueError("window excludes every sample")
        return SignalTrace(float(t[idx[0]]), self.step, self.samples[idx[0] : idx[-1] + 1])

    def to_csv(self, path) -> None:
        lines = ["t_seconds,re,im,abs2"]
        t = self.times()
        a2 = self.abs2
        for i in range(t.shape[0]):
            s = self.samples[i]
            lines.append(
                ",".join(_FMT(v) for v in (t[i], s.real, s.imag, a2[i]))
            )
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write("\n".join(lines) + "\n")


def synthesize_signal(
    paths: PathList,
    radio: RadioConfig,
    grid: SampleGrid,
    phase_mode: str = "carrier",
    rng: np.random.Generator | None = None,
) -> SignalTrace:
    """Superpose one sinc pulse per path on the grid.

    ``phase_mode='carrier'`` uses the phases stored with the paths;
    ``'random'`` draws i.i.d. uniform phases from ``rng`` for each path.
    An empty path list yields a zero trace.
    """
    if grid.step > 1.0 / (2.0 * radio.bandwidth):
        raise ValueError("grid step must not exceed 1/(2*bandwidth)")
    n = len(paths)
    out = np.zeros(grid.count, dtype=complex)
    if n == 0:
        return SignalTrace(grid.start, grid.step, out)

    if phase_mode == "carrier":
        phases = paths.phases
    elif phase_mode == "random":
        if rng is None:
            raise ValueError("phase_mode='random' requires an rng")
        phases = rng.uniform(0.0, 2.0 * np.pi, n)
    else:
        raise ValueError(f"unknown phase_mode: {phase_mode!r}")
    amplitudes = np.sqrt(paths.power_gains) * np.exp(1j * phases)

    # sin(a - b) expansion: transcendentals cost O(paths + samples), not their
    # product; blocks accumulate in fixed order.
    scale = np.pi * radio.bandwidth
    a = scale * grid.times()
    sin_a, cos_a = np.sin(a), np.cos(a)
    for lo in range(0, n, _SYNTH_CHUNK):
        sl = slice(lo, min(lo + _SYNTH_CHUNK, n))
        b = scale * paths.delays[sl]
        arg = a[None, :] - b[:, None]
        num = np.cos(b)[:, None] * sin_a[None, :] - np.sin(b)[:, None] * cos_a[None, :]
        small = np.abs(arg) < 1e-9
        kernel = np.where(small, 1.0, num / np.where(small, 1.0, arg))
        out += (amplitudes[sl, None] * kernel).sum(axis=0)
    return SignalTrace(grid.start, grid.step, out)


def signal_moments(trace: SignalTrace) -> tuple[float, float]:
    """Instantaneous mean delay and rms delay spread of ``|y(t)|**2``.

    Trapezoidal integration on the trace grid; raises
    :class:`ZeroEnergyError` when the trace carries no energy.
    """
    weights = trace.abs2
    total = float(np.trapezoid(weights, dx=trace.step))
    if total <= 0.0:
        raise ZeroEnergyError("trace has zero energy; moments are undefined")
    t = trace.times()
    mean = float(np.trapezoid(weights * t, dx=trace.step)) / total
    var = float(np.trapezoid(weights * (t - mean) ** 2, dx=trace.step)) / total
    return mean, float(np.sqrt(var))
