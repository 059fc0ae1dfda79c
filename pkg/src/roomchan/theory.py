"""Closed-form predictions for mirror-source channels in rectangular rooms.

All functions take a :class:`SceneSummary` holding the room volume ``V``,
surface area ``S``, diagonal, common wall reflectance ``g``, radio constants,
and the two beam coverage fractions. Delay arguments may be scalars or
arrays; outputs follow numpy broadcasting.

Overview of the quantities:

* arrival counts: the cubic large-delay law ``4*pi*c^3*tau^3 / (3*V)``
  (Eyring's count), a deterministic approximation anchored at the direct
  delay, the exact mean under uniformly random terminal placement and
  orientation, and upper bounds / conditional variants.
* arrival rates: delay derivatives of the counts; spiky components are kept
  symbolic as ``(location, weight)`` pairs.
* power-delay spectrum: spike plus exponential tail with reverberation time
  ``T = -4V / (c*S*ln g)``, optionally corrected for the spread of
  wall-interaction counts around their mean.
* mixing time: the delay at which the mean arrival rate reaches one
  component per transmit pulse duration.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .antenna import AntennaPattern
from .channel import RadioConfig, sinc_pulse
from .errors import ConfigError
from .geometry import Room

_FMT = "{:.17g}".format

#: Default variance-to-mean ratio of the wall-interaction count (Kuttruff's
#: constant); 0.3 to 0.4 covers common room aspect ratios.
DEFAULT_GAMMA_SQ = 0.35


@dataclass(frozen=True)
class SceneSummary:
    """Scalars that the closed-form results depend on (SI units)."""

    volume: float
    surface: float
    diagonal: float
    reflectance: float
    speed_of_light: float
    wavelength: float
    bandwidth: float
    tx_fraction: float
    rx_fraction: float
    direct_delay: float | None = None

    def __post_init__(self) -> None:
        for name in ("volume", "surface", "diagonal", "speed_of_light", "wavelength", "bandwidth"):
            if getattr(self, name) <= 0.0:
                raise ValueError(f"{name} must be positive")
        if not 0.0 <= self.reflectance <= 1.0:
            raise ValueError("reflectance must lie in [0, 1]")
        for name in ("tx_fraction", "rx_fraction"):
            if not 0.0 < getattr(self, name) <= 1.0:
                raise ValueError(f"{name} must lie in (0, 1]")
        if self.direct_delay is not None and self.direct_delay <= 0.0:
            raise ValueError("direct_delay must be positive when given")

    @classmethod
    def from_components(
        cls,
        room: Room,
        radio: RadioConfig,
        tx_pattern: AntennaPattern,
        rx_pattern: AntennaPattern,
        tx_position=None,
        rx_position=None,
    ) -> "SceneSummary":
        """Summarize a concrete scene; positions (if given) set the direct delay."""
        direct_delay = None
        if tx_position is not None and rx_position is not None:
            diff = np.asarray(tx_position, float) - np.asarray(rx_position, float)
            direct_delay = float(np.sqrt(np.sum(diff * diff)) / radio.speed_of_light)
        return cls(
            volume=room.volume,
            surface=room.surface_area,
            diagonal=room.diagonal,
            reflectance=room.uniform_gain,
            speed_of_light=radio.speed_of_light,
            wavelength=radio.wavelength,
            bandwidth=radio.bandwidth,
            tx_fraction=tx_pattern.beam_fraction,
            rx_fraction=rx_pattern.beam_fraction,
            direct_delay=direct_delay,
        )

    @property
    def fraction_product(self) -> float:
        return self.tx_fraction * self.rx_fraction

    def _require_direct_delay(self) -> float:
        if self.direct_delay is None:
            raise ConfigError("this quantity needs the direct-path delay in the scene")
        return self.direct_delay


@dataclass(frozen=True)
class TheoryCurve:
    """Sampled analytic function with an optional symbolic spike.

    ``unit`` tags the ordinate (``count``, ``rate_per_second``, or
    ``power_density_per_second``); ``dirac`` is a ``(location, weight)``
    pair for spiky components, never rendered as tall samples.
    """

    tau: np.ndarray
    values: np.ndarray
    unit: str
    dirac: tuple[float, float] | None = None

    def __post_init__(self) -> None:
        tau = np.asarray(self.tau, dtype=float)
        values = np.asarray(self.values, dtype=float)
        if tau.ndim != 1 or tau.shape != values.shape:
            raise ValueError("tau and values must be matching 1-d arrays")
        if tau.size > 1 and not np.all(np.diff(tau) > 0.0):
            raise ValueError("curve delays must be strictly increasing")
        if self.dirac is not None and self.dirac[1] < 0.0:
            raise ValueError("spike weight must be non-negative")
        object.__setattr__(self, "tau", tau)
        object.__setattr__(self, "values", values)

    def to_csv(self, path) -> None:
        lines = []
        if self.dirac is not None:
            lines.append(
                f"# dirac_location={_FMT(self.dirac[0])},dirac_weight={_FMT(self.dirac[1])}"
            )
        lines.append("tau_seconds,value,unit")
        for t, v in zip(self.tau, self.values):
            lines.append(f"{_FMT(t)},{_FMT(v)},{self.unit}")
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write("\n".join(lines) + "\n")


def _cubic_count(scene: SceneSummary, tau) -> np.ndarray:
    tau = np.asarray(tau, dtype=float)
    c = scene.speed_of_light
    return np.where(tau > 0.0, 4.0 * np.pi * c**3 * tau**3 / (3.0 * scene.volume), 0.0)


def eyring_count(scene: SceneSummary, tau):
    """Large-delay arrival count ``4*pi*c^3*tau^3 / (3*V)`` (zero for tau <= 0)."""
    return _cubic_count(scene, tau)


def approx_count(scene: SceneSummary, tau):
    """Deterministic count approximation anchored at the direct delay.

    ``1(tau >= tau0) * [1 + 4*pi*c^3*(tau^3 - tau0^3) / (3*V)] * w_tx * w_rx``.
    For isotropic, colocated antennas (``tau0 -> 0``) this is the cubic
    large-delay count plus one.
    """
    tau0 = scene._require_direct_delay()
    tau = np.asarray(tau, dtype=float)
    c = scene.speed_of_light
    bulk = 1.0 + 4.0 * np.pi * c**3 * (tau**3 - tau0**3) / (3.0 * scene.volume)
    return np.where(tau >= tau0, bulk * scene.fraction_product, 0.0)


def approx_rate(scene: SceneSummary, tau) -> tuple[float, np.ndarray]:
    """Arrival-rate approximation: spike at the direct delay plus density.

    Returns ``(spike_weight, density)`` where the spike of weight
    ``w_tx * w_rx`` sits at the direct delay and the density is
    ``1(tau > tau0) * 4*pi*c^3*tau^2 / V * w_tx * w_rx``.
    """
    tau0 = scene._require_direct_delay()
    tau = np.asarray(tau, dtype=float)
    c = scene.speed_of_light
    density = np.where(
        tau > tau0,
        4.0 * np.pi * c**3 * tau**2 / scene.volume * scene.fraction_product,
        0.0,
    )
    return scene.fraction_product, density


def mean_count(scene: SceneSummary, tau):
    """Exact mean arrival count for uniformly random terminal placement.

    ``4*pi*c^3*tau^3 / (3*V) * w_tx * w_rx`` for ``tau > 0``; for isotropic
    antennas the mean coincides with the cubic large-delay count.
    """
    return _cubic_count(scene, tau) * scene.fraction_product


def mean_rate(scene: SceneSummary, tau):
    """Mean arrival rate ``4*pi*c^3*tau^2 / V * w_tx * w_rx`` for ``tau > 0``."""
    tau = np.asarray(tau, dtype=float)
    c = scene.speed_of_light
    density = 4.0 * np.pi * c**3 * tau**2 / scene.volume * scene.fraction_product
    return np.where(tau > 0.0, density, 0.0)


def mixing_time(scene: SceneSummary, n_mix: float = 1.0) -> float:
    """Delay where the mean arrival rate reaches ``n_mix`` components per pulse.

    Solves ``rate(tau) = n_mix * B`` for the mean rate, giving
    ``sqrt(n_mix * B * V / (4*pi*c^3 * w_tx * w_rx))``. Values beyond
    ``n_mix = 1`` scale the result by ``sqrt(n_mix)``.
    """
    if n_mix <= 0.0:
        raise ValueError("n_mix must be positive")
    c = scene.speed_of_light
    return float(
        np.sqrt(
            n_mix
            * scene.bandwidth
            * scene.volume
            / (4.0 * np.pi * c**3 * scene.fraction_product)
        )
    )


def reverberation_time(scene: SceneSummary) -> float:
    """Exponential tail time constant ``T = -4V / (c*S*ln g)``.

    Undefined for ``g = 0`` (no reverberation) and ``g = 1`` (lossless walls).
    """
    g = scene.reflectance
    if g <= 0.0 or g >= 1.0:
        raise ValueError("reverberation time needs reflectance strictly in (0, 1)")
    return float(
        -4.0 * scene.volume / (scene.speed_of_light * scene.surface * np.log(g))
    )


def kuttruff_correction(gain: float, gamma_sq: float = DEFAULT_GAMMA_SQ) -> float:
    """Reverberation-time correction ``1 / (1 + gamma_sq * ln(g) / 2)``.

    Accounts for the spread of wall-interaction counts around their mean;
    ``gamma_sq`` is the variance-to-mean ratio of that count and depends on
    the room aspect ratio.
    """
    if gain <= 0.0 or gain >= 1.0:
        raise ValueError("correction needs reflectance strictly in (0, 1)")
    if gamma_sq < 0.0:
        raise ValueError("gamma_sq must be non-negative")
    return float(1.0 / (1.0 + gamma_sq * np.log(gain) / 2.0))


def gain_second_moment(scene: SceneSummary, tau, mode: str = "deterministic"):
    """Conditional second moment of the path gain at delay ``tau``.

    ``g**(tau*c*S/(4V)) / (4*pi*c*tau/wavelength)**2 / (w_tx * w_rx)``, using
    the mean number of wall interactions at that delay. In ``deterministic``
    mode the direct delay must be set, delays below it are rejected, and the
    value exactly at the direct delay carries no reflection loss. In
    ``randomized`` mode any ``tau > 0`` is accepted.
    """
    tau = np.asarray(tau, dtype=float)
    if np.any(tau <= 0.0):
        raise ValueError("gain second moment is singular at tau <= 0")
    c = scene.speed_of_light
    spreading = (4.0 * np.pi * c * tau / scene.wavelength) ** 2
    exponent = tau * c * scene.surface / (4.0 * scene.volume)
    reflections = scene.reflectance**exponent
    if mode == "deterministic":
        tau0 = scene._require_direct_delay()
        if np.any(tau < tau0):
            raise ValueError("deterministic mode needs tau >= direct delay")
        reflections = np.where(tau == tau0, 1.0, reflections)
    elif mode != "randomized":
        raise ValueError(f"unknown mode: {mode!r}")
    return reflections / spreading / scene.fraction_product


def pds(
    scene: SceneSummary,
    tau,
    mode: str = "deterministic",
    corrected: bool = False,
    gamma_sq: float = DEFAULT_GAMMA_SQ,
) -> TheoryCurve:
    """Power-delay spectrum approximation: optional spike plus exponential tail.

    The tail is ``exp(-tau/T) / (4*pi*V/(wavelength^2 * c))`` and is
    independent of the antenna beam fractions: directivity scales the arrival
    rate down and the per-path gain up by the same factor. ``deterministic``
    mode adds a spike of weight ``(wavelength / (4*pi*c*tau0))**2`` at the
    direct delay and starts the tail there; ``randomized`` mode has no spike
    and starts at zero. With ``corrected=True`` the tail uses the
    interaction-spread-corrected time constant ``xi * T``.
    """
    tau = np.atleast_1d(np.asarray(tau, dtype=float))
    decay = reverberation_time(scene)
    if corrected:
        decay *= kuttruff_correction(scene.reflectance, gamma_sq)
    c = scene.speed_of_light
    level = scene.wavelength**2 * c / (4.0 * np.pi * scene.volume)
    dirac = None
    if mode == "deterministic":
        tau0 = scene._require_direct_delay()
        weight = (scene.wavelength / (4.0 * np.pi * c * tau0)) ** 2
        dirac = (tau0, weight)
        tail = np.where(tau > tau0, level * np.exp(-tau / decay), 0.0)
    elif mode == "randomized":
        tail = np.where(tau > 0.0, level * np.exp(-tau / decay), 0.0)
    else:
        raise ValueError(f"unknown mode: {mode!r}")
    return TheoryCurve(tau, tail, "power_density_per_second", dirac)


def expected_received_power(curve: TheoryCurve, radio: RadioConfig, tau) -> np.ndarray:
    """Mean received power: the spectrum convolved with the pulse energy.

    ``E|y(tau)|^2 = integral P(tau - t) |s(t)|^2 dt`` with the spike handled
    analytically as a pulse-energy replica and the tail integrated by the
    trapezoidal rule on the curve's own grid.
    """
    tau = np.atleast_1d(np.asarray(tau, dtype=float))
    out = np.zeros(tau.shape)
    if curve.dirac is not None:
        location, weight = curve.dirac
        out += weight * sinc_pulse(radio, tau - location) ** 2
    grid = curve.tau
    if grid.size >= 2:
        weights = np.empty(grid.shape)
        weights[1:-1] = (grid[2:] - grid[:-2]) / 2.0
        weights[0] = (grid[1] - grid[0]) / 2.0
        weights[-1] = (grid[-1] - grid[-2]) / 2.0
        pulse_sq = sinc_pulse(radio, tau[:, None] - grid[None, :]) ** 2
        out += (pulse_sq * (weights * curve.values)[None, :]).sum(axis=1)
    return out


def count_second_moment(scene: SceneSummary, tau):
    """Raw second moment of the arrival count under random placement.

    ``E[N]^2 + (E[N(tau + D/2c)] - E[N(tau - D/2c)]) / 4`` with ``D`` the
    room diagonal. Accurate for the raw moment at large delays; the implied
    variance overshoots the empirical one.
    """
    tau = np.asarray(tau, dtype=float)
    half_cross = scene.diagonal / (2.0 * scene.speed_of_light)
    mean = mean_count(scene, tau)
    spread = mean_count(scene, tau + half_cross) - mean_count(scene, tau - half_cross)
    return mean**2 + spread / 4.0


def count_upper_bound(scene: SceneSummary, tau):
    """Mean-count bound ``4*pi*c^3*tau^3/(3V) * min(w_tx, w_rx)``.

    Valid for a uniformly placed terminal with fixed orientation; equality
    holds when either antenna is isotropic.
    """
    return _cubic_count(scene, tau) * min(scene.tx_fraction, scene.rx_fraction)


def rate_upper_bound(scene: SceneSummary, tau):
    """Rate analog of :func:`count_upper_bound`."""
    tau = np.asarray(tau, dtype=float)
    c = scene.speed_of_light
    density = 4.0 * np.pi * c**3 * tau**2 / scene.volume
    return np.where(tau > 0.0, density, 0.0) * min(scene.tx_fraction, scene.rx_fraction)


def conditional_mean_count(scene: SceneSummary, tau, tau0: float):
    """Mean count conditioned on the direct delay ``tau0``.

    Numerically identical to :func:`approx_count` evaluated with that direct
    delay; the semantics differ (expectation given the terminal separation
    rather than a deterministic approximation).
    """
    if tau0 <= 0.0:
        raise ValueError("conditional count needs tau0 > 0")
    tau = np.asarray(tau, dtype=float)
    c = scene.speed_of_light
    bulk = 1.0 + 4.0 * np.pi * c**3 * (tau**3 - tau0**3) / (3.0 * scene.volume)
    return np.where(tau >= tau0, bulk * scene.fraction_product, 0.0)


def conditional_rate(scene: SceneSummary, tau, tau0: float) -> tuple[float, np.ndarray]:
    """Rate conditioned on the direct delay: ``(spike_weight, density)``."""
    if tau0 <= 0.0:
        raise ValueError("conditional rate needs tau0 > 0")
    tau = np.asarray(tau, dtype=float)
    c = scene.speed_of_light
    density = np.where(
        tau > tau0,
        4.0 * np.pi * c**3 * tau**2 / scene.volume * scene.fraction_product,
        0.0,
    )
    return scene.fraction_product, density
