"""Seeded ensemble simulation over random antenna placement and orientation.

Each run draws terminal positions/orientations according to the configured
randomization mode, enumerates the paths, evaluates the arrival count on the
configured delay grid, synthesizes the received power, and records the
instantaneous mean delay and rms delay spread up to the moment cutoff.

Reproducibility contract: every run uses its own counter-based random stream
keyed by ``(master seed, run index)``, and aggregation reduces in run-index
order, so results are a pure function of the configuration regardless of how
many workers execute the runs.
"""

from __future__ import annotations

import json
import multiprocessing
import os
from dataclasses import dataclass, field

import numpy as np

from . import theory
from .antenna import AntennaPattern, SphericalCap, sample_orientation, sample_position
from .channel import (
    RadioConfig,
    SampleGrid,
    arrival_count_curve,
    enumerate_paths,
    signal_moments,
    synthesize_signal,
)
from .errors import ConfigError, EmptySampleError, ZeroEnergyError
from .geometry import DEFAULT_MAX_CELLS, Room

_FMT = "{:.17g}".format

MODES = ("both-random", "fixed-rx", "fixed-orientation-tx", "fixed-distance")

# Oversampling and padding of the synthesis grid relative to the pulse.
_OVERSAMPLE = 4
_PAD_PULSES = 20
_PLACEMENT_ATTEMPTS = 10_000


def _as_unit(vector, name: str) -> np.ndarray:
    v = np.asarray(vector, dtype=float)
    norm = float(np.sqrt(np.sum(v * v)))
    if v.shape != (3,) or norm == 0.0:
        raise ConfigError(f"{name} must be a nonzero 3-vector")
    return v / norm


@dataclass(frozen=True)
class McConfig:
    """Full description of one ensemble; output is a pure function of it."""

    room: Room
    radio: RadioConfig
    tx_pattern: AntennaPattern
    rx_pattern: AntennaPattern
    runs: int = 2000
    seed: int = 1
    mode: str = "both-random"
    tau_max: float = 120e-9
    phase_mode: str = "random"
    moment_cutoff: float = 120e-9
    grid_start: float = 0.0
    grid_stop: float = 120e-9
    grid_step: float = 0.25e-9
    rx_position: np.ndarray | None = None
    rx_orientation: np.ndarray | None = None
    tx_orientation: np.ndarray | None = None
    distance: float | None = None
    max_cells: int = DEFAULT_MAX_CELLS

    def __post_init__(self) -> None:
        if self.runs < 1:
            raise ConfigError("runs must be at least 1")
        if self.mode not in MODES:
            raise ConfigError(f"mode must be one of {MODES}")
        if self.phase_mode not in ("carrier", "random"):
            raise ConfigError("phase_mode must be 'carrier' or 'random'")
        if self.tau_max < self.moment_cutoff:
            raise ConfigError("tau_max must be at least the moment cutoff")
        if not 0.0 <= self.grid_start < self.grid_stop <= self.tau_max:
            raise ConfigError("grid must lie within [0, tau_max]")
        if self.grid_step <= 0.0:
            raise ConfigError("grid step must be positive")
        if self.mode in ("fixed-rx", "fixed-orientation-tx"):
            if self.rx_position is None:
                raise ConfigError(f"mode {self.mode!r} needs rx_position")
            object.__setattr__(
                self, "rx_position", np.asarray(self.rx_position, dtype=float)
            )
            if not self.room.contains(self.rx_position):
                raise ConfigError("rx_position must lie inside the room")
            if self.rx_orientation is not None:
                object.__setattr__(
                    self, "rx_orientation", _as_unit(self.rx_orientation, "rx_orientation")
                )
            elif isinstance(self.rx_pattern, SphericalCap):
                raise ConfigError(f"mode {self.mode!r} needs rx_orientation for a directive receiver")
        if self.mode == "fixed-orientation-tx":
            if self.tx_orientation is None:
                raise ConfigError("mode 'fixed-orientation-tx' needs tx_orientation")
            object.__setattr__(
                self, "tx_orientation", _as_unit(self.tx_orientation, "tx_orientation")
            )
        if self.mode == "fixed-distance":
            if self.distance is None or self.distance <= 0.0:
                raise ConfigError("mode 'fixed-distance' needs a positive distance")
            if self.distance >= self.room.diagonal:
                raise ConfigError("distance does not fit inside the room")

    def grid(self) -> np.ndarray:
        # linspace keeps the endpoint exactly at grid_stop <= tau_max
        count = int(round((self.grid_stop - self.grid_start) / self.grid_step)) + 1
        return np.linspace(self.grid_start, self.grid_stop, count)

    def synthesis_grid(self) -> SampleGrid:
        pad = _PAD_PULSES / self.radio.bandwidth
        step = 1.0 / (_OVERSAMPLE * self.radio.bandwidth)
        return SampleGrid.spanning(-pad, self.tau_max + pad, step)


@dataclass(frozen=True)
class McEstimate:
    """Ensemble mean curve with elementwise standard error."""

    grid: np.ndarray
    mean: np.ndarray
    stderr: np.ndarray
    runs: int


@dataclass(frozen=True)
class Ecdf:
    """Right-continuous empirical distribution: sorted values, cumulative probs."""

    values: np.ndarray
    probs: np.ndarray

    def quantile(self, q: float) -> float:
        idx = int(np.searchsorted(self.probs, q, side="left"))
        idx = min(idx, self.values.shape[0] - 1)
        return float(self.values[idx])

    @property
    def median(self) -> float:
        return self.quantile(0.5)


@dataclass(frozen=True)
class RunRecord:
    """Per-run provenance and summary."""

    index: int
    tx_position: np.ndarray
    rx_position: np.ndarray
    tx_boresight: np.ndarray | None
    rx_boresight: np.ndarray | None
    n_paths: int
    energy: float
    mean_delay: float | None
    rms_spread: float | None


@dataclass(frozen=True)
class McResult:
    """Aggregated ensemble output plus raw per-run curves."""

    config: McConfig
    count: McEstimate
    power: McEstimate
    mean_delay: Ecdf | None
    rms_spread: Ecdf | None
    records: list[RunRecord]
    missing_moments: int
    counts_raw: np.ndarray
    power_raw: np.ndarray


def _run_rng(seed: int, index: int) -> np.random.Generator:
    return np.random.Generator(np.random.Philox(key=[seed, index]))


def _draw_terminals(cfg: McConfig, rng: np.random.Generator):
    """Positions and boresights for one run; draw order is fixed per mode."""
    if cfg.mode == "both-random":
        tx_pos = sample_position(rng, cfg.room)
        tx_ori = sample_orientation(rng)
        rx_pos = sample_position(rng, cfg.room)
        rx_ori = sample_orientation(rng)
    elif cfg.mode == "fixed-rx":
        tx_pos = sample_position(rng, cfg.room)
        tx_ori = sample_orientation(rng)
        rx_pos = cfg.rx_position
        rx_ori = cfg.rx_orientation
    elif cfg.mode == "fixed-orientation-tx":
        tx_pos = sample_position(rng, cfg.room)
        tx_ori = cfg.tx_orientation
        rx_pos = cfg.rx_position
        rx_ori = cfg.rx_orientation
    else:  # fixed-distance
        for _ in range(_PLACEMENT_ATTEMPTS):
            rx_pos = sample_position(rng, cfg.room)
            direction = sample_orientation(rng)
            tx_pos = rx_pos + cfg.distance * direction
            if cfg.room.contains(tx_pos):
                break
        else:
            raise ConfigError("could not place terminals at the requested distance")
        tx_ori = sample_orientation(rng)
        rx_ori = sample_orientation(rng)
    return tx_pos, tx_ori, rx_pos, rx_ori


def _oriented(pattern: AntennaPattern, boresight) -> AntennaPattern:
    if isinstance(pattern, SphericalCap) and boresight is not None:
        return pattern.aimed(boresight)
    return pattern


def _simulate_run(cfg: McConfig, index: int):
    rng = _run_rng(cfg.seed, index)
    tx_pos, tx_ori, rx_pos, rx_ori = _draw_terminals(cfg, rng)
    tx_pattern = _oriented(cfg.tx_pattern, tx_ori)
    rx_pattern = _oriented(cfg.rx_pattern, rx_ori)

    paths = enumerate_paths(
        cfg.room, tx_pos, tx_pattern, rx_pos, rx_pattern,
        cfg.radio, cfg.tau_max, cfg.max_cells,
    )
    grid = cfg.grid()
    counts = arrival_count_curve(paths, grid).astype(np.int32)

    trace = synthesize_signal(paths, cfg.radio, cfg.synthesis_grid(), cfg.phase_mode, rng)
    power = np.interp(grid, trace.times(), trace.abs2)

    mean_delay = rms_spread = None
    energy = 0.0
    if len(paths) > 0:
        clipped = trace.window(None, cfg.moment_cutoff)
        energy = clipped.energy
        try:
            mean_delay, rms_spread = signal_moments(clipped)
        except ZeroEnergyError:
            pass

    record = RunRecord(
        index=index,
        tx_position=tx_pos,
        rx_position=rx_pos,
        tx_boresight=tx_ori if isinstance(cfg.tx_pattern, SphericalCap) else None,
        rx_boresight=rx_ori if isinstance(cfg.rx_pattern, SphericalCap) else None,
        n_paths=len(paths),
        energy=energy,
        mean_delay=mean_delay,
        rms_spread=rms_spread,
    )
    return counts, power, record


_WORKER_CONFIG: McConfig | None = None


def _init_worker(cfg: McConfig) -> None:
    global _WORKER_CONFIG
    _WORKER_CONFIG = cfg


def _worker_run(index: int):
    return _simulate_run(_WORKER_CONFIG, index)


def ecdf(samples) -> Ecdf:
    """Standard right-continuous ECDF of the finite entries of ``samples``."""
    values = np.asarray(samples, dtype=float)
    values = values[np.isfinite(values)]
    if values.size == 0:
        raise EmptySampleError("no finite samples for an empirical distribution")
    values = np.sort(values)
    unique, counts = np.unique(values, return_counts=True)
    probs = np.cumsum(counts) / values.size
    return Ecdf(unique, probs)


def run_ensemble(cfg: McConfig, workers: int = 1) -> McResult:
    """Execute the ensemble and aggregate in run-index order.

    ``workers > 1`` distributes runs over processes; the result is identical
    for any worker count. Runs whose beams pick up no energy are counted in
    ``missing_moments`` and excluded from the moment distributions.
    """
    if workers <= 1:
        outputs = [_simulate_run(cfg, i) for i in range(cfg.runs)]
    else:
        with multiprocessing.Pool(
            processes=workers, initializer=_init_worker, initargs=(cfg,)
        ) as pool:
            outputs = pool.map(_worker_run, range(cfg.runs), chunksize=max(1, cfg.runs // (8 * workers)))

    grid = cfg.grid()
    counts_raw = np.stack([o[0] for o in outputs])
    power_raw = np.stack([o[1] for o in outputs])
    records = [o[2] for o in outputs]

    def estimate(raw: np.ndarray) -> McEstimate:
        mean = raw.mean(axis=0)
        if cfg.runs > 1:
            stderr = raw.std(axis=0, ddof=1) / np.sqrt(cfg.runs)
        else:
            stderr = np.zeros_like(mean, dtype=float)
        return McEstimate(grid, mean, stderr, cfg.runs)

    delays = np.array(
        [r.mean_delay if r.mean_delay is not None else np.nan for r in records]
    )
    spreads = np.array(
        [r.rms_spread if r.rms_spread is not None else np.nan for r in records]
    )
    missing = int(np.sum(~np.isfinite(delays)))
    delay_ecdf = ecdf(delays) if missing < cfg.runs else None
    spread_ecdf = ecdf(spreads) if missing < cfg.runs else None

    return McResult(
        config=cfg,
        count=estimate(counts_raw.astype(float)),
        power=estimate(power_raw),
        mean_delay=delay_ecdf,
        rms_spread=spread_ecdf,
        records=records,
        missing_moments=missing,
        counts_raw=counts_raw,
        power_raw=power_raw,
    )


def fit_decay_time(taus, power, window: tuple[float, float]) -> float:
    """Least-squares exponential decay time of ``power`` over a delay window."""
    taus = np.asarray(taus, dtype=float)
    power = np.asarray(power, dtype=float)
    mask = (taus >= window[0]) & (taus <= window[1]) & (power > 0.0)
    if int(mask.sum()) < 2:
        raise ConfigError("fit window leaves fewer than two usable grid points")
    slope, _ = np.polyfit(taus[mask], np.log(power[mask]), 1)
    if slope >= 0.0:
        raise ConfigError("power does not decay over the fit window")
    return float(-1.0 / slope)


def compare_with_theory(
    result: McResult,
    scene: theory.SceneSummary,
    fit_window: tuple[float, float] | None = None,
    count_tolerance: float = 0.03,
    slope_tolerance: float = 0.05,
    power_tolerance: float = 0.25,
    min_expected_count: float = 100.0,
    gamma_sq: float = theory.DEFAULT_GAMMA_SQ,
) -> dict:
    """Structured comparison of an ensemble against the closed forms.

    The checks depend on the randomization mode: random-placement modes are
    compared against the exact mean count and the corrected exponential tail;
    fixed-orientation mode against the min-fraction upper bound; fixed
    distance against the conditional mean count. Returns a JSON-ready report
    with per-check errors and PASS/FAIL flags.

    ``fit_window`` defaults to [40 ns, 110 ns] clipped to the grid; tail
    checks are skipped (with a note) when the clipped window is unusable.
    An explicitly given window outside the grid is a configuration error.
    """
    cfg = result.config
    grid = result.count.grid
    if fit_window is not None and (fit_window[0] < grid[0] or fit_window[1] > grid[-1]):
        raise ConfigError("fit window lies outside the evaluation grid")
    if fit_window is None:
        fit_window = (max(40e-9, float(grid[0])), min(110e-9, float(grid[-1])))
    checks: dict[str, dict] = {}
    notes: list[str] = []

    if cfg.mode in ("both-random", "fixed-rx"):
        expected = theory.mean_count(scene, grid)
        mask = expected >= min_expected_count
        if np.any(mask):
            rel = np.abs(result.count.mean[mask] - expected[mask]) / expected[mask]
            checks["mean_count"] = {
                "tolerance": count_tolerance,
                "max_rel_error": float(np.max(rel)),
                "points": int(mask.sum()),
                "pass": bool(np.max(rel) <= count_tolerance),
            }
        else:
            notes.append("mean-count check skipped: expected count stays below threshold")

        in_window = (grid >= fit_window[0]) & (grid <= fit_window[1])
        usable = fit_window[1] > fit_window[0] and int(
            np.sum(in_window & (result.power.mean > 0.0))
        ) >= 2
        if usable:
            fitted = fit_decay_time(grid, result.power.mean, fit_window)
            uncorrected = theory.reverberation_time(scene)
            corrected = uncorrected * theory.kuttruff_correction(scene.reflectance, gamma_sq)
            checks["tail_decay"] = {
                "fitted_seconds": fitted,
                "corrected_seconds": corrected,
                "uncorrected_seconds": uncorrected,
                "rel_error_corrected": abs(fitted - corrected) / corrected,
                "rel_discrepancy_uncorrected": abs(fitted - uncorrected) / uncorrected,
                "tolerance": slope_tolerance,
                "pass": bool(abs(fitted - corrected) / corrected <= slope_tolerance),
            }

            spectrum = theory.pds(scene, grid, mode="randomized", corrected=True, gamma_sq=gamma_sq)
            plain = theory.pds(scene, grid, mode="randomized", corrected=False)
            expected_power = theory.expected_received_power(spectrum, cfg.radio, grid)
            expected_plain = theory.expected_received_power(plain, cfg.radio, grid)
            rel_power = np.abs(result.power.mean[in_window] - expected_power[in_window]) / expected_power[in_window]
            rel_plain = np.abs(result.power.mean[in_window] - expected_plain[in_window]) / expected_plain[in_window]
            checks["power_curve"] = {
                "tolerance": power_tolerance,
                "mean_rel_error_corrected": float(np.mean(rel_power)),
                "mean_rel_error_uncorrected": float(np.mean(rel_plain)),
                "pass": bool(np.mean(rel_power) <= power_tolerance),
            }
        else:
            notes.append("tail checks skipped: fit window has no usable power samples")
    elif cfg.mode == "fixed-orientation-tx":
        bound = theory.count_upper_bound(scene, grid)
        slack = bound + 3.0 * result.count.stderr - result.count.mean
        checks["count_upper_bound"] = {
            "max_violation": float(np.max(-slack)),
            "pass": bool(np.all(slack >= 0.0)),
        }
    elif cfg.mode == "fixed-distance":
        tau0 = cfg.distance / cfg.radio.speed_of_light
        expected = theory.conditional_mean_count(scene, grid, tau0)
        far = grid >= tau0 + scene.diagonal / scene.speed_of_light
        rel = np.abs(result.count.mean[far] - expected[far]) / expected[far]
        checks["conditional_count"] = {
            "tolerance": 0.05,
            "max_rel_error": float(np.max(rel)) if np.any(far) else 0.0,
            "points": int(far.sum()),
            "pass": bool(not np.any(far) or np.max(rel) <= 0.05),
        }

    report = {
        "mode": cfg.mode,
        "runs": cfg.runs,
        "missing_moment_runs": result.missing_moments,
        "checks": checks,
        "pass": all(c["pass"] for c in checks.values()) if checks else True,
    }
    if notes:
        report["notes"] = notes
    return report


def compare_power_curves(
    a: McResult, b: McResult, window: tuple[float, float]
) -> dict:
    """Pointwise consistency of two mean-power curves within standard errors."""
    if not np.array_equal(a.power.grid, b.power.grid):
        raise ConfigError("results use different evaluation grids")
    grid = a.power.grid
    mask = (grid >= window[0]) & (grid <= window[1])
    sigma = np.sqrt(a.power.stderr[mask] ** 2 + b.power.stderr[mask] ** 2)
    gap = np.abs(a.power.mean[mask] - b.power.mean[mask])
    ratio = gap / np.where(sigma > 0.0, sigma, np.inf)
    return {
        "max_sigma_distance": float(np.max(ratio)),
        "points": int(mask.sum()),
        "pass": bool(np.all(ratio <= 3.0)),
    }


def _write_estimate_csv(path, estimate: McEstimate, value_name: str) -> None:
    lines = [f"tau_seconds,{value_name},standard_error"]
    for t, m, s in zip(estimate.grid, estimate.mean, estimate.stderr):
        lines.append(f"{_FMT(t)},{_FMT(m)},{_FMT(s)}")
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("\n".join(lines) + "\n")


def _write_ecdf_csv(path, dist: Ecdf | None, value_name: str) -> None:
    lines = [f"{value_name},cumulative_probability"]
    if dist is not None:
        for v, p in zip(dist.values, dist.probs):
            lines.append(f"{_FMT(v)},{_FMT(p)}")
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("\n".join(lines) + "\n")


def write_bundle(result: McResult, out_dir, manifest: dict, report: dict | None = None) -> None:
    """Write the results bundle: curve CSVs, ECDFs, manifest, and report."""
    os.makedirs(out_dir, exist_ok=True)
    _write_estimate_csv(os.path.join(out_dir, "counts.csv"), result.count, "mean_count")
    _write_estimate_csv(os.path.join(out_dir, "power.csv"), result.power, "mean_power")
    _write_ecdf_csv(
        os.path.join(out_dir, "ecdf_mean_delay.csv"), result.mean_delay, "mean_delay_seconds"
    )
    _write_ecdf_csv(
        os.path.join(out_dir, "ecdf_rms.csv"), result.rms_spread, "rms_spread_seconds"
    )
    with open(os.path.join(out_dir, "manifest.json"), "w", encoding="utf-8", newline="\n") as fh:
        json.dump(manifest, fh, indent=2, sort_keys=True)
        fh.write("\n")
    if report is not None:
        with open(os.path.join(out_dir, "report.json"), "w", encoding="utf-8", newline="\n") as fh:
            json.dump(report, fh, indent=2, sort_keys=True)
            fh.write("\n")
