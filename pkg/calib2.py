"""Calibration part 2: appendix-mode ensembles and seed pairing (not shipped)."""
import time

import numpy as np

import roomchan as rc
from roomchan import montecarlo as mc, theory

room = rc.Room((5, 5, 3), 0.6)
radio = rc.RadioConfig.from_center_frequency(60e9, 2e9, 3e8)
iso = rc.Isotropic()

# --- criterion 7: fixed-orientation-tx bound, directive branch ---
tx_cap = rc.SphericalCap(0.6, (0.3, -0.5, 0.8))
rx_cap = rc.SphericalCap(0.35, (-0.2, 0.9, 0.1))
cfg_b = mc.McConfig(
    room=room, radio=radio, tx_pattern=tx_cap, rx_pattern=rx_cap,
    runs=600, seed=606, mode="fixed-orientation-tx",
    rx_position=(1.2, 3.4, 1.1), rx_orientation=(-0.2, 0.9, 0.1),
    tx_orientation=(0.3, -0.5, 0.8),
)
t0 = time.time()
res_b = mc.run_ensemble(cfg_b, workers=2)
scene_b = theory.SceneSummary.from_components(room, radio, tx_cap, rx_cap)
grid = res_b.count.grid
bound = theory.count_upper_bound(scene_b, grid)
slack = bound + 3 * res_b.count.stderr - res_b.count.mean
print(f"B directive: min slack {slack.min():.3f} (>=0 required) [{time.time()-t0:.0f}s]", flush=True)

# --- criterion 7: equality branch with isotropic transmitter ---
cfg_beq = mc.McConfig(
    room=room, radio=radio, tx_pattern=iso, rx_pattern=rc.SphericalCap(0.5, (0.6, 0.1, 0.7)),
    runs=600, seed=607, mode="fixed-orientation-tx",
    rx_position=(2.5, 1.5, 1.5), rx_orientation=(0.6, 0.1, 0.7),
    tx_orientation=(0.0, 0.0, 1.0),
)
t0 = time.time()
res_beq = mc.run_ensemble(cfg_beq, workers=2)
scene_beq = theory.SceneSummary.from_components(room, radio, iso, rc.SphericalCap(0.5))
bound_eq = theory.count_upper_bound(scene_beq, grid)
sel = bound_eq >= 1.0
dev = np.abs(res_beq.count.mean[sel] - bound_eq[sel]) / np.where(res_beq.count.stderr[sel] > 0, res_beq.count.stderr[sel], np.inf)
print(f"B equality: max |dev|/sigma {dev.max():.2f} over {sel.sum()} pts [{time.time()-t0:.0f}s]", flush=True)

# --- criterion 8: fixed distance ---
d = 2.1794
cap_h = rc.SphericalCap(0.5)
cfg_c = mc.McConfig(
    room=room, radio=radio, tx_pattern=cap_h, rx_pattern=cap_h,
    runs=1200, seed=808, mode="fixed-distance", distance=d,
)
t0 = time.time()
res_c = mc.run_ensemble(cfg_c, workers=2)
scene_c = theory.SceneSummary.from_components(room, radio, cap_h, cap_h)
tau0 = d / 3e8
expected = theory.conditional_mean_count(scene_c, grid, tau0)
far = grid >= tau0 + scene_c.diagonal / 3e8
rel = np.abs(res_c.count.mean[far] - expected[far]) / expected[far]
print(f"C: max rel err {rel.max():.4f} over {far.sum()} pts (tol 0.05) [{time.time()-t0:.0f}s]", flush=True)

# --- criterion 5 pairing: hemi seeds vs iso seed 202/303 ---
res_iso2 = mc.run_ensemble(mc.McConfig(room=room, radio=radio, tx_pattern=iso, rx_pattern=iso, runs=2000, seed=202), workers=2)
res_iso3 = mc.run_ensemble(mc.McConfig(room=room, radio=radio, tx_pattern=iso, rx_pattern=iso, runs=2000, seed=303), workers=2)
for hemi_seed in (404, 505, 606, 707):
    res_h = mc.run_ensemble(mc.McConfig(room=room, radio=radio, tx_pattern=cap_h, rx_pattern=cap_h, runs=2000, seed=hemi_seed), workers=2)
    for name, r in (("202", res_iso2), ("303", res_iso3)):
        rep = mc.compare_power_curves(r, res_h, (20e-9, 100e-9))
        print(f"iso {name} vs hemi {hemi_seed}: max sigma {rep['max_sigma_distance']:.3f} pass={rep['pass']}", flush=True)

# --- dispersion: normalized variance comparison at 40 ns ---
cap_q = rc.SphericalCap(0.25)
res_q = mc.run_ensemble(mc.McConfig(room=room, radio=radio, tx_pattern=cap_q, rx_pattern=cap_q, runs=2000, seed=405), workers=2)
i40 = int(np.argmin(np.abs(grid - 40e-9)))
scene_q = theory.SceneSummary.from_components(room, radio, cap_q, cap_q)
for name, r, sc in (("iso202", res_iso2, theory.SceneSummary.from_components(room, radio, iso, iso)), ("quarter", res_q, scene_q)):
    m = theory.mean_count(sc, grid[i40])
    norm = r.counts_raw[:, i40].astype(float) / float(m)
    print(f"{name}: var(N/EN) at 40ns = {norm.var(ddof=1):.5f}", flush=True)
