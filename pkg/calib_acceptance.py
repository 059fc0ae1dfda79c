"""One-off calibration run for the acceptance-suite seeds (not shipped)."""
import json
import time

import numpy as np

import roomchan as rc
from roomchan import montecarlo as mc, theory

room = rc.Room((5, 5, 3), 0.6)
radio = rc.RadioConfig.from_center_frequency(60e9, 2e9, 3e8)
iso = rc.Isotropic()
scene_iso = theory.SceneSummary.from_components(room, radio, iso, iso)
T = theory.reverberation_time(scene_iso)
xiT = T * theory.kuttruff_correction(0.6, 0.35)


def count_stats(res, scene):
    grid = res.count.grid
    expected = theory.mean_count(scene, grid)
    mask = expected >= 100
    rel = np.abs(res.count.mean[mask] - expected[mask]) / expected[mask]
    return float(rel.max()), int(mask.sum())


def base(pattern, runs, seed, **kw):
    return mc.McConfig(room=room, radio=radio, tx_pattern=pattern, rx_pattern=pattern,
                       runs=runs, seed=seed, **kw)


for seed in (101, 202, 303):
    t0 = time.time()
    res_iso = mc.run_ensemble(base(iso, 2000, seed), workers=2)
    fit = mc.fit_decay_time(res_iso.count.grid, res_iso.power.mean, (40e-9, 110e-9))
    err_c, n_c = count_stats(res_iso, scene_iso)
    print(f"seed {seed}: iso count maxrel {err_c:.4f} ({n_c} pts); "
          f"fit {fit*1e9:.4f} ns; err_xiT {100*abs(fit-xiT)/xiT:.2f}%; "
          f"disc_T {100*abs(fit-T)/T:.2f}%  [{time.time()-t0:.0f}s]", flush=True)

# hemisphere pair (w product 0.25) and quarter caps (0.0625) at one seed
seed = 404
cap_h = rc.SphericalCap(0.5)
cap_q = rc.SphericalCap(0.25)
scene_h = theory.SceneSummary.from_components(room, radio, cap_h, cap_h)
scene_q = theory.SceneSummary.from_components(room, radio, cap_q, cap_q)
t0 = time.time()
res_h = mc.run_ensemble(base(cap_h, 2000, seed), workers=2)
err_h, n_h = count_stats(res_h, scene_h)
print(f"hemi: count maxrel {err_h:.4f} ({n_h} pts) [{time.time()-t0:.0f}s]", flush=True)
t0 = time.time()
res_q = mc.run_ensemble(base(cap_q, 2000, seed + 1), workers=2)
err_q, n_q = count_stats(res_q, scene_q)
print(f"quarter: count maxrel {err_q:.4f} ({n_q} pts) missing={res_q.missing_moments} [{time.time()-t0:.0f}s]", flush=True)

# criterion 5: power curves across w settings within 3 SE pointwise on [20,100]ns
for seed_iso in (101, 202, 303):
    res_i = mc.run_ensemble(base(iso, 2000, seed_iso), workers=2)
    rep = mc.compare_power_curves(res_i, res_h, (20e-9, 100e-9))
    print(f"power consistency iso(seed {seed_iso}) vs hemi(404): {json.dumps(rep)}", flush=True)

# variance dispersion check (criterion 3 note): quarter vs iso at 40ns
g = res_q.count.grid
i40 = int(np.argmin(np.abs(g - 40e-9)))
v_iso = res_iso.counts_raw[:, i40].astype(float).var(ddof=1)
v_q = res_q.counts_raw[:, i40].astype(float).var(ddof=1)
print(f"var at 40ns: iso {v_iso:.1f} quarter {v_q:.1f}", flush=True)

# median separation of rms spread (iso vs quarter), bootstrap 3 sigma
def boot_median(vals, rng, n=400):
    meds = [np.median(rng.choice(vals, size=vals.size, replace=True)) for _ in range(n)]
    return np.std(meds, ddof=1)

rng = np.random.default_rng(5)
s_iso = np.array([r.rms_spread for r in res_iso.records if r.rms_spread is not None])
s_q = np.array([r.rms_spread for r in res_q.records if r.rms_spread is not None])
gap = abs(np.median(s_iso) - np.median(s_q))
sig = np.hypot(boot_median(s_iso, rng), boot_median(s_q, rng))
print(f"median rms: iso {np.median(s_iso)*1e9:.2f} ns, quarter {np.median(s_q)*1e9:.2f} ns, gap/sigma {gap/sig:.1f}", flush=True)
