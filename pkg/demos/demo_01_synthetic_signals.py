"""
Synthetic bearing vibration
===========================

Three conditions share one generator. Healthy windows are unit noise plus
shaft harmonics; wear adds a train of decaying resonance bursts, and a severe
fault makes the bursts stronger, more frequent and noisier.
"""

import numpy as np

from latenthealth import data

# 200 windows of 256 samples per condition, each from its own seed
windows = {c: data.synth_generate(c, 200, seed=i) for i, c in enumerate(data.CONDITIONS)}

# energy in the loudest 10% of samples separates the conditions
for cond, wins in windows.items():
    x = data.stack(wins)
    tail = [np.mean(v[np.abs(v) >= np.percentile(np.abs(v), 90)] ** 2) for v in x]
    print(f"{cond:>9}: rms {np.sqrt(np.mean(x**2)):.2f}  tail energy {np.mean(tail):.2f}")

###############################################################################
# A run-to-failure sequence: severity climbs slowly, then fast near the end.
# The label plan is derived from the schedule.

run = data.synth_run(n_files=60, rows_per_file=2048, seed=0)
print("label plan:", run.plan.to_dict())
print("severity of every 10th file:", np.round(run.severities[::10], 2))

# files segment into 256-sample windows; leftover rows are dropped
wins = data.label_windows(data.segment(run.recordings[-1]), run.plan)
print(f"last file -> {len(wins)} windows labeled {wins[0].label!r}")

###############################################################################
# White Gaussian noise at a chosen SNR

# one 256-sample window gives a rough SNR; average the powers over 200
clean = data.stack(windows["degraded"])
for snr in (10, 0, -2):
    noisy = data.stack([data.add_awgn(w, snr, seed=k) for k, w in enumerate(windows["degraded"])])
    measured = 10 * np.log10(np.mean(clean**2) / np.mean((noisy - clean) ** 2))
    print(f"target {snr:>3} dB, measured {measured:6.2f} dB")
