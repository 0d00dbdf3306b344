"""
Command-line pipeline and replay
================================

The same steps through the ``latenthealth`` command. Each command leaves a
manifest, and ``replay`` reruns it and checks every output hash.
"""

import shutil
from pathlib import Path

from latenthealth.cli import main

out = Path(__file__).with_name("_output") / "cli"
shutil.rmtree(out, ignore_errors=True)

# write a synthetic run to disk in the IMS text layout
main(["synth", "--seed", "3", "--n-files", "60", "--rows-per-file", "5120", "--out", str(out / "data")])

labels = str(out / "data" / "labels.ini")
model = out / "model"
main(["train", "--data", str(out / "data"), "--config", labels, "--epochs", "100", "--out", str(model)])
main(["score", "--checkpoint", str(model / "model.lhv"), "--data", str(out / "data"),
      "--config", labels, "--out", str(model)])
main(["evaluate", "--checkpoint", str(model / "model.lhv"), "--config", labels, "--out", str(model)])
main(["sweep", "--checkpoint", str(model / "model.lhv"), "--snr", "-2,1,4,7,10", "--out", str(model)])

# rerun the scoring step elsewhere and compare hashes
code = main(["replay", str(model / "manifest-score.json"), "--out", str(out / "replay")])
print("replay exit code:", code)
