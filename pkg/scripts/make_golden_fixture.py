"""Regenerate the golden tensor-pipeline fixture under tests/data/golden/.

Inputs (activations, predictions, labels, manifest) are deterministic
given the seed; the golden outputs (ITNS file and report CSVs) are
whatever the current pipeline produces for them. Run from the repo root:

    python3 scripts/make_golden_fixture.py

Commit the regenerated directory only when an intentional
pipeline-behavior change makes the old goldens stale.
"""

import json
import pathlib
import subprocess
import sys

import numpy as np

from ifl.fileio import write_activations, write_labels

ROOT = pathlib.Path(__file__).resolve().parent.parent
OUT = ROOT / "tests" / "data" / "golden"

N, D, K, M = 40, 6, 3, 3
SEED = 20240517


def main():
    OUT.mkdir(parents=True, exist_ok=True)
    rng = np.random.default_rng(SEED)
    scales = np.array([6.0, 3.0, 1.5])
    latent = rng.standard_normal((N, K)) * scales
    labels = (latent[:, 0] > 0).astype(np.int64)
    write_labels(OUT / "labels.pred", labels)

    model_entries = []
    for m in range(M):
        rot, _ = np.linalg.qr(rng.standard_normal((D, D)))
        act = np.zeros((N, D))
        act[:, :K] = latent + 0.05 * rng.standard_normal((N, K))
        write_activations(OUT / f"model{m}.actv", (act @ rot.T).astype(np.float32))
        # each model errs on its own slice plus datum 35, shared by all
        preds = labels.copy()
        wrong = [3 * m, 3 * m + 1, 30 + m, 35]
        preds[wrong] = 1 - preds[wrong]
        write_labels(OUT / f"model{m}.pred", preds)
        model_entries.append({"id": f"model{m}",
                              "activations": f"model{m}.actv",
                              "predictions": f"model{m}.pred"})

    # with K latents per model, 1/K of the cross-model |correlation|
    # entries are true matches; percentile 66 lands on the largest
    # non-match, so the threshold cleanly separates the planted clusters
    manifest = {
        "models": model_entries,
        "labels": "labels.pred",
        "pcs": K,
        "corr_percentile": 66,
        "data_percentile": 90,
    }
    (OUT / "manifest.json").write_text(json.dumps(manifest, indent=2) + "\n")

    def cli(*argv):
        proc = subprocess.run([sys.executable, "-m", "ifl.cli", *argv],
                              capture_output=True, text=True)
        if proc.returncode != 0:
            raise SystemExit(f"cli failed: {argv}\n{proc.stderr}")

    cli("tensor", "build", "--manifest", str(OUT / "manifest.json"),
        "--out", str(OUT / "golden.itns"), "--meta", str(OUT / "golden.meta.json"))
    for report in ("o1", "o2", "o2density", "o3", "o4"):
        cli("tensor", "analyze", "--tensor", str(OUT / "golden.itns"),
            "--report", report, "--manifest", str(OUT / "manifest.json"),
            "--out", str(OUT / f"{report}.csv"))
    cli("tensor", "analyze", "--tensor", str(OUT / "golden.itns"),
        "--report", "neighbors", "--index", "0", "--top", "5",
        "--out", str(OUT / "neighbors.csv"))
    cli("tensor", "analyze", "--tensor", str(OUT / "golden.itns"),
        "--report", "perclass", "--manifest", str(OUT / "manifest.json"),
        "--out", str(OUT / "perclass.csv"))
    print(f"wrote fixture to {OUT}")


if __name__ == "__main__":
    main()
