import json
import subprocess
import sys

import numpy as np
import pytest
import torch

from ifl_exporter.cli import main as exporter_main

from ifl.cli import main as primary_main
from ifl.fileio import read_interaction_tensor


def make_checkpoint(path, seed):
    torch.manual_seed(seed)
    model = torch.nn.Sequential(
        torch.nn.Linear(6, 8), torch.nn.ReLU(), torch.nn.Linear(8, 2))
    torch.save(model.eval(), path)


class TestExporterCli:
    def test_export_subcommand(self, tmp_path, capsys):
        make_checkpoint(tmp_path / "m.pt", 0)
        rng = np.random.default_rng(1)
        np.savez(tmp_path / "s.npz", x=rng.standard_normal((12, 6)).astype(np.float32),
                 y=rng.integers(0, 2, 12))
        code = exporter_main(["export", "--checkpoint", str(tmp_path / "m.pt"),
                              "--split", str(tmp_path / "s.npz"),
                              "--out", str(tmp_path / "exp")])
        capsys.readouterr()
        assert code == 0
        for name in ("activations.actv", "predictions.pred", "labels.pred"):
            assert (tmp_path / "exp" / name).exists()

    def test_partition_subcommand(self, tmp_path, capsys):
        rng = np.random.default_rng(2)
        np.savez(tmp_path / "train.npz", x=rng.random((50, 4, 4, 3)))
        np.savez(tmp_path / "test.npz", x=rng.random((20, 4, 4, 3)))
        out = tmp_path / "groups.csv"
        code = exporter_main(["partition", "--train-ref", str(tmp_path / "train.npz"),
                              "--images", str(tmp_path / "test.npz"),
                              "--out", str(out)])
        capsys.readouterr()
        assert code == 0
        lines = out.read_text().splitlines()
        assert lines[0] == "index,blue_intensity,group"
        assert len(lines) == 21

    def test_missing_checkpoint_exits_2(self, tmp_path, capsys):
        np.savez(tmp_path / "s.npz", x=np.zeros((2, 3), dtype=np.float32))
        code = exporter_main(["export", "--checkpoint", str(tmp_path / "nope.pt"),
                              "--split", str(tmp_path / "s.npz"),
                              "--out", str(tmp_path)])
        capsys.readouterr()
        assert code == 2

    def test_console_script(self, tmp_path):
        proc = subprocess.run([sys.executable, "-m", "ifl_exporter.cli", "--help"],
                              capture_output=True, text=True)
        assert proc.returncode == 0
        assert "partition" in proc.stdout


class TestFullChain:
    def test_exported_ensemble_feeds_primary_pipeline(self, tmp_path, capsys):
        """Exported files drive `ifl tensor build` + analyze end to end."""
        rng = np.random.default_rng(3)
        x = rng.standard_normal((30, 6)).astype(np.float32)
        y = rng.integers(0, 2, 30)
        np.savez(tmp_path / "split.npz", x=x, y=y)
        entries = []
        for i in range(2):
            make_checkpoint(tmp_path / f"m{i}.pt", seed=10 + i)
            outdir = tmp_path / f"exp{i}"
            code = exporter_main(["export", "--checkpoint", str(tmp_path / f"m{i}.pt"),
                                  "--split", str(tmp_path / "split.npz"),
                                  "--out", str(outdir)])
            assert code == 0
            entries.append({"id": f"m{i}",
                            "activations": f"exp{i}/activations.actv",
                            "predictions": f"exp{i}/predictions.pred"})
        manifest = tmp_path / "manifest.json"
        manifest.write_text(json.dumps({
            "models": entries, "labels": "exp0/labels.pred", "pcs": 4}))
        omega_path = tmp_path / "omega.itns"
        assert primary_main(["tensor", "build", "--manifest", str(manifest),
                             "--out", str(omega_path)]) == 0
        omega = read_interaction_tensor(omega_path)
        assert omega.dims[0] == 2 and omega.dims[1] == 30
        assert omega.nnz > 0
        report = tmp_path / "o2.csv"
        assert primary_main(["tensor", "analyze", "--tensor", str(omega_path),
                             "--report", "o2", "--manifest", str(manifest),
                             "--out", str(report)]) == 0
        capsys.readouterr()
        assert len(report.read_text().splitlines()) == 31
