import json
import struct

import numpy as np
import pytest
import torch

from ifl_exporter import ExportJob, export_all, find_head, load_split

# the analysis package owns the readers; round trips go through it
from ifl.fileio import read_activations, read_labels


def fixture_model() -> torch.nn.Module:
    """Two-layer net with hand-set dyadic weights (exact in float32)."""
    model = torch.nn.Sequential(
        torch.nn.Linear(3, 2),
        torch.nn.ReLU(),
        torch.nn.Linear(2, 2),
    )
    with torch.no_grad():
        model[0].weight.copy_(torch.tensor([[1.0, 0.0, -1.0],
                                            [0.0, 2.0, 0.0]]))
        model[0].bias.copy_(torch.tensor([0.5, -1.0]))
        model[2].weight.copy_(torch.tensor([[1.0, -1.0],
                                            [-1.0, 1.0]]))
        model[2].bias.copy_(torch.tensor([0.0, 0.25]))
    return model.eval()


FIXTURE_X = np.array([[1.0, 0.0, 0.0],
                      [0.0, 1.0, 0.0],
                      [0.0, 0.0, 1.0],
                      [1.0, 1.0, 1.0]], dtype=np.float32)
FIXTURE_Y = np.array([0, 1, 1, 0], dtype=np.int64)


def numpy_penultimate(x: np.ndarray) -> np.ndarray:
    """Independent forward pass with the same hand-set weights."""
    w1 = np.array([[1.0, 0.0, -1.0], [0.0, 2.0, 0.0]], dtype=np.float32)
    b1 = np.array([0.5, -1.0], dtype=np.float32)
    return np.maximum(x @ w1.T + b1, 0.0).astype(np.float32)


def numpy_logits(x: np.ndarray) -> np.ndarray:
    w2 = np.array([[1.0, -1.0], [-1.0, 1.0]], dtype=np.float32)
    b2 = np.array([0.0, 0.25], dtype=np.float32)
    return numpy_penultimate(x) @ w2.T + b2


@pytest.fixture
def job(tmp_path):
    checkpoint = tmp_path / "model.pt"
    torch.save(fixture_model(), checkpoint)
    split = tmp_path / "split.npz"
    np.savez(split, x=FIXTURE_X, y=FIXTURE_Y)
    return ExportJob(checkpoint=str(checkpoint), split=str(split),
                     batch_size=2, output_dir=str(tmp_path / "out"))


class TestExport:
    def test_golden_activation_bytes(self, job):
        paths = export_all(job)
        expected_matrix = numpy_penultimate(FIXTURE_X)
        golden = (struct.pack("<4sIII", b"ACTV", 1, 4, 2)
                  + expected_matrix.astype("<f4").tobytes())
        assert paths["activations"].read_bytes() == golden

    def test_activations_round_trip_through_primary_reader(self, job):
        paths = export_all(job)
        back = read_activations(paths["activations"])
        np.testing.assert_array_equal(back, numpy_penultimate(FIXTURE_X))
        assert back.dtype == np.float32

    def test_predictions_are_argmax_and_labels_match(self, job):
        paths = export_all(job)
        preds = read_labels(paths["predictions"])
        np.testing.assert_array_equal(preds, numpy_logits(FIXTURE_X).argmax(axis=1))
        np.testing.assert_array_equal(read_labels(paths["labels"]), FIXTURE_Y)

    def test_reexport_is_byte_identical(self, job):
        first = export_all(job)
        blobs = {k: p.read_bytes() for k, p in first.items()}
        second = export_all(job)
        for key, path in second.items():
            assert path.read_bytes() == blobs[key]

    def test_random_model_round_trip(self, tmp_path):
        torch.manual_seed(7)
        model = torch.nn.Sequential(
            torch.nn.Linear(6, 5), torch.nn.Tanh(), torch.nn.Linear(5, 4))
        checkpoint = tmp_path / "m.pt"
        torch.save(model.eval(), checkpoint)
        rng = np.random.default_rng(0)
        x = rng.standard_normal((33, 6)).astype(np.float32)
        split = tmp_path / "s.npz"
        np.savez(split, x=x, y=rng.integers(0, 4, 33))
        job = ExportJob(checkpoint=str(checkpoint), split=str(split),
                        batch_size=8, output_dir=str(tmp_path))
        paths = export_all(job)
        feats = read_activations(paths["activations"])
        assert feats.shape == (33, 5)
        # written file reproduces the forward pass bit for bit under the
        # job's own batching; a full-pass forward agrees to float32 ulp
        with torch.no_grad():
            batched = np.concatenate(
                [model[:2](torch.from_numpy(x[i:i + 8])).numpy()
                 for i in range(0, 33, 8)])
            full = model[:2](torch.from_numpy(x)).numpy()
        np.testing.assert_array_equal(feats, batched)
        np.testing.assert_allclose(feats, full, atol=1e-6)

    def test_header_matches_payload_shape(self, job):
        paths = export_all(job)
        raw = paths["activations"].read_bytes()
        magic, version, n, d = struct.unpack_from("<4sIII", raw)
        assert (magic, version, n, d) == (b"ACTV", 1, 4, 2)
        assert len(raw) == 16 + 4 * n * d
        raw = paths["predictions"].read_bytes()
        magic, version, n = struct.unpack_from("<4sII", raw)
        assert (magic, version, n) == (b"PRED", 1, 4)
        assert len(raw) == 12 + 2 * n

    def test_truncated_file_rejected_by_primary(self, job, tmp_path):
        from ifl.cli import main as primary_cli
        paths = export_all(job)
        truncated = tmp_path / "t.actv"
        truncated.write_bytes(paths["activations"].read_bytes()[:-4])
        manifest = tmp_path / "m.json"
        manifest.write_text(json.dumps({
            "models": [{"id": "a", "activations": "t.actv"},
                       {"id": "b", "activations": "t.actv"}],
            "pcs": 2}))
        code = primary_cli(["tensor", "build", "--manifest", str(manifest),
                            "--out", str(tmp_path / "o.itns")])
        assert code == 4

    def test_find_head_uses_execution_order(self):
        # definition order disagrees with execution order
        class Backwards(torch.nn.Module):
            def __init__(self):
                super().__init__()
                self.head = torch.nn.Linear(4, 2)
                self.first = torch.nn.Linear(3, 4)

            def forward(self, x):
                return self.head(torch.relu(self.first(x)))

        model = Backwards().eval()
        probe = torch.zeros(1, 3)
        assert find_head(model, probe) is model.head

    def test_split_validation(self, tmp_path):
        bad = tmp_path / "bad.npz"
        np.savez(bad, z=np.ones(3))
        with pytest.raises(ValueError, match="'x'"):
            load_split(bad)
        mismatched = tmp_path / "mis.npz"
        np.savez(mismatched, x=np.ones((3, 2)), y=np.ones(2))
        with pytest.raises(ValueError, match="rows"):
            load_split(mismatched)
