"""Penultimate-layer activation and prediction export from torch checkpoints.

The representation is taken as the input to the network's final linear
layer (the classification head); that layer is located by execution
order on a probe batch, so module definition order does not matter.
Exports run in eval mode under no_grad, batch by batch, in dataset
order.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

import numpy as np
import torch

from .formats import write_activations, write_predictions


@dataclass(frozen=True)
class ExportJob:
    checkpoint: str
    split: str
    batch_size: int = 64
    output_dir: str = "."

    def __post_init__(self):
        if self.batch_size < 1:
            raise ValueError(f"batch_size must be >= 1, got {self.batch_size}")


def load_checkpoint(path) -> torch.nn.Module:
    """Load a pickled torch module (torch.save of the full model)."""
    model = torch.load(path, map_location="cpu", weights_only=False)
    if not isinstance(model, torch.nn.Module):
        raise ValueError(
            f"{path}: checkpoint is {type(model).__name__}, expected a torch module"
        )
    model.eval()
    return model


def load_split(path) -> tuple[np.ndarray, np.ndarray | None]:
    """Dataset split: .npz with array 'x' (inputs) and optional 'y' (labels)."""
    with np.load(path) as data:
        if "x" not in data:
            raise ValueError(f"{path}: split file needs an 'x' array")
        x = np.asarray(data["x"], dtype=np.float32)
        y = np.asarray(data["y"], dtype=np.int64) if "y" in data else None
    if y is not None and y.shape[0] != x.shape[0]:
        raise ValueError(
            f"{path}: 'y' has {y.shape[0]} rows but 'x' has {x.shape[0]}"
        )
    return x, y


def find_head(model: torch.nn.Module, probe: torch.Tensor) -> torch.nn.Linear:
    """The linear layer that fires last on a forward pass."""
    linears = [m for m in model.modules() if isinstance(m, torch.nn.Linear)]
    if not linears:
        raise ValueError("model contains no linear layer to treat as the head")
    fired: list[torch.nn.Linear] = []
    handles = [m.register_forward_hook(lambda mod, _i, _o: fired.append(mod))
               for m in linears]
    try:
        with torch.no_grad():
            model(probe)
    finally:
        for h in handles:
            h.remove()
    if not fired:
        raise ValueError("no linear layer fired on the probe batch")
    return fired[-1]


def _run(model: torch.nn.Module, x: np.ndarray, batch_size: int):
    """Forward the split; returns (penultimate activations, argmax labels)."""
    head = find_head(model, torch.from_numpy(x[:1]))
    captured: list[torch.Tensor] = []

    def grab(_mod, inputs):
        captured.append(inputs[0].detach().to(torch.float32))

    handle = head.register_forward_pre_hook(grab)
    feats = []
    preds = []
    try:
        with torch.no_grad():
            for start in range(0, x.shape[0], batch_size):
                batch = torch.from_numpy(x[start:start + batch_size])
                out = model(batch)
                feats.append(captured.pop().reshape(batch.shape[0], -1).numpy())
                preds.append(out.reshape(batch.shape[0], -1)
                             .argmax(dim=1).numpy())
    finally:
        handle.remove()
    return np.concatenate(feats, axis=0), np.concatenate(preds, axis=0)


def export_activations(job: ExportJob) -> Path:
    """Write <output_dir>/activations.actv for the job's split."""
    model = load_checkpoint(job.checkpoint)
    x, _ = load_split(job.split)
    feats, _ = _run(model, x, job.batch_size)
    out = Path(job.output_dir) / "activations.actv"
    write_activations(out, feats)
    return out


def export_predictions(job: ExportJob) -> tuple[Path, Path]:
    """Write predictions.pred plus the matching labels.pred for the split."""
    model = load_checkpoint(job.checkpoint)
    x, y = load_split(job.split)
    if y is None:
        raise ValueError(f"{job.split}: split has no 'y' labels array")
    _, preds = _run(model, x, job.batch_size)
    pred_path = Path(job.output_dir) / "predictions.pred"
    labels_path = Path(job.output_dir) / "labels.pred"
    write_predictions(pred_path, preds)
    write_predictions(labels_path, y)
    return pred_path, labels_path


def export_all(job: ExportJob) -> dict:
    """One forward pass for both artifacts; returns the written paths."""
    model = load_checkpoint(job.checkpoint)
    x, y = load_split(job.split)
    feats, preds = _run(model, x, job.batch_size)
    outdir = Path(job.output_dir)
    outdir.mkdir(parents=True, exist_ok=True)
    paths = {"activations": outdir / "activations.actv",
             "predictions": outdir / "predictions.pred"}
    write_activations(paths["activations"], feats)
    write_predictions(paths["predictions"], preds)
    if y is not None:
        paths["labels"] = outdir / "labels.pred"
        write_predictions(paths["labels"], y)
    return paths
