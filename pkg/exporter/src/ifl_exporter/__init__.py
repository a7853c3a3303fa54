"""Export penultimate-layer activations/predictions and partition images."""

from .export import (ExportJob, export_activations, export_all,
                     export_predictions, find_head, load_checkpoint,
                     load_split)
from .formats import write_activations, write_predictions
from .partition import blue_intensity, partition_by_blue

__version__ = "0.1.0"

__all__ = [
    "ExportJob", "blue_intensity", "export_activations", "export_all",
    "export_predictions", "find_head", "load_checkpoint", "load_split",
    "partition_by_blue", "write_activations", "write_predictions",
]
