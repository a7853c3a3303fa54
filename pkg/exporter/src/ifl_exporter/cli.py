"""Command line interface: export checkpoints, partition image sets."""

from __future__ import annotations

import argparse
import sys

import numpy as np

from .export import ExportJob, export_all
from .partition import blue_intensity, partition_by_blue


def _cmd_export(args) -> int:
    job = ExportJob(checkpoint=args.checkpoint, split=args.split,
                    batch_size=args.batch_size, output_dir=args.out)
    paths = export_all(job)
    for name, path in sorted(paths.items()):
        print(f"{name}: {path}", file=sys.stderr)
    return 0


def _cmd_partition(args) -> int:
    with np.load(args.train_ref) as data:
        train = data["x"]
    with np.load(args.images) as data:
        images = data["x"]
    groups = partition_by_blue(images, train)
    b = blue_intensity(images)
    with open(args.out, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("index,blue_intensity,group\n")
        for i, (bi, g) in enumerate(zip(b, groups)):
            fh.write(f"{i},{bi:.12g},{g}\n")
    print(f"wrote {len(groups)} rows to {args.out}", file=sys.stderr)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="ifl-exporter",
        description="Activation/prediction export and blue-intensity partitioning")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("export", help="write ACTV/PRED files for a checkpoint")
    p.add_argument("--checkpoint", required=True, help="torch.save'd module")
    p.add_argument("--split", required=True,
                   help=".npz with 'x' inputs and optional 'y' labels")
    p.add_argument("--batch-size", type=int, default=64)
    p.add_argument("--out", required=True, help="output directory")
    p.set_defaults(func=_cmd_export)

    p = sub.add_parser("partition", help="assign images to blue-intensity quintiles")
    p.add_argument("--train-ref", required=True,
                   help=".npz with 'x' (N, H, W, 3) training images")
    p.add_argument("--images", required=True,
                   help=".npz with 'x' images to partition")
    p.add_argument("--out", required=True, help="groups CSV path")
    p.set_defaults(func=_cmd_partition)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (ValueError, OSError) as e:
        print(f"error: {e}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
