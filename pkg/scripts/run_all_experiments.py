#!/usr/bin/env python3
"""Run every sample config in scripts/configs/ and verify the manifests.

Usage: python3 scripts/run_all_experiments.py [--workers N] [--out DIR]

Each config lands in its own subdirectory of the output root.  After all
runs complete, every manifest is re-derived the way verify_manifest.py
does it.  Exit 0 only if every run and every verification succeeds.
"""

import argparse
import glob
import os
import sys

sys.path.insert(0, os.path.dirname(os.path.abspath(__file__)))
import verify_manifest

from vqalab.cli import run


def main() -> int:
    parser = argparse.ArgumentParser()
    parser.add_argument("--workers", type=int, default=os.cpu_count() or 1)
    parser.add_argument("--out", default="runs")
    args = parser.parse_args()

    config_dir = os.path.join(os.path.dirname(os.path.abspath(__file__)), "configs")
    configs = sorted(glob.glob(os.path.join(config_dir, "*.json")))
    if not configs:
        print("no configs found", file=sys.stderr)
        return 1

    failures = 0
    run_dirs = []
    for path in configs:
        name = os.path.splitext(os.path.basename(path))[0]
        out_dir = os.path.join(args.out, name)
        print(f"== {name} ==", flush=True)
        status = run(path, workers=args.workers, out=out_dir)
        if status != 0:
            print(f"{name}: exit {status}", file=sys.stderr)
            failures += 1
        else:
            run_dirs.append(out_dir)

    print("== verifying manifests ==")
    for d in run_dirs:
        if not verify_manifest.verify(d):
            failures += 1

    return 1 if failures else 0


if __name__ == "__main__":
    sys.exit(main())
