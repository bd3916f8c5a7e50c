#!/usr/bin/env python3
"""Re-derive a run directory's config hash and file hashes from its manifest.

Usage: python3 scripts/verify_manifest.py RUN_DIR [RUN_DIR ...]

For each directory: recompute the config hash from the echoed config, then
re-hash every recorded output file.  Exit 0 when everything matches.
"""

import hashlib
import json
import os
import sys


def verify(run_dir: str) -> bool:
    manifest_path = os.path.join(run_dir, "manifest.json")
    with open(manifest_path) as fh:
        manifest = json.load(fh)

    canonical = json.dumps(manifest["config"], sort_keys=True, separators=(",", ":"))
    derived = hashlib.sha256(canonical.encode()).hexdigest()
    ok = derived == manifest["config_hash"]
    if not ok:
        print(f"{run_dir}: config hash mismatch ({derived[:12]} != {manifest['config_hash'][:12]})")

    for name, recorded in sorted(manifest["files"].items()):
        with open(os.path.join(run_dir, name), "rb") as fh:
            actual = hashlib.sha256(fh.read()).hexdigest()
        if actual != recorded:
            print(f"{run_dir}: {name} hash mismatch")
            ok = False

    if ok:
        print(f"{run_dir}: OK ({len(manifest['files'])} files, config {derived[:12]})")
    return ok


def main(argv) -> int:
    if not argv:
        print(__doc__.strip(), file=sys.stderr)
        return 2
    return 0 if all([verify(d) for d in argv]) else 1


if __name__ == "__main__":
    sys.exit(main(sys.argv[1:]))
