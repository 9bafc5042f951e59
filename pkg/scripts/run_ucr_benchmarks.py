#!/usr/bin/env python3
"""
Run `elasticts bench` (and optionally `elasticts nn`) over a UCR archive.

Every two-class dataset found under the archive directory is benchmarked with
each requested loss. One JSON report per dataset and classifier is written to
--out-dir, and a summary table of mean +- std test error (in percent) is
printed at the end.

Layouts accepted: `<dir>/<Name>/<Name>_TRAIN.tsv` (2018 archive) and
`<dir>/<Name>_TRAIN` (older flat releases). Datasets with more than two
classes fail to load and are reported as skipped.

Example:
  uv run python scripts/run_ucr_benchmarks.py ~/UCRArchive_2018 --datasets Coffee ECG200
  uv run python scripts/run_ucr_benchmarks.py ~/UCRArchive_2018 --loss elsvm elogr --full-protocol
  uv run python scripts/run_ucr_benchmarks.py ~/UCR --nn --out-dir results/
"""

from __future__ import annotations

import argparse
import json
from pathlib import Path
import subprocess
import sys


def find_splits(root: Path) -> dict[str, tuple[Path, Path]]:
    """Map dataset name to its (train, test) files."""
    splits: dict[str, tuple[Path, Path]] = {}
    for train in sorted(root.rglob("*_TRAIN*")):
        name = train.name.split("_TRAIN")[0]
        test = train.with_name(train.name.replace("_TRAIN", "_TEST"))
        if test.is_file() and name not in splits:
            splits[name] = (train, test)
    return splits


def run(cmd: list[str]) -> subprocess.CompletedProcess:
    return subprocess.run(cmd, capture_output=True, text=True, check=False)


def main() -> int:
    ap = argparse.ArgumentParser(
        description="Benchmark elastic linear classifiers over a UCR archive."
    )
    ap.add_argument("archive", type=Path, help="UCR archive directory.")
    ap.add_argument(
        "--datasets", nargs="*", default=None, help="Only these dataset names (default: all found)."
    )
    ap.add_argument(
        "--loss",
        nargs="+",
        default=["eperc", "emarg", "elogr", "elsvm"],
        help="Losses to run (default: all four).",
    )
    ap.add_argument("--nn", action="store_true", help="Also run the NN+ALL baseline.")
    ap.add_argument("--full-protocol", action="store_true", help="100 trials per experiment.")
    ap.add_argument(
        "--trials",
        type=int,
        default=10,
        help="Trials when not using --full-protocol (default: 10).",
    )
    ap.add_argument("--seed", type=int, default=0, help="Master seed (default: 0).")
    ap.add_argument(
        "--jobs", type=int, default=4, help="Concurrent work units per run (default: 4)."
    )
    ap.add_argument(
        "--out-dir", type=Path, default=Path("."), help="Directory for JSON reports (default: .)."
    )
    args = ap.parse_args()

    splits = find_splits(args.archive)
    if args.datasets:
        splits = {name: splits[name] for name in args.datasets if name in splits}
    if not splits:
        print(f"No UCR splits found under {args.archive}", file=sys.stderr)
        return 2
    args.out_dir.mkdir(parents=True, exist_ok=True)

    common = ["--seed", str(args.seed), "--jobs", str(args.jobs)]
    common += ["--full-protocol"] if args.full_protocol else ["--trials", str(args.trials)]

    rows: list[tuple[str, str, str]] = []
    for name, (train, test) in splits.items():
        split = [str(train), str(test)]
        jobs = [
            (loss, ["elasticts", "bench", *split, "--loss", loss, *common]) for loss in args.loss
        ]
        if args.nn:
            nn_cmd = ["elasticts", "nn", *split, "--mode", "all", "--jobs", str(args.jobs)]
            jobs.append(("nn_all", nn_cmd))
        for label, cmd in jobs:
            out = args.out_dir / f"{name}_{label}.json"
            print(f"{name:<24} {label:<8} ...", end=" ", flush=True)
            result = run([*cmd, "--out", str(out)])
            if result.returncode != 0:
                stderr = result.stderr.strip()
                reason = stderr.splitlines()[-1] if stderr else f"exit {result.returncode}"
                print(f"skipped ({reason})")
                rows.append((name, label, "-"))
                continue
            report = json.loads(out.read_text(encoding="utf-8"))
            cell = f"{100 * report['mean']:.1f} +- {100 * report['std']:.1f}"
            print(cell)
            rows.append((name, label, cell))

    print()
    print(f"{'dataset':<24} {'classifier':<10} error (%)")
    for name, label, cell in rows:
        print(f"{name:<24} {label:<10} {cell}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
