#!/usr/bin/env python3
"""Regenerate every headline artifact into an output directory.

Usage: python scripts/reproduce.py [outdir] [--full]

Without --full the expensive Yu-Oh entropy run stops at step 7 (seconds);
with --full it goes to step 10 (about two minutes, a few GB of RAM).
"""

import sys
from pathlib import Path

from qsicsim.cli import main


def run(argv):
    print("$ qsicsim " + " ".join(argv))
    code = main(argv)
    if code != 0:
        sys.exit(code)


def reproduce(outdir: Path, full: bool) -> None:
    outdir.mkdir(parents=True, exist_ok=True)
    yo_steps = "10" if full else "7"

    run(["counts", "--set", "yu-oh", "--steps", "7",
         "--out", str(outdir / "yu-oh_counts.csv"), "--no-timestamp"])
    run(["counts", "--set", "peres-mermin", "--steps", "10",
         "--out", str(outdir / "peres-mermin_counts.csv"), "--no-timestamp"])
    run(["entropy", "--set", "peres-mermin", "--steps", "10",
         "--out", str(outdir / "peres-mermin_entropy.csv"), "--no-timestamp"])
    run(["entropy", "--set", "yu-oh", "--steps", yo_steps,
         "--out", str(outdir / "yu-oh_entropy.csv"), "--no-timestamp"])
    run(["transducer", "--set", "peres-mermin",
         "--out", str(outdir / "peres-mermin_transducer.json"),
         "--dot", str(outdir / "peres-mermin_transducer.dot"),
         "--no-timestamp"])
    run(["transducer", "--set", "yu-oh", "--depth", "3",
         "--out", str(outdir / "yu-oh_transducer_depth3.json"),
         "--no-timestamp"])
    run(["sample", "--set", "peres-mermin", "--len", "100000", "--seed", "7",
         "--source", "quantum",
         "--out", str(outdir / "peres-mermin_quantum_trace.csv"),
         "--no-timestamp"])
    run(["sample", "--set", "peres-mermin", "--len", "100000", "--seed", "11",
         "--source", "classical",
         "--out", str(outdir / "peres-mermin_classical_trace.csv"),
         "--no-timestamp"])
    run(["compare",
         "--a", str(outdir / "peres-mermin_quantum_trace.csv"),
         "--b", str(outdir / "peres-mermin_classical_trace.csv"),
         "--window", "3", "--n-min", "1000", "--threshold", "0.02",
         "--out", str(outdir / "compare_report.json")])
    run(["verify", "--set", "peres-mermin", "--depth", "3",
         "--out", str(outdir / "unused")])
    run(["verify", "--set", "yu-oh", "--depth", "5",
         "--out", str(outdir / "unused")])


if __name__ == "__main__":
    args = [a for a in sys.argv[1:] if a != "--full"]
    outdir = Path(args[0]) if args else Path("out")
    reproduce(outdir, full="--full" in sys.argv)
    print(f"artifacts in {outdir}/")
