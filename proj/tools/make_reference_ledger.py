#!/usr/bin/env python3
"""Regenerate tests/data/reference_11_ledger.csv with the thinfilm CLI.

Usage: make_reference_ledger.py path/to/thinfilm [output.csv]
"""
import math
import pathlib
import shutil
import subprocess
import sys
import tempfile

NX = 256
A = math.pi

CONFIG = f"""problem.n = 1
problem.m = 1
problem.a0 = 1
problem.a1 = 1
problem.a = {A!r}
problem.nx = {NX}
solver.t_end = 2
solver.sample_every = 1
initial.kind = file
initial.path = h0.txt
"""


def main() -> int:
    exe = pathlib.Path(sys.argv[1]).resolve()
    repo = pathlib.Path(__file__).resolve().parent.parent
    dest = pathlib.Path(sys.argv[2]) if len(sys.argv) > 2 else repo / "tests" / "data" / "reference_11_ledger.csv"
    dx = 2 * A / NX
    with tempfile.TemporaryDirectory() as tmp:
        work = pathlib.Path(tmp)
        rows = []
        for i in range(NX):
            x = -A + i * dx
            rows.append(f"{x!r} {1 + 0.4 * math.cos(x) + 0.1 * math.sin(2 * x)!r}")
        (work / "h0.txt").write_text("\n".join(rows) + "\n")
        (work / "run.cfg").write_text(CONFIG)
        subprocess.run([str(exe), "simulate", "--config", str(work / "run.cfg"), "--out", str(work / "out")],
                       check=True)
        shutil.copyfile(work / "out" / "ledger.csv", dest)
    print(f"wrote {dest}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
