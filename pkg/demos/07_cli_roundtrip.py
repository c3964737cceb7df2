"""End-to-end CLI round trip: gen -> verify -> solve.

Drives the command-line interface in-process, writing a planted instance
file, checking its side-car, and solving it.  The same commands work from
a shell via the `wlra` entry point.
"""

import tempfile
from pathlib import Path

import numpy as np

from wlra.cli import main, read_instance

with tempfile.TemporaryDirectory() as tmp:
    inst_path = Path(tmp) / "demo.wlra"
    report_path = Path(tmp) / "report.csv"
    factors_path = Path(tmp) / "factors.bin"

    print("$ wlra gen --n 64 --r 4 --p 2 --k-true 3 --seed 11 --out demo.wlra")
    code = main(["gen", "--n", "64", "--r", "4", "--p", "2", "--k-true", "3",
                 "--seed", "11", "--out", str(inst_path)])
    print(f"(exit {code}, {inst_path.stat().st_size} bytes)\n")

    print("$ wlra verify --in demo.wlra --k 3")
    code = main(["verify", "--in", str(inst_path), "--k", "3"])
    print(f"(exit {code})\n")

    print("$ wlra solve --in demo.wlra --k 3 --seed 1 --out-report report.csv "
          "--out-factors factors.bin")
    code = main(["solve", "--in", str(inst_path), "--k", "3", "--seed", "1",
                 "--out-report", str(report_path), "--out-factors", str(factors_path)])
    print(f"(exit {code})\n")

    print("report.csv head:")
    for line in report_path.read_text().splitlines()[:4]:
        print(" ", line)

    A, W, _ = read_instance(inst_path)
    raw = np.frombuffer(factors_path.read_bytes(), dtype="<f8")
    U, V = raw[: 64 * 3].reshape(64, 3), raw[64 * 3:].reshape(64, 3)
    resid = float(np.sum((W * (U @ V.T - A)) ** 2))
    print(f"\nfactors reloaded from disk reproduce the printed lambda: {resid:.6e}")
