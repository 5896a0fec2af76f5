"""Regenerate the reference CSV files shipped in ``tests/fixtures``.

Usage::

    python -m corrjscc.reproduce [OUT_DIR] [--only NAME ...]

Each entry of :data:`FIXTURES` is a plain ``corrjscc`` command line; the
Monte-Carlo entry pins its seed, so every file is reproduced byte for byte.
"""

from __future__ import annotations

import argparse
import os
import sys
from typing import Optional, Sequence

from .cli import main as cli_main

FIXTURES: dict[str, list[str]] = {
    # outer bounds and schemes versus SNR at rho = 0.3
    "bounds_vs_snr": ["bounds", "--rho", "0.3", "--snr-db-from", "0", "--snr-db-to", "20",
                      "--points", "41"],
    "schemes_vs_snr": ["schemes", "--rho", "0.3", "--snr-db-from", "0", "--snr-db-to", "20",
                       "--points", "21"],
    # schemes versus correlation at P/N = 10
    "schemes_vs_rho": ["schemes", "--rho-from", "0", "--rho-to", "1", "--points", "51",
                       "--p", "10", "--n", "1"],
    # SNR mismatch, design at 0 dB and 10 dB
    "mismatch_0db_rho0.1": ["mismatch", "--design-snr-db", "0", "--rho", "0.1",
                            "--actual-snr-db-from", "-5", "--actual-snr-db-to", "10", "--points", "16"],
    "mismatch_0db_rho0.5": ["mismatch", "--design-snr-db", "0", "--rho", "0.5",
                            "--actual-snr-db-from", "-5", "--actual-snr-db-to", "10", "--points", "16"],
    "mismatch_10db_rho0.1": ["mismatch", "--design-snr-db", "10", "--rho", "0.1",
                             "--actual-snr-db-from", "5", "--actual-snr-db-to", "20", "--points", "16"],
    "mismatch_10db_rho0.5": ["mismatch", "--design-snr-db", "10", "--rho", "0.5",
                             "--actual-snr-db-from", "5", "--actual-snr-db-to", "20", "--points", "16"],
    # fixed analog power instead of the design optimum
    "mismatch_10db_pa0": ["mismatch", "--design-snr-db", "10", "--rho", "0.1", "--pa", "0",
                          "--actual-snr-db-from", "5", "--actual-snr-db-to", "20", "--points", "16"],
    "mismatch_10db_pa5": ["mismatch", "--design-snr-db", "10", "--rho", "0.1", "--pa", "5",
                          "--actual-snr-db-from", "5", "--actual-snr-db-to", "20", "--points", "16"],
    # side-information mismatch of a Wyner-Ziv code (P = N = 1, D* = 0.1)
    "wz_side_information": ["mismatch", "--p", "1", "--n", "1", "--d-star", "0.1",
                            "--d-star-actual-db-from", "10", "--d-star-actual-db-to", "25",
                            "--points", "16"],
    # refinement-layer mutual information versus analog power
    "mi_0db_actual5db": ["mismatch", "--mi", "--rho", "0", "--design-snr-db", "0",
                         "--actual-snr-db", "5", "--pa-from", "0", "--pa-to", "1", "--points", "33"],
    "mi_10db_actual15db": ["mismatch", "--mi", "--rho", "0", "--design-snr-db", "10",
                           "--actual-snr-db", "15", "--pa-from", "0", "--pa-to", "10", "--points", "33"],
    # cognitive radio distortion regions
    "region_weak_rho0": ["region", "--regime", "weak", "--h1", "0.5", "--h2", "0.5", "--rho", "0"],
    "region_weak_rho0.25": ["region", "--regime", "weak", "--h1", "0.5", "--h2", "0.5", "--rho", "0.25"],
    "region_weak_rho0.5": ["region", "--regime", "weak", "--h1", "0.5", "--h2", "0.5", "--rho", "0.5"],
    "region_strong_rho0": ["region", "--regime", "very-strong", "--h1", "1.5", "--h2", "1.5",
                           "--rho", "0"],
    "region_strong_rho0.5": ["region", "--regime", "very-strong", "--h1", "1.5", "--h2", "1.5",
                             "--rho", "0.5"],
    # secondary distortion under coexistence conditions
    "coexist_weak": ["coexist", "--regime", "weak", "--h1", "0.5", "--h2", "0.5",
                     "--rho-from", "0", "--rho-to", "0.9", "--points", "10"],
    "coexist_strong": ["coexist", "--regime", "very-strong", "--h1", "1.5", "--h2", "1.5",
                       "--rho-from", "0", "--rho-to", "0.9", "--points", "10"],
    # Monte-Carlo agreement on random tuples with a pinned seed
    "verify_random": ["verify", "--random", "8", "--seed", "20240917", "--samples", "100000"],
}


def regenerate(out_dir: str, only: Optional[Sequence[str]] = None) -> list[str]:
    """Write every (or every selected) fixture into ``out_dir``; returns the paths."""
    names = list(FIXTURES) if not only else list(only)
    unknown = [n for n in names if n not in FIXTURES]
    if unknown:
        raise KeyError(f"unknown fixture(s): {', '.join(unknown)}")
    os.makedirs(out_dir, exist_ok=True)
    paths = []
    for name in names:
        path = os.path.join(out_dir, f"{name}.csv")
        status = cli_main(FIXTURES[name] + ["--format", "csv", "--out", path])
        if status != 0:
            raise RuntimeError(f"fixture {name} failed with exit status {status}")
        paths.append(path)
    return paths


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = argparse.ArgumentParser(prog="python -m corrjscc.reproduce", description=__doc__.splitlines()[0])
    parser.add_argument("out_dir", nargs="?", default=os.path.join("tests", "fixtures"))
    parser.add_argument("--only", nargs="+", metavar="NAME")
    args = parser.parse_args(argv)
    for path in regenerate(args.out_dir, args.only):
        print(path)
    return 0


if __name__ == "__main__":
    sys.exit(main())
