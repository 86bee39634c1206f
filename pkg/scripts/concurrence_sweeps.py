#!/usr/bin/env python3
"""Nearest-neighbor concurrence across the coupling grid for the 8-site
J1-J2 ring and the 2x4 ladder (rung and leg pairs).

Writes plot-ready CSV into results/ (or a directory given as argv[1]).
"""

import pathlib
import sys

from spinqpt.analysis import GridSpec, sweep
from spinqpt.cli import emit_csv
from spinqpt.lattice import chain, ladder


def main():
    out_dir = pathlib.Path(sys.argv[1] if len(sys.argv) > 1 else "results")
    out_dir.mkdir(parents=True, exist_ok=True)

    res = sweep("j1j2", {"j1": 1.0}, GridSpec("j2", 0.0, 1.0, 0.005),
                chain(8), k_levels=3, pairs=("nn",))
    (out_dir / "j1j2_n8_concurrence.csv").write_text(emit_csv(res))
    print(f"j1j2 N=8: {len(res.points)} points, "
          f"C max {res.concurrence().max():.4f}")

    res = sweep("ladder", {"j_leg": 1.0}, GridSpec("j_rung", -2.0, 2.0, 0.01),
                ladder(8), k_levels=6, pairs=("leg", "rung"))
    (out_dir / "ladder_2x4_concurrence.csv").write_text(emit_csv(res))
    print(f"ladder 2x4: {len(res.points)} points, "
          f"leg C at J=0: {res.concurrence('leg')[len(res.points) // 2]:.4f}")


if __name__ == "__main__":
    main()
