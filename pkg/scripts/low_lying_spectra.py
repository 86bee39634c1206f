#!/usr/bin/env python3
"""Low-lying energy levels of the four desk-scale models across their
driving couplings, with the crossing locations found by the detector.

Writes one CSV per model into results/ plus a crossing summary.
"""

import json
import pathlib
import sys

from spinqpt.analysis import GridSpec, detect_crossings, sweep
from spinqpt.cli import emit_csv, fmt
from spinqpt.lattice import chain, ladder

RUNS = (
    ("j1j2_n8", "j1j2", {"j1": 1.0}, GridSpec("j2", 0.0, 1.0, 0.01), chain(8), 5, ("nn",)),
    ("xxz_n8", "xxz", {}, GridSpec("delta", -2.0, 2.0, 0.01), chain(8), 5, ("nn",)),
    ("ladder_2x4", "ladder", {"j_leg": 1.0}, GridSpec("j_rung", -1.0, 1.0, 0.01),
     ladder(8), 6, ("leg", "rung")),
    ("ising_n8", "ising", {}, GridSpec("lam", 0.2, 2.0, 0.01), chain(8), 5, ("nn",)),
)


def main():
    out_dir = pathlib.Path(sys.argv[1] if len(sys.argv) > 1 else "results")
    out_dir.mkdir(parents=True, exist_ok=True)
    summary = {}
    for name, family, fixed, grid, lat, k, pairs in RUNS:
        res = sweep(family, fixed, grid, lat, k_levels=k, pairs=pairs)
        (out_dir / f"{name}_levels.csv").write_text(emit_csv(res))
        events = []
        for a in range(k - 1):
            for e in detect_crossings(res, a, a + 1):
                events.append({"levels": [a, a + 1], "kind": e.kind,
                               "location": fmt(e.location),
                               "min_gap": fmt(e.min_gap)})
        summary[name] = events
        printable = [f"({ev['levels'][0]},{ev['levels'][1]}) {ev['kind']} "
                     f"@ {ev['location']:+.6f}" for ev in events]
        print(f"{name}: {'; '.join(printable) if printable else 'no crossings'}")
    (out_dir / "crossings.json").write_text(json.dumps(summary, indent=2) + "\n")


if __name__ == "__main__":
    main()
