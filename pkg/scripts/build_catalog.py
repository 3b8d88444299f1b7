"""Regenerate src/blockforge/data/catalog.json.

Every design gets a robustness-optimized, normalized geometry.  Tiling cells
(SCU, FIB_SITE) are optimized for the robustness of a 3x3 patch and scaled so
that the tiled patch, not only the cell, is valid at blockade radius 1.  The
unit cell FMU is assembled from the optimized FIB_SITE.

    python3 scripts/build_catalog.py [--iterations 2000] [--restarts 8] [--jobs N]
"""

from __future__ import annotations

import argparse
import json
import logging
import time
from pathlib import Path

import numpy as np

from blockforge.catalog import _DESIGNS, abstract_complex, language_of, verification_record
from blockforge.io import complex_to_dict
from blockforge.metrics import normalization_scale, normalize, spread
from blockforge.optimizer import AnnealConfig, optimize_geometry, replace_positions
from blockforge.tessellation import PatchObjective, fibonacci_unit_cell, optimize_cell

OUT = Path(__file__).resolve().parents[1] / "src" / "blockforge" / "data" / "catalog.json"
TILING = {"SCU": "square", "FIB_SITE": "honeycomb"}
# hand sketch for the crossing: ports on a cross, ancilla clique in the middle
SKETCHES = {
    "ICRS": [(-2, 0), (0, -2), (0, 2), (2, 0), (-0.8, -0.8), (-0.8, 0.8), (0.8, -0.8), (0.8, 0.8)],
}

log = logging.getLogger("build_catalog")


def build_one(name: str, config: AnnealConfig, jobs: int):
    cplx = abstract_complex(name)
    if name in TILING:
        kind = TILING[name]
        design = optimize_cell(cplx, kind, config=config, jobs=jobs)
        xy = np.asarray(design.cell.positions)
        patch = PatchObjective(cplx, kind, 3)
        xy = xy * normalization_scale(patch.layout(xy.ravel()), patch.graph)
        out = cplx.with_geometry(xy)
        extra = {"patch_robustness": design.patch_robustness, "tiling": kind}
    else:
        res = optimize_geometry(cplx, "robustness", config, start=SKETCHES.get(name), jobs=jobs)
        out = cplx.with_geometry(normalize(res.positions, cplx.graph))
        extra = {}
    if out.graph != cplx.graph:
        log.warning("%s: optimized geometry does not reproduce the graph", name)
        out = replace_positions(cplx, out.positions)
    return out, extra


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--iterations", type=int, default=2000)
    parser.add_argument("--restarts", type=int, default=8)
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--jobs", type=int, default=1)
    parser.add_argument("--only", nargs="*", help="rebuild only these entries, keep the rest")
    parser.add_argument("-o", "--output", type=Path, default=OUT)
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO, format="%(message)s")

    config = AnnealConfig(max_iterations=args.iterations, restarts=args.restarts, seed=args.seed)
    data = json.loads(args.output.read_text()) if args.only and args.output.exists() else {}
    names = args.only or list(_DESIGNS)
    for name in names:
        t0 = time.perf_counter()
        cplx, extra = build_one(name, config, args.jobs)
        record = verification_record(cplx, language_of(name))
        record.update(extra)
        data[name] = {"complex": complex_to_dict(cplx), "verification": record}
        log.info("%-12s atoms=%2d xi=%.4f s=%.4f valid=%s  (%.1fs)", name, cplx.n_atoms,
                 record["robustness"], spread(cplx.detunings), record["valid"], time.perf_counter() - t0)
    site = data["FIB_SITE"]["complex"]
    from blockforge.io import complex_from_dict

    fmu = fibonacci_unit_cell(complex_from_dict(site))
    data["FMU"] = {"complex": complex_to_dict(fmu), "verification": verification_record(fmu, language_of("FMU"))}
    log.info("%-12s atoms=%2d xi=%.4f", "FMU", fmu.n_atoms, data["FMU"]["verification"]["robustness"])
    args.output.parent.mkdir(parents=True, exist_ok=True)
    args.output.write_text(json.dumps(data, indent=1) + "\n")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
