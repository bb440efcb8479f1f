"""Contour map of a measure over the OO triangle with the region boundaries overlaid."""
import argparse
import csv
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from entbound.cli import regions, scan


@dataclass(frozen=True)
class ContourRun:
    d: int = 3
    resolution: int = 200
    measure: str = "areep"
    workers: int = 1
    levels: int = 20
    out: Path = field(default=Path("out/contour"))


def run(cfg: ContourRun):
    cfg.out.parent.mkdir(parents=True, exist_ok=True)
    rows = scan(cfg.d, cfg.resolution, cfg.measure, cfg.workers)
    with open(cfg.out.with_suffix(".csv"), "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["f", "fhat", "value"])
        w.writerows(rows)
    try:
        import matplotlib

        matplotlib.use("Agg")
        import matplotlib.pyplot as plt
        import matplotlib.tri as mtri
    except ImportError:
        return rows
    f, g, v = np.array(rows).T
    fig, ax = plt.subplots(figsize=(5, 6))
    cs = ax.tricontourf(mtri.Triangulation(f, g), v, levels=cfg.levels, cmap="viridis")
    fig.colorbar(cs, ax=ax, label=f"{cfg.measure} (bits)")
    geo = regions(cfg.d)
    for name in ("triangle", "ppt_square", "AYCD", "CYB"):
        poly = np.array(geo["polygons"][name] + geo["polygons"][name][:1])
        ax.plot(poly[:, 0], poly[:, 1], color="w", lw=0.8)
    for name, (x, y) in geo["points"].items():
        ax.annotate(name, (x, y), color="w", fontsize=8)
    ax.set_xlabel("f")
    ax.set_ylabel("fhat")
    fig.tight_layout()
    fig.savefig(cfg.out.with_suffix(".png"), dpi=150)
    return rows


if __name__ == "__main__":
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("-d", type=int, default=3)
    ap.add_argument("--resolution", type=int, default=200)
    ap.add_argument("--measure", choices=("reep", "rains", "areep", "negativity"), default="areep")
    ap.add_argument("--workers", type=int, default=1)
    ap.add_argument("-o", type=Path, default=Path("out/contour"))
    a = ap.parse_args()
    rows = run(ContourRun(a.d, a.resolution, a.measure, a.workers, out=a.o))
    print(f"wrote {len(rows)} grid points to {a.o.with_suffix('.csv')}")
