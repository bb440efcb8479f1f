"""Rains bound along the upper triangle edge from the Werner corner to B, one curve per d.

Writes a CSV and, when matplotlib is installed, a PNG with the AY / YX / XB pieces marked.
"""
import argparse
import csv
from dataclasses import dataclass, field
from pathlib import Path

from entbound.cli import segment
from entbound.measures import reep
from entbound.oo import OOState, key_points


@dataclass(frozen=True)
class SegmentRun:
    dims: tuple[int, ...] = (3, 4, 5)
    npoints: int = 400
    out: Path = field(default=Path("out/segment"))


def run(cfg: SegmentRun):
    cfg.out.parent.mkdir(parents=True, exist_ok=True)
    rows = [(*r, reep(OOState(r[0], r[1], r[2])).value) for d in cfg.dims for r in segment(d, cfg.npoints)]
    with open(cfg.out.with_suffix(".csv"), "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["d", "f", "fhat", "rains", "piece", "reep"])
        w.writerows(rows)
    try:
        import matplotlib

        matplotlib.use("Agg")
        import matplotlib.pyplot as plt
    except ImportError:
        return rows
    fig, ax = plt.subplots(figsize=(6, 4))
    for d in cfg.dims:
        sub = [r for r in rows if r[0] == d]
        (line,) = ax.plot([r[1] for r in sub], [r[3] for r in sub], label=f"Rains, d={d}")
        ax.plot([r[1] for r in sub], [r[5] for r in sub], ls=":", color=line.get_color(), label=f"REEP, d={d}")
        kp = key_points(d)
        for name in ("X", "Y"):
            ax.axvline(getattr(kp, name)[0], color=line.get_color(), lw=0.5, alpha=0.5)
    ax.set_xlabel("f")
    ax.set_ylabel("bits")
    ax.legend()
    fig.tight_layout()
    fig.savefig(cfg.out.with_suffix(".png"), dpi=150)
    return rows


if __name__ == "__main__":
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("-d", type=int, nargs="+", default=[3, 4, 5])
    ap.add_argument("--npoints", type=int, default=400)
    ap.add_argument("-o", type=Path, default=Path("out/segment"))
    a = ap.parse_args()
    rows = run(SegmentRun(tuple(a.d), a.npoints, a.o))
    print(f"wrote {len(rows)} rows to {a.o.with_suffix('.csv')}")
