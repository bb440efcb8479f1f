"""Random search for binegative states, sharded over processes, one JSON report per d."""
import argparse
import json
from dataclasses import dataclass, field
from pathlib import Path

from entbound.binegativity import search_binegative


@dataclass(frozen=True)
class SearchRun:
    dims: tuple[int, ...] = (2, 3)
    samples: int = 100_000
    seed: int = 0
    shards: int = 8
    workers: int = 4
    out: Path = field(default=Path("out/binegative"))


def run(cfg: SearchRun):
    cfg.out.mkdir(parents=True, exist_ok=True)
    reports = {}
    for d in cfg.dims:
        rep = search_binegative(d, cfg.samples, seed=cfg.seed, shards=cfg.shards, workers=cfg.workers)
        reports[d] = rep
        (cfg.out / f"d{d}.json").write_text(json.dumps(rep.to_json(), indent=1))
        print(f"d={d}: tested={rep.samples_tested} finds={rep.finds} min_eig={rep.defect:.3e}")
    return reports


if __name__ == "__main__":
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("-d", type=int, nargs="+", default=[2, 3])
    ap.add_argument("-n", type=int, default=100_000)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--shards", type=int, default=8)
    ap.add_argument("--workers", type=int, default=4)
    ap.add_argument("-o", type=Path, default=Path("out/binegative"))
    a = ap.parse_args()
    run(SearchRun(tuple(a.d), a.n, a.seed, a.shards, a.workers, a.o))
