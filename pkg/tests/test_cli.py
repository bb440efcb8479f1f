import csv
import io
import json
import math

import numpy as np
import pytest

from entbound.cli import evaluate, main, regions, scan, segment
from entbound.oo import key_points


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def read_csv(text):
    lines = text.splitlines()
    return lines[0], list(csv.DictReader(io.StringIO("\n".join(lines[1:]))))


def test_eval_werner_corner(capsys):
    code, out, _ = run(capsys, "eval", "-d", "3", "-f", "-1", "--fhat", "0")
    rec = json.loads(out)
    assert code == 0
    assert rec["areep"] == pytest.approx(0.736966, abs=1e-6)
    assert rec["log_base"] == "2"
    assert set(rec) == {"d", "f", "fhat", "region", "subregion", "reep", "rains", "areep", "negativity", "additivity", "log_base"}


def test_eval_ppt_point(capsys):
    code, out, _ = run(capsys, "eval", "-d", "3", "-f", "0.5", "--fhat", "0.5")
    rec = json.loads(out)
    assert rec["region"] == "PPT"
    assert rec["reep"] == rec["rains"] == rec["areep"] == 0.0
    assert rec["negativity"] == pytest.approx(1.0)


def test_eval_point_b(capsys):
    code, out, _ = run(capsys, "eval", "-d", "3", "-f", "-0.3333333", "--fhat", "1")
    rec = json.loads(out)
    assert code == 0 and rec["region"] == "C"
    assert rec["additivity"] in ("weak", "strong")
    assert rec["areep"] == pytest.approx(rec["reep"]) and rec["rains"] == pytest.approx(rec["reep"])


def test_eval_nats(capsys):
    _, out, _ = run(capsys, "eval", "-d", "3", "-f", "-1", "--fhat", "0", "--nats")
    rec = json.loads(out)
    assert rec["log_base"] == "e"
    assert rec["areep"] == pytest.approx(math.log(5 / 3), abs=1e-12)


@pytest.mark.parametrize("argv", [("-d", "3", "-f", "2", "--fhat", "0"), ("-d", "1", "-f", "0", "--fhat", "0"), ("-d", "3", "-f", "-1", "--fhat", "1")])
def test_eval_invalid_exits_2(capsys, argv):
    code, out, err = run(capsys, "eval", *argv)
    assert code == 2 and out == "" and "error" in err


def test_record_invariants():
    for d in (3, 4):
        for f in np.linspace(-1, 1, 9):
            for g in np.linspace(0, d * (1 + f) / 2, 5):
                r = evaluate(d, f, g)
                assert r.rains <= r.reep + 1e-8
                assert abs(r.areep - r.rains) <= 1e-8
                if r.region == "PPT":
                    assert r.reep == r.rains == r.areep == 0


def test_scan_csv(tmp_path, capsys):
    path = tmp_path / "scan.csv"
    assert run(capsys, "scan", "-d", "3", "--resolution", "21", "-o", str(path))[0] == 0
    header, rows = read_csv(path.read_text())
    assert header == "# entbound v1, d=3, base=2"
    assert len(rows) == 21 * 22 // 2
    fs = [float(r["f"]) for r in rows]
    assert fs == sorted(fs)
    for r in rows:
        f, g, v = float(r["f"]), float(r["fhat"]), float(r["value"])
        assert g <= 3 * (1 + f) / 2 + 1e-12
        if f >= 0 and g <= 1:
            assert v == 0.0
        digits = r["value"].split("e")[0].replace("-", "").replace(".", "").lstrip("0")
        assert len(digits) <= 12


def test_scan_header_nats(capsys):
    code, out, _ = run(capsys, "scan", "-d", "4", "--resolution", "3", "--nats", "--measure", "rains")
    assert out.splitlines()[0] == "# entbound v1, d=4, base=e"


def test_scan_parallel_matches_serial():
    assert scan(3, 15, "areep", workers=2) == scan(3, 15, "areep")


def test_scan_edge_matches_segment():
    d, n = 3, 31
    edge = {round(f, 12): v for f, g, v in scan(d, n, "rains") if abs(g - d * (1 + f) / 2) < 1e-12}
    seg = {round(f, 12): v for _, f, _, v, _ in segment(d, 301)}
    shared = set(edge) & set(seg)
    assert len(shared) >= 3
    for f in shared:
        assert edge[f] == pytest.approx(seg[f], abs=1e-12)


def test_scan_unwritable_path(capsys):
    code, _, err = run(capsys, "scan", "-d", "3", "--resolution", "3", "-o", "/nonexistent/dir/x.csv")
    assert code == 2 and "error" in err


def test_scan_rejects_resolution_one(capsys):
    assert run(capsys, "scan", "-d", "3", "--resolution", "1")[0] == 2


def test_segment_csv(tmp_path, capsys):
    path = tmp_path / "seg.csv"
    assert run(capsys, "segment", "-d", "3", "4", "5", "--npoints", "50", "-o", str(path))[0] == 0
    header, rows = read_csv(path.read_text())
    assert header == "# entbound v1, d=3,4,5, base=2"
    for d in (3, 4, 5):
        sub = [r for r in rows if int(r["d"]) == d]
        kp = key_points(d)
        fs = [float(r["f"]) for r in sub]
        assert fs[0] == -1 and fs[-1] == pytest.approx(kp.B[0])
        assert any(abs(f - kp.X[0]) < 1e-12 for f in fs) and any(abs(f - kp.Y[0]) < 1e-12 for f in fs)
        assert {r["piece"] for r in sub} == {"AY", "YX", "XB"}
    first = next(r for r in rows if int(r["d"]) == 3)
    assert float(first["rains"]) == pytest.approx(math.log2(5 / 3), abs=1e-11)


def test_segment_xb_slope():
    d = 4
    rows = [r for r in segment(d, 101) if r[4] == "XB"]
    (f0, v0), (f1, v1) = (rows[0][1], rows[0][3]), (rows[-1][1], rows[-1][3])
    slope = (v1 - v0) / (f1 - f0)
    assert slope == pytest.approx(0.5 * math.log2(d - 2) + 0.5 * math.log2(d / 4), abs=1e-10)


def test_regions_json(tmp_path, capsys):
    path = tmp_path / "regions.json"
    assert run(capsys, "regions", "-d", "3", "-o", str(path))[0] == 0
    obj = json.loads(path.read_text())
    assert obj["points"]["X"] == pytest.approx([-5 / 11, 9 / 11], abs=1e-15)
    a, b, c = obj["lines"]["BC"]
    for name in ("B", "C"):
        f, g = obj["points"][name]
        assert abs(a * f + b * g + c) < 1e-12
    for name, pts in (("CY", ("C", "Y")), ("CD", ("C", "D")), ("AB_edge", ("A", "B", "X", "Y"))):
        a, b, c = obj["lines"][name]
        for p in pts:
            f, g = obj["points"][p]
            assert abs(a * f + b * g + c) < 1e-12, (name, p)


def _simple(poly):
    """No two non-adjacent edges intersect."""
    n = len(poly)
    edges = [(np.array(poly[i]), np.array(poly[(i + 1) % n])) for i in range(n)]

    def cross(o, a, b):
        return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])

    for i in range(n):
        for j in range(i + 1, n):
            if j == i + 1 or (i == 0 and j == n - 1):
                continue
            (p1, p2), (q1, q2) = edges[i], edges[j]
            if cross(p1, p2, q1) * cross(p1, p2, q2) < 0 and cross(q1, q2, p1) * cross(q1, q2, p2) < 0:
                return False
    return True


@pytest.mark.parametrize("d", [3, 4, 5])
def test_region_polygons_are_simple_and_tile(d):
    obj = regions(d)

    def area(poly):
        x, y = np.array(poly).T
        return 0.5 * abs(np.dot(x, np.roll(y, -1)) - np.dot(y, np.roll(x, -1)))

    P = obj["polygons"]
    for name, poly in P.items():
        assert len(poly) >= 3 and _simple(poly), name
    assert area(P["triangle"]) == pytest.approx(d)
    assert area(P["non_additive"]) + area(P["additive"]) == pytest.approx(area(P["triangle"]))
    assert area(P["AYCD"]) + area(P["CYB"]) == pytest.approx(area(P["non_additive"]))


def test_check_quick_suite(capsys):
    code, out, _ = run(capsys, "check", "-d", "3", "--budget", "quick", "--suite", "tangent-touch", "--suite", "binegative-pure")
    rep = json.loads(out)
    assert code == 0 and rep["passed"]
    assert [s["suite"] for s in rep["suites"]] == ["tangent-touch", "binegative-pure"]
    for s in rep["suites"]:
        assert {"suite", "d", "n", "max_deviation", "tolerance", "passed"} <= set(s)


def test_check_rains_equivalence_d4(capsys):
    code, out, _ = run(capsys, "check", "-d", "4", "--suite", "rains-equivalence", "--budget", "quick")
    rep = json.loads(out)
    assert code == 0 and rep["suites"][0]["max_deviation"] <= 1e-6


def test_check_unknown_suite(capsys):
    with pytest.raises(SystemExit) as exc:
        main(["check", "--suite", "nope"])
    assert exc.value.code == 2


def test_check_failure_exit_code(capsys, monkeypatch):
    from entbound import checks

    monkeypatch.setitem(checks.SUITES, "tangent-touch", lambda d, b, r: checks._result("tangent-touch", d, 1, 1.0, 0.0, 0.0))
    code, out, _ = run(capsys, "check", "--suite", "tangent-touch")
    assert code == 1 and not json.loads(out)["passed"]


def test_binegative_command(capsys):
    code, out, _ = run(capsys, "binegative", "-d", "3", "-n", "2000", "--seed", "1", "--witness")
    rep = json.loads(out)
    assert code == 0 and rep["samples_tested"] == 2000 and rep["worst_state"]["dim"] == 9
    code, out2, _ = run(capsys, "binegative", "-d", "3", "-n", "2000", "--seed", "1", "--witness")
    assert out == out2


def test_env_overrides(monkeypatch):
    from entbound.config import Config

    monkeypatch.setenv("ENTBOUND_LOG_BASE", "e")
    monkeypatch.setenv("ENTBOUND_SEED", "42")
    cfg = Config.from_env()
    assert cfg.log_base == math.e and cfg.seed == 42 and cfg.base_label == "e"
