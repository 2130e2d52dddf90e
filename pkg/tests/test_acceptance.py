"""Acceptance criteria 1-12. The checks run through ``shskit suite`` twice
in fresh processes; every tolerance is pinned here, not in the suite.

Run ``python tests/test_acceptance.py`` for the summary lines alone.
"""

import json
import math
import re
import subprocess
import sys
import time

import pytest

SUITE_LIMIT = 60.0  # seconds, whole suite
STABILIZE_LIMIT = 10.0  # seconds, criterion 1


def run_suite():
    t0 = time.perf_counter()
    proc = subprocess.run(
        [sys.executable, "-m", "shskit", "suite"], capture_output=True, text=True, encoding="utf-8", timeout=600
    )
    elapsed = time.perf_counter() - t0
    timings = {int(k): float(s) for k, s in re.findall(r"criterion\s+(\d+) .*: ([0-9.]+) s", proc.stderr)}
    return {"code": proc.returncode, "stdout": proc.stdout, "elapsed": elapsed, "timings": timings}


def near(x, y, tol):
    return abs(float(x) - float(y)) <= tol


def judge(k: int, r: dict, runs: list) -> tuple:
    """(passed, detail) for criterion k with pinned tolerances."""
    if k == 1:
        sec = runs[0]["timings"].get(1, math.inf)
        ok = r["cases"] == 100 and r["failures"] == 0 and r["max_residual"] < 1e-7 and r["min_pairing"] > 0 and sec < STABILIZE_LIMIT
        return ok, f"100 cases, residual {r['max_residual']:.2e} < 1e-7, min pairing {r['min_pairing']:.3g} > 0, {sec:.1f} s < 10 s"
    if k == 2:
        return r["cases"] == 100 and r["mismatches"] == 0, f"{r['cases']} cases, {r['mismatches']} mismatches"
    if k == 3:
        ok = r["cases"] == 50 and r["max_error"] <= 1e-3
        return ok, f"50 pairs, max |delta - brute| {r['max_error']:.2e} <= 1e-3"
    if k == 4:
        ok = r["cases"] == 30 and r["max_error"] <= 1e-6 and near(r["Hc_standard"], 1.0, 1e-9)
        return ok, f"30 loops, area error {r['max_error']:.2e} <= 1e-6, Hc(h_st) = {r['Hc_standard']!r} within 1e-9"
    if k == 5:
        ex = r["example"]
        ok = (
            near(ex["A"], 1, 1e-8)
            and near(ex["B"], 0, 1e-8)
            and near(ex["L"], 1, 1e-8)
            and r["reparam_error"] <= 1e-9
            and r["restriction_excess"] <= 1e-9
            and r["cases"] == 20
        )
        return ok, (
            f"(A,B,L) = ({ex['A']}, {ex['B']}, {ex['L']}) within 1e-8, reparam {r['reparam_error']:.1e} <= 1e-9, "
            f"restriction excess {r['restriction_excess']:.1e} <= 1e-9"
        )
    if k == 6:
        ok = r["cases"] == 20 and r["min_density"] > 0 and r["triples"] > 0 and r["min_density_triple"] > 0 and r["slices_ok"]
        return ok, f"20 short, min density {r['min_density']:.3g} > 0, {r['triples']} triples, slices ok {r['slices_ok']}"
    if k == 7:
        cr = r["crossings"]
        ok = (
            r["min_density"] > 0
            and len(cr) == 1
            and cr[0]["transversal"]
            and near(r["w_start"], 0, 1e-6)
            and near(r["w_end"], -1, 1e-6)
            and r["obstruction"] == "obstructed"
        )
        return ok, f"min density {r['min_density']:.3g} > 0, {len(cr)} crossing, w {r['w_start']:.1e} -> {r['w_end']:.7f} within 1e-6, {r['obstruction']}"
    if k == 8:
        ok = r["verdict"] == "morse_bott" and r["kernel_dim_2"] == r["census_points"] > 0 and r["agree"] == r["checked"] == 20
        return ok, f"{r['verdict']}, kernel dim 2 at {r['kernel_dim_2']}/{r['census_points']}, agree {r['agree']}/20"
    if k == 9:
        o = r["orbit"]
        ok = (
            near(o["T"], math.sqrt(5), 1e-8)
            and near(o["E_lambda"], math.sqrt(5), 1e-8)
            and near(o["E_omega"], -0.25, 1e-8)
            and r["cross_check"] <= 1e-8
            and r["contact_tori"] == 50
            and r["contact_max_gap"] <= 1e-9
        )
        return ok, f"(T, E_l, E_w) = ({o['T']:.12f}, {o['E_lambda']:.12f}, {o['E_omega']}) within 1e-8, flow check {r['cross_check']:.1e}, contact gap {r['contact_max_gap']:.1e} <= 1e-9"
    if k == 10:
        st = r["standard"]
        ok = r["witnesses"] == r["equal_pairs"] == 20 and r["false_yes"] == 0 and (st["s0"], st["s1"]) == ("+", "+") and near(st["w"], 0, 1e-6)
        return ok, f"{r['witnesses']}/20 witnesses, {r['false_yes']} false yes over {r['unequal_pairs']} pairs, h_st ({st['s0']},{st['s1']},{st['w']})"
    if k == 11:
        ok = r["cases"] == 20 and r["max_residual"] < 1e-10 and r["exotic_domain_error"]
        return ok, f"20 curves, residual {r['max_residual']:.1e} < 1e-10, exotic raises {r['exotic_domain_error']}"
    if k == 12:
        same = runs[0]["stdout"] == runs[1]["stdout"]
        slow = max(x["elapsed"] for x in runs)
        ok = all(r["roundtrips"].values()) and same and slow < SUITE_LIMIT
        return ok, f"round trips {sorted(k for k, v in r['roundtrips'].items() if v)}, identical stdout {same}, slowest run {slow:.1f} s < 60 s"
    raise KeyError(k)


@pytest.fixture(scope="module")
def runs():
    return [run_suite(), run_suite()]


@pytest.fixture(scope="module")
def results(runs):
    return {r["id"]: r for r in json.loads(runs[0]["stdout"])}


@pytest.mark.slow
@pytest.mark.parametrize("k", range(1, 13))
def test_criterion(k, runs, results, capsys):
    ok, detail = judge(k, results[k], runs)
    with capsys.disabled():
        print(f"\n{'PASS' if ok else 'FAIL'} criterion {k:2d} {results[k]['name']}: {detail}")
    assert ok, detail


def test_suite_exit_code(runs):
    assert [x["code"] for x in runs] == [0, 0]


if __name__ == "__main__":
    rs = [run_suite(), run_suite()]
    res = {r["id"]: r for r in json.loads(rs[0]["stdout"])}
    bad = 0
    for k in range(1, 13):
        ok, detail = judge(k, res[k], rs)
        bad += not ok
        print(f"{'PASS' if ok else 'FAIL'} criterion {k:2d} {res[k]['name']}: {detail}")
    sys.exit(1 if bad else 0)
