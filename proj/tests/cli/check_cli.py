"""End-to-end checks of the steap command line tool."""

import json
import os
import subprocess
import sys
import tempfile
import xml.etree.ElementTree as ET

EXE = sys.argv[1]
failures = []


def run(*args):
    return subprocess.run([EXE, *args], capture_output=True, text=True)


def check(name, ok, detail=""):
    print(("ok   " if ok else "FAIL ") + name + (f": {detail}" if detail and not ok else ""))
    if not ok:
        failures.append(name)


with tempfile.TemporaryDirectory() as tmp:
    svg = os.path.join(tmp, "run.svg")
    rec = os.path.join(tmp, "run.json")
    r = run("run", "--mode", "STEAP", "--seed", "3", "--n-dyn", "0.1", "--n-cam", "0.02", "--plot", svg, "--record", rec)
    check("run exits 0 or 1", r.returncode in (0, 1), r.stderr)
    metrics = json.loads(r.stdout)
    check("run prints metrics", {"success", "goal_err_trans", "est_err_trans"} <= metrics.keys())
    check("exit code follows success", r.returncode == (0 if metrics["success"] else 1))

    root = ET.parse(svg).getroot()
    ns = {"s": "http://www.w3.org/2000/svg"}
    ids = {e.get("id") for e in root.iter() if e.get("id")}
    check("svg root", root.tag == "{http://www.w3.org/2000/svg}svg", root.tag)
    check("svg layers", {"ground_truth", "estimated", "planned", "goal"} <= ids, str(ids))
    check("svg obstacles", len(root.findall(".//s:rect[@class='obstacle']", ns)) == 20)

    svg2 = os.path.join(tmp, "replot.svg")
    r = run("plot", rec, "-o", svg2, "--step", "0")
    check("plot exits 0", r.returncode == 0, r.stderr)
    ET.parse(svg2)

    r2 = run("run", "--mode", "STEAP", "--seed", "3", "--n-dyn", "0.1", "--n-cam", "0.02")
    check("run is deterministic", json.loads(r2.stdout)["goal_err_trans"] == metrics["goal_err_trans"])

    bad = os.path.join(tmp, "bad.json")
    with open(bad, "w") as f:
        f.write('{"problem": {"intervals": -3}}')
    check("invalid config exits 2", run("run", "--config", bad).returncode == 2)
    with open(bad, "w") as f:
        f.write("{not json")
    check("malformed config exits 2", run("bench", "--config", bad).returncode == 2)
    check("unknown mode exits 2", run("run", "--mode", "nope").returncode == 2)
    check("unknown option exits 2", run("run", "--bogus").returncode == 2)
    check("missing config fails", run("run", "--config", os.path.join(tmp, "none.json")).returncode != 0)
    check("missing record fails", run("plot", os.path.join(tmp, "none.json"), "-o", svg2).returncode != 0)

    cfg = os.path.join(tmp, "bench.json")
    with open(cfg, "w") as f:
        json.dump({"bench": {"seeds": 2, "n_dyn": [0.1], "n_cam": [0.02], "modes": ["OL", "STEAP"], "jobs": 2}}, f)
    out = os.path.join(tmp, "bench_out")
    r = run("bench", "--config", cfg, "--out", out)
    check("bench exits 0", r.returncode == 0, r.stderr)
    for name in ("aggregate.csv", "runs.csv", "timing.csv"):
        check("bench wrote " + name, os.path.exists(os.path.join(out, name)))

sys.exit(1 if failures else 0)
