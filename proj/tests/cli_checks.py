#!/usr/bin/env python3
import csv
import io
import json
import os
import subprocess
import sys
import tempfile

MLC, DATA = sys.argv[1], sys.argv[2]
failed = 0


def run(*args, expect=0):
    global failed
    p = subprocess.run([MLC, *args], capture_output=True, text=True)
    if p.returncode != expect:
        failed += 1
        print(f"FAIL exit {p.returncode} != {expect}: mlc {' '.join(args)}\n{p.stderr}")
    return p.stdout


def check(cond, what):
    global failed
    if not cond:
        failed += 1
        print("FAIL", what)


toy = os.path.join(DATA, "toy_a.svm")
with tempfile.TemporaryDirectory() as tmp:
    model = os.path.join(tmp, "m.txt")
    out = json.loads(run("train", "--data", toy, "--lambda", "0.01", "--model-out", model, "--json", "-"))
    ev = json.loads(run("eval", "--model", model, "--data", toy))
    check(ev == out["train"], "eval of saved model matches train metrics")

    run("train", "--data", os.path.join(tmp, "missing.svm"), expect=1)
    run("no-such-command", expect=1)
    run("train", "--data", toy, "--learner", "A_x", expect=1)
    run("bounds", "--name", "Ah_nothing", expect=1)

    # a campaign that refuses, then one that is allowed to find violations
    run("verify-lemmas", "--cases", "2000", "--base-loss", "logistic_ln", expect=1)
    summary = os.path.join(tmp, "s.json")
    run("verify-lemmas", "--cases", "2000", "--base-loss", "logistic_ln", "--allow-non-dominating",
        "--json", summary, expect=2)
    s = json.load(open(summary))
    check(s["violations"] > 0 and s["failures"], "override campaign records failures")

    # a kept failure replays as a violation through --repro
    case = os.path.join(tmp, "case.json")
    fail = s["failures"][0]
    json.dump(fail["case"] if "case" in fail else fail, open(case, "w"))
    run("verify-lemmas", "--repro", case, "--allow-non-dominating", expect=2)

    run("verify-lemmas", "--cases", "20000", "--seed", "9", expect=0)
    a = run("verify-lemmas", "--cases", "20000", "--seed", "9", "--workers", "1", "--json", "-")
    b = run("verify-lemmas", "--cases", "20000", "--seed", "9", "--workers", "4", "--json", "-")
    check(a == b and a, "verify-lemmas output independent of workers")

for name in ["Ah_subset", "As_subset_hamming", "Ar_hamming", "Ar_subset"]:
    rows = list(csv.DictReader(io.StringIO(run("bounds", "--name", name, "--sweep", "c=1..50"))))
    totals = [float(r["total"]) for r in rows]
    check(len(rows) == 50 and all(x < y for x, y in zip(totals, totals[1:])), f"{name} increasing in c")
    rows = list(csv.DictReader(io.StringIO(run("bounds", "--name", name, "--sweep", "n=100..5000:100"))))
    totals = [float(r["total"]) for r in rows]
    check(all(x > y for x, y in zip(totals, totals[1:])), f"{name} decreasing in n")

rows = list(csv.DictReader(io.StringIO(run("bounds", "--name", "Ah_hamming", "--sweep", "c=1..20"))))
check(len({r["total"] for r in rows}) == 1, "Ah_hamming flat in c")

cv_a = run("cv", "--data", toy, "--learners", "A_h,A_r", "--lambdas", "0.01,0.1", "--folds", "3",
           "--epochs", "5", "--workers", "1")
cv_b = run("cv", "--data", toy, "--learners", "A_h,A_r", "--lambdas", "0.01,0.1", "--folds", "3",
           "--epochs", "5", "--workers", "3")
check(cv_a == cv_b and "dataset,learner,lambda,fold" in cv_a, "cv csv independent of workers")

print("cli checks:", "FAIL" if failed else "ok")
sys.exit(1 if failed else 0)
