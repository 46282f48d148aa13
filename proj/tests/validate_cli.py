#!/usr/bin/env python3
"""Runs tbound commands, validates their JSON against the schemas, and checks
exit codes and byte-identical reruns."""

import json
import subprocess
import sys
from pathlib import Path

import jsonschema

cli, schema_dir, data_dir = sys.argv[1], Path(sys.argv[2]), Path(sys.argv[3])
failures = []


def schema(name):
    return json.loads((schema_dir / f"{name}.schema.json").read_text())


def run(args):
    return subprocess.run([cli, *args], capture_output=True, text=True, timeout=300)


def check(label, ok, detail=""):
    print(f"{'ok  ' if ok else 'FAIL'} {label}{' - ' + detail if detail and not ok else ''}")
    if not ok:
        failures.append(label)


def d(name):
    return str(data_dir / name)


# (schema, args, expected exit code)
cases = [
    ("bound", ["bound", "dicke", "--lambda", "2,2"], 0),
    ("bound", ["bound", "dicke", "--lambda", "2,2", "--symmetry"], 0),
    ("bound", ["bound", "dicke", "--lambda", "1,1,1", "--method", "strassen"], 0),
    ("bound", ["bound", "graph", "--cycle", "3"], 0),
    ("bound", ["bound", "graph", "--graph", d("c5.json"), "--enumeration", "rank-closed"], 0),
    ("bound", ["bound", "file", "--tensor", d("w3.json"), "--strategy", "user", "--p", d("w3_distribution.json"),
               "--symmetry-file", d("w3_symmetry.json"), "--labeling", d("w3_labeling.json")], 0),
    ("bound", ["--seed", "3", "bound", "file", "--tensor", d("w3.json"), "--strategy", "ascent"], 0),
    ("tight-check", ["tight", "check", "--tensor", d("w3.json"), "--labeling", d("w3_labeling.json")], 0),
    ("tight-find", ["tight", "find", "--dicke", "2,1,1"], 0),
    ("tight-find", ["tight", "find", "--tensor", d("square.json")], 1),
    ("table-complete", ["table", "complete", "--kmax", "10"], 0),
    ("table-cycle", ["table", "cycle", "--k", "5"], 0),
    ("certify-cw-border", ["certify", "cw-border", "--q", "2", "--k", "4"], 0),
    ("certify-cw-border", ["certify", "cw-border", "--q", "2", "--k", "4", "--mutant"], 1),
    ("lab-avgfree", ["lab", "avgfree", "--k", "2", "--N", "9"], 0),
    ("lab-avgfree", ["lab", "avgfree", "--k", "3", "--N", "40", "--mode", "greedy"], 0),
    ("lab-experiment", ["lab", "experiment", "--dicke", "1,2", "--N", "3", "--trials", "5"], 0),
    ("lab-experiment", ["lab", "experiment", "--unit", "2,3", "--N", "3", "--no-hash", "--no-types", "--skip-target"], 0),
    ("lab-diagonal", ["lab", "diagonal", "--points", d("d111_square_ordered.json")], 0),
    ("lab-diagonal", ["lab", "diagonal", "--dicke", "1,1,1", "--power", "2"], 0),
    ("cuts", ["cuts", "--complete", "6"], 0),
    ("cuts", ["cuts", "--graph", d("c5.json")], 0),
]

for name, args, code in cases:
    label = " ".join(args)
    first = run(args)
    check(f"exit {code}: {label}", first.returncode == code, f"got {first.returncode}: {first.stderr.strip()}")
    try:
        jsonschema.validate(json.loads(first.stdout), schema(name))
        check(f"schema {name}: {label}", True)
    except (json.JSONDecodeError, jsonschema.ValidationError) as e:
        check(f"schema {name}: {label}", False, str(e).splitlines()[0])
    second = run(args)
    check(f"deterministic: {label}", first.stdout == second.stdout)

# Other output formats still succeed.
for fmt in ("csv", "pretty"):
    for args in (["table", "complete", "--kmax", "5"], ["bound", "dicke", "--lambda", "2,2"]):
        r = run(["--format", fmt, *args])
        check(f"format {fmt}: {' '.join(args)}", r.returncode == 0 and r.stdout.strip() != "", r.stderr.strip())

# Usage and input errors.
for args, code in [
    (["bound", "file", "--tensor", "/nonexistent.json"], 2),
    (["nonsense"], 2),
    (["table", "complete", "--kmax", "2"], 2),
    (["bound", "dicke"], 2),
    (["lab", "experiment", "--dicke", "1,2", "--N", "2", "--modulus", "10"], 2),
]:
    r = run(args)
    check(f"exit {code}: {' '.join(args)}", r.returncode == code, f"got {r.returncode}")

# Input fixtures match the input schemas.
for name, file in [("tensor", "w3.json"), ("tensor", "square.json"), ("graph", "c5.json"),
                   ("labeling", "w3_labeling.json"), ("distribution", "w3_distribution.json"),
                   ("symmetry", "w3_symmetry.json"), ("points", "d111_square_ordered.json")]:
    try:
        jsonschema.validate(json.loads((data_dir / file).read_text()), schema(name))
        check(f"input schema {name}: {file}", True)
    except jsonschema.ValidationError as e:
        check(f"input schema {name}: {file}", False, str(e).splitlines()[0])

print(f"{len(failures)} failures")
sys.exit(1 if failures else 0)
