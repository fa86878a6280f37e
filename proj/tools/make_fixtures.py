#!/usr/bin/env python3
"""Regenerate the committed fixtures under data/.

Everything is sampled with Python's own Mersenne Twister from fixed seeds, so
the output is independent of the C++ sampler. Re-running rewrites the files
byte-identically. The golden refine report is produced afterwards by the CLI
(see data/README.md).
"""

import json
import pathlib
import random

ROOT = pathlib.Path(__file__).resolve().parent.parent / "data"


def pick(rng, states, probs):
    u = rng.random()
    acc = 0.0
    for s, p in zip(states, probs):
        acc += p
        if u < acc:
            return s
    return states[-1]


def write_csv(path, header, rows):
    with open(path, "w", newline="") as f:
        f.write(",".join(header) + "\n")
        for r in rows:
            f.write(",".join(r) + "\n")


def write_json(path, doc):
    with open(path, "w") as f:
        f.write(json.dumps(doc, indent=2, sort_keys=True) + "\n")


def synthetic3():
    """A drives the class C; B is noise. The expert input has no edges."""
    out = ROOT / "synthetic3"
    out.mkdir(parents=True, exist_ok=True)
    p_c_pos = {"a0": 0.85, "a1": 0.2}

    def sample(seed, n):
        rng = random.Random(seed)
        rows = []
        for _ in range(n):
            a = pick(rng, ["a0", "a1"], [0.5, 0.5])
            b = pick(rng, ["b0", "b1"], [0.5, 0.5])
            c = pick(rng, ["pos", "neg"], [p_c_pos[a], 1 - p_c_pos[a]])
            rows.append([a, b, c])
        return rows

    write_csv(out / "train.csv", ["A", "B", "C"], sample(101, 300))
    write_csv(out / "test.csv", ["A", "B", "C"], sample(202, 300))
    write_json(out / "network.json", {
        "format_version": 1,
        "class_variable": "C",
        "variables": [
            {"name": "A", "states": ["a0", "a1"]},
            {"name": "B", "states": ["b0", "b1"]},
            {"name": "C", "states": ["pos", "neg"]},
        ],
        "edges": [],
    })


PROSTATE_STATES = {
    "age": ["lt60", "60to70", "gt70"],
    "wt": ["low", "normal", "high"],
    "pf": ["normal", "limited"],
    "hx": ["no", "yes"],
    "sbp": ["low", "normal", "high"],
    "dbp": ["low", "normal", "high"],
    "hg": ["low", "normal", "high"],
    "sz": ["small", "medium", "large"],
    "sg": ["low", "mid", "high"],
    "ap": ["normal", "raised", "high"],
    "status": ["not_survived", "survived"],
}


def prostate():
    """496 rows, 11 columns, 352 not_survived / 144 survived."""
    out = ROOT / "prostate"
    out.mkdir(parents=True, exist_ok=True)
    rng = random.Random(496)
    labels = ["not_survived"] * 352 + ["survived"] * 144
    rng.shuffle(labels)
    S = PROSTATE_STATES
    rows = []
    for status in labels:
        bad = status == "not_survived"
        age = pick(rng, S["age"], [0.15, 0.40, 0.45] if bad else [0.35, 0.45, 0.20])
        wt = pick(rng, S["wt"], [0.30, 0.50, 0.20] if bad else [0.15, 0.60, 0.25])
        pf = pick(rng, S["pf"], [0.75, 0.25] if bad else [0.92, 0.08])
        hx = pick(rng, S["hx"], [0.50, 0.50] if bad else [0.70, 0.30])
        sbp = pick(rng, S["sbp"], {"lt60": [0.30, 0.55, 0.15], "60to70": [0.20, 0.55, 0.25],
                                    "gt70": [0.10, 0.50, 0.40]}[age])
        dbp = pick(rng, S["dbp"], {"low": [0.60, 0.35, 0.05], "normal": [0.15, 0.70, 0.15],
                                    "high": [0.05, 0.35, 0.60]}[sbp])
        hg = pick(rng, S["hg"], [0.35, 0.55, 0.10] if bad else [0.15, 0.70, 0.15])
        sz = pick(rng, S["sz"], [0.30, 0.40, 0.30] if bad else [0.55, 0.35, 0.10])
        sg = pick(rng, S["sg"], {"small": [0.50, 0.35, 0.15], "medium": [0.30, 0.45, 0.25],
                                  "large": [0.10, 0.40, 0.50]}[sz])
        ap = pick(rng, S["ap"], {"low": [0.75, 0.20, 0.05], "mid": [0.50, 0.35, 0.15],
                                  "high": [0.25, 0.40, 0.35]}[sg])
        row = [age, wt, pf, hx, sbp, dbp, hg, sz, sg, ap, status]
        # A few unrecorded histories, as in the clinical records.
        if rng.random() < 0.02:
            row[3] = "?"
        rows.append(row)
    header = ["age", "wt", "pf", "hx", "sbp", "dbp", "hg", "sz", "sg", "ap", "status"]
    write_csv(out / "prostate.csv", header, rows)
    edges = [("status", v) for v in ["age", "wt", "pf", "hx", "hg", "sz"]]
    edges += [("age", "sbp"), ("sbp", "dbp"), ("sz", "sg"), ("sg", "ap")]
    write_json(out / "network.json", {
        "format_version": 1,
        "class_variable": "status",
        "variables": [{"name": v, "states": PROSTATE_STATES[v]} for v in header],
        "edges": [{"parent": p, "child": c} for p, c in edges],
    })


def tan5():
    """Class Y and a TAN tree X1-X2, X1-X3, X3-X4, X3-X5 rooted at X1."""
    out = ROOT / "tan5"
    out.mkdir(parents=True, exist_ok=True)
    rng = random.Random(5)
    flip = {"y0": 0.15, "y1": 0.30}
    rows = []
    for _ in range(2000):
        y = pick(rng, ["y0", "y1"], [0.5, 0.5])
        x1 = pick(rng, ["0", "1"], [0.7, 0.3] if y == "y0" else [0.3, 0.7])

        def child(parent):
            keep = 1 - flip[y]
            return pick(rng, ["0", "1"], [keep, 1 - keep] if parent == "0" else [1 - keep, keep])

        x2 = child(x1)
        x3 = child(x1)
        x4 = child(x3)
        x5 = child(x3)
        rows.append([x1, x2, x3, x4, x5, y])
    write_csv(out / "tan5.csv", ["X1", "X2", "X3", "X4", "X5", "Y"], rows)


if __name__ == "__main__":
    synthetic3()
    prostate()
    tan5()
