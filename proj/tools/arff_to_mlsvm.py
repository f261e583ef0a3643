#!/usr/bin/env python3
"""Convert a multi-label ARFF file (Mulan or MEKA layout) to the mlc text format.

    arff_to_mlsvm.py emotions.arff emotions.svm --labels 6
    arff_to_mlsvm.py bibtex.arff bibtex.sub.svm --labels 159 --subsample 0.2 --seed 1

Labels are the last N attributes unless --labels-first is given (MEKA files
carry "-C N" in the relation name; that is picked up when --labels is omitted).
"""
import argparse
import random
import re
import sys


def parse_header(lines):
    attrs, relation, data_at = [], "", None
    for k, raw in enumerate(lines):
        line = raw.strip()
        low = line.lower()
        if low.startswith("@relation"):
            relation = line[len("@relation"):].strip().strip("'\"")
        elif low.startswith("@attribute"):
            m = re.match(r"@attribute\s+('[^']*'|\"[^\"]*\"|\S+)\s+(.*)", line, re.I)
            if not m:
                sys.exit(f"line {k + 1}: cannot parse attribute")
            attrs.append((m.group(1).strip("'\""), m.group(2).strip()))
        elif low.startswith("@data"):
            data_at = k + 1
            break
    if data_at is None:
        sys.exit("no @data section")
    return relation, attrs, data_at


def rows(lines, start, width):
    for k in range(start, len(lines)):
        line = lines[k].split("%", 1)[0].strip()
        if not line:
            continue
        if line.startswith("{"):
            values = [0.0] * width
            body = line.strip("{}").strip()
            for item in filter(None, (s.strip() for s in body.split(","))):
                idx, val = item.split(None, 1)
                values[int(idx)] = float(val)
        else:
            parts = [s.strip().strip("'\"") for s in line.split(",")]
            if len(parts) != width:
                sys.exit(f"line {k + 1}: expected {width} values, found {len(parts)}")
            values = [float(p) if p != "?" else 0.0 for p in parts]
        yield values


def main():
    ap = argparse.ArgumentParser(description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    ap.add_argument("arff")
    ap.add_argument("out")
    ap.add_argument("--labels", type=int, help="number of label attributes")
    ap.add_argument("--labels-first", action="store_true")
    ap.add_argument("--subsample", type=float, default=1.0, help="fraction of rows to keep")
    ap.add_argument("--seed", type=int, default=0, help="row subsample seed")
    args = ap.parse_args()

    with open(args.arff, encoding="utf-8", errors="replace") as fh:
        lines = fh.read().splitlines()
    relation, attrs, data_at = parse_header(lines)
    c = args.labels
    first = args.labels_first
    if c is None:
        m = re.search(r"-C\s+(-?\d+)", relation)
        if not m:
            sys.exit("--labels is required (no -C in the relation name)")
        c = abs(int(m.group(1)))
        first = int(m.group(1)) > 0
    width = len(attrs)
    if not 0 < c < width:
        sys.exit(f"bad label count {c} for {width} attributes")
    label_cols = list(range(c)) if first else list(range(width - c, width))
    feature_cols = [j for j in range(width) if j not in set(label_cols)]

    data = list(rows(lines, data_at, width))
    if args.subsample < 1.0:
        keep = sorted(random.Random(args.seed).sample(range(len(data)), max(1, round(args.subsample * len(data)))))
        data = [data[i] for i in keep]

    with open(args.out, "w") as out:
        out.write(f"# mlc-dims labels={c} features={len(feature_cols)}\n")
        if args.subsample < 1.0:
            out.write(f"# subsample fraction={args.subsample} seed={args.seed} of {args.arff}\n")
        for values in data:
            on = [str(k) for k, j in enumerate(label_cols) if values[j] >= 0.5]
            feats = [f"{k}:{values[j]!r}" for k, j in enumerate(feature_cols) if values[j] != 0.0]
            out.write(",".join(on) + " " + " ".join(feats) + "\n")
    print(f"{len(data)} rows, {c} labels, {len(feature_cols)} features -> {args.out}")


if __name__ == "__main__":
    main()
