#!/usr/bin/env python3
"""Rebuild the bundled benchmark datasets under ``data/`` as gzipped LIBSVM text.

The canonical hosts (LIBSVM, UCI) are often unreachable from CI machines, so the
files are assembled from copies that ship inside wheels on PyPI:

    german     imbalanced_databases  (UCI Statlog german.data-numeric, 24 attrs)
    svmguide3  olpy                  (LIBSVM svmguide3, 1243 rows)
    a9a        olpy                  (a1a + a1a.t = the 32,561-row a9a train split)
    magic04    keel_ds               (UCI MAGIC gamma telescope via KEEL)

Usage::

    python scripts/build_datasets.py [--wheel-dir DIR] [--out-dir data]
"""
import argparse
import gzip
import io
import subprocess
import sys
import zipfile
from pathlib import Path

WHEELS = {
    "imbalanced_databases": "imbalanced-databases==0.1.1",
    "olpy": "olpy==1.0.0.dev3",
    "keel_ds": "keel-ds==0.2.5",
}


def _wheel(wheel_dir, prefix):
    found = sorted(wheel_dir.glob(prefix + "-*.whl"))
    if not found:
        subprocess.check_call([sys.executable, "-m", "pip", "download", "--no-deps",
                               "-d", str(wheel_dir), WHEELS[prefix]])
        found = sorted(wheel_dir.glob(prefix + "-*.whl"))
    return zipfile.ZipFile(found[-1])


def _fmt(v):
    return repr(float(v)) if float(v) != int(float(v)) else str(int(float(v)))


def _line(label, values):
    feats = " ".join("%d:%s" % (j + 1, _fmt(v)) for j, v in enumerate(values) if float(v) != 0.0)
    return ("%s %s" % (label, feats)).rstrip()


def german(z):
    text = z.read("imbalanced_databases/data/german/german.data-numeric.txt").decode()
    out = []
    for row in text.splitlines():
        toks = row.split()
        if not toks:
            continue
        # class 1 = good credit, 2 = bad credit; larger raw label -> +1
        out.append(_line("+1" if toks[-1] == "2" else "-1", toks[:-1]))
    return out


def olpy_csv(z, *names):
    out = []
    for name in names:
        rows = z.read("olpy/datasets/data/" + name).decode().splitlines()
        for row in rows[1:]:
            toks = row.strip().split(",")
            if len(toks) < 2:
                continue
            label = "+1" if float(toks[0]) > 0 else "-1"
            out.append(_line(label, toks[1:]))
    return out


def magic(z):
    rows = z.read("keel_ds/data/balanced/raw/magic.dat").decode().splitlines()
    out = []
    for row in rows:
        if not row.strip() or row.startswith("@"):
            continue
        toks = row.strip().split(",")
        out.append(_line("+1" if toks[-1].strip() == "g" else "-1", toks[:-1]))
    return out


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--wheel-dir", default="build/wheels", type=Path)
    ap.add_argument("--out-dir", default="data", type=Path)
    args = ap.parse_args(argv)
    args.wheel_dir.mkdir(parents=True, exist_ok=True)
    args.out_dir.mkdir(parents=True, exist_ok=True)

    olpy = _wheel(args.wheel_dir, "olpy")
    sets = {
        "german.numer": german(_wheel(args.wheel_dir, "imbalanced_databases")),
        "svmguide3": olpy_csv(olpy, "svmguide3"),
        "a9a": olpy_csv(olpy, "a1a", "a1a.t"),
        "magic04": magic(_wheel(args.wheel_dir, "keel_ds")),
    }
    for name, lines in sets.items():
        path = args.out_dir / (name + ".libsvm.gz")
        buf = io.BytesIO()
        # mtime=0 keeps the archive bytes reproducible
        with gzip.GzipFile(fileobj=buf, mode="wb", mtime=0) as gz:
            gz.write(("\n".join(lines) + "\n").encode())
        path.write_bytes(buf.getvalue())
        print("%-14s %6d rows -> %s" % (name, len(lines), path))


if __name__ == "__main__":
    main()
