#!/usr/bin/env python3
"""Fetch the Isolet and Multiple-Features benchmark datasets and convert
them to the CSV layout the jmdm tools consume.

  isolet.csv  7797 rows, 617 feature columns f001..f617, label column
              "letter" (1..26). Built from the UCI archive zip
              (isolet1+2+3+4.data + isolet5.data, concatenated in that
              order).
  mfeat.csv   2000 rows, 649 feature columns (fac_*, fou_*, kar_*,
              mor_*, pix_*, zer_*), label column "digit" (0..9). Built
              from the UCI "multiple+features" zip, or from the PMLB
              mirror on GitHub with --source pmlb. Both sources are in
              the canonical UCI row order (200 rows per digit).

The UCI .Z members are LZW-compressed; decompression shells out to
`gzip -dc`, which handles .Z. Override base URLs via the UCI_BASE and
GITHUB_BASE environment variables when going through a mirror.
"""

import argparse
import gzip
import io
import os
import subprocess
import sys
import urllib.request
import zipfile

UCI_BASE = os.environ.get("UCI_BASE", "https://archive.ics.uci.edu")
GITHUB_BASE = os.environ.get("GITHUB_BASE", "https://github.com")

ISOLET_ZIP = "/static/public/54/isolet.zip"
MFEAT_ZIP = "/static/public/72/multiple+features.zip"
PMLB_RAW = "/EpistasisLab/pmlb/raw/master/datasets/{name}/{name}.tsv.gz"

# UCI view files in listing order, with feature counts.
MFEAT_VIEWS = [
    ("fac", "mfeat-fac", "mfeat_factors", 216),
    ("fou", "mfeat-fou", "mfeat_fourier", 76),
    ("kar", "mfeat-kar", "mfeat_karhunen", 64),
    ("mor", "mfeat-mor", "mfeat_morphological", 6),
    ("pix", "mfeat-pix", "mfeat_pixel", 240),
    ("zer", "mfeat-zer", "mfeat_zernike", 47),
]


def fetch(url):
    print(f"  fetching {url}", file=sys.stderr)
    with urllib.request.urlopen(url) as r:
        return r.read()


def un_lzw(blob):
    return subprocess.run(["gzip", "-dc"], input=blob, check=True,
                          stdout=subprocess.PIPE).stdout


def fmt(x):
    v = float(x)
    return repr(int(v)) if v == int(v) else repr(v)


def build_isolet(out_dir):
    zf = zipfile.ZipFile(io.BytesIO(fetch(UCI_BASE + ISOLET_ZIP)))

    def rows_of(member):
        raw = zf.read(member)
        if member.endswith(".Z"):
            raw = un_lzw(raw)
        for line in raw.decode("ascii").splitlines():
            line = line.strip().rstrip(".")
            if not line:
                continue
            vals = [v.strip() for v in line.split(",")]
            if len(vals) != 618:
                raise SystemExit(f"{member}: bad row width {len(vals)}")
            yield vals

    names = sorted(zf.namelist())
    train = next(n for n in names if "1+2+3+4" in n)
    test = next(n for n in names if "isolet5" in n)
    path = os.path.join(out_dir, "isolet.csv")
    n = 0
    with open(path, "w") as f:
        f.write(",".join(f"f{i:03d}" for i in range(1, 618)) + ",letter\n")
        for member in (train, test):
            for vals in rows_of(member):
                label = str(int(float(vals[-1])))
                f.write(",".join(fmt(v) for v in vals[:-1]) + "," + label + "\n")
                n += 1
    if n != 7797:
        raise SystemExit(f"isolet: expected 7797 rows, got {n}")
    print(f"  wrote {path} ({n} rows)", file=sys.stderr)


def mfeat_views_uci():
    zf = zipfile.ZipFile(io.BytesIO(fetch(UCI_BASE + MFEAT_ZIP)))
    names = zf.namelist()
    for _, uci_name, _, width in MFEAT_VIEWS:
        member = next(n for n in names if n.endswith(uci_name))
        rows = []
        for line in zf.read(member).decode("ascii").splitlines():
            if line.strip():
                rows.append(line.split())
        yield width, rows


def mfeat_views_pmlb():
    for _, _, pmlb_name, width in MFEAT_VIEWS:
        blob = fetch(GITHUB_BASE + PMLB_RAW.format(name=pmlb_name))
        lines = gzip.decompress(blob).decode("ascii").splitlines()
        rows = [l.split("\t")[:-1] for l in lines[1:] if l.strip()]  # drop target col
        targets = [l.split("\t")[-1] for l in lines[1:] if l.strip()]
        expect = [str(d) for d in range(10) for _ in range(200)]
        if targets != expect:
            raise SystemExit(f"{pmlb_name}: rows not in canonical UCI order")
        yield width, rows


def build_mfeat(out_dir, source):
    views = list(mfeat_views_uci() if source == "uci" else mfeat_views_pmlb())
    header = []
    for (tag, _, _, width), _view in zip(MFEAT_VIEWS, views):
        header += [f"{tag}_{i:03d}" for i in range(1, width + 1)]
    for (width, rows), (tag, *_rest) in zip(views, MFEAT_VIEWS):
        if len(rows) != 2000 or any(len(r) != width for r in rows):
            raise SystemExit(f"mfeat view {tag}: unexpected shape")
    path = os.path.join(out_dir, "mfeat.csv")
    with open(path, "w") as f:
        f.write(",".join(header) + ",digit\n")
        for i in range(2000):
            cells = []
            for width, rows in views:
                cells += [fmt(v) for v in rows[i]]
            f.write(",".join(cells) + f",{i // 200}\n")
    print(f"  wrote {path} (2000 rows)", file=sys.stderr)


def main():
    ap = argparse.ArgumentParser(description=__doc__,
                                 formatter_class=argparse.RawDescriptionHelpFormatter)
    ap.add_argument("--dataset", choices=["isolet", "mfeat", "all"], default="all")
    ap.add_argument("--out-dir", default="data")
    ap.add_argument("--source", choices=["uci", "pmlb"], default="uci",
                    help="mfeat source (isolet is UCI-only)")
    args = ap.parse_args()
    os.makedirs(args.out_dir, exist_ok=True)
    if args.dataset in ("isolet", "all"):
        build_isolet(args.out_dir)
    if args.dataset in ("mfeat", "all"):
        build_mfeat(args.out_dir, args.source)


if __name__ == "__main__":
    main()
