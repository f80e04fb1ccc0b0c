#!/usr/bin/env python3
"""Download Cora and Citeseer and convert them to the pgee text formats.

Writes <out>/<name>/edges.txt and <out>/<name>/labels.txt. Papers are
numbered from 0 in the order of the .content file, classes from 1 in sorted
order of their names. Citations naming a paper absent from the .content file
are dropped.

    python3 scripts/fetch_data.py                  # both, into ./data
    python3 scripts/fetch_data.py --archive cora.tgz cora
"""

import argparse
import io
import sys
import tarfile
import urllib.request
from pathlib import Path

URL = "https://linqs-data.soe.ucsc.edu/public/lbc/{name}.tgz"
NAMES = ("cora", "citeseer")


def member(tar, suffix):
    for m in tar.getmembers():
        if m.isfile() and m.name.endswith(suffix):
            return tar.extractfile(m).read().decode("utf-8", errors="replace")
    raise SystemExit(f"archive has no *{suffix} file")


def convert(name, archive_bytes, out_dir):
    with tarfile.open(fileobj=io.BytesIO(archive_bytes), mode="r:*") as tar:
        content = member(tar, f"{name}.content")
        cites = member(tar, f"{name}.cites")

    ids, classes = [], []
    for line in content.splitlines():
        fields = line.split()
        if fields:
            ids.append(fields[0])
            classes.append(fields[-1])
    index = {pid: i for i, pid in enumerate(ids)}
    class_ids = {c: k + 1 for k, c in enumerate(sorted(set(classes)))}

    edges, dropped = set(), 0
    for line in cites.splitlines():
        fields = line.split()
        if len(fields) != 2:
            continue
        a, b = (index.get(f) for f in fields)
        if a is None or b is None:
            dropped += 1
            continue
        if a != b:
            edges.add((min(a, b), max(a, b)))

    target = out_dir / name
    target.mkdir(parents=True, exist_ok=True)
    with open(target / "edges.txt", "w") as f:
        f.write(f"# vertices: {len(ids)} base: 0 directed: false\n")
        for a, b in sorted(edges):
            f.write(f"{a} {b}\n")
    with open(target / "labels.txt", "w") as f:
        for c in classes:
            f.write(f"{class_ids[c]}\n")
    print(f"{name}: {len(ids)} vertices, {len(edges)} edges, {len(class_ids)} classes, "
          f"{dropped} dangling citations dropped -> {target}")


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("names", nargs="*", default=list(NAMES), choices=NAMES)
    ap.add_argument("--out", type=Path, default=Path("data"))
    ap.add_argument("--archive", type=Path, help="local .tgz instead of downloading (one name only)")
    args = ap.parse_args()
    if args.archive and len(args.names) != 1:
        ap.error("--archive needs exactly one dataset name")
    for name in args.names:
        if args.archive:
            data = args.archive.read_bytes()
        else:
            url = URL.format(name=name)
            try:
                with urllib.request.urlopen(url, timeout=60) as resp:
                    data = resp.read()
            except OSError as e:
                sys.exit(f"{name}: download failed ({e}); fetch {url} by hand and pass --archive")
        convert(name, data, args.out)


if __name__ == "__main__":
    main()
