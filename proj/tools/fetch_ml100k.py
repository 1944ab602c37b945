#!/usr/bin/env python3
"""Place MovieLens-100K (u.data, u.user, u.item) under a target directory.

Tries the GroupLens zip first. When that host is unreachable, falls back to
the ml-100k atomic files bundled in the RecBole wheel (fetched with pip) and
rewrites them into the original tab/pipe-separated layout.

The data is not redistributed with this repository; see the GroupLens
README for its usage terms.
"""

import argparse
import io
import pathlib
import subprocess
import sys
import tempfile
import urllib.request
import zipfile

GROUPLENS_URL = "https://files.grouplens.org/datasets/movielens/ml-100k.zip"

CATALOG_GENRES = [
    "unknown", "Action", "Adventure", "Animation", "Children's", "Comedy",
    "Crime", "Documentary", "Drama", "Fantasy", "Film-Noir", "Horror",
    "Musical", "Mystery", "Romance", "Sci-Fi", "Thriller", "War", "Western",
]


def from_grouplens(out: pathlib.Path) -> bool:
    try:
        with urllib.request.urlopen(GROUPLENS_URL, timeout=20) as resp:
            blob = resp.read()
    except OSError as exc:
        print(f"grouplens download failed: {exc}", file=sys.stderr)
        return False
    with zipfile.ZipFile(io.BytesIO(blob)) as zf:
        for name in ("u.data", "u.user", "u.item", "u.genre", "README"):
            (out / name).write_bytes(zf.read(f"ml-100k/{name}"))
    return True


def _atomic_rows(raw: bytes):
    lines = raw.decode("utf-8").splitlines()
    return [line.split("\t") for line in lines[1:] if line]


def from_recbole(out: pathlib.Path) -> bool:
    with tempfile.TemporaryDirectory() as tmp:
        cmd = [sys.executable, "-m", "pip", "download", "--no-deps", "-q",
               "recbole==1.2.1", "-d", tmp]
        if subprocess.call(cmd) != 0:
            return False
        wheel = next(pathlib.Path(tmp).glob("recbole-*.whl"))
        with zipfile.ZipFile(wheel) as zf:
            base = "recbole/dataset_example/ml-100k/ml-100k."
            inter = _atomic_rows(zf.read(base + "inter"))
            users = _atomic_rows(zf.read(base + "user"))
            items = _atomic_rows(zf.read(base + "item"))

    with open(out / "u.data", "w", newline="\n") as f:
        for user, item, rating, ts in inter:
            f.write(f"{user}\t{item}\t{int(float(rating))}\t{int(float(ts))}\n")

    with open(out / "u.user", "w", newline="\n") as f:
        for user, age, gender, occupation, zipcode in users:
            f.write(f"{user}|{age}|{gender}|{occupation}|{zipcode}\n")

    with open(out / "u.item", "wb") as f:
        for item, title, year, classes in items:
            if title == "unkonwn":
                title, date = "unknown", ""
            else:
                title, date = f"{title} ({year})", f"01-Jan-{year}"
            tags = set(classes.split(" "))
            flags = "|".join("1" if g in tags else "0" for g in CATALOG_GENRES)
            line = f"{item}|{title}|{date}|||{flags}\n"
            f.write(line.encode("latin-1", errors="replace"))

    with open(out / "u.genre", "w", newline="\n") as f:
        for i, g in enumerate(CATALOG_GENRES):
            f.write(f"{g}|{i}\n")
    return True


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--out", default="data/ml-100k")
    args = parser.parse_args()
    out = pathlib.Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    if from_grouplens(out) or from_recbole(out):
        print(f"ml-100k ready in {out}")
        return 0
    print("could not obtain ml-100k", file=sys.stderr)
    return 1


if __name__ == "__main__":
    sys.exit(main())
