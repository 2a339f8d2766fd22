#!/usr/bin/env python3
# Copyright 2026 The kgepb Authors
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#     https://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.
"""Materializes MovieLens 100K (u.data, u.user, u.item) in upstream format.

Tries the GroupLens archive first. When that host is unreachable, falls back
to the copy bundled inside the pytorch-widedeep wheel on PyPI and rewrites it
into the original pipe/tab separated layout.
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
WHEEL = "pytorch-widedeep==1.7.0"
GENRES = [
    "unknown", "Action", "Adventure", "Animation", "Children's", "Comedy",
    "Crime", "Documentary", "Drama", "Fantasy", "Film-Noir", "Horror",
    "Musical", "Mystery", "Romance", "Sci-Fi", "Thriller", "War", "Western",
]


def from_grouplens(out: pathlib.Path) -> bool:
    try:
        with urllib.request.urlopen(GROUPLENS_URL, timeout=30) as resp:
            payload = resp.read()
    except OSError:
        return False
    with zipfile.ZipFile(io.BytesIO(payload)) as archive:
        for name in ("u.data", "u.user", "u.item"):
            (out / name).write_bytes(archive.read(f"ml-100k/{name}"))
    return True


def cell(value) -> str:
    if value is None:
        return ""
    if isinstance(value, float) and value != value:
        return ""
    return str(value)


def from_wheel(out: pathlib.Path) -> None:
    import pandas as pd

    with tempfile.TemporaryDirectory() as tmp:
        subprocess.run(
            [sys.executable, "-m", "pip", "download", "--no-deps",
             "--timeout", "300", "-d", tmp, WHEEL],
            check=True)
        wheel = next(pathlib.Path(tmp).glob("*.whl"))
        prefix = "pytorch_widedeep/datasets/data/MovieLens100k_"
        frames = {}
        with zipfile.ZipFile(wheel) as archive:
            for part in ("data", "items", "users"):
                raw = archive.read(f"{prefix}{part}.parquet.brotli")
                frames[part] = pd.read_parquet(io.BytesIO(raw))

    data = frames["data"]
    with open(out / "u.data", "w", encoding="latin-1", newline="\n") as f:
        for row in data.itertuples(index=False):
            f.write(f"{row.user_id}\t{row.movie_id}\t{row.rating}\t{row.timestamp}\n")

    users = frames["users"]
    with open(out / "u.user", "w", encoding="latin-1", newline="\n") as f:
        for row in users.itertuples(index=False):
            f.write(f"{row.user_id}|{row.age}|{row.gender}|{row.occupation}|{row.zip_code}\n")

    items = frames["items"]
    with open(out / "u.item", "w", encoding="latin-1", newline="\n") as f:
        for _, row in items.iterrows():
            fields = [cell(row["movie_id"]), cell(row["movie_title"]),
                      cell(row["release_date"]), cell(row["video_release_date"]),
                      cell(row["IMDb_URL"])]
            fields += [str(int(row[g])) for g in GENRES]
            f.write("|".join(fields) + "\n")


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--out", default="data/ml-100k",
                        help="destination directory (default: data/ml-100k)")
    args = parser.parse_args()
    out = pathlib.Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    if not from_grouplens(out):
        print("GroupLens unreachable; using the PyPI-bundled copy", file=sys.stderr)
        from_wheel(out)
    for name in ("u.data", "u.user", "u.item"):
        lines = sum(1 for _ in open(out / name, encoding="latin-1"))
        print(f"{out / name}: {lines} lines")
    return 0


if __name__ == "__main__":
    sys.exit(main())
