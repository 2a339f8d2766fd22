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
#
import random

import pytest


def write_movielens(directory, users=40, movies=30, ratings=10, seed=1):
    """Small dataset in the upstream u.user / u.item / u.data layout."""
    rng = random.Random(seed)
    directory.mkdir(parents=True, exist_ok=True)
    with open(directory / "u.user", "w") as f:
        for u in range(1, users + 1):
            gender = "M" if u % 2 else "F"
            occupation = rng.choice(["student", "engineer", "writer"])
            f.write(f"{u}|{rng.randint(15, 60)}|{gender}|{occupation}|0000{u}\n")
    half = movies // 2
    with open(directory / "u.item", "w") as f:
        for m in range(1, movies + 1):
            flags = ["0"] * 19
            flags[1 if m <= half else 14] = "1"
            f.write(f"{m}|Movie {m} (1995)|01-Jan-1995||http://x|" + "|".join(flags) + "\n")
    with open(directory / "u.data", "w") as f:
        for u in range(1, users + 1):
            for i in range(ratings):
                first = (u % 2 == 1) == (rng.random() < 0.85)
                m = rng.randint(1, half) if first else rng.randint(half + 1, movies)
                f.write(f"{u}\t{m}\t{rng.randint(1, 5)}\t{880000000 + u * 100 + i}\n")
    return directory


@pytest.fixture()
def movielens_dir(tmp_path):
    return write_movielens(tmp_path / "ml")
