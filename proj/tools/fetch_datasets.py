#!/usr/bin/env python3
# Copyright 2026 The atebench Authors.
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
"""Regenerates data/indo_rct.csv and data/rotterdam.csv.

Both tables are the R datasets medicaldata::indo_rct and survival::rotterdam,
taken from the offline copies bundled in the `rdatasets` wheel. The Rotterdam
table gains two derived columns so the engine never has to do survival
bookkeeping:

  event5y  1 if recurrence or death happened within 5 years of surgery
  lost5y   1 if follow-up ended before 5 years without an event
"""

import argparse
import pathlib
import pickle
import subprocess
import sys
import tempfile
import zipfile

FIVE_YEARS_DAYS = 1826

MEMBERS = {
    "indo_rct": "rdatasets/_data/medicaldata/indo_rct.pkl.compress",
    "rotterdam": "rdatasets/_data/survival/rotterdam.pkl.compress",
}


def load_member(wheel: zipfile.ZipFile, member: str):
    import bz2
    import gzip
    import lzma
    import zlib

    raw = wheel.read(member)
    for decompress in (gzip.decompress, bz2.decompress, lzma.decompress,
                       zlib.decompress):
        try:
            return pickle.loads(decompress(raw))
        except Exception:  # noqa: BLE001 - try the next codec
            continue
    return pickle.loads(raw)


def derive_rotterdam(df):
    t = FIVE_YEARS_DAYS
    event = ((df.recur == 1) & (df.rtime <= t)) | ((df.death == 1) &
                                                  (df.dtime <= t))
    lost = (~event) & (df.dtime < t)
    df = df.copy()
    df["event5y"] = event.astype(int)
    df["lost5y"] = lost.astype(int)
    return df


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--out", default=str(
        pathlib.Path(__file__).resolve().parent.parent / "data"))
    parser.add_argument("--wheel", help="path to a downloaded rdatasets wheel")
    args = parser.parse_args()

    out = pathlib.Path(args.out)
    out.mkdir(parents=True, exist_ok=True)

    with tempfile.TemporaryDirectory() as tmp:
        wheel_path = args.wheel
        if wheel_path is None:
            subprocess.check_call([
                sys.executable, "-m", "pip", "download", "rdatasets==0.2.10",
                "--no-deps", "-d", tmp
            ])
            wheel_path = next(pathlib.Path(tmp).glob("rdatasets-*.whl"))
        with zipfile.ZipFile(wheel_path) as wheel:
            indo = load_member(wheel, MEMBERS["indo_rct"])
            rott = load_member(wheel, MEMBERS["rotterdam"])

    indo.drop(columns=["rownames"]).to_csv(out / "indo_rct.csv", index=False)
    derive_rotterdam(rott.drop(columns=["rownames"])).to_csv(
        out / "rotterdam.csv", index=False)
    print(f"wrote {out / 'indo_rct.csv'} ({len(indo)} rows)")
    print(f"wrote {out / 'rotterdam.csv'} ({len(rott)} rows)")
    return 0


if __name__ == "__main__":
    sys.exit(main())
