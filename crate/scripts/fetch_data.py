#!/usr/bin/env python3
"""Fetch the UCI benchmark datasets into a data directory.

Files are written in the layouts the built-in dataset specs expect:

    iris.data            UCI original (comma, no header)
    auto-mpg.data        UCI original (whitespace, quoted car name)
    student-mat.csv      member of UCI student.zip (semicolon, header)
    ENB2012_data.csv     UCI ENB2012_data.xlsx exported to CSV (comma, header)
    Concrete_Data.csv    UCI Concrete_Data.xls exported to CSV (comma, header)
    winequality-red.csv  UCI original (semicolon, header)

Default mode downloads from the UCI repository (needs network access, and
openpyxl/xlrd for the two spreadsheets). `--from-packages` rebuilds the
datasets that are redistributed inside common Python/Rust packages
(vega_datasets, rdatasets, linfa-datasets) for offline machines. That route
covers Iris, Auto, Concrete and Wine; Student and Energy are not shipped by
any package we know of.
"""

import argparse
import glob
import gzip
import io
import json
import os
import subprocess
import sys
import tempfile
import urllib.request
import zipfile

UCI = "https://archive.ics.uci.edu/ml/machine-learning-databases"
URLS = {
    "iris.data": f"{UCI}/iris/iris.data",
    "auto-mpg.data": f"{UCI}/auto-mpg/auto-mpg.data",
    "student-mat.csv": f"{UCI}/00320/student.zip",
    "ENB2012_data.csv": f"{UCI}/00242/ENB2012_data.xlsx",
    "Concrete_Data.csv": f"{UCI}/concrete/compressive/Concrete_Data.xls",
    "winequality-red.csv": f"{UCI}/wine-quality/winequality-red.csv",
}

CONCRETE_HEADER = (
    "Cement,Blast Furnace Slag,Fly Ash,Water,Superplasticizer,"
    "Coarse Aggregate,Fine Aggregate,Age,Concrete compressive strength"
)
ENERGY_HEADER = "X1,X2,X3,X4,X5,X6,X7,X8,Y1,Y2"


def fmt(v):
    return repr(float(v)) if float(v) != int(v) else f"{int(v)}"


def download(out_dir):
    import pandas as pd

    for name, url in URLS.items():
        target = os.path.join(out_dir, name)
        print(f"fetching {url}")
        raw = urllib.request.urlopen(url, timeout=60).read()
        if name == "student-mat.csv":
            raw = zipfile.ZipFile(io.BytesIO(raw)).read("student-mat.csv")
        elif name == "ENB2012_data.csv":
            df = pd.read_excel(io.BytesIO(raw)).dropna(how="all").iloc[:, :10]
            raw = df.to_csv(index=False, header=ENERGY_HEADER.split(",")).encode()
        elif name == "Concrete_Data.csv":
            df = pd.read_excel(io.BytesIO(raw))
            raw = df.to_csv(index=False, header=CONCRETE_HEADER.split(",")).encode()
        with open(target, "wb") as fh:
            fh.write(raw)


def pip_wheel(tmp, name):
    subprocess.run(
        [sys.executable, "-m", "pip", "download", "--no-deps", "-q", "-d", tmp, name],
        check=True,
    )
    return glob.glob(os.path.join(tmp, name.replace("-", "_") + "-*.whl"))[0]


def linfa_wine():
    cargo_home = os.environ.get("CARGO_HOME", os.path.expanduser("~/.cargo"))
    pattern = os.path.join(
        cargo_home, "registry/src/*/linfa-datasets-*/data/winequality-red.csv.gz"
    )
    hits = glob.glob(pattern)
    if not hits:
        with tempfile.TemporaryDirectory() as proj:
            with open(os.path.join(proj, "Cargo.toml"), "w") as fh:
                fh.write(
                    '[package]\nname = "fetch"\nversion = "0.0.0"\nedition = "2021"\n'
                    '[dependencies]\nlinfa-datasets = "0.8"\n'
                )
            os.makedirs(os.path.join(proj, "src"))
            open(os.path.join(proj, "src/lib.rs"), "w").close()
            subprocess.run(["cargo", "fetch", "-q"], cwd=proj, check=True)
        hits = glob.glob(pattern)
    return gzip.open(sorted(hits)[-1]).read().decode()


def from_packages(out_dir):
    import pandas as pd

    with tempfile.TemporaryDirectory() as tmp:
        vega = zipfile.ZipFile(pip_wheel(tmp, "vega_datasets"))
        rdata = zipfile.ZipFile(pip_wheel(tmp, "rdatasets"))

        def rdataset(package, item):
            raw = rdata.read(f"rdatasets/_data/{package}/{item}.pkl.compress")
            return pd.read_pickle(io.BytesIO(raw), compression="xz")

        # Iris: R's copy follows Fisher; UCI carries two transcription errors.
        iris = rdataset("datasets", "iris").drop(columns=["rownames"])
        rows = []
        for i, r in enumerate(iris.itertuples(index=False)):
            vals = [r[0], r[1], r[2], r[3]]
            if i == 34:
                vals = [4.9, 3.1, 1.5, 0.1]
            elif i == 37:
                vals = [4.9, 3.1, 1.5, 0.1]
            rows.append(",".join(f"{v:.1f}" for v in vals) + f",Iris-{r[4]}")
        with open(os.path.join(out_dir, "iris.data"), "w") as fh:
            fh.write("\n".join(rows) + "\n\n")

        # Auto MPG: vega's cars.json is auto-mpg.data-original (406 rows);
        # auto-mpg.data drops the 8 rows without mpg.
        cars = json.loads(vega.read("vega_datasets/_data/cars.json"))
        origin = {"USA": 1, "Europe": 2, "Japan": 3}
        lines = []
        for c in cars:
            if c["Miles_per_Gallon"] is None:
                continue
            hp = "?" if c["Horsepower"] is None else f"{float(c['Horsepower']):.1f}"
            lines.append(
                f"{float(c['Miles_per_Gallon']):.1f}   {c['Cylinders']}   "
                f"{float(c['Displacement']):.1f}      {hp}      "
                f"{int(c['Weight_in_lbs'])}.      {float(c['Acceleration']):.1f}   "
                f"{int(c['Year'][2:4])}  {origin[c['Origin']]}\t\"{c['Name']}\""
            )
        with open(os.path.join(out_dir, "auto-mpg.data"), "w") as fh:
            fh.write("\n".join(lines) + "\n")

        # Concrete: modeldata's copy rounds strength to two decimals.
        conc = rdataset("modeldata", "concrete").drop(columns=["rownames"])
        with open(os.path.join(out_dir, "Concrete_Data.csv"), "w") as fh:
            fh.write(CONCRETE_HEADER + "\n")
            for r in conc.itertuples(index=False):
                fh.write(",".join(fmt(v) for v in r) + "\n")

    # Wine: linfa-datasets ships the UCI file re-delimited with commas.
    wine = linfa_wine().replace(",", ";")
    with open(os.path.join(out_dir, "winequality-red.csv"), "w") as fh:
        fh.write(wine if wine.endswith("\n") else wine + "\n")

    print("rebuilt: iris.data auto-mpg.data Concrete_Data.csv winequality-red.csv")
    print("not available offline: student-mat.csv ENB2012_data.csv")


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--out", default=os.environ.get("KAPPAREG_DATA_DIR", "data"))
    ap.add_argument("--from-packages", action="store_true")
    args = ap.parse_args()
    os.makedirs(args.out, exist_ok=True)
    if args.from_packages:
        from_packages(args.out)
    else:
        download(args.out)


if __name__ == "__main__":
    main()
