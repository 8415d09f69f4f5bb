#!/usr/bin/env python3
"""Download the original public datasets that data/ ships facsimiles of.

Needs network access; the bundled CSVs were generated offline by
make_datasets.py instead. Each download is reshaped to the exact column
layout the bundled configs expect, so the run configs work unchanged.
"""

import io
import pathlib
import sys
import urllib.request
import zipfile

import pandas as pd

DATA_DIR = pathlib.Path(__file__).resolve().parent.parent / "data"

UCI = "https://archive.ics.uci.edu/ml/machine-learning-databases"

SOURCES = {
    "heart": "https://raw.githubusercontent.com/dataprofessor/data/master/heart-disease-cleveland.csv",
    # Heart Failure Prediction (918 rows): published on Kaggle as
    # fedesoriano/heart-failure-prediction; download heart.csv manually and
    # place it at data/heart.csv (columns already match).
    "blood": f"{UCI}/blood-transfusion/transfusion.data",
    "diabetes": "https://raw.githubusercontent.com/jbrownlee/Datasets/master/pima-indians-diabetes.csv",
    "abalone": f"{UCI}/abalone/abalone.data",
    "wine_reg_red": f"{UCI}/wine-quality/winequality-red.csv",
    "wine_reg_white": f"{UCI}/wine-quality/winequality-white.csv",
    "penguins": "https://raw.githubusercontent.com/allisonhorst/palmerpenguins/main/inst/extdata/penguins.csv",
}


def fetch(url: str) -> bytes:
    print(f"fetching {url}")
    with urllib.request.urlopen(url, timeout=60) as r:
        return r.read()


def main() -> None:
    DATA_DIR.mkdir(exist_ok=True)

    blood = pd.read_csv(io.BytesIO(fetch(SOURCES["blood"])))
    blood.columns = ["Recency", "Frequency", "Monetary", "Time", "Donated"]
    blood.to_csv(DATA_DIR / "blood.csv", index=False)

    cols = ["Pregnancies", "Glucose", "BloodPressure", "SkinThickness",
            "Insulin", "BMI", "DiabetesPedigreeFunction", "Age", "Outcome"]
    diabetes = pd.read_csv(io.BytesIO(fetch(SOURCES["diabetes"])), header=None, names=cols)
    diabetes.to_csv(DATA_DIR / "diabetes.csv", index=False)

    cols = ["Sex", "Length", "Diameter", "Height", "WholeWeight",
            "ShuckedWeight", "VisceraWeight", "ShellWeight", "Rings"]
    abalone = pd.read_csv(io.BytesIO(fetch(SOURCES["abalone"])), header=None, names=cols)
    abalone.to_csv(DATA_DIR / "abalone.csv", index=False)

    red = pd.read_csv(io.BytesIO(fetch(SOURCES["wine_reg_red"])), sep=";")
    white = pd.read_csv(io.BytesIO(fetch(SOURCES["wine_reg_white"])), sep=";")
    wine_reg = pd.concat([red, white], ignore_index=True)
    wine_reg.columns = [c.replace(" ", "_") for c in wine_reg.columns]
    wine_reg.to_csv(DATA_DIR / "wine_reg.csv", index=False)

    penguins = pd.read_csv(io.BytesIO(fetch(SOURCES["penguins"])))
    penguins = penguins.dropna().reset_index(drop=True)
    penguins["year"] = penguins["year"].astype(str)
    penguins = penguins[["island", "bill_length_mm", "bill_depth_mm",
                         "flipper_length_mm", "body_mass_g", "sex", "year", "species"]]
    penguins.to_csv(DATA_DIR / "penguins.csv", index=False)

    print("heart.csv (Heart Failure Prediction, 918 rows) is Kaggle-hosted; "
          "download it manually to data/heart.csv")
    print("done")


if __name__ == "__main__":
    sys.exit(main())
