#!/usr/bin/env python3
"""Regenerate the bundled CSV datasets under data/.

Two of the eight datasets (iris, wine) are the genuine UCI tables re-exported
from scikit-learn. The other six are deterministic, seeded facsimiles of
well-known public datasets, built to match the originals' row counts, column
schemas, class balances and approximate signal strength. They exist because
this repository must be runnable offline; fetch_real_datasets.py documents
how to swap in the originals when network access is available.

Running this script twice produces byte-identical CSVs.
"""

import pathlib

import numpy as np
import pandas as pd

DATA_DIR = pathlib.Path(__file__).resolve().parent.parent / "data"


def make_iris() -> pd.DataFrame:
    from sklearn.datasets import load_iris

    raw = load_iris(as_frame=True)
    df = raw.frame.drop(columns=["target"])
    df.columns = [c.replace(" (cm)", "").replace(" ", "-") for c in df.columns]
    df["species"] = [raw.target_names[i] for i in raw.target]
    return df


def make_wine() -> pd.DataFrame:
    from sklearn.datasets import load_wine

    raw = load_wine(as_frame=True)
    df = raw.frame.drop(columns=["target"])
    df["class"] = [f"class_{i}" for i in raw.target]
    return df


def make_penguins(seed: int = 0, n: int = 333) -> pd.DataFrame:
    """Three near-separable species clusters, as in the Palmer measurements."""
    rng = np.random.default_rng(seed)
    counts = {"Adelie": 146, "Chinstrap": 68, "Gentoo": 119}
    stats = {  # bill_len, bill_dep, flipper, mass (mean, sd)
        "Adelie": ((38.8, 2.5), (18.35, 1.15), (190.1, 6.3), (3706, 440)),
        "Chinstrap": ((48.8, 3.2), (18.42, 1.1), (195.8, 6.9), (3733, 370)),
        "Gentoo": ((47.5, 2.9), (14.98, 0.95), (217.2, 6.3), (5092, 480)),
    }
    islands = {"Adelie": (["Torgersen", "Biscoe", "Dream"], [0.32, 0.30, 0.38]),
               "Chinstrap": (["Dream"], [1.0]),
               "Gentoo": (["Biscoe"], [1.0])}
    rows = []
    for species, cnt in counts.items():
        (bl, bd, fl, bm) = stats[species]
        isl_names, isl_p = islands[species]
        for _ in range(cnt):
            male = rng.random() < 0.5
            rows.append({
                "species": species,
                "island": rng.choice(isl_names, p=isl_p),
                "bill_length_mm": round(rng.normal(bl[0] + 1.9 * male, bl[1]), 1),
                "bill_depth_mm": round(rng.normal(bd[0] + 0.7 * male, bd[1]), 1),
                "flipper_length_mm": round(rng.normal(fl[0] + 4.5 * male, fl[1])),
                "body_mass_g": round(rng.normal(bm[0] + 350 * male, bm[1]) / 25) * 25,
                "sex": "male" if male else "female",
                "year": str(rng.choice(["2007", "2008", "2009"])),
            })
    df = pd.DataFrame(rows).sample(frac=1.0, random_state=7).reset_index(drop=True)
    return df[["island", "bill_length_mm", "bill_depth_mm", "flipper_length_mm",
               "body_mass_g", "sex", "year", "species"]]


def make_heart(seed: int = 0, n: int = 918) -> pd.DataFrame:
    """Cardiac risk facsimile: label first, then symptom profile given label."""
    rng = np.random.default_rng(seed)
    d = (rng.random(n) < 508 / 918).astype(int)
    age = np.clip(rng.normal(50.5 + 5.5 * d, 9.0), 28, 77).round()
    sex = np.where(rng.random(n) < np.where(d, 0.90, 0.65), "M", "F")
    cp_levels = np.array(["ASY", "TA", "ATA", "NAP"])
    cp_probs = {1: [0.77, 0.04, 0.09, 0.10], 0: [0.26, 0.06, 0.35, 0.33]}
    cp = np.array([rng.choice(cp_levels, p=cp_probs[x]) for x in d])
    rbp = np.clip(rng.normal(130 + 4 * d, 17), 90, 200).round()
    chol = np.clip(rng.normal(225 + 14 * d, 54), 85, 410).round()
    fbs = (rng.random(n) < np.where(d, 0.33, 0.12)).astype(int).astype(str)
    ecg_levels = np.array(["Normal", "ST", "LVH"])
    ecg_probs = {1: [0.52, 0.26, 0.22], 0: [0.66, 0.12, 0.22]}
    ecg = np.array([rng.choice(ecg_levels, p=ecg_probs[x]) for x in d])
    maxhr = np.clip(rng.normal(168 - 0.55 * age - 17 * d, 17), 60, 202).round()
    exang = np.where(rng.random(n) < np.where(d, 0.62, 0.13), "Y", "N")
    zero = rng.random(n) < np.where(d, 0.28, 0.64)
    oldpeak = np.where(zero, 0.0, np.round(np.abs(rng.normal(1.25 + 0.45 * d, 0.95)), 1))
    slope_levels = np.array(["Up", "Flat", "Down"])
    slope_probs = {1: [0.15, 0.72, 0.13], 0: [0.74, 0.22, 0.04]}
    slope = np.array([rng.choice(slope_levels, p=slope_probs[x]) for x in d])
    return pd.DataFrame({
        "Age": age.astype(int), "Sex": sex, "ChestPainType": cp,
        "RestingBP": rbp.astype(int), "Cholesterol": chol.astype(int),
        "FastingBS": fbs, "RestingECG": ecg, "MaxHR": maxhr.astype(int),
        "ExerciseAngina": exang, "Oldpeak": oldpeak, "ST_Slope": slope,
        "HeartDisease": d,
    })


def make_diabetes(seed: int = 1, n: int = 768) -> pd.DataFrame:
    rng = np.random.default_rng(seed)
    d = (rng.random(n) < 268 / 768).astype(int)
    age = np.clip(21 + rng.gamma(2.0, 5.5, n) + 3.5 * d, 21, 81).round()
    preg = np.clip(rng.poisson(2.5 + 0.05 * (age - 21) + 0.4 * d), 0, 17)
    glucose = np.clip(rng.normal(111 + 27 * d, 25), 44, 199).round()
    bp = np.clip(rng.normal(68.5 + 2 * d + 0.12 * (age - 33), 12), 24, 122).round()
    skin = np.clip(rng.normal(27 + 2 * d, 9.5), 7, 63).round()
    insulin = np.clip(rng.lognormal(4.35 + 0.25 * d, 0.72), 14, 850).round()
    bmi = np.clip(rng.normal(30.3 + 3.6 * d, 6.5), 18, 60).round(1)
    dpf = np.round(np.clip(rng.lognormal(-0.93 + 0.16 * d, 0.56), 0.078, 2.42), 3)
    flip = rng.random(n) < 0.03  # irreducible label noise
    d = np.where(flip, 1 - d, d)
    return pd.DataFrame({
        "Pregnancies": preg.astype(int), "Glucose": glucose.astype(int),
        "BloodPressure": bp.astype(int), "SkinThickness": skin.astype(int),
        "Insulin": insulin.astype(int), "BMI": bmi,
        "DiabetesPedigreeFunction": dpf, "Age": age.astype(int), "Outcome": d,
    })


def make_blood(seed: int = 2, n: int = 748) -> pd.DataFrame:
    rng = np.random.default_rng(seed)
    d = (rng.random(n) < 178 / 748).astype(int)
    rec = np.clip(np.where(d, rng.gamma(1.7, 2.9, n), rng.gamma(1.9, 5.2, n)), 0, 74).round()
    freq = np.clip(np.where(d, rng.lognormal(1.83, 0.77, n),
                            rng.lognormal(1.40, 0.78, n)), 1, 50).round()
    time = np.clip(freq * rng.gamma(4.0, 1.6, n) + rng.gamma(2.0, 6.0, n), 2, 98).round()
    flip = rng.random(n) < 0.02
    d = np.where(flip, 1 - d, d)
    return pd.DataFrame({
        "Recency": rec.astype(int), "Frequency": freq.astype(int),
        "Monetary": (250 * freq).astype(int),  # exact multiple, as in the original
        "Time": time.astype(int), "Donated": d,
    })


def make_wine_reg(seed: int = 3, n: int = 6497) -> pd.DataFrame:
    rng = np.random.default_rng(seed)
    white = rng.random(n) < 4898 / 6497
    alcohol = np.clip(rng.gamma(14, 0.75, n), 8.0, 14.9).round(2)
    density = np.clip(0.9965 + 0.0008 * white - 0.00225 * (alcohol - 10.5) / 1.2
                      + rng.normal(0, 0.0012, n), 0.987, 1.039).round(4)
    va = np.clip(rng.lognormal(np.where(white, -1.35, -0.70), 0.35), 0.08, 1.58).round(3)
    fa = np.clip(rng.normal(np.where(white, 6.85, 8.32), 1.2), 3.8, 15.9).round(1)
    citric = np.clip(rng.normal(np.where(white, 0.33, 0.27), 0.12), 0.0, 1.0).round(2)
    sugar = np.clip(rng.lognormal(np.where(white, 1.5, 0.8), 0.8), 0.6, 65.8).round(1)
    chlor = np.clip(rng.lognormal(np.where(white, -3.1, -2.45), 0.35), 0.009, 0.61).round(3)
    fso2 = np.clip(rng.gamma(3.2, np.where(white, 11, 5)), 1, 289).round()
    tso2 = np.clip(fso2 * rng.uniform(2.2, 4.2, n) + np.where(white, 30, 10), 6, 440).round()
    ph = np.clip(rng.normal(3.21 + 0.1 * ~white, 0.16), 2.7, 4.0).round(2)
    sulph = np.clip(rng.lognormal(np.where(white, -0.75, -0.52), 0.22), 0.22, 2.0).round(2)
    q = (5.82 + 0.42 * (alcohol - 10.5) / 1.2 - 0.55 * (va - 0.34) / 0.16 * 0.35
         + 0.12 * (sulph - 0.5) / 0.15 - 0.10 * (chlor - 0.056) / 0.035
         - 0.05 * (tso2 - 115) / 56 + rng.normal(0, 1.02, n))
    quality = np.clip(np.round(q), 3, 9).astype(int)
    return pd.DataFrame({
        "fixed_acidity": fa, "volatile_acidity": va, "citric_acid": citric,
        "residual_sugar": sugar, "chlorides": chlor, "free_sulfur_dioxide": fso2,
        "total_sulfur_dioxide": tso2, "density": density, "pH": ph,
        "sulphates": sulph, "alcohol": alcohol, "quality": quality,
    })


def make_abalone(seed: int = 4, n: int = 4177) -> pd.DataFrame:
    """Ring count drives a saturating growth curve; measurements share noise."""
    rng = np.random.default_rng(seed)
    rings = np.clip(np.round(rng.gamma(9.0, 1.1, n) + 1), 1, 29).astype(int)
    infant = rng.random(n) < np.clip(0.95 - 0.09 * rings, 0.02, 0.95)
    sex = np.where(infant, "I", np.where(rng.random(n) < 0.52, "M", "F"))
    growth = 1 - np.exp(-0.28 * (rings - 0.5))
    length = np.clip(0.68 * growth * rng.normal(1, 0.055, n), 0.07, 0.82).round(3)
    diameter = np.clip(length * rng.normal(0.78, 0.02, n), 0.05, 0.66).round(3)
    height = np.clip(length * rng.normal(0.265, 0.03, n), 0.0, 0.3).round(3)
    whole = np.clip(10.5 * length ** 2.9 * rng.normal(1, 0.08, n), 0.002, 2.83).round(4)
    shucked = np.clip(whole * rng.normal(np.clip(0.48 - 0.007 * rings, 0.28, 0.48),
                                         0.04, n), 0.001, 1.49).round(4)
    viscera = np.clip(whole * rng.normal(0.22, 0.025, n), 0.0005, 0.76).round(4)
    shell = np.clip(whole * rng.normal(np.clip(0.24 + 0.006 * rings, 0.24, 0.38),
                                       0.028, n), 0.0015, 1.0).round(4)
    return pd.DataFrame({
        "Sex": sex, "Length": length, "Diameter": diameter, "Height": height,
        "WholeWeight": whole, "ShuckedWeight": shucked,
        "VisceraWeight": viscera, "ShellWeight": shell, "Rings": rings,
    })


BUILDERS = {
    "iris": make_iris,
    "wine": make_wine,
    "penguins": make_penguins,
    "heart": make_heart,
    "diabetes": make_diabetes,
    "blood": make_blood,
    "wine_reg": make_wine_reg,
    "abalone": make_abalone,
}


def main() -> None:
    DATA_DIR.mkdir(exist_ok=True)
    for name, build in BUILDERS.items():
        df = build()
        path = DATA_DIR / f"{name}.csv"
        df.to_csv(path, index=False)
        print(f"wrote {path} ({len(df)} rows, {len(df.columns)} cols)")


if __name__ == "__main__":
    main()
