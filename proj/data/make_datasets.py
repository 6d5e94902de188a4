"""Regenerates the bundled regression CSVs from locally installed packages.

diabetes.csv  - sklearn Diabetes (442 x 10, raw units)
star98.csv    - statsmodels star98 base covariates, target = NABOVE / (NABOVE + NBELOW)
fair1000.csv  - first 1000 rows of statsmodels fair, target = affairs
"""
from pathlib import Path

import statsmodels.api as sm
from sklearn.datasets import load_diabetes

here = Path(__file__).parent

d = load_diabetes(scaled=False, as_frame=True).frame
d.to_csv(here / "diabetes.csv", index=False, float_format="%.10g")

s = sm.datasets.star98.load_pandas().data
base = ["LOWINC", "PERASIAN", "PERBLACK", "PERHISP", "PERMINTE", "AVYRSEXP",
        "AVSALK", "PERSPENK", "PTRATIO", "PCTAF", "PCTCHRT", "PCTYRRND"]
out = s[base].copy()
out["target"] = s["NABOVE"] / (s["NABOVE"] + s["NBELOW"])
out.to_csv(here / "star98.csv", index=False, float_format="%.10g")

f = sm.datasets.fair.load_pandas().data.head(1000)
f.to_csv(here / "fair1000.csv", index=False, float_format="%.10g")
