"""Rebuild a WDBC-format CSV (id,diagnosis,30 features) from the copy of the
Wisconsin Diagnostic Breast Cancer data shipped with scikit-learn.

scikit-learn keeps the original row order and feature values but drops the
patient IDs, so rows get sequential IDs (1-based). If you have the original
UCI `wdbc.data`, use that instead; the loader accepts either.
"""
import csv
import sys
from pathlib import Path

import sklearn.datasets

src = Path(sklearn.datasets.__file__).parent / "data" / "breast_cancer.csv"
out = Path(sys.argv[1] if len(sys.argv) > 1 else "data/wdbc.csv")

with src.open() as fh, out.open("w", newline="") as dst:
    rows = list(csv.reader(fh))[1:]
    for i, row in enumerate(rows, start=1):
        # sklearn target: 0 = malignant, 1 = benign
        diagnosis = "M" if row[-1] == "0" else "B"
        dst.write(",".join([str(i), diagnosis] + row[:-1]) + "\n")
