#!/usr/bin/env python3
"""Regenerate data/optdigits.csv from the scikit-learn copy of the UCI
Optical Recognition of Handwritten Digits dataset (1797 samples, 8x8
pixels with values 0..16, one digit label per row).

Output format: 65 comma-separated integers per line, the last being the
class label. This matches the row layout of the UCI optdigits files.
"""
import os
import numpy as np
from sklearn.datasets import load_digits

out = os.path.join(os.path.dirname(__file__), "..", "data", "optdigits.csv")
d = load_digits()
rows = np.hstack([d.data.astype(int), d.target.reshape(-1, 1)])
with open(out, "w") as f:
    for row in rows:
        f.write(",".join(str(int(v)) for v in row) + "\n")
print(f"wrote {len(rows)} rows to {out}")
