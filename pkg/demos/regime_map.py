"""Which regime does a spectrum fall into?

``analyze`` evaluates the three spectral conditions and the upper and lower
bounds on the permanent. For small matrices it also attaches the exact
permanent, which must sit between the bounds.
"""

import math

from permest import analyze, gen_from_spectrum

spectra = {
    "rank one, 0.9": [0.9] + [0.0] * 9,
    "flat, 0.25": [0.25] * 3,
    "flat, 0.5": [0.5] * 4,
    "rank one, 1.2 (C = 1.05)": [1.2] + [0.0] * 9,
    "spread, 0.1..2": [2.0, 1.5, 1.0, 0.5, 0.1],
}

for name, lam in spectra.items():
    c = 1.05 if "1.2" in name else "auto"
    r = analyze(gen_from_spectrum(lam, seed=1), c=c)
    per = r.exact_permanent
    print(f"{name}")
    print(f"  C = {r.c_used:.4f}   a = {r.a:.4f}")
    print(f"  S1 {r.s1.verdict.value:15s} l = {r.s1.l:.4f}")
    print(f"  S2 {r.s2.verdict.value:15s} k = {r.s2.k:.4f}")
    print(f"  S3 {r.s3.verdict.value:15s} ratio = {r.s3.ratio:.4f}")
    print(f"  {math.exp(r.lower_bound):.4g} <= Per = {per:.4g} <= {math.exp(r.upper_bound):.4g}")
