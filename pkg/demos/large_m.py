"""Estimates for matrices far beyond exact reach.

Ryser's formula needs about 2^M M operations; at M = 60 it is hopeless.
The sampler costs O(M^2) per draw and keeps every quantity as a logarithm,
so the permanent of a 60 x 60 matrix in the S1 regime comes back as a
log-value with a certified additive error.

The guarantee is additive. Here the certified error (about e^-60) exceeds
the permanent itself, so the run proves Per <= e^-60 or so. Gurvits' bound
at the same (eps, delta) is e^-8.6, which says far less.
"""

import math

from permest import ErrorMode, analyze, estimate_permanent, gen_from_spectrum

m = 60
mat = gen_from_spectrum([0.9] + [0.0] * (m - 1), seed=3)
report = analyze(mat)
print(f"S1 {report.s1.verdict.value}, l = {report.s1.l:.4f}")

r = estimate_permanent(mat, ErrorMode.gurvits_beating(0.1), delta=0.05, seed=0, workers=4)
print(f"N = {r.n_samples}")
print(f"ln Per estimate      = {r.log_estimate:.3f}")
print(f"ln error bound       = {r.log_error_bound:.3f}")
print(f"ln Gurvits' bound    = {math.log(0.1) + m * math.log(0.9):.3f}")
print(f"ln upper bound       = {report.upper_bound:.3f}")
