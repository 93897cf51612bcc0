"""
How close can two sources be?
=============================

Given the noise level, the support radius and a total-variation budget,
s* is the number of multipole orders that survive the noise.  From s* and
the stability of the multipole matrix come two separation scales: below the
first, a measure with fewer atoms can explain the data; above the second,
every admissible reconstruction puts its atoms close to the true ones.
"""

import math

from reslimit import ProblemPriors, SamplingGrid, compute_s_star, limit_report

grid = SamplingGrid(100.0, 2.0)

for d, sigma, M in [(1.0, 5.8e-5, 2.0), (0.5, 7.1e-6, 3.0), (0.5, 1.38e-9, 4.0)]:
    priors = ProblemPriors(d, sigma, M)
    rep = limit_report(priors, 2, 1.0, grid)
    print(f"d={d}, sigma={sigma:g}, M={M}: s*={rep.s_star}")
    print(f"   number bound      {rep.number_upper_bound:.4f}")
    print(f"   stable separation {rep.stability_separation:.4f}  (SRF {rep.srf:.2f})")

# halving the noise buys a lot less than half the separation
print()
for sigma in (1e-2, 1e-4, 1e-6, 1e-8):
    rep = limit_report(ProblemPriors(1.0, sigma, 2.0), 2, 1.0, grid)
    print(f"sigma={sigma:.0e}  s*={rep.s_star:2d}  number bound {rep.number_upper_bound:.4f}  "
          f"Rayleigh fraction {rep.number_upper_bound / math.pi:.3f}")
