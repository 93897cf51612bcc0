"""
Vandermonde bounds against brute force
======================================

The separation bounds rest on lower bounds for how well k nodes can
reproduce the moments of a different set.  Here the closed forms are
compared with direct numerical minimisation on a few small cases.
"""

import numpy as np

from reslimit import vandermonde as vm

rng = np.random.default_rng(0)

print("k  d_min   eta bound  eta oracle")
for k in (1, 2, 3):
    nodes = np.sort(rng.uniform(-1, 1, k + 1))
    dmin = vm.min_separation(nodes)
    bound = vm.eta_lower_bound(k, dmin)
    oracle = vm.min_eta_oracle(nodes)
    print(f"{k}  {dmin:.3f}   {bound:.3e}  {oracle:.3e}")

# the last row of the reduced Vandermonde matrix is the elementary symmetric polynomials
nodes = np.array([1.0, 2.0])
print()
print("reduction last row for nodes", nodes, "->", vm.reduce_vandermonde(nodes).last_row)

# inverse-norm and singular-value chains on a clustered set
nodes = np.array([-0.6, -0.5, 0.1, 0.2, 0.8])
bd = vm.min_singular_bound(nodes, 7)
print(f"sigma_min exact {bd.exact:.3e} >= bound {bd.lower_bound:.3e}")
