"""
Two different measures, one image
=================================

The resolution limits are sharp: at separations of the order they predict
there are measures with different numbers of atoms, or with disjoint
supports, whose images differ by less than the noise.
"""

from reslimit import SamplingGrid, construct_number_ambiguity, construct_support_ambiguity

grid = SamplingGrid(100.0, 2.0)

pair = construct_number_ambiguity(2, 1e-4, 2.0, grid)
print("target", pair.target.positions, pair.target.amplitudes)
print("decoy ", pair.decoy.positions, pair.decoy.amplitudes)
print(f"separation {pair.target.min_separation:.4f}, image distance {pair.image_distance:.2e} <= 1e-4")

print()
for n in (2, 3, 4):
    for sigma in (1e-3, 1e-5):
        p = construct_number_ambiguity(n, sigma, 1.0, grid)
        q = construct_support_ambiguity(n, sigma, 1.0, grid)
        print(f"n={n} sigma={sigma:.0e}  number pair sep {p.target.min_separation:.4f} "
              f"(dist/sigma {p.image_distance / sigma:.3f})  support pair sep {q.target.min_separation:.4f}")
