"""
Product-form methods and their corrections
==========================================

With exponential service the exact stationary law is known, and mean
value analysis reproduces it.  The corrected variants (GMVA, ESUM, EBOTT)
use the coefficient of variation of the real service times.
"""

import warnings

from haulcycle import pfa
from haulcycle.netmodel import mining_preset

expo = mining_preset(6, cvs=(1, 1, 1, 1))
exact = [pfa.gn_exact(expo.with_population(K)).idle(K) for K in range(1, 7)]
mva = pfa.mva(expo).report()
print("exponential case: exact vs MVA")
for K, e in enumerate(exact, start=1):
    print(f"  K={K}  {e:.6f}  {mva.idle(K):.6f}")

spec = mining_preset(10)
g = pfa.gmva(spec).report()
print("\nTable 1 service times")
print(" K   MVA    GMVA   ESUM   EBOTT")
m = pfa.mva(spec).report()
with warnings.catch_warnings():
    warnings.simplefilter("ignore")  # K=4 has two bottlenecks, reported in the notes
    for K in range(1, 11):
        sk = spec.with_population(K)
        print(f"{K:2d}  {m.idle(K):.3f}  {g.idle(K):.3f}  {pfa.esum(sk).idle(K):.3f}  {pfa.ebott(sk).idle(K):.3f}")
