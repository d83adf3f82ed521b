"""
Shovel idle time from the two-stage reduction
=============================================

Everything away from the shovel is lumped into one backcycle time.  The
time a truck returns after the shovel frees up is taken to be normal, and
its mean solves a one-dimensional fixed point.
"""

from haulcycle.moments import TABLE2
from haulcycle.netmodel import mining_preset
from haulcycle.stst import stst, stst_m

print(" K   idle   muW      sigmaW   idle with breakdowns")
for K in range(1, 11):
    spec = mining_preset(K)
    r = stst(spec)
    print(f"{K:2d}  {r.idle1:.3f}  {r.fixed_point.muW:8.3f}  {r.fixed_point.sigmaW:.3f}    "
          f"{stst_m(spec, TABLE2):.3f}")
