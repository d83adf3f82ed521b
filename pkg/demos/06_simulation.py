"""
Simulating the cycle
====================

A discrete-event run with normal service times (negative draws cut to
zero).  With breakdowns the shovel is held for the whole repair.  Short
horizons here; the published comparison uses 10^6 minutes per K.
"""

from haulcycle.moments import TABLE2
from haulcycle.netmodel import mining_preset
from haulcycle.simcycle import SimConfig, sweep
from haulcycle.stst import stst, stst_m

base = sweep(SimConfig(mining_preset(), horizon=1e5, seed=1), 1, 10)
dist = sweep(SimConfig(mining_preset(), TABLE2, horizon=1e5, seed=1), 1, 10)
print(" K   sim    ST&ST   | sim with breakdowns  ST&ST-m")
for b, d in zip(base, dist):
    spec = mining_preset(b.K)
    print(f"{b.K:2d}  {b.idle1:.3f}  {stst(spec).idle1:.3f}   | {d.idle1:.3f}                {stst_m(spec, TABLE2):.3f}")

r = base[4]
print("\nK=5 mean number at each station", r.mean_queue.round(3), "sum", r.mean_queue.sum().round(6))
