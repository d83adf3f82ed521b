"""
The haulage cycle as a closed queueing network
==============================================

Four stations in a ring: the shovel loads one truck at a time, trucks
drive loaded to the crusher in parallel, the crusher tips one truck at a
time, and trucks drive back empty in parallel.
"""

import numpy as np

from haulcycle.netmodel import exact_single_customer_idle, mining_preset, solve_traffic

spec = mining_preset(K=1)
for node in spec.nodes:
    print(f"{node.label:14s} {node.kind.value:8s} mean {node.service.mean:4.1f}  sd {node.service.sd:.3f}")

# every truck visits every station once per cycle
print("visit ratios", spec.eta)

# a lone truck is at the shovel 1.5 of every 12.5 minutes
print("idle with one truck", exact_single_customer_idle(spec))

# routing does not have to be a ring; the traffic equations handle any irreducible chain
r = np.array([[0, 1, 0], [0.5, 0, 0.5], [1, 0, 0]])
print("three-node visit ratios", solve_traffic(r))
