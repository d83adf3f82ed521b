"""
The deterministic cycle
=======================

With every duration fixed at its mean, the shovel either stops queueing
trucks after one round (K * 1.5 <= 12.5) or settles into a constant wait.
"""

import numpy as np

from haulcycle.flow import flow_closed_form, flow_trajectory

means = (1.5, 6.0, 1.0, 4.0)
for K in (3, 8, 9, 10):
    t = flow_trajectory(means, K)
    c = flow_closed_form(means, K)
    print(f"K={K:2d} {t.regime:9s} waits {np.round(t.V[:K + 3], 2)}")
    print(f"      long-run idle {t.report.idle1:.4f} (closed form {c.idle1:.4f}), wait {c.vbar1}")
