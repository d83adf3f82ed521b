"""
Regenerating the comparison tables
==================================

The bundled studies hold the Table 1/2 inputs and the published
simulation row, so the error tables can be rebuilt without simulating.
Add "sim" back to the algorithm list to rerun the simulator as well.
"""

import dataclasses

from haulcycle import study

for name in ("paper_base", "paper_disturbed"):
    cfg = study.bundled_config(name)
    cfg = dataclasses.replace(cfg, algorithms=tuple(a for a in cfg.algorithms if a != "sim"))
    print(study.render_markdown(study.run_study(cfg)))
