"""Print the security-attribute matrix and the per-phase operation counts.

    python3 demos/matrix_and_cost.py [seed]
"""

import sys

from authlab.cost import cost_report, render_cost
from authlab.harness.matrix import attack_matrix

seed = int(sys.argv[1]) if len(sys.argv) > 1 else 0
result = attack_matrix(seed)
print(result.render())
for row in result.rows:
    for scheme, rep in row.reports.items():
        if rep is not None and rep.succeeded:
            print(f"{scheme:<9}{row.spec.attribute:<40}{rep.evidence}")
print()
print(render_cost(cost_report("test-512", seed)))
