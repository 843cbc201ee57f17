"""
Synthetic benchmark at the default generator settings
=====================================================

1000 tasks, 10 node-types, 5 resource dimensions, 24 timeslots. Every preset
is normalized by the LP lowerbound of the same instance. Pass a seed count as
the first argument (default 2) and optionally a CSV path as the second.
"""
import sys

from rightsize.bench import evaluate, summarize, write_csv
from rightsize.costs import GenSpec, generate_synthetic

n_seeds = int(sys.argv[1]) if len(sys.argv) > 1 else 2
rows = []
for seed in range(n_seeds):
    inst = generate_synthetic(GenSpec(seed=seed))
    rows += evaluate(inst, ["PenMap", "PenMapF", "LPMap", "LPMapF"], "defaults", seed)
    for r in rows[-4:]:
        print(f"seed {seed}  {r.algorithm:8s} cost {r.cost:8.3f}  lb {r.lowerbound:8.3f}  "
              f"ratio {r.normalized_cost:.3f}  {r.wall_time:7.0f} ms")

print()
for (_, alg), mean in summarize(rows).items():
    print(f"mean normalized {alg:8s} {mean:.4f}")

if len(sys.argv) > 2:
    write_csv(rows, sys.argv[2])
