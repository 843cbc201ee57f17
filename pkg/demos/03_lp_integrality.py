"""
How fractional is the mapping LP?
=================================

A vertex of the LP has at most n + m*T'*D fractional coordinates, so most
tasks end up wholly assigned to one node-type. We solve with the dual simplex,
certify the vertex numerically and print a histogram of each task's largest
LP weight.
"""
import numpy as np

from rightsize.costs import GenSpec, generate_synthetic
from rightsize.lp import build_lp, fractionality_report, solve_lp
from rightsize.model import trim_timeline

inst, _ = trim_timeline(generate_synthetic(GenSpec(seed=0)))
model = build_lp(inst)
print(f"{model.num_vars} variables, {model.A_eq.shape[0]} assignment rows, {model.num_load_rows} load rows")

lp = solve_lp(model, certify_vertex=True)
rep = fractionality_report(lp)
print(f"objective {lp.objective_value:.4f}, vertex certified: {lp.basic}")
for line in rep.lines():
    print(line)

edges = np.round(rep.bin_edges, 1)
for lo, hi, count in zip(edges[:-1], edges[1:], rep.histogram):
    print(f"  x_max in [{lo:.1f}, {hi:.1f})  {'#' * min(50, count // 20)} {count}")
