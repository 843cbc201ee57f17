"""
Pricing models
==============

Node prices are a weighted sum of capacities raised to an exponent. With
exponent below one large machines are cheaper per unit, above one they are
dearer. The sweep shows how the gap between PenMap and LPMapF moves.
"""
from rightsize.bench import evaluate, summarize
from rightsize.costs import CostParams, GenSpec, generate_synthetic

print("exponent   PenMap   LPMapF")
for exponent in (0.5, 1.0, 2.0):
    rows = []
    for seed in range(2):
        params = CostParams.heterogeneous(5, exponent=exponent, seed=seed)
        inst = generate_synthetic(GenSpec(n=400, cost_params=params, seed=seed))
        rows += evaluate(inst, ["PenMap", "LPMapF"], f"e={exponent}", seed)
    means = {alg: v for (_, alg), v in summarize(rows).items()}
    print(f"{exponent:8.1f}   {means['PenMap']:.3f}    {means['LPMapF']:.3f}")
