"""
Level-I risk landscape from multiparametric costs
=================================================

Error rates are swept over thresholds per menagerie category, then priced
with the false-negative and false-positive costs. Goats and worms carry
the miss cost; wolves/lambs and worms carry the false-alarm cost.
"""

import numpy as np

from watchrisk import CostParams, ThresholdGrid, category_costs, categorize, generate, benchmark_spec, sweep
from watchrisk.cost import risk_coefficient

pop, _ = generate(benchmark_spec(seed=7, separation=1.5, worms=True))
assign = categorize(pop)

# a miss costs ten false alarms and one comparison in ten is genuine
params = CostParams(c_fn=10.0, c_fp=1.0, p_g=0.1)
print("Risk(T) = FNR(T) + %s x FPR(T)" % risk_coefficient(params))

grid = ThresholdGrid((10.0, 50.0, 100.0))
rates = sweep(pop, assign, grid)
entries = category_costs(rates, params)

# the four columns that are not zero by construction
columns = [("goat", "cost_g_units"), ("worm", "cost_g_units"), ("wolf_lamb", "cost_i_units"), ("worm", "cost_i_units")]
print(f"{'T':>5}  {'FN goat':>10} {'FN worm':>10} {'FP wolf':>10} {'FP worm':>10}   (x C_FN / x C_FP)")
for t in grid:
    cells = []
    for cat, attr in columns:
        e = next(e for e in entries if e.category.value == cat and e.threshold == t)
        cells.append(getattr(e, attr))
    print(f"{t:5.0f}  " + " ".join(f"{c:10.3e}" for c in cells))

# finer sweep: misses rise and false alarms fall as the threshold moves up
fine = ThresholdGrid.uniform(0, 100, 11)
r = sweep(pop, assign, fine)
print("\npooled FNR:", np.round(r.fnr("all"), 3))
print("pooled FPR:", np.round(r.fpr("all"), 3))
