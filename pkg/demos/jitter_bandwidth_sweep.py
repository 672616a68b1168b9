#!/usr/bin/env python3
"""
Sweeps antenna jitter variance and link bandwidth and reports how many
rounds training needs in each cell.

All cells share their Monte Carlo draws (common random numbers), so a trend
in the table is a real effect of the swept parameter rather than sampling
noise between cells.
"""
MC_RUNS = 20
SIGMA2 = (0.01, 0.05, 0.1, 0.2)
BW = (1e6, 2e6, 5e6)

from swarmfl.experiments import experiment_sweep_sigma
from swarmfl.scenario import SwarmScenario

scenario = SwarmScenario().require_valid()
result = experiment_sweep_sigma(scenario, sigma2_list=SIGMA2, bw_list=BW, mc_runs=MC_RUNS)
cell = {(row["sigma2"], row["bandwidth"]): row for row in result.rows}

print(f"simulated mean rounds to a 10% loss target ({MC_RUNS} runs per cell)")
print()
header = "jitter var " + "".join(f"   {bw / 1e6:3.0f} MHz" for bw in BW)
print(header)
for sg in SIGMA2:
    cells = "".join(f"   {cell[(sg, bw)]['empirical_mean']:7.2f}" for bw in BW)
    print(f"  {sg:5.2f}    {cells}")

print()
print("predicted rounds for the same grid")
for sg in SIGMA2:
    cells = "".join(f"   {cell[(sg, bw)]['predicted_round']:7d}" for bw in BW)
    print(f"  {sg:5.2f}    {cells}")

print()
print("wobblier antennas miss the main lobe more often and cost rounds;")
print("more bandwidth shortens packets and buys them back.")
