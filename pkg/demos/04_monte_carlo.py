"""
Desk-scale Monte Carlo comparison
=================================

Ten trials at n = 256, 5% sampling, noise 1e-3, IST-D with maxt = 200.
The results table goes to results.csv; pass a number to change the worker
count (default 4).
"""

import sys

from symnus import MonteCarloConfig, run_monte_carlo, summarize, write_results_csv

workers = int(sys.argv[1]) if len(sys.argv) > 1 else 4
cfg = MonteCarloConfig(trials=10, n=256, nus_rates=(0.05,), noise_sigmas=(1e-3,), workers=workers)
rows = run_monte_carlo(cfg, progress=lambda t: print(f"trial {t + 1}/{cfg.trials}", file=sys.stderr))
write_results_csv(rows, "results.csv")

print(f"{'schedule':9s} {'class':5s} {'mean RLNE':>9s} {'std':>7s}")
for (kind, rate, sigma, cls), (mean, std, cnt) in sorted(summarize(rows).items(), key=lambda kv: -kv[1][0]):
    print(f"{kind:9s} {cls:5s} {mean:9.4f} {std:7.4f}")
