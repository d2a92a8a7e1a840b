"""Complete network: the fitted depth-one model is the analytic one.

On a complete network the expected opinion fractions obey a closed quadratic
map, so adding memory should not help. This script simulates 20 realisations,
sweeps memory depths 1..10 and compares the sparse p=1 fit with the analytic
coefficients.

    python demos/complete_network.py [out_dir]
"""
import sys
from pathlib import Path

import numpy as np

from mzopinion import experiments, sinar
from mzopinion.abm import DEFAULT_ALPHA
from mzopinion.macrodynamics import reduce_m3

out = Path(sys.argv[1]) if len(sys.argv) > 1 else Path("demo_output")
out.mkdir(exist_ok=True)

cfg = experiments.case_config("complete")
sweep = experiments.run_sweep(cfg)
sweep.to_csv(out / "complete_sweep.csv")

print("block error (40 steps) by memory depth")
for lam in cfg["lambdas"]:
    p, e = sweep.curve(lam)
    print(f"  lambda={lam:<5g}", " ".join(f"{v:.4f}" for v in e))

model = sweep.get(1, 0.05).model
print("\nsparse p=1 model:")
print(sinar.format_model(model))
print("\nanalytic coefficients (x1, x2, x1^2, x2^2, x1 x2):")
print(np.array2string(reduce_m3(DEFAULT_ALPHA).opinion_matrix(), precision=4))
