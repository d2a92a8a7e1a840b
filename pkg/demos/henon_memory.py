"""Extended Hénon map seen through x alone.

The hidden coordinate y leaves a geometric tail of memory terms b c^(j-1).
Least squares recovers those to rounding error once p covers the tail, yet
80-step forecasts stay limited by chaos. The attractor, compared through
2-D delay embeddings, is recovered from p of about 5 on.

    python demos/henon_memory.py [out_dir]
"""
import sys
from pathlib import Path

from mzopinion import henon

out = Path(sys.argv[1]) if len(sys.argv) > 1 else Path("demo_output")
out.mkdir(exist_ok=True)

for c in (0.3, 0.03):
    params = henon.HenonParams(c=c)
    print(f"c = {c}")
    print("   p  coef err   80-step err  Hausdorff")
    cells = henon.henon_recovery_experiment(params, [1, 2, 5, 8, 10, 20, 30])
    for cell in cells:
        print(f"  {cell.p:2d}  {cell.coefficient_error:9.2e}  {cell.validation_error:11.3g}"
              f"  {cell.hausdorff:9.4f}")

# the true attractor, for external plotting
x, _ = henon.simulate_henon(henon.HenonParams(), 4000)
henon.save_attractor_csv(henon.delay_embed(x[1000:], 2), out / "henon_attractor.csv")
