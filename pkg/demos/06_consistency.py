"""
Consistency ladder
==================

Replicated R_hat along growing windows at a fixed bandwidth; the scaled
variance b |W| Var should settle near its asymptotic constant.
"""

# %%
from pairpot.config import parse_config
from pairpot.harness import run_consistency_experiment

cfg = parse_config("""
[model]
kind = poisson
beta = 0.5
range = 1.0

[window]
sides = 10 15 20

[bandwidth]
values = 0.2

[experiment]
r = 0.5
replicates = 200
seed = 11
""")

rep = run_consistency_experiment(cfg)
print("target:", rep.target_source)
for s in rep.rungs:
    print(f"side {s.side:5.1f}  mean {s.mean:.5f}  bias {s.bias:+.5f}  "
          f"scaled var {s.scaled_variance:.5f}  / constant {s.variance_ratio:.3f}")
print("slopes:", rep.slopes[0.5])
