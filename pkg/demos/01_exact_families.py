"""Closed-form solution families: the expanding plateau and its envelope.

The model equation transports mass with a flux bounded by u^m, so compactly
supported data stay compactly supported.  The source-type solution is a flat
plateau on a growing ball: height r(t)^-N and radius r(t) = ((t0+t)/alpha)^alpha.
Every front moves exactly at the Rankine-Hugoniot speed of its jump.
"""

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np

from fluxsat import Params
from fluxsat.exact import (
    SelfSimilarSpec,
    barrier_eval,
    fsp_radius,
    self_similar_eval,
    self_similar_radius,
)

params = Params(2.0, 1)
spec = SelfSimilarSpec()  # X = T = 1, t0 = 1

print(f"m = {params.m}, N = {params.dim}: alpha = {params.alpha}, p = {params.p}")
print(f"initial plateau: height {self_similar_eval(spec, params, 0, 0):.6f} "
      f"on |x| < {self_similar_radius(spec, params, 0):.6f}")

xs = np.linspace(-4, 4, 1001)
fig, (ax1, ax2) = plt.subplots(1, 2, figsize=(10, 3.6))
for t in (0.0, 0.5, 1.0, 3.0):
    u = [self_similar_eval(spec, params, t, x) for x in xs]
    ax1.plot(xs, u, label=f"t = {t}")
    mass = self_similar_eval(spec, params, t, 0) * 2 * self_similar_radius(spec, params, t)
    print(f"t = {t}: radius {self_similar_radius(spec, params, t):.4f}, mass {mass:.12f}")
ax1.set_title("expanding plateau (mass 2 forever)")
ax1.legend()

# finite speed of propagation: any datum inside B(0, R) stays inside the
# envelope R (1 + t/alpha)^alpha
ts = np.linspace(0, 3, 200)
ax2.plot(ts, [self_similar_radius(spec, params, t) for t in ts], label="plateau radius")
ax2.plot(ts, [fsp_radius(np.sqrt(2.0), t, params) for t in ts], "--",
         label="propagation envelope")
ax2.set_title("support vs envelope")
ax2.legend()
fig.tight_layout()
fig.savefig("demos_exact_families.png", dpi=120)
print("wrote demos_exact_families.png")

# the separable barrier that controls waiting times: it blows up at tau and
# dominates any datum below it
print("\nbarrier at x = 1:",
      [round(barrier_eval(1.0, params, t, 1.0), 4) for t in (0.0, 0.25, 0.45)])
