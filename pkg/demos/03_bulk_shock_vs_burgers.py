"""A bulk shock that forms, travels, and heals - unlike its Burgers twin.

On monotone regions the equation reduces to a scalar conservation law, so a
steep decreasing ramp breaks at t = 1/2 exactly as it would for Burgers.
But the plateau is nonlocal here: conserving mass forces it to sink while it
spreads, so the bulk jump loses height and vanishes at a finite time t*,
while the Burgers comparator keeps its plateau at 2 and carries the shock
forever.
"""

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np

from fluxsat import Tolerances
from fluxsat.exact import (
    burgers_example_eval,
    burgers_shock_position,
    example82_eval,
    example82_solve,
)

sol = example82_solve(Tolerances())
print(f"bulk jump closes at t* = {sol.t_star:.10f} with r* = {sol.r_star:.10f}")
print(f"consistency: r*^2 - (28 t* - 17) = {sol.r_star**2 - (28*sol.t_star - 17):.2e}")
print(f"Burgers keeps its shock until the fan is absorbed at t = 11/4 = 2.75,")
print(f"then runs it at constant speed 2 (position at t=3: {burgers_shock_position(3.0)})")

xs = np.linspace(0, 12, 1200)
fig, axes = plt.subplots(1, 3, figsize=(13, 3.4), sharey=True)
for ax, t in zip(axes, (0.5, sol.t_star, 3.5)):
    ax.plot(xs, [example82_eval(sol, t, x) for x in xs], label="flux-saturated")
    ax.plot(xs, [burgers_example_eval(t, x) for x in xs], "--", label="Burgers")
    ax.set_title(f"t = {t:.3f}")
axes[0].legend()
fig.tight_layout()
fig.savefig("demos_bulk_shock.png", dpi=120)
print("wrote demos_bulk_shock.png")

print("\nplateau heights (u sinks, v does not):")
for t in (0.5, 1.0, 2.0, 3.0, 3.5):
    print(f"  t = {t}: u(0) = {example82_eval(sol, t, 0.0):.6f}, "
          f"v(0) = {burgers_example_eval(t, 0.0):.1f}")
