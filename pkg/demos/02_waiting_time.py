"""Waiting times: supports that refuse to move, then jump into motion.

A plateau D0 on B(rho0) glued to the matched tail C0 psi(r) keeps its outer
support edge frozen at R until tau* = rho0 D0^(1-m)/(mp) ((R/rho0)^p - 1):
the plateau eats the tail from inside, and exactly when it arrives at R the
profile turns into a pure plateau with a jump at its edge and starts to
expand self-similarly.
"""

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np

from fluxsat import Params, Tolerances
from fluxsat.exact import WaitingTimeSpec, wt_construct, wt_eval, wt_expansion_radius, wt_mass

params = Params(2.0, 2)
spec = WaitingTimeSpec(D0=1.0, C0=1.0, rho0=1.0, R=4.0)
sol = wt_construct(spec, params, Tolerances())

print(f"p = {params.p}, K = {sol.K} (= 3/7), tau* = {sol.tau_star} (= 7/3)")
print(f"plateau height at tau*: D(tau*) = {sol.D_tau:.10f} (> 0, fixed by mass)")
for t in (0.0, 0.5 * sol.tau_star, 0.99 * sol.tau_star, 2 * sol.tau_star):
    print(f"t = {t:8.4f}: mass = {wt_mass(sol, t):.10f}")

fig, (ax1, ax2) = plt.subplots(1, 2, figsize=(10, 3.6))
ts = sol.tau_star * (1 - np.exp(-np.linspace(0, 8, 300)))
ax1.plot(ts, [sol.rho(t) for t in ts], label="plateau radius rho(t)")
ax1.plot(ts, [sol.D(t) for t in ts], label="plateau height D(t)")
ax1.axhline(spec.R, color="gray", lw=0.6)
ax1.set_title("the plateau eats the tail until tau*")
ax1.legend()

rs = np.linspace(0, 8, 800)
for t in (0.0, 0.9 * sol.tau_star, sol.tau_star, 4 * sol.tau_star):
    ax2.plot(rs, [wt_eval(sol, t, r) for r in rs], label=f"t = {t:.2f}")
ax2.set_title("radial profiles across the waiting time")
ax2.legend()
fig.tight_layout()
fig.savefig("demos_waiting_time.png", dpi=120)
print("wrote demos_waiting_time.png")

# after tau* the support expands at the Rankine-Hugoniot speed of its jump
t = 2 * sol.tau_star
dt = 1e-6
speed = (wt_expansion_radius(sol, t + dt) - wt_expansion_radius(sol, t - dt)) / (2 * dt)
trace = wt_eval(sol, t, 0.0)
print(f"\nfront speed at 2 tau*: {speed:.8f} vs trace^(m-1) = {trace**(params.m-1):.8f}")
