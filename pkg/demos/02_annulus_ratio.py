"""How little mass a solution can keep in the middle of a Euclidean annulus.

For the radial system on t_-2 < t_-1 < t_1 < t_2 the ratio
int_{t_-1}^{t_1} |B|^2 / int_{t_-2}^{t_2} |B|^2 is bounded by
2^6 max{3 (t_1/t_2)^(2mu+1), (t_1/t_-1)(t_-2/t_-1)^(2mu-1)}.
With the schedule t_1 = t_2^4/2, t_-1 = t_1/2, t_-2 = t_-1^4/2 both terms
are astronomically small, so the ratios are handled in log space.
"""
import numpy as np

from diracglue.annulus import corollary1_schedule, direct_log_ratios, max_ratio

sched = corollary1_schedule(2.0 ** -5)
print(f"schedule: t_2={sched.t_2:.3e} t_1={sched.t_1:.3e} "
      f"t_-1={sched.t_m1:.3e} t_-2={sched.t_m2:.3e}")

# the worst anchor direction versus the bound, per mode
for mu in (1.0, 2.0, 3.0, 5.0):
    rep = max_ratio(mu, 0.05, sched)
    print(f"mu={mu:.0f}: worst ratio {rep.measured:.3e} <= bound {rep.bound:.3e} "
          f"(log margin {rep.margin:.2f})")

# the ratio as a function of the anchor angle: one direction dominates
thetas = np.linspace(0, np.pi, 9)
logs = direct_log_ratios(2.0, 0.05, sched, thetas)
print("\nlog10 ratio vs anchor angle (mu=2, lambda=0.05):")
for th, lr in zip(thetas, logs):
    print(f"  theta={th:.3f}: {lr / np.log(10):8.2f}")
