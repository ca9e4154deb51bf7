"""Measuring the mixing time and its a^2 scaling.

t_mix is the first step at which the exact evolved distribution from the
worst natural start, the corner (0, 0), is within TV distance 1/4 of the
discretized target.  Because the chain must diffuse along a band of
width ~1/a to cross the square, t_mix grows like a^2: doubling a
quadruples the mixing time.  The worst-case pair distance dbar gives the
standard submultiplicativity argument upgrading "mixed at one time" to
geometric decay afterwards.
"""

from diagonal_gibbs import (
    ModelParams,
    find_mixing_time,
    worst_case_distance_d,
    worst_case_distance_dbar,
)

n = 300
print(f"mixing times on the {n} x {n} grid (eps = 0.25, start (0, 0)):")
print(f"  {'a':>6}  {'t_mix':>7}  {'t_mix / a^2':>11}")
for a in (5.0, 10.0, 25.0):
    result = find_mixing_time((0.0, 0.0), 0.25, ModelParams(a), n, 100_000)
    print(f"  {a:6.1f}  {result.t_mix:7d}  {result.t_mix / a**2:11.4f}")
print("the normalized column is flat: the a^2 law.")
print()

# ----------------------------------------------------------------------
# the TV curve behind one of those numbers
# ----------------------------------------------------------------------
result = find_mixing_time((0.0, 0.0), 0.25, ModelParams(10.0), n, 100_000)
curve = result.tv_curve
print(f"a = 10: t_mix = {result.t_mix}; TV curve checkpoints:")
for t in (0, result.t_mix // 4, result.t_mix // 2, result.t_mix):
    print(f"  t = {t:3d}: TV = {curve[t]:.4f}")
print()

# ----------------------------------------------------------------------
# worst-case distances: d(t) <= dbar(t) <= 2 d(t), and dbar is
# submultiplicative, so one mixed time implies geometric decay
# ----------------------------------------------------------------------
params = ModelParams(10.0)
n1 = 100
s = t = 60
d = worst_case_distance_d(t, params, n1)
dbar_s, dbar_t, dbar_st = worst_case_distance_dbar(s, t, params, n1)
print(f"one-coordinate kernel on {n1} cells at a = 10, t = {t}:")
print(f"  d({t}) = {d:.4f}, dbar({t}) = {dbar_t:.4f}  (sandwich d <= dbar <= 2d)")
print(f"  dbar({s + t}) = {dbar_st:.6f} <= dbar({s}) * dbar({t}) = {dbar_s * dbar_t:.6f}")
