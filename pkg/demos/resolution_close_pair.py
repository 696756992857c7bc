"""
Super-resolving a close frequency pair
======================================

Two unit-power sinusoids sit half a resolution cell apart (0.5/N).  From a
random 30-of-64 sample the plain atomic-norm solver returns a single merged
component: the convex penalty trades frequency splitting for amplitude
spreading once the pair is closer than about 1/N.  The reweighted solver
sharpens the penalty around the current estimate and pulls the pair apart.

Run time is a couple of minutes on one core; no plotting, the story is in
the printed tables.
"""

import numpy as np

import gridless as gl

n, m = 64, 30
sep = 0.5 / n
f_true = np.array([0.3, 0.3 + sep])

rng = np.random.default_rng(7)
phases = np.exp(2j * np.pi * rng.uniform(size=2))
mix = gl.FrequencyMixture(f_true, phases[:, None])

# a fixed random sparse sample of the 64 rows
omega = np.sort(rng.choice(n, size=m, replace=False)) + 1
pattern = gl.SamplingPattern(omega, n)
y_obs = gl.subsample(gl.synthesize(mix, n), pattern)
meas = gl.MeasurementSet(pattern, y_obs)  # noiseless: equality domain

print(f"true frequencies: {f_true[0]:.6f}, {f_true[1]:.6f}"
      f"  (separation {sep:.6f} = 0.5/N)")
print(f"observed rows: {m} of {n}\n")

# --- plain atomic norm -----------------------------------------------------
sol = gl.anm_solve(meas)
k_hat = gl.numerical_rank(gl.toeplitz_lift(sol.u_star), 1e-3)
anm_spec = gl.vandermonde_decompose(sol.u_star, k_hat, 1.0)
strong = anm_spec.powers >= 0.01 * anm_spec.powers.max()
print("atomic-norm minimization:")
print(f"  detected order {anm_spec.order}; components above 1% of the"
      " strongest:")
for f, p in zip(anm_spec.freqs[strong], anm_spec.powers[strong]):
    print(f"  f = {f:.6f}   power = {p:.4f}")
print(f"  ... plus {int((~strong).sum())} residual components --- the"
      " convex penalty smears the sub-1/N pair into displaced lobes")

# --- reweighted atomic norm ------------------------------------------------
sol, trace = gl.ram_solve(meas, gl.RamConfig(max_iters=12))
print("\nreweighted iterations (eps halves until 2^-10):")
print("   j      eps      sparse metric   rel. change")
for r in trace.records:
    print(f"  {r.j:2d}   {r.eps:8.2e}   {r.objective_metric:13.4f}"
          f"   {r.rel_change:.2e}")

k_hat = gl.numerical_rank(gl.toeplitz_lift(sol.u_star), 1e-6)
ram_spec = gl.vandermonde_decompose(sol.u_star, k_hat, 1.0)
print("\nreweighted atomic-norm minimization:")
print(f"  detected order {ram_spec.order}")
for f, p in zip(ram_spec.freqs, ram_spec.powers):
    err = float(gl.wrap_distance(f_true, f).min())
    print(f"  f = {f:.6f}   power = {p:.4f}   nearest-truth error {err:.2e}")
