"""
The log-det metric bridges rank and atomic norm
===============================================

The sparse metric ln det(T(u) + eps I) + tr(Y^H T(u)^+ Y) interpolates
between the two classical sparse-recovery objectives as eps moves:

* eps -> infinity: after affine renormalization the metric minimum
  approaches 2 sqrt(N) x the atomic norm of Y (a convex penalty),
* eps -> 0: the metric minimum counts atoms; the optimized T(u) keeps
  exactly K signal eigenvalues and the surplus ones are crushed to the
  solver's numerical floor, many orders of magnitude below the signal.

Both limits are demonstrated on one random two-sinusoid instance with
full data.  Large eps is solved directly; small eps uses the halving
schedule (a cold start at tiny eps makes the first reweighting step
hopelessly ill-conditioned).
"""

import numpy as np

import gridless as gl

n, k = 16, 2
rng = np.random.default_rng(41)
mix = gl.draw_mixture(k, 2.0 / n, 1, rng)
y = gl.synthesize(mix, n)
meas = gl.MeasurementSet(gl.SamplingPattern.full(n), y)

anorm = gl.atomic_norm(y)
print(f"two sinusoids, N={n}, atomic norm {anorm:.6f}\n")

# --- large eps: renormalized metric vs atomic norm ---------------------------
print("eps        [M(eps) - N ln eps] sqrt(eps) / (2 sqrt(N))   / atomic norm")
for eps in (1e2, 1e4, 1e6, 1e8):
    cfg = gl.RamConfig(eps0=eps, eps_halving=False, eps_floor=1.0,
                       max_iters=10)
    sol, _ = gl.ram_solve(meas, cfg)
    metric = gl.eval_metric(y, sol.u_star, eps)
    value = (metric - n * np.log(eps)) * np.sqrt(eps) / (2 * np.sqrt(n))
    print(f"{eps:8.0e}   {value:18.6f}                      {value / anorm:10.6f}")

# --- small eps: eigenvalue collapse ------------------------------------------
print(f"\neps        signal eigenvalues (K={k})      largest surplus eigenvalues")
for eps in (1e-2, 1e-3, 1e-4):
    steps = int(np.ceil(np.log2(1.0 / eps))) + 4
    cfg = gl.RamConfig(eps0=1.0, eps_halving=True, eps_floor=eps,
                       max_iters=steps, rel_change_tol=0.0)
    sol, _ = gl.ram_solve(meas, cfg)
    eigs = np.linalg.eigvalsh(gl.toeplitz_lift(sol.u_star))[::-1]
    head = ", ".join(f"{v:8.2e}" for v in eigs[:k])
    tail = ", ".join(f"{v:9.2e}" for v in eigs[k:k + 3])
    print(f"{eps:8.0e}   {head}    {tail}")

print("\nthe leading two eigenvalues carry the signal; the surplus ones sit")
print("at the first-order solver's accuracy floor (~1e-9 here), some ten")
print("orders of magnitude below the signal -- numerically rank K")
