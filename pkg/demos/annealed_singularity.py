"""How fast does the annealed free energy vanish at the critical point?

At b = s the deterministic recursion r -> (r**s + b - 1) / b has a neutral
fixed point at r = 1. Starting just above it, at r_0 = 1 + eps, the orbit
crawls for about 2 / ((s - 1) eps) levels before it takes off, and every one
of those levels divides the eventual free energy by s. The result is an
essential singularity: -log F grows like 1/eps rather than like log(1/eps).

This script fits that slope and compares it with 2 log(s) / (s - 1), then
contrasts the s > b case, where the transition is an ordinary power law.
"""

import math

import numpy as np

from hierpin import ModelParams, annealed_free_energy
from hierpin.annealed import fit_power_law, fit_singularity, singularity_constant


def main():
    params = ModelParams(2, 2)
    print("F(0, h) at b = s = 2")
    for h in (1.0, 0.5, 0.25, 0.1, 0.05):
        fe = annealed_free_energy(params.with_h(h))
        print(f"  h = {h:<5}  F = {fe.value:.6e}   levels used: {fe.levels_used}")

    grid = np.linspace(0.03, 0.15, 13)
    slope, intercept, resid = fit_singularity(params, grid)
    print(f"\n-log F against 1/eps: slope {slope:.4f}, predicted {2 * math.log(2):.4f}")
    print(f"  (intercept {intercept:.3f}, worst relative residual {resid:.1e})")

    c = singularity_constant(params, np.linspace(0.05, 0.5, 10))
    print(f"smallest c with exp(-c/h)/c <= F <= c exp(-1/(c h)) on [0.05, 0.5]: {c:.4f}")

    # with more bonds per branch than branches the walk is pulled to the wall
    # polynomially, and log F / log h tends to log s / (log s - log b)
    slope, _ = fit_power_law(ModelParams(2, 3), np.geomspace(1e-4, 1e-2, 9))
    target = math.log(3) / (math.log(3) - math.log(2))
    print(f"\nb = 2, s = 3: log-log slope {slope:.4f}, predicted {target:.4f}")


if __name__ == "__main__":
    main()
