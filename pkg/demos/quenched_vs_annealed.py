"""Quenched free energy by population dynamics, next to its annealed bound.

The pool holds M samples of log R_N; each new level combines s parents drawn
with replacement. Jensen's inequality says the quenched value can never beat
the annealed one, and the gap measures how much the disorder costs.

The single-run standard error treats the pool entries as independent. They
are not: resampling makes lineages share ancestors. The replica estimate at
the end shows the honest size of the Monte Carlo error.
"""

from hierpin import ModelParams, StandardGaussian
from hierpin.annealed import annealed_partial
from hierpin.population import quenched_free_energy, replicated_free_energy

POOL = 100_000
LEVELS = 25


def main():
    law = StandardGaussian()
    print(f"b = s = 2, Gaussian disorder, M = {POOL}, N = {LEVELS}\n")
    print(f"{'beta':>5} {'h':>5} {'quenched':>12} {'pool se':>10} {'annealed':>12}")
    for beta in (0.0, 0.5, 1.0):
        for h in (0.25, 0.5, 1.0):
            params = ModelParams(2, 2, beta=beta, h=h)
            est = quenched_free_energy(params, law, POOL, LEVELS, seed=7, workers=4)
            ann = annealed_partial(params, LEVELS)
            print(f"{beta:5.2f} {h:5.2f} {est.mean:12.6f} {est.std_err:10.1e} {ann:12.6f}")

    params = ModelParams(2, 2, beta=1.0, h=0.5)
    rep = replicated_free_energy(params, law, POOL, LEVELS, seed=7, replicas=8, workers=4)
    print(f"\nbeta = 1, h = 0.5 over 8 independent pools: {rep.mean:.5f} +/- {rep.std_err:.1e}")


if __name__ == "__main__":
    main()
