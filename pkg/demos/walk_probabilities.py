"""Wall-avoidance probabilities of the uniform walk on the diamond lattice.

q_n is the chance that a walk crosses a level-n diamond without touching the
wall. It obeys q_{n+1} = (q_n**s + s - 1) / s from q_0 = 0 and creeps up to 1
like 1 - 2 / ((s - 1) n). Small lattices are enumerated outright to check
the recursion, including the crossing probability through a single wall
sub-diamond, which carries a factor b**-(n - k) on top of the product of q's.
"""

import math

from hierpin.lattice import build_lattice, enumerate_crossing_probability, enumerate_escape_probability
from hierpin.walks import build_q_table, p_kn, path_count


def main():
    tables = build_q_table(2, 10**5)
    print("s = 2:", ", ".join(f"q_{n} = {tables.q[n]:.7g}" for n in range(4)))
    for n in (10, 100, 1000, 10**5):
        print(f"  n = {n:>6}: n (1 - q_n) = {n * (1 - tables.q[n]):.5f}")

    print("\nenumeration on small lattices")
    for b, s, n in [(2, 2, 3), (3, 2, 2), (2, 3, 2)]:
        lat = build_lattice(b, s, n)
        exact, _ = path_count(b, s, n)
        esc = enumerate_escape_probability(lat)
        q = build_q_table(s, n, b).q[n]
        print(f"  b={b} s={s} n={n}: {len(lat.paths)} paths (count {exact}), escape {esc:.7f} vs q {q:.7f}")

    lat = build_lattice(2, 2, 3)
    k = 1
    crossing = enumerate_crossing_probability(lat, k, 1)
    product = math.exp(p_kn(build_q_table(2, 3), k, 3))
    print(f"\ncrossing one level-1 wall block of a level-3 diamond: {crossing:.6f}")
    print(f"  product of q's alone {product:.6f}, times 2**-(3 - 1): {product / 4:.6f}")


if __name__ == "__main__":
    main()
