from fractions import Fraction

from tracerecon.oracles import (
    c2_upper_bound,
    cs_table,
    series_bound,
    weak_upper_bound_coefficient,
    worst_case_polynomial,
)

# Expected LCS of two independent uniform strings of lengths j and k
for (j, k), v in cs_table(6).items():
    if j <= k:
        print(f"CS({j},{k}) = {v}")

# The table feeds a truncated power series; every dropped term is positive
d = Fraction(1, 10)
print("series bound at 1/10 (exact):", series_bound(d, 6))
print("as float:", float(series_bound(d, 6)))
print("worst-case polynomial at 0.1:", worst_case_polynomial(0.1))

# Small deletion rates: average case beats the worst case guarantee
for d in (0.01, 0.05, 0.1, 0.2):
    gap = series_bound(d, 8) - worst_case_polynomial(d)
    print(f"delta={d:<5} series={series_bound(d, 8):.6f} worst={worst_case_polynomial(d):.6f} gap={gap:.2e}")

# Entropy-based constants
print("zero-trace ceiling c2 <=", round(c2_upper_bound(), 6))
for d in (1e-4, 1e-3, 1e-2):
    print(f"union-bound balance point at delta={d}: {weak_upper_bound_coefficient(d):.3e}")
