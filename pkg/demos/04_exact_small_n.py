from fractions import Fraction

from tracerecon.oracles import l0_avg_exact, optimal_one_trace_exact

# Best fixed guess with no trace at all, and who achieves it
for n in (2, 4, 6, 8):
    value, winners = l0_avg_exact(n)
    print(n, value, float(value / n), [str(w) for w in winners][:4])

# One trace helps, but never by more than the expected trace length
n = 8
l0 = l0_avg_exact(n)[0]
for d in (Fraction(1, 4), Fraction(1, 2), Fraction(3, 4)):
    l1 = optimal_one_trace_exact(n, d)
    rho = 1 - d
    print(f"delta={d}: {float(l0):.4f} <= {float(l1):.4f} <= {float(l0 + rho * n):.4f}")
