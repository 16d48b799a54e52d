from fractions import Fraction

from tracerecon.decks import (
    deck,
    mixture_deck,
    loglog_schedule,
    solve_mixture,
    verify_deck_equality,
    verify_poly_structure,
)
from tracerecon.strings import make_periodic

# The 2-deck counts every length-2 subsequence
print(deck(make_periodic(3, 12), 2).as_dict())

# Mixtures of periodic strings with the same moment vector b
ell, k = 12, 2
a = solve_mixture(ell, k, [1, 3], [1, Fraction(5, 2)])
b = solve_mixture(ell, k, [2, 3], [1, Fraction(5, 2)])
print("weights", a.p, b.p)
print("decks equal:", mixture_deck(a) == mixture_deck(b))

# Changing one moment breaks the equality
c = solve_mixture(ell, k, [2, 3], [1, 2])
print(verify_deck_equality([a, c]))

# Deck entries are polynomials of degree < k in the period
print(verify_poly_structure(24, 3, "010", [1, 2, 3, 4, 6, 12]))

# Schedule preset at ell = 4096: most of the mass sits on the first period
for r0 in (2, 4, 8):
    periods, bvec, loglog = loglog_schedule(4096, 3, r0)
    mix = solve_mixture(4096, 3, periods, bvec)
    print(r0, periods, [round(float(p), 4) for p in mix.p], "floor", round(float(1 - 2 / loglog), 4))
