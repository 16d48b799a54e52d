import numpy as np

from tracerecon import BitString, delete_direct, lcs_length
from tracerecon.reconstruct import get_reconstructor, SCALED_PARAMS

rng = np.random.default_rng(7)

# A source string and one trace through the deletion channel
n = 5000
x = BitString.random(n, rng)
trace = delete_direct(x, 0.1, rng)
print("source length", n, "trace length", len(trace.y))
print("retained positions start with", trace.retained[:8])

# Every reconstructor takes (trace, n, delta, rng, params) and returns a Hypothesis
for name in ("zero-alt", "zero-bukhcox", "cover", "small-rate"):
    algo = get_reconstructor(name)
    hyp = algo(trace, n, 0.1, rng, SCALED_PARAMS)
    print(f"{name:13s} LCS/n = {lcs_length(hyp.x, x) / n:.4f}")

# At heavy deletion only a handful of bits survive; the cover algorithm
# still guarantees about two thirds
delta = 0.995
y = delete_direct(x, delta, rng)
hyp = get_reconstructor("cover")(y, n, delta, rng, SCALED_PARAMS)
print("heavy deletion: trace", len(y.y), "bits, tail majority", hyp.case,
      "LCS/n =", round(lcs_length(hyp.x, x) / n, 4))

# Algorithm A reports which case fired
hyp = get_reconstructor("alg-a")(y, n, delta, rng, SCALED_PARAMS)
print("alg-a case", hyp.case, "LCS/n =", round(lcs_length(hyp.x, x) / n, 4))
