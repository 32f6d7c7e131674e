"""
Frequency tails and the Hoeffding bound
=======================================

The total weight of branches whose fraction of ones strays more than eps
from p, computed exactly, next to 2 exp(-2 eps^2 N).
"""

import math

from maverick import binomial_maverick_norm, hoeffding_bound

p, eps = 0.3, 0.05

print(f"{'N':>8} {'exact':>12} {'hoeffding':>12}")
for N in (10, 100, 1000, 3000, 10**4, 10**5, 10**6):
    print(f"{N:>8} {binomial_maverick_norm(p, N, eps):12.4e} {hoeffding_bound(N, eps):12.4e}")

# Smallest N at which the bound alone certifies a tail below 1e-6.
print("bound guarantees < 1e-6 from N =", math.ceil(math.log(2e6) / (2 * eps**2)))
