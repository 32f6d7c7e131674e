"""
Markov and Chebyshev as checkable statements
============================================

"""

import numpy as np

from maverick import DiagonalObservable, StateVector, chebyshev_check, markov_check
from maverick.bounds import run_chebyshev_suite, run_markov_suite

psi = StateVector(np.full(2, 2**-0.5), 1)

r = markov_check(psi, DiagonalObservable([0.0, 4.0]), 1.0)
print("markov   :", r.lhs, "<=", r.rhs, r.holds)

r = chebyshev_check(psi, DiagonalObservable([0.0, 2.0]), 0.5)
print("chebyshev:", r.lhs, "<=", r.rhs, "mean", r.mean, "variance", r.variance)

# randomized suites, one seeded generator per trial
for report in (run_markov_suite(0, 2000), run_chebyshev_suite(0, 2000)):
    print(report.line())
