"""
A convergence sweep
===================

Same table the ``maverick sweep`` command writes, built from a config string.
"""

import sys

from maverick.sweep import check_rows, parse_config, run_sweep, write_rows

config = parse_config("""
mode = frequency
state = iid
p = 0.3
n_grid = 100, 1000, 10000
epsilon_grid = 0.05, 0.1
workers = 2
""")

rows = run_sweep(config)
write_rows(rows, None, "csv", stream=sys.stdout)
print("problems:", check_rows(rows) or "none")
