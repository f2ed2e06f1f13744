"""kpzlab: Monte Carlo laboratory for KPZ interface fluctuations.

Simulation engines (TASEP, last-passage percolation, stochastic six-vertex),
reference distributions (Tracy-Widom laws via Fredholm determinants, the
one-sided parabola-tilted Brownian maximum), and the cumulant-extrapolation
pipeline that ties them together.
"""

__version__ = "0.1.0"
