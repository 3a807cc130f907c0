"""barylab: a desk-scale numerical laboratory for barycenter techniques.

Subpackages and modules:

- ``hyperboloid``: exact geometry of real hyperbolic space H^n.
- ``measures`` / ``transport``: finitely supported measures and exact
  Wasserstein-1 via min-cost flow.
- ``barycenter``: d^2-barycenters (Frechet means) on H^n.
- ``mmgraph`` / ``graphs``: metric measure graphs, covers, volume entropy.
- ``naturalmap``: the barycenter-of-weighted-pushforward pipeline with its
  tensor diagnostics and Jacobian bounds.
- ``bcg``: the Besson-Courtois-Gallot determinant inequality laboratory.
- ``indices``: preimage counts, analytic degree, Stallings foldings, coarea.
- ``cli``: JSON/CSV command-line front end.
"""

__version__ = "0.1.0"
