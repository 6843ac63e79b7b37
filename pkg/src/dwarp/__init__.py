"""Numerical checks for spacelike graphs in doubly warped product spacetimes.

The ambient metric is ``-h(x)**2 dt**2 + rho(t)**2 sigma`` on ``I x P``.
Submodules:

* :mod:`dwarp.base`: base manifolds, grids, fields and differential operators
* :mod:`dwarp.spacetime`: the ambient metric, its conformal field and slices
* :mod:`dwarp.hypersurface`: graph hypersurfaces and their extrinsic geometry
* :mod:`dwarp.identities`: residual checks of the integral and divergence identities
* :mod:`dwarp.rigidity`: probes of the rigidity and non-existence statements
* :mod:`dwarp.counterexample`: the rotating Killing field on the Minkowski cylinder
* :mod:`dwarp.cli`: the ``dwarp`` command
"""

__version__ = "0.1.0"
