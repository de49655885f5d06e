"""Lattice laboratory for the 1+1 dimensional log-gamma directed polymer.

Exact constructions (gamma weight systems, partition-function grids,
the polymer walk in random environment, the environment chain), closed
form free-energy and duality solvers, and the Monte Carlo experiments
that verify the model's distributional identities at desk scale.
"""

from .streams import RandomStream

__version__ = "0.1.0"

__all__ = ["RandomStream", "__version__"]
