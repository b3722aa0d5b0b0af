"""ocrskit: contention resolution under limited independence.

Greedy online/offline contention resolution schemes that only need
pairwise-independent (more generally t-wise-independent) active sets, for
uniform, laminar, graphic, cographic, transversal, and regular matroids,
plus the prophet-inequality reduction and the hard instances that show the
guarantees are in the right regime.
"""

from .distributions import (ExplicitSubsetDist, ProductDist,
                            SymmetricSizeDist, kn_cycle_dist,
                            pair_singleton_dist, subsample, twise_symmetric,
                            verify_independence)
from .matroids import (BinaryMatroid, CographicMatroid, GraphicMatroid,
                       LaminarMatroid, Matroid, MatroidError, Multigraph,
                       TransversalMatroid, UniformMatroid)
from .polytope import decompose_point, density, polytope_violation

__version__ = "0.1.0"

__all__ = [
    "ExplicitSubsetDist", "ProductDist", "SymmetricSizeDist",
    "kn_cycle_dist", "pair_singleton_dist", "subsample", "twise_symmetric",
    "verify_independence", "BinaryMatroid", "CographicMatroid",
    "GraphicMatroid", "LaminarMatroid", "Matroid", "MatroidError",
    "Multigraph", "TransversalMatroid", "UniformMatroid", "decompose_point",
    "density", "polytope_violation", "__version__",
]
