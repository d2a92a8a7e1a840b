"""Opinion-dynamics simulation and sparse memory-model identification.

Submodules
----------
network        interaction networks (complete, clustered, edge lists)
abm            stochastic opinion-change dynamics and the percentage observable
macrodynamics  closed-form expected macro-models
lasso          coordinate-descent LASSO
sinar          delay dictionaries, Hankel data, sparse NAR fitting and rollout
validation     block reconstruction errors and memory-depth sweeps
henon          extended Hénon benchmark and Hausdorff distances
experiments    ready-made configurations
cli            command-line front end
"""
from .abm import DEFAULT_ALPHA
from .abm import AdaptionMatrix, simulate
from .network import Network, make_clustered, make_complete
from .sinar import NarModel, build_hankel, fit, rollout

__version__ = "0.1.0"

__all__ = ["AdaptionMatrix", "DEFAULT_ALPHA", "Network", "NarModel", "build_hankel",
           "fit", "make_clustered", "make_complete", "rollout", "simulate"]
