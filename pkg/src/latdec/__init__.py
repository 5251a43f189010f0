"""Lattice decoding at desk scale: exact CVP, Voronoi-reduction checks, hyperplane logical decoders and small neural decoders."""

from latdec.errors import (
    CapacityError,
    CatalogError,
    CertificationInconclusive,
    DecompositionError,
    LatdecError,
    RegistryError,
    SynthesisRefused,
    TrainingError,
)
from latdec.exact import closest_z, relevant_vectors, sphere_decode, voronoi_contains
from latdec.hld import HLD, hld_compile, hld_decode, hld_synthesize
from latdec.lattice import (
    CATALOG_NAMES,
    Lattice,
    catalog_load,
    cholesky_generator,
    fold_into_parallelotope,
    shell_enumerate,
    unfold,
)
from latdec.nets import FeedForwardNet, forward
from latdec.vr import BoundInput, check_vr_exact, check_vr_monte_carlo, lemma_bound

__version__ = "0.1.0"

__all__ = [
    "BoundInput", "CATALOG_NAMES", "CapacityError", "CatalogError", "CertificationInconclusive",
    "DecompositionError", "FeedForwardNet", "HLD", "LatdecError", "Lattice", "RegistryError",
    "SynthesisRefused", "TrainingError", "catalog_load", "check_vr_exact", "check_vr_monte_carlo",
    "cholesky_generator", "closest_z", "fold_into_parallelotope", "forward", "hld_compile",
    "hld_decode", "hld_synthesize", "lemma_bound", "relevant_vectors", "shell_enumerate",
    "sphere_decode", "unfold", "voronoi_contains",
]
