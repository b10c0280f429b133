"""Entropy-region exploration on canonical small supports.

Enumerates the non-isomorphic k-atom supports of N random variables,
optimizes distributions on them against the Ingleton score and random
linear costs, projects the harvested entropic vectors into the pyramid
carved out by the Ingleton face, and verifies information-geometric
descriptions of the region's faces.
"""

from .partitions import SetPartition, Permutation, all_permutations, enumerate_partitions, meet, refines
from .supports import Support, canonical_form, census, enumerate_supports, is_valid_support
from .entropy import (
    Distribution,
    EntropicVector,
    INGLETON_PAIRS,
    cmi,
    couple_universe,
    elemental_inequalities,
    entropic_vector,
    in_shannon_cone,
    ingleton,
    ingleton_all,
    ingleton_score,
    matus_slack,
    permute_vars,
    semimatroid_of,
    zhang_yeung,
)
from .rays import PYRAMID_RAY_NAMES, RayVector, boundary_rays, exact_rank, pyramid_rays, ray_matrix
from .optimize import (
    CensusResult,
    HarvestResult,
    OptConfig,
    OptResult,
    five_atom_support,
    four_atom_support,
    harvest,
    minimize_cost,
    minimize_score,
    sample_costs,
    violating_census,
)
from .geometry import (
    FaceCoords,
    VolumeEstimate,
    face_expansion,
    face_pipeline,
    hull3,
    hull_contains,
    modular_component,
    push_onto_face,
    tight_component,
    volume_fraction,
)
from .infogeo import (
    FourAtomPoint,
    ProductDistribution,
    alpha0,
    ci_residuals,
    example2_suite,
    fouratom_classify,
    fouratom_planarity_probe,
    fouratom_threshold,
    fiveatom_planarity_probe,
    kl,
    m_project_independent,
    m_project_markov,
    planarity_probe,
    submodularity_divergence,
)

__version__ = "0.1.0"
