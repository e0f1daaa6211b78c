"""Pareto frontier search over finite resource preorders.

The package models resource allocation problems as finite symmetric
monoidal preorders, scores length-n allocation systems through
multi-objective valuations, and locates the frontier of undominated
admissible systems three ways: exhaustive scan, improvement-chain
analysis, and a stochastic particle search whose jump probabilities
obey an exactly solvable recursion.
"""

from importlib import resources

from .errors import (
    CapacityError,
    InvariantViolation,
    LoadError,
    ParetoCatError,
    PreconditionError,
    SamplingError,
    StructureError,
)
from .instance import (
    Instance,
    ScaleData,
    build_instance,
    emit_instance,
    load_instance,
    save_instance,
    validate_instance,
)
from .particle import (
    ParticleTrace,
    chain_probability,
    check_estimate,
    diagonal_coefficients,
    evolve_by_matrix,
    evolve_coefficients,
    induced_cocone,
    induced_system,
    jump_pattern_frequencies,
    markov_oracle,
    run_particle,
    sample_admissible,
    step_matrix,
    tv_distance,
    verify_cocone,
)
from .probcat import (
    ProbMorphism,
    ProbObject,
    apply_prob_functor,
    canonicalize,
    lift_functor,
    lift_morphism,
    prob_isomorphic,
)
from .rescat import (
    ResourceCategory,
    TargetCategory,
    ValidationReport,
    close_hom,
    conversion_rate,
    convertible,
    mutually_convertible,
    tensor_power,
    validate_category,
)
from .scale import (
    ScaleObject,
    check_convergence,
    epsilon_interleaved,
    epsilon_reversible,
    interleaving_distance,
    shift,
)
from .summing import (
    count_functors,
    enumerate_summing_functors,
    evaluate,
    functors_isomorphic,
    tuple_rank,
    tuple_unrank,
)
from .swarm import SwarmConfig, SwarmReport, certify_neighborhood, run_swarm
from .valuation import (
    FrontierGroup,
    FrontierResult,
    ObjectDistribution,
    Objective,
    ValuationSystem,
    admissible,
    frontier_via_chains,
    images_of,
    longest_strict_chains,
    minorization_mass,
    minorizes,
    pareto_frontier,
    prime_admissibility,
    strict_minorization_set,
)

__version__ = "0.1.0"


def fixture_path(name: str) -> str:
    """Filesystem path of one of the bundled example instances.

    Available: ``chain3``, ``cycle2``, ``staircase``.
    """
    ref = resources.files(__package__).joinpath("fixtures", f"{name}.json")
    if not ref.is_file():
        raise LoadError("fixture.unknown", name,
                        "no bundled instance with that name")
    return str(ref)
