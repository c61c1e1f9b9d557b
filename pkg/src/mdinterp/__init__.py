"""Shortest curvature-bounded interpolating curves through waypoints.

The package solves for planar curves of curvature at most ``a`` that join
an oriented start to an oriented end while passing through an ordered list
of interior waypoints, using an arc-length parameterization (five fixed
L/R/S/L/R slots per stage) and a two-phase multistart solver, and audits
candidate curves against the first-order necessary conditions.
"""

from .dubins import (
    CoincidentPoints,
    DubinsCandidate,
    dubins_shortest,
    initial_headings,
    seed_from_dubins,
)
from .io_formats import (
    FormatError,
    parse_problem,
    parse_result,
    problem_to_dict,
    result_to_dict,
    sampled_path_csv,
    serialize_problem,
    serialize_result,
)
from .model import (
    DistinctNodesViolation,
    NonFiniteInput,
    NonpositiveCurvatureBound,
    OrientedPoint,
    PathSolution,
    ProblemError,
    ProblemSpec,
    SampledPath,
    StageHeadings,
    StationarityReport,
    SubarcKind,
    SubarcMatrix,
    Waypoint,
    validate_problem,
    word_of,
)
from .nlp import (
    NlpInstance,
    NoSolutionFound,
    SolveOutcome,
    SolverConfig,
    StructureInfeasible,
    assemble,
    prune_and_refine,
    solve,
    solve_local,
)
from .render import render_svg
from .rollout import (
    StageResidual,
    make_solution,
    propagate_subarc,
    residuals,
    rollout_path,
    sample_path,
    stage_headings,
)
from .stationarity import (
    MultiplierMissing,
    MultiplierReconstruction,
    NonconformingStage,
    SubarcCount,
    audit,
    check_midpoint,
    check_subarc_bound,
    classify_stage,
    merged_word,
    reconstruct_multipliers,
    stage_arcs,
    switching_function_profile,
)

__version__ = "0.1.0"
