"""Solvers for maximum-flow network interdiction games.

A library and CLI for the two-player game in which an interdictor removes
a fixed number of arcs from a capacitated network and a flow player pushes
material from source to sink.  It computes the deterministic value, the
randomized (mixed-strategy) values in arc- and path-based payoff models,
the parametric lower-bound model, optimal mixed removal strategies with
independent saddle-point certificates, and the full bound/ratio report.
"""

from .game import (
    DEFAULT_CUT_LIMIT,
    DEFAULT_SCENARIO_LIMIT,
    CutLimitExceeded,
    MixedStrategy,
    Scenario,
    ScenarioLimitExceeded,
    adaptive_value,
    adaptive_value_by_cuts,
    estimate_expected_payoff,
    expected_payoff,
    payoff_arc,
    payoff_path,
    scenario_count,
    scenarios,
)
from .graph import (
    Arc,
    ArcFlow,
    CutReport,
    Instance,
    PathFlow,
    PathLimitExceeded,
    ValidationReport,
    decompose,
    enumerate_paths,
    max_flow,
    min_cut,
    validate_flow,
)
from .instances import (
    GeneratorSpec,
    ParseError,
    SpecInvalid,
    fig1,
    fig2a,
    fig2b,
    generate,
    parse,
    random_instance,
    serialize,
    thm6,
)
from .linopt import (
    LpProblem,
    LpSolution,
    NumericalFailure,
    kkt_report,
    solve_lp,
    solve_lp_lexicographic,
)
from .lomodel import (
    ApproxReport,
    BoundCheck,
    InvariantViolation,
    LoSolution,
    approx_report,
    lo_cuts,
    lo_value_at,
    path_model_factor,
    solve_lo,
)
from .solvers import (
    DEFAULT_LP_SCENARIO_LIMIT,
    DEFAULT_PATH_LIMIT,
    CertificateReport,
    Gamma1Solution,
    GammaMismatch,
    NiSolution,
    RniSolution,
    best_response_arc,
    best_response_path,
    certify,
    certify_gamma1,
    gamma1_residuals,
    gamma1_strategy,
    solve_ni,
    solve_rni,
    solve_rni_gamma1,
    solve_rni_path,
)

__all__ = [
    "Arc",
    "ArcFlow",
    "ApproxReport",
    "BoundCheck",
    "CertificateReport",
    "CutLimitExceeded",
    "CutReport",
    "DEFAULT_CUT_LIMIT",
    "DEFAULT_LP_SCENARIO_LIMIT",
    "DEFAULT_PATH_LIMIT",
    "DEFAULT_SCENARIO_LIMIT",
    "Gamma1Solution",
    "GammaMismatch",
    "GeneratorSpec",
    "Instance",
    "InvariantViolation",
    "LoSolution",
    "LpProblem",
    "LpSolution",
    "MixedStrategy",
    "NiSolution",
    "NumericalFailure",
    "ParseError",
    "PathFlow",
    "PathLimitExceeded",
    "RniSolution",
    "Scenario",
    "ScenarioLimitExceeded",
    "SpecInvalid",
    "ValidationReport",
    "adaptive_value",
    "adaptive_value_by_cuts",
    "approx_report",
    "best_response_arc",
    "best_response_path",
    "certify",
    "certify_gamma1",
    "decompose",
    "enumerate_paths",
    "estimate_expected_payoff",
    "expected_payoff",
    "fig1",
    "fig2a",
    "fig2b",
    "gamma1_residuals",
    "gamma1_strategy",
    "generate",
    "kkt_report",
    "lo_cuts",
    "lo_value_at",
    "max_flow",
    "min_cut",
    "parse",
    "path_model_factor",
    "payoff_arc",
    "payoff_path",
    "random_instance",
    "scenario_count",
    "scenarios",
    "serialize",
    "solve_lo",
    "solve_lp",
    "solve_lp_lexicographic",
    "solve_ni",
    "solve_rni",
    "solve_rni_gamma1",
    "solve_rni_path",
    "thm6",
    "validate_flow",
]
