"""Randomized 3-colouring of random cubic multigraphs with certified sudoku sets.

A cubic multigraph here is a fixed Hamilton cycle (1 2 ... n) plus a
uniform random perfect matching.  The package colours it in three phases
(balanced burn-in, pointer-driven run phase, even-cycle completion) while
building a vertex set whose partial colouring extends uniquely to the
produced colouring; verification, an 18-state type-chain numerical
toolkit, and a Monte Carlo experiment harness round out the library.
"""

from .graph_core import (CubicMultigraph, MatchingProcess, generate_graph, is_simple,
                         load_graph, write_graph)
from .pipeline import (PipelineConfig, PipelineResult, PipelineRun, TrajectoryRecord,
                       full_pipeline, list_colour_even_cycle, run_sudoku,
                       size_bound_holds)
from .rng import DeterministicRandomSource
from .verification import (BoundsReport, Graph, VerificationResult, bounds_report,
                           check_proper, count_extensions, is_decycling,
                           is_sudoku_set, max_independent_exact, min_sudoku_exact,
                           propagate_forced, strong_order)

__version__ = "0.1.0"

__all__ = [
    "BoundsReport", "CubicMultigraph", "DeterministicRandomSource", "Graph",
    "MatchingProcess", "PipelineConfig", "PipelineResult", "PipelineRun",
    "TrajectoryRecord", "VerificationResult", "bounds_report", "check_proper",
    "count_extensions", "full_pipeline", "generate_graph", "is_decycling",
    "is_simple", "is_sudoku_set", "list_colour_even_cycle", "load_graph",
    "max_independent_exact", "min_sudoku_exact", "propagate_forced",
    "run_sudoku", "size_bound_holds", "strong_order", "write_graph",
]
