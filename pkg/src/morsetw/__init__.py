"""Feedback Morse matchings on digraphs via a treewidth dynamic program."""
from .complexes import (ErasibilityInstance, ErasibilityResult, GradientField,
                        OMMResult, RegularComplex, format_complex,
                        hasse_diagram, load_complex, solve_erasibility,
                        solve_omm, verify_gradient_field)
from .digraph import (Digraph, SolveResult, Status, backward_edges,
                      format_dg, is_acyclic, is_feedback_morse_matching,
                      is_matching, objective, order_of_matching, parse_dg,
                      reverse_matched)
from .dp import DPRun, StateStats, run_dp, solve_fmo, state_stats
from .errors import (CapExceeded, ContractViolation, DecompositionError,
                     InputError, MorseTWError, NotFeedbackMorseMatching,
                     SelfLoopError)
from .oracle import (OracleResult, brute_force_erasibility,
                     brute_force_matchings, brute_force_orders,
                     brute_force_states, greedy_erase)
from .treedecomp import (NiceTreeDecomposition, NodeKind, TreeDecomposition,
                         heuristic_td, naive_path_decomposition,
                         nice_decomposition, processed_subgraph, read_td_pace,
                         to_nice, validate_discipline, validate_td,
                         write_td_pace)

__version__ = "0.1.0"
