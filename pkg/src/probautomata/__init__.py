"""Probabilistic, weighted and cut-point automata toolkit."""

from .tolerances import Tolerances, get_default, set_default
from .linalg import (
    norm_abs,
    norm_spread,
    kron,
    bool_pattern,
    bool_mul,
    is_primitive,
    Subspace,
    LpProblem,
    LpSolution,
    lp_solve,
    convex_combination_certificate,
)
from .dfa import Dfa, dfa_reachable_part, dfa_minimize, dfa_to_dot, words_upto
from .generalpa import (
    GeneralPA,
    ReactionTable,
    ConeSpec,
    word_matrix,
    reaction,
    reaction_table,
    is_probabilistic_response,
    residual,
    residual_automaton,
    basis_matrix,
    distributions_equivalent,
    equivalent,
    reachable_part,
    find_convex_state,
    remove_convex_state,
    reduce,
    pa_from_cone,
)
from .sequences import (
    RandomSequence,
    PairedSequence,
    MarkovChain,
    rs_residual,
    rs_automaton,
    rs_from_automaton,
    mc_function,
    mc_sequence,
    iid_sequence,
    pair_from,
    marginals,
    transform,
)
from .moorepa import (
    MoorePA,
    avg_reaction,
    avg_reaction_table,
    avg_basis_matrix,
    avg_equivalent,
    reduce_avg,
    Classification,
    classify,
    moore_to_general,
    dfa_to_pa,
)
from .linauto import (
    LinearAutomaton,
    StringFunctionTable,
    HankelBasis,
    la_reaction,
    la_table,
    la_combine,
    la_unary,
    la_equivalent,
    hankel_block,
    hankel_basis,
    realize,
    e_f_dimension,
    reach_degree,
    disting_degree,
    la_to_rational_expr,
    eval_expr,
    to_sexpr,
    la_to_pa_affine,
    la_language_pa,
    laf_from_level_dfas,
    chi_eps,
    chi_word,
)
from .languages import (
    member,
    enumerate_members,
    fold_initial,
    binarize_output,
    shift_cutpoint,
    general_language_pa,
    IsolationReport,
    isolation_scan,
    extract_dfa,
    extraction_state_bound,
    ergodic_test,
    contraction_bound,
    DefiniteRep,
    definite_rep,
    StabilityReport,
    stability_check,
)

__version__ = "0.1.0"
