"""Exact calculator for closed classes of higher-order contact loci."""

from .errors import (
    CalcError,
    CodimensionMismatchError,
    CoincidentPoleError,
    ConstantFormError,
    DerivationError,
    InfiniteStaircaseError,
    MissingGeneratorError,
    MissingQhatError,
    NonDivisibleError,
    QhatFormatError,
    SPairBudgetError,
    TruncationUnstableError,
    UnassignedVariableError,
    WeightInhomogeneityError,
)
from .poly import (
    FactoredRational,
    LinearForm,
    Polynomial,
    RationalFunction,
    Variable,
    avar,
    cvar,
    etavar,
    lamvar,
    linear_form,
    poly_divide_exact,
    thvar,
    uhatvar,
    uvar,
    variable_from_text,
    yvar,
    zvar,
)
from .residue import (
    ResidueProblem,
    TruncationPolicy,
    iterated_residue,
    residue_by_pole_sum,
    residue_single_variable_exact,
    vanishing_criterion,
)
from .partitions import (
    AdmissibleSequence,
    BasicRelation,
    Partition,
    apply_left_action,
    apply_right_action,
    basic_relations,
    deg_qhat,
    dim_normal_model,
    dim_orbit,
    enumerate_admissible,
    expansion_relation,
    pair_relation,
    partitions_up_to,
    relation_weight,
    stored_quartic_relation,
    u_reference_value,
    uhat_index_triples,
    uhat_reference_value,
    uhat_weight,
)
from .multidegree import (
    MonomialIdeal,
    PolynomialIdeal,
    WeightedRing,
    buchberger_lex,
    euler_class,
    initial_ideal,
    multidegree,
    multidegree_monomial,
    reduce_by_linear_generator,
    subspace_multiplicity,
    toric_localization_example,
)
from .thom import (
    DEFAULT_SEED,
    ChernAssignment,
    FixedPointTerm,
    LocalizationSum,
    PorteousSum,
    PositivityReport,
    Qhat5Steps,
    QhatRegistry,
    ThomPolynomial,
    VanishingEvidence,
    chern_classes,
    default_registry,
    denominator_forms,
    distinguished_residue_value,
    fixed_point_sum,
    fixed_point_terms,
    flag_residue_identity,
    nondistinguished_vanishing,
    porteous_localization_sum,
    positivity_expansion,
    qhat,
    qhat5_derivation,
    qhat5_derivation_steps,
    recommended_policy,
    residue_problem_for,
    residue_term_value,
    ronga_reference,
    sampled_class_agreement,
    shift_check,
    substitute_chern,
    thom_polynomial,
    thom_series_view,
    tp_positivity,
    vandermonde,
)

__version__ = "0.1.0"
