//! Workbench for finite ordered monoids and the free constructions above them:
//! word preorders with their canonical closure, downset (ideal) algebras over
//! antichain representations, quasi-inequality evaluation, and a signed-word
//! proof system with a positive-part interior operator.

pub mod algebra;
pub mod downset;
pub mod enumerate;
pub mod group;
pub mod laws;
pub mod nucleus;
pub mod word;

pub use algebra::{
    are_isomorphic, ideal_residuals, is_cancellative, is_commutative, is_down_directed,
    is_equationally_cancellative, is_ideally_residuated, is_integral, is_integrally_closed,
    validate, AlgebraError, AlgebraKind, Elem, FinitePomonoid, Side, Signature, StructuralError,
    ValidationReport, Violation,
};
pub use downset::{
    ac_join, ac_le, ac_meet, ac_mult, ac_residual, ac_unit, antichain_pool,
    check_distributive_semilattice, check_id_fragment_cancellativity, check_meet_distribution,
    down, enumerate_antichains, gamma_id, id_algebra, point_in, Antichain,
    DistributivityWitness, FiniteCarrier, IdCancellationWitness, IdCarrier, IdError,
    MeetDistributionWitness, WordCarrier,
};
pub use enumerate::{enumerate_algebras, enumerate_posets, MAX_ENUM_SIZE};
pub use group::{
    is_normal, GroupError, GroupPreimage, Proof, ProofOutcome, ProofStep, Rule, SignedWord,
};
pub use laws::{
    check_id_cancel_criterion, check_power_bridge, check_square_condition, check_square_tables,
    check_xn_yn, classify, cycle_witness_to_id, eval_quasi, generate_simple,
    integrally_closed_axioms, order_cancellation_witness, square_tables, BridgeDivergence,
    CycleWitness, Inequality, LawsError, OrderCancellationWitness, PowerWitness, QuasiClass,
    QuasiInequality, SquareTable, SquareViolation, Term,
};
pub use nucleus::{
    conuclear_image, enumerate_conuclei, enumerate_nuclei, is_unital, nuclear_image,
    validate_conucleus, validate_nucleus, ImageError, NucleusError, UnaryMap,
};
pub use word::{
    CancellationWitness, FreePreimage, PreimageVariant, Word, WordError, WordFragment,
    WordStructure,
};
