//! Exact p-adic machinery for Mumford curves that cover the projective line
//! with cyclic monodromy: field arithmetic in Q_p(ζ_m), Möbius maps and the
//! Bruhat-Tits tree, a separation classifier for superelliptic equations,
//! explicit Schottky generators, and the free-product group computations that
//! back them.

pub mod arith;
pub mod classifier;
pub mod error;
pub mod group;
pub mod moebius;
pub mod padic;
pub mod schottky;
pub mod tree;

pub use arith::Rational;
pub use classifier::{
    alpha_bound, classify, classify_four_point, hm_decompose, tate_j_check, FailureReason,
    HMDecomposition, KummerEquation, KummerInput, MumfordVerdict, TermInput,
};
pub use error::{Error, Result};
pub use group::{
    hom_image, kernel_generators_rs, subgroup_index, torsion_scan, word_reduce, word_to_matrix,
    CosetTable, CyclicAssignment, FreeProduct, FreeProductWord,
};
pub use moebius::{
    apply_map, classify_map, disks_disjoint, fixed_points, isometric_circle, normalize_triple,
    MapClass, MoebiusMap, ProjectivePoint, UltrametricDisk,
};
pub use padic::{
    abs_cmp, field_arith, make_field, root_of_unity, val, ArithOp, Field, FieldDescriptor,
    PadicElement, Valuation,
};
pub use schottky::{
    expected_genus, exponents_to_f, synth_coprime, synth_divisor, synth_mixed, synth_prime,
    synth_reidemeister, synth_total_ram, synthesize, verify_schottky, CaseTag, CoverSpec,
    SchottkyPresentation, VerificationReport,
};
pub use tree::{
    arrange, cross_ratio, mirror, quotient_tree, GeodesicLine, LineArrangement,
    QuotientTreeDescriptor,
};
