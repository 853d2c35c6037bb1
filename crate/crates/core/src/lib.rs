//! Intersection lattices of central hyperplane arrangements and posets of
//! layers of central toric arrangements, computed from an integer matrix
//! whose columns are the defining vectors.
//!
//! The pipeline is:
//!
//! 1. [`exact_linalg`] supplies Smith normal forms, ranks and minors over
//!    arbitrary-precision integers.
//! 2. [`matroid`] memoizes rank and multiplicity of every column subset.
//! 3. [`layer_groups`] realizes the finite groups naming the layers each
//!    subset defines, and the projections between them.
//! 4. [`poset_builder`] creates one vertex per (subset, group element),
//!    links neighbouring subsets, and contracts equal layers.
//! 5. [`invariants`] computes Möbius values and characteristic polynomials.
//!
//! [`oracle`] rebuilds the same posets from the geometry alone and is used
//! for verification.
//!
//! ```
//! use toric_poset::{build_layer_poset, rank_counts, IntMatrix};
//!
//! let x = IntMatrix::from_rows(&[[2, 0, 1, 2], [0, 1, -1, 2]]);
//! let poset = build_layer_poset(&x).unwrap();
//! assert_eq!(rank_counts(&poset)[1], 6);
//! ```

pub mod cli_io;
pub mod error;
pub mod exact_linalg;
pub mod invariants;
pub mod layer_groups;
pub mod matroid;
pub mod oracle;
pub mod poset_builder;

pub use error::{Error, Result};
pub use exact_linalg::{
    gcd_of_maximal_minors, invariant_factors, rank, smith_normal_form, smith_transforms,
    solve_integer_membership, IntMatrix, SmithDecomposition, SmithTransforms,
};
pub use invariants::{characteristic_polynomial, mobius, rank_counts, CharPolynomial, MobiusTable};
pub use layer_groups::{build_layer_group, project, GroupElement, LayerGroupData, LayerGroupTable};
pub use matroid::{MatroidCache, SubsetId};
pub use poset_builder::{
    build, build_intersection_lattice, build_layer_poset, contract_equivalence, CanonicalName,
    HasseDiagram, LayerRecord, Mode, PreGraph, PreVertex,
};
