//! Computational kernel for composition products of symmetric sequences
//! in exact finite symmetric monoidal categories.
//!
//! The crate ships two concrete backends (rational vector spaces with
//! exact arithmetic, and finite pointed sets with smash products)
//! together with the opposite-category adaptor for the pointed-set
//! backend. On top of those it builds:
//!
//! * level-tree combinatorics (nested partition chains and the two tree
//!   surgeries used by unit insertion and level collapse),
//! * the binary and higher composition products with their explicit
//!   coproduct decompositions, unicity and associativity morphisms,
//! * an exhaustive coherence verifier for weakened (non-invertible)
//!   monoidal structures,
//! * monoids for such structures (operads when the structure is the
//!   composition product), modules, bimodules and augmentations,
//! * the two-sided simplicial bar construction and the cosimplicial
//!   cobar construction obtained by running it in the opposite backend.
//!
//! All arithmetic is exact and every diagram check is an equality of
//! canonicalized morphisms, so verification results are yes/no answers
//! rather than numeric tolerances.

pub mod bar;
pub mod category;
pub mod combinatorics;
pub mod compprod;
pub mod error;
pub mod monoid;
pub mod pseudomonoid;
pub mod report;
pub mod symseq;

pub use error::{Error, Result};

/// Map a slice through `f`, in parallel when the `parallel` feature is
/// enabled.
pub(crate) fn par_map<T, U, F>(items: Vec<T>, f: F) -> Vec<U>
where
    T: Send,
    U: Send,
    F: Fn(T) -> U + Sync + Send,
{
    #[cfg(feature = "parallel")]
    {
        use rayon::prelude::*;
        items.into_par_iter().map(f).collect()
    }
    #[cfg(not(feature = "parallel"))]
    {
        items.into_iter().map(f).collect()
    }
}
