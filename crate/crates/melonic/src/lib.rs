//! Exact computation of Grothendieck classes of affine graph-hypersurface
//! complements for melonic graphs.
//!
//! A melonic graph is built from a single edge by repeatedly replacing an
//! edge with a string of banana graphs. Each such "melonic construction"
//! determines a graph whose Kirchhoff polynomial cuts out a hypersurface in
//! affine space; the class of the complement in the Grothendieck ring of
//! varieties is a polynomial in the Lefschetz class `L` (equivalently in
//! `T = L - 1` or `S = T - 1`), computable by a deletion-contraction style
//! recursion over the construction.
//!
//! Module map:
//! - [`polyring`]: dense univariate integer polynomials in the three bases.
//! - [`series`]: truncated power series with polynomial coefficients, used to
//!   expand the rational generating functions of the closed-form families.
//! - [`construction`]: melonic constructions, their tree form, reduction,
//!   graph realization and exhaustive enumeration.
//! - [`motive`]: the class recursion with memoization over canonical trees.
//! - [`families`]: closed-form classes for the named families and the
//!   bananification-tower generating functions.
//! - [`oracle`]: independent validation by spanning-tree enumeration and
//!   brute-force point counting over small finite fields.

pub mod construction;
pub mod families;
pub mod motive;
pub mod oracle;
pub mod polyring;
pub mod series;

pub use construction::{Graph, MelonTree, MelonicConstruction, Stage};
pub use motive::{ClassEngine, GrothendieckClass};
pub use polyring::{Basis, IntPoly};
pub use series::PolySeries;
