//! Bounded Apollonian gaskets: curvature-bounded enumeration of circles,
//! fine-scale statistics of their centers (pair correlation, nearest-neighbor
//! spacing, window-count moments) and an upper half-space toolkit for the
//! separation bounds those statistics rest on.
//!
//! ```
//! use gasket::geometry::DescartesQuadruple;
//! use gasket::enumerate::enumerate;
//!
//! let root = DescartesQuadruple::from_curvatures([-1.0, 2.0, 2.0, 3.0]).unwrap();
//! let set = enumerate(&root, 3f64.ln() + 1e-9).unwrap();
//! assert_eq!(set.len(), 5);
//! ```

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cli;
pub mod enumerate;
pub mod error;
pub mod format;
pub mod geometry;
pub mod hyperbolic;
pub mod spatial;
pub mod stats;

pub use error::{Error, Result};
