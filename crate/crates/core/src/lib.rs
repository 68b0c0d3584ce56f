//! Hermite-Birkhoff interpolation of scattered data on manifolds.
//!
//! Nodes carry a function value and any subset of chart-coordinate partial
//! derivatives. The interpolant blends per-node incomplete Taylor expansions
//! with cardinal basis functions built from geodesic distances:
//!
//! ```
//! use manifold_hermite::{Domain, HermiteNode, Interpolant, Mode, Point, WeightConfig};
//! use std::collections::BTreeMap;
//!
//! let domain = Domain::unit_cap(0.8).unwrap();
//! let nodes: Vec<HermiteNode> = [[0.0, 0.0, 1.0], [0.6, 0.0, 0.8], [0.0, 0.6, 0.8]]
//!     .into_iter()
//!     .zip([1.0, 2.0, 3.0])
//!     .map(|(p, v)| HermiteNode::value_only(Point::from(p), 2, v))
//!     .collect();
//! let h = Interpolant::build(domain, nodes, WeightConfig::for_order(0), Mode::Global).unwrap();
//! assert_eq!(h.evaluate(&Point::from([0.6, 0.0, 0.8])).unwrap(), 2.0);
//! ```

pub mod analysis;
pub mod basis;
pub mod error;
pub mod finite_diff;
pub mod geometry;
pub mod interpolant;
pub mod io;
pub mod multiindex;
pub mod testfunctions;

pub use analysis::{
    convergence_study, fill_distance, fit_order, separation_distance, ConvergenceRecord,
    ConvergenceStudy, OrderFit, StudyConfig,
};
pub use basis::{CardinalBasis, Mode, NeighborIndex, WeightConfig, Weights};
pub use error::{Error, ErrorCategory, Result};
pub use geometry::{
    sample_patch, Chart, ChartKind, Domain, Manifold, Patch, Point, SampleStrategy,
};
pub use interpolant::{ConditionReport, HermiteNode, Interpolant};
pub use multiindex::{MultiIndex, MultiIndexSet};
pub use testfunctions::TestFunction;
