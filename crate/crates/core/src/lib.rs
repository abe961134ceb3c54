// `!(x > y)` is used on purpose so that NaN fails the check.
#![allow(clippy::neg_cmp_op_on_partial_ord)]
// Index loops read closer to the formulas in the small dense kernels.
#![allow(clippy::needless_range_loop)]

pub mod acceptance;
pub mod bessel;
pub mod crossing;
pub mod error;
pub mod estimate;
pub mod fem;
pub mod geometry;
pub mod limits;
mod ode;
mod optim;
pub mod radial;
pub mod scalar;
pub mod shell;
pub mod sweep;

/// Double-precision aliases for the common types.
pub type Estimate = estimate::EigenEstimate<f64>;
pub type Sector = geometry::SectorSpec<f64>;
pub type Packing = geometry::PackingResult<f64>;
pub type RadialParams = radial::Params<f64>;
pub type SectorMesh = fem::Mesh<f64>;
pub type Field = fem::ScalarField<f64>;
pub type Solution = fem::FemSolution<f64>;
pub type Crossing = crossing::CrossingReport<f64>;
pub type Row = sweep::Fig3Row<f64>;
