//! Piecewise-linear finite elements for the p-Laplacian on sectors.

mod eigen;
mod energy;
mod field;
mod linear;
mod mesh;
mod nodal;

pub use eigen::{
    first_eigen_on, first_eigen_sector, linear_eigenpairs, second_eigen_on, second_eigen_sector,
    second_eigen_seeded, FemOptions, FemSolution, SecondSeed, SecondSolution, WarmStart,
    FEM_P_RANGE,
};
pub use field::{p_rayleigh, p_rayleigh_parts, ScalarField};
pub use mesh::{mesh_sector, Mesh, MAX_MESH_SIZE};
pub use nodal::{
    assemble_disk_eigenfunction, classify_nodal, count_nodal_domains, default_nodal_tol,
    nodal_curve, NodalClassification, NodalTag, Polyline, NODAL_SIGN_FLOOR,
};
