//! Triangular finite elements on the unit square: meshes, P1/P2 spaces, quadrature, sparse
//! storage and assembly.

pub mod assembly;
pub mod dirichlet;
pub mod mesh;
pub mod poly;
pub mod quadrature;
pub mod space;
pub mod sparse;

pub use assembly::{
    assemble_convection, assemble_divergence, assemble_load, assemble_mean_row, assemble_potential_coupling,
    assemble_scalar_mass, assemble_scalar_stiffness, assemble_stiffness, assemble_vector_mass, divergence_norms,
    DiscreteGradient, DiscreteVectorField, FnField, PotentialOperator, VectorField,
};
pub use dirichlet::{apply_dirichlet, ReducedSystem};
pub use mesh::Mesh2D;
pub use poly::{Poly2, PolyField};
pub use quadrature::QuadratureRule;
pub use space::{Element, FeSpace, SpaceKind};
pub use sparse::{CsrMatrix, SparseLu, TripletBuilder};
