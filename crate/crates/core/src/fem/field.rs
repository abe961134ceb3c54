use std::sync::Arc;

use serde::ser::{Serialize, SerializeStruct, Serializer};

use crate::error::{invalid, Result};
use crate::scalar::Real;

use super::energy::Assembly;
use super::mesh::Mesh;

/// One value per mesh vertex, zero on Dirichlet vertices.
#[derive(Debug, Clone)]
pub struct ScalarField<T> {
    pub mesh: Arc<Mesh<T>>,
    pub values: Vec<T>,
}

impl<T: Real> ScalarField<T> {
    pub fn new(mesh: Arc<Mesh<T>>, values: Vec<T>) -> Result<Self> {
        if values.len() != mesh.n_vertices() {
            return invalid(format!(
                "field has {} values for {} vertices",
                values.len(),
                mesh.n_vertices()
            ));
        }
        Ok(Self { mesh, values })
    }

    /// Field from a function of position, pinned to zero on the boundary.
    pub fn from_fn(mesh: Arc<Mesh<T>>, f: impl Fn([T; 2]) -> T) -> Self {
        let values = mesh
            .vertices
            .iter()
            .zip(&mesh.boundary_mask)
            .map(|(v, b)| if *b { T::zero() } else { f(*v) })
            .collect();
        Self { mesh, values }
    }

    pub fn max_abs(&self) -> T {
        self.values.iter().fold(T::zero(), |a, v| a.max(v.abs()))
    }

    /// Linear interpolation onto another mesh.
    pub fn transfer(&self, target: Arc<Mesh<T>>) -> Self {
        if Arc::ptr_eq(&self.mesh, &target) {
            return self.clone();
        }
        let loc = self.mesh.locator();
        Self::from_fn(target, |x| loc.interpolate(&self.mesh, &self.values, x))
    }
}

/// Serialised as `{ "vertices": [[x, y], …], "triangles": [[i, j, k], …],
/// "values": [v, …] }`.
impl<T: Real + Serialize> Serialize for ScalarField<T> {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let mut st = s.serialize_struct("ScalarField", 3)?;
        st.serialize_field("vertices", &self.mesh.vertices)?;
        st.serialize_field("triangles", &self.mesh.triangles)?;
        st.serialize_field("values", &self.values)?;
        st.end()
    }
}

/// `∫ |∇u|^p / ∫ |u|^p` for a P1 field (gradient exact, mass by a degree-4
/// rule on each single-signed piece).
pub fn p_rayleigh<T: Real>(u: &ScalarField<T>, p: T) -> Result<T> {
    if !(p > T::one()) {
        return invalid(format!("p must exceed 1, got {p}"));
    }
    let asm = Assembly::new(u.mesh.clone());
    let parts = asm.parts(&u.values, p, T::zero(), None);
    let mass = parts[1] + parts[3];
    if !(mass > T::zero()) {
        return invalid("Rayleigh quotient of the zero field");
    }
    Ok((parts[0] + parts[2]) / mass)
}

/// Rayleigh quotients `(R(u⁺), R(u⁻))` of the positive and negative parts.
pub fn p_rayleigh_parts<T: Real>(u: &ScalarField<T>, p: T) -> Result<(T, T)> {
    if !(p > T::one()) {
        return invalid(format!("p must exceed 1, got {p}"));
    }
    let asm = Assembly::new(u.mesh.clone());
    let parts = asm.parts(&u.values, p, T::zero(), None);
    if !(parts[1] > T::zero()) || !(parts[3] > T::zero()) {
        return invalid("field does not change sign");
    }
    Ok((parts[0] / parts[1], parts[2] / parts[3]))
}
