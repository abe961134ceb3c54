use serde::Serialize;

/// How an eigenvalue estimate was produced.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    Shooting,
    Partition,
    Bessel,
    Fem,
    LimitFormula,
}

/// A computed eigenvalue together with the metadata of the run that made it.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EigenEstimate<T> {
    pub value: T,
    pub method: Method,
    /// Absolute tolerance the method reached (a bound or a solver estimate).
    pub tol: T,
    pub iterations: usize,
}

impl<T> EigenEstimate<T> {
    pub fn new(value: T, method: Method, tol: T, iterations: usize) -> Self {
        Self {
            value,
            method,
            tol,
            iterations,
        }
    }
}
