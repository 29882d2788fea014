//! Point-evaluable fields.
//!
//! Geometry blocks (lapse, shift, spatial metric, Randers data, deformation
//! one-forms) are represented as callables over the coordinate vector, with
//! a constant fast path. No atlas machinery: desk-scale verification only
//! ever needs pointwise algebra.

use std::fmt;
use std::sync::Arc;

use nalgebra::DVector;

use crate::error::Result;
use crate::linalg::SymMatrix;

macro_rules! field_type {
    ($name:ident, $value:ty, $doc:literal) => {
        #[doc = $doc]
        #[derive(Clone)]
        pub enum $name {
            Constant($value),
            Map(Arc<dyn Fn(&DVector<f64>) -> Result<$value> + Send + Sync>),
        }

        impl $name {
            pub fn eval(&self, x: &DVector<f64>) -> Result<$value> {
                match self {
                    $name::Constant(v) => Ok(v.clone()),
                    $name::Map(f) => f(x),
                }
            }

            pub fn map<F>(f: F) -> Self
            where
                F: Fn(&DVector<f64>) -> Result<$value> + Send + Sync + 'static,
            {
                $name::Map(Arc::new(f))
            }

            pub fn is_constant(&self) -> bool {
                matches!(self, $name::Constant(_))
            }

            pub fn constant_value(&self) -> Option<&$value> {
                match self {
                    $name::Constant(v) => Some(v),
                    $name::Map(_) => None,
                }
            }
        }

        impl fmt::Debug for $name {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                match self {
                    $name::Constant(v) => write!(f, concat!(stringify!($name), "::Constant({:?})"), v),
                    $name::Map(_) => write!(f, concat!(stringify!($name), "::Map(..)")),
                }
            }
        }
    };
}

field_type!(ScalarField, f64, "A scalar field x ↦ ℝ.");
field_type!(VectorField, DVector<f64>, "A (contravariant) vector field.");
field_type!(CovectorField, DVector<f64>, "A covector (one-form) field, e.g. the deformation A_i(θ).");
field_type!(MatrixField, SymMatrix, "A symmetric-matrix field, e.g. a spatial metric block.");

impl CovectorField {
    pub fn zero(dim: usize) -> Self {
        CovectorField::Constant(DVector::zeros(dim))
    }

    pub fn constant_slice(values: &[f64]) -> Self {
        CovectorField::Constant(DVector::from_column_slice(values))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn constant_and_map_agree() {
        let c = ScalarField::Constant(2.0);
        let m = ScalarField::map(|_| Ok(2.0));
        let x = DVector::from_vec(vec![1.0, 2.0]);
        assert_eq!(c.eval(&x).unwrap(), m.eval(&x).unwrap());
        assert!(c.is_constant());
        assert!(!m.is_constant());
    }
}
