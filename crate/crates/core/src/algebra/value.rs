use std::any::Any;
use std::fmt;
use std::sync::Arc;

use super::elem::structurally_equal;
use super::{ring_equals, Matrix, Ring, RingElem};

/// A value type supplied from outside the kernel, serialized by a
/// user-registered codec.
pub trait CustomValue: fmt::Debug + Send + Sync + 'static {
    fn type_name(&self) -> &str;
    fn as_any(&self) -> &dyn Any;
    fn eq_value(&self, other: &dyn CustomValue) -> bool;
}

/// Anything that can be saved to or loaded from a document.
#[derive(Clone, Debug)]
pub enum AlgebraValue {
    Ring(Ring),
    Elem(RingElem),
    /// Entries must share one type and one parent object to be saved.
    Vector(Vec<AlgebraValue>),
    /// Entries may differ; each carries its own type parameters.
    Tuple(Vec<AlgebraValue>),
    Matrix(Matrix),
    Custom(Arc<dyn CustomValue>),
}

impl AlgebraValue {
    pub fn vector_of(elems: impl IntoIterator<Item = RingElem>) -> Self {
        AlgebraValue::Vector(elems.into_iter().map(AlgebraValue::Elem).collect())
    }

    pub fn type_name(&self) -> &str {
        match self {
            AlgebraValue::Ring(r) => r.type_name(),
            AlgebraValue::Elem(e) => e.parent().elem_type_name(),
            AlgebraValue::Vector(_) => "Vector",
            AlgebraValue::Tuple(_) => "Tuple",
            AlgebraValue::Matrix(_) => "Matrix",
            AlgebraValue::Custom(c) => c.type_name(),
        }
    }

    pub fn as_ring(&self) -> Option<&Ring> {
        match self {
            AlgebraValue::Ring(r) => Some(r),
            _ => None,
        }
    }

    pub fn as_elem(&self) -> Option<&RingElem> {
        match self {
            AlgebraValue::Elem(e) => Some(e),
            _ => None,
        }
    }

    pub fn as_matrix(&self) -> Option<&Matrix> {
        match self {
            AlgebraValue::Matrix(m) => Some(m),
            _ => None,
        }
    }

    /// Entries of a vector that consists of ring elements only.
    pub fn as_elem_vector(&self) -> Option<Vec<RingElem>> {
        match self {
            AlgebraValue::Vector(v) => v.iter().map(|x| x.as_elem().cloned()).collect(),
            _ => None,
        }
    }

    /// Equality with rings compared by identity.
    pub fn equals(&self, other: &AlgebraValue) -> bool {
        self.compare(other, &|a, b| a.same(b), &|a, b| a == b)
    }

    /// Equality with rings compared by structure, e.g. across sessions.
    pub fn structurally_equal(&self, other: &AlgebraValue) -> bool {
        self.compare(other, &ring_equals, &structurally_equal)
    }

    fn compare(
        &self,
        other: &AlgebraValue,
        ring_eq: &dyn Fn(&Ring, &Ring) -> bool,
        elem_eq: &dyn Fn(&RingElem, &RingElem) -> bool,
    ) -> bool {
        let seq = |a: &[AlgebraValue], b: &[AlgebraValue]| {
            a.len() == b.len() && a.iter().zip(b).all(|(x, y)| x.compare(y, ring_eq, elem_eq))
        };
        match (self, other) {
            (AlgebraValue::Ring(a), AlgebraValue::Ring(b)) => ring_eq(a, b),
            (AlgebraValue::Elem(a), AlgebraValue::Elem(b)) => elem_eq(a, b),
            (AlgebraValue::Vector(a), AlgebraValue::Vector(b)) => seq(a, b),
            (AlgebraValue::Tuple(a), AlgebraValue::Tuple(b)) => seq(a, b),
            (AlgebraValue::Matrix(a), AlgebraValue::Matrix(b)) => {
                a.rows() == b.rows()
                    && a.cols() == b.cols()
                    && a.entries().iter().zip(b.entries()).all(|(x, y)| elem_eq(x, y))
            }
            (AlgebraValue::Custom(a), AlgebraValue::Custom(b)) => a.eq_value(b.as_ref()),
            _ => false,
        }
    }
}

impl PartialEq for AlgebraValue {
    fn eq(&self, other: &Self) -> bool {
        self.equals(other)
    }
}

impl From<RingElem> for AlgebraValue {
    fn from(e: RingElem) -> Self {
        AlgebraValue::Elem(e)
    }
}

impl From<Ring> for AlgebraValue {
    fn from(r: Ring) -> Self {
        AlgebraValue::Ring(r)
    }
}

impl From<Matrix> for AlgebraValue {
    fn from(m: Matrix) -> Self {
        AlgebraValue::Matrix(m)
    }
}
