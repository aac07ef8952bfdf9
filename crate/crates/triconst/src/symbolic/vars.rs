//! Ordered variable lists shared by polynomial values.

use std::sync::Arc;

use crate::error::{Error, Result};

/// An ordered, shared list of variable names. The first variable is the most
/// significant one in lexicographic monomial order.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct Vars(Arc<[String]>);

impl Vars {
    pub fn new<S: AsRef<str>>(names: &[S]) -> Self {
        Vars(names.iter().map(|s| s.as_ref().to_string()).collect())
    }

    pub fn empty() -> Self {
        Vars(Arc::from(Vec::<String>::new()))
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn names(&self) -> &[String] {
        &self.0
    }

    pub fn index_of(&self, name: &str) -> Result<usize> {
        self.0
            .iter()
            .position(|n| n == name)
            .ok_or_else(|| Error::UnknownVariable(name.to_string()))
    }

    /// True when both lists denote the same ordered universe.
    pub fn same(&self, other: &Vars) -> bool {
        Arc::ptr_eq(&self.0, &other.0) || self.0 == other.0
    }

    /// The common universe of two operands: a constant (empty list) adopts the
    /// other side's variables; otherwise the lists must agree.
    pub fn join(&self, other: &Vars) -> Vars {
        if self.is_empty() {
            other.clone()
        } else if other.is_empty() || self.same(other) {
            self.clone()
        } else {
            panic!(
                "mixing polynomial universes {:?} and {:?}",
                self.names(),
                other.names()
            )
        }
    }
}
