//! Power-class groups `k^×/k^{×d}`: cyclic of order `gcd(d, q-1)` for a
//! concrete field, or an arbitrary finite abelian group in abstract mode.

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::ffield::{Elem, FieldCtx};
use crate::group::{AbGroup, Subgroup};

#[derive(Debug, Clone)]
pub struct PowerClassGroup {
    group: Arc<AbGroup>,
    d: u32,
    field: Option<Arc<FieldCtx>>,
}

impl PartialEq for PowerClassGroup {
    fn eq(&self, other: &Self) -> bool {
        self.group == other.group
            && self.d == other.d
            && match (&self.field, &other.field) {
                (None, None) => true,
                (Some(a), Some(b)) => Arc::ptr_eq(a, b) || a.descriptor() == b.descriptor(),
                _ => false,
            }
    }
}

impl Eq for PowerClassGroup {}

impl PowerClassGroup {
    pub fn of_field(field: Arc<FieldCtx>) -> Arc<Self> {
        Arc::new(PowerClassGroup {
            group: Arc::new(AbGroup::cyclic(field.s())),
            d: field.d(),
            field: Some(field),
        })
    }

    pub fn abstract_group(group: AbGroup, d: u32) -> Arc<Self> {
        Arc::new(PowerClassGroup { group: Arc::new(group), d, field: None })
    }

    pub fn group(&self) -> &Arc<AbGroup> {
        &self.group
    }

    pub fn order(&self) -> usize {
        self.group.order()
    }

    pub fn d(&self) -> u32 {
        self.d
    }

    pub fn field(&self) -> Option<&Arc<FieldCtx>> {
        self.field.as_ref()
    }

    pub fn require_field(&self) -> Result<&Arc<FieldCtx>> {
        self.field.as_ref().ok_or(Error::AbstractMode)
    }

    pub fn class_of(&self, x: Elem) -> Result<usize> {
        self.require_field()?.class_of(x)
    }

    pub fn subgroup(&self, desc: &str) -> Result<Subgroup> {
        Subgroup::parse(self.group.clone(), desc)
    }

    pub fn maximal(&self) -> Subgroup {
        Subgroup::whole(self.group.clone())
    }

    pub fn describe(&self) -> String {
        match &self.field {
            Some(f) => format!("F_{} (d = {}, classes Z/{})", f.q(), self.d, f.s()),
            None => format!("{} (abstract, d = {})", self.group, self.d),
        }
    }
}
