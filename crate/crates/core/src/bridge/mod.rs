//! Translations between the chase and equality saturation, and verifiers
//! that run both sides and compare their results.

mod chase;
mod skolem;

use std::fmt;

use thiserror::Error;

use crate::chase::{ChaseError, Elem};
use crate::egraph::{ClassId, EGraphError};
use crate::term::{Symbol, TermError};

pub use chase::{
    decode_instance_to_egraph, encode_egraph_to_instance, encode_eqsat_to_chase, encode_trs_to_deps, relation_for,
    verify_chase_equiv, ChaseEncoding, ChaseVerifyConfig,
};
pub use skolem::{encode_skolem_to_eqsat, verify_skolem_equiv, xi, SkolemEncoding, AND, TOP};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum BridgeError {
    #[error(transparent)]
    Term(#[from] TermError),
    #[error(transparent)]
    EGraph(#[from] EGraphError),
    #[error(transparent)]
    Chase(#[from] ChaseError),
    #[error("symbol `{0}` is reserved by the encoding")]
    Reserved(Symbol),
    #[error("`{0}` is used both as a relation and as a domain symbol")]
    NameClash(Symbol),
    #[error("input instances may only contain constants, found {0}")]
    NonConstant(Elem),
    #[error("relation `{0}` does not encode a function symbol")]
    NotEncodedRelation(Symbol),
    #[error("encoded E-graphs contain only nulls, found {0}")]
    NonNull(Elem),
    #[error("class {0} lies on a cycle of domain nodes")]
    CyclicDomain(ClassId),
    #[error("class {0} is an argument of a relation node but represents no domain term")]
    NoDomainTerm(ClassId),
}

/// One line of a verification report.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Check {
    pub name: String,
    pub pass: bool,
    pub detail: String,
}

impl fmt::Display for Check {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "check={} status={} detail={}",
            self.name,
            if self.pass { "pass" } else { "fail" },
            self.detail
        )
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Report {
    pub checks: Vec<Check>,
}

impl Report {
    pub fn push(&mut self, name: impl Into<String>, pass: bool, detail: impl Into<String>) {
        self.checks.push(Check {
            name: name.into(),
            pass,
            detail: detail.into(),
        });
    }

    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }

    /// A single summary line named `name`.
    pub fn summary(&self, name: &str) -> Check {
        let failed: Vec<&str> = self
            .checks
            .iter()
            .filter(|c| !c.pass)
            .map(|c| c.name.as_str())
            .collect();
        Check {
            name: name.to_string(),
            pass: failed.is_empty(),
            detail: if failed.is_empty() {
                format!("{} checks", self.checks.len())
            } else {
                format!("failed:{}", failed.join(","))
            },
        }
    }
}

impl fmt::Display for Report {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for c in &self.checks {
            writeln!(f, "{c}")?;
        }
        Ok(())
    }
}
