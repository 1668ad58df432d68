//! Seeded instance generators for the benchmark families and the clique
//! embedding used by the dense families.

mod embedding;
mod families;
mod k64;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

pub use embedding::{
    embed, ChainCheck, CliqueEmbedding, EmbedOutcome, EmbeddedInstance, EmbeddingLayout,
    CHAIN_WEIGHT,
};
pub use families::{gen_mgw, gen_mis, gen_rfr, gen_selby, rebin, FaultBase, FaultPolicy, GAMMA};
pub use k64::{cut_size, gen_k64_ising, gen_k64_maxcut, logical_ising, logical_maxcut};

use crate::error::{Error, Result};
use crate::ising::IsingInstance;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Family {
    Mgw,
    Rfr,
    Selby,
    Mis,
    /// Input only: externally supplied weights re-binned with [`rebin`].
    Lga,
    K64Ising,
    K64MaxCut,
}

impl Family {
    pub const ALL: [Family; 7] = [
        Family::Mgw,
        Family::Rfr,
        Family::Selby,
        Family::Mis,
        Family::Lga,
        Family::K64Ising,
        Family::K64MaxCut,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Family::Mgw => "mgw",
            Family::Rfr => "rfr",
            Family::Selby => "selby",
            Family::Mis => "mis",
            Family::Lga => "lga",
            Family::K64Ising => "k64-ising",
            Family::K64MaxCut => "k64-maxcut",
        }
    }

    pub fn is_embedded(self) -> bool {
        matches!(self, Family::K64Ising | Family::K64MaxCut)
    }

    /// Edge probability used when none is given.
    pub fn default_density(self) -> Option<f64> {
        match self {
            Family::K64Ising => Some(0.23),
            Family::K64MaxCut => Some(0.18),
            _ => None,
        }
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Family {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Family::ALL
            .into_iter()
            .find(|f| f.name() == s)
            .ok_or_else(|| Error::OutOfRange(format!("unknown family `{s}`")))
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GeneratorSpec {
    pub family: Family,
    pub k: usize,
    pub seed: u64,
    #[serde(default)]
    pub faults: FaultPolicy,
    /// Edge probability of the logical graph (embedded families only).
    #[serde(default)]
    pub density: Option<f64>,
    #[serde(default)]
    pub chain_check: ChainCheck,
}

impl GeneratorSpec {
    pub fn new(family: Family, k: usize, seed: u64) -> Self {
        Self {
            family,
            k,
            seed,
            faults: FaultPolicy::machine(),
            density: family.default_density(),
            chain_check: ChainCheck::Integrity,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.k == 0 {
            return Err(Error::OutOfRange(
                "Chimera size k must be at least 1".into(),
            ));
        }
        match (self.family.is_embedded(), self.density) {
            (true, None) => Err(Error::OutOfRange(format!(
                "{} needs an edge probability",
                self.family
            ))),
            (true, Some(p)) if !(p > 0.0 && p < 1.0) => Err(Error::OutOfRange(format!(
                "edge probability {p} is not in (0, 1)"
            ))),
            (false, Some(_)) => Err(Error::OutOfRange(format!(
                "{} takes no edge probability",
                self.family
            ))),
            _ => Ok(()),
        }
    }
}

#[derive(Clone, Debug)]
pub enum Generated {
    Instance(IsingInstance),
    Embedded(Box<EmbeddedInstance>),
    /// A normal outcome for the embedded families, distinct from an error.
    Rejected {
        reason: String,
    },
}

impl Generated {
    /// The instance to solve: the physical one for embedded families.
    pub fn instance(&self) -> Option<&IsingInstance> {
        match self {
            Generated::Instance(i) => Some(i),
            Generated::Embedded(e) => Some(&e.physical),
            Generated::Rejected { .. } => None,
        }
    }
}

pub fn generate(spec: &GeneratorSpec) -> Result<Generated> {
    spec.validate()?;
    let (k, seed, f) = (spec.k, spec.seed, &spec.faults);
    let plain = |r: Result<IsingInstance>| r.map(Generated::Instance);
    let embedded = |r: Result<EmbedOutcome>| {
        r.map(|o| match o {
            EmbedOutcome::Embedded(e) => Generated::Embedded(e),
            EmbedOutcome::Rejected { reason } => Generated::Rejected { reason },
        })
    };
    match spec.family {
        Family::Mgw => plain(gen_mgw(k, f, seed)),
        Family::Rfr => plain(gen_rfr(k, f, seed)),
        Family::Selby => plain(gen_selby(k, f, seed)),
        Family::Mis => plain(gen_mis(k, f, seed)),
        Family::Lga => Err(Error::OutOfRange(
            "lga instances are not generated; re-bin an input file instead".into(),
        )),
        Family::K64Ising => embedded(gen_k64_ising(
            k,
            spec.density.unwrap_or(0.0),
            seed,
            spec.chain_check,
        )),
        Family::K64MaxCut => embedded(gen_k64_maxcut(
            k,
            spec.density.unwrap_or(0.0),
            seed,
            spec.chain_check,
        )),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn family_names_round_trip() {
        for f in Family::ALL {
            assert_eq!(f.name().parse::<Family>().unwrap(), f);
        }
        assert!("k32".parse::<Family>().is_err());
    }

    #[test]
    fn spec_validation() {
        let mut s = GeneratorSpec::new(Family::Rfr, 2, 1);
        assert!(s.validate().is_ok());
        s.density = Some(0.2);
        assert!(s.validate().is_err());
        let mut s = GeneratorSpec::new(Family::K64MaxCut, 16, 1);
        s.density = Some(1.5);
        assert!(generate(&s).is_err());
        assert!(generate(&GeneratorSpec::new(Family::Lga, 2, 1)).is_err());
    }

    #[test]
    fn every_generated_instance_respects_gamma() {
        for family in [
            Family::Mgw,
            Family::Rfr,
            Family::Selby,
            Family::Mis,
            Family::K64MaxCut,
        ] {
            let k = if family.is_embedded() { 4 } else { 3 };
            let g = generate(&GeneratorSpec::new(family, k, 3)).unwrap();
            let inst = g.instance().expect("accepted");
            assert_eq!(inst.granularity().map(|g| g.gamma()), Some(10), "{family}");
        }
    }
}
