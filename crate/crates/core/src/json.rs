//! Instance-file schemas shared by the CLI and the C interface. Structural
//! counts and identifiers are JSON numbers; every lattice or rational scalar
//! travels as a decimal string (`"p"` or `"p/q"` with positive q) so
//! arbitrary precision survives the wire.

use crate::belyi::{BelyiState, RatPoly};
use crate::cone::Cone;
use crate::exactmath::{
    format_rational, parse_bigint, parse_rational, BigInt, IntMatrix, LatticeVector,
};
use crate::fan::{CompatibleFamily, Fan, StrataRelation, StrataSystem, Stratum};
use crate::fibration::{ComponentRecord, ContactClass, SeparationState};
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use thiserror::Error;

/// `Malformed` is a schema or literal problem (CLI exit 2); `Domain` is a
/// well-formed instance violating a module invariant (CLI exit 1).
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum JsonError {
    #[error("malformed instance: {0}")]
    Malformed(String),
    #[error("{0}")]
    Domain(String),
}

fn bad(e: impl std::fmt::Display) -> JsonError {
    JsonError::Malformed(e.to_string())
}

fn domain(e: impl std::fmt::Display) -> JsonError {
    JsonError::Domain(e.to_string())
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
pub struct ConeDoc {
    pub rank: usize,
    pub rays: Vec<Vec<String>>,
}

impl ConeDoc {
    pub fn from_cone(cone: &Cone) -> ConeDoc {
        ConeDoc {
            rank: cone.rank(),
            rays: cone
                .rays()
                .iter()
                .map(|r| r.entries().iter().map(|e| e.to_string()).collect())
                .collect(),
        }
    }

    fn parse_rays(&self) -> Result<Vec<LatticeVector>, JsonError> {
        self.rays
            .iter()
            .map(|ray| {
                let entries: Result<Vec<BigInt>, _> =
                    ray.iter().map(|s| parse_bigint(s)).collect();
                Ok(LatticeVector::new(entries.map_err(bad)?))
            })
            .collect()
    }

    /// Strict conversion: rejects redundant generators and non-pointed input.
    pub fn to_cone(&self) -> Result<Cone, JsonError> {
        Cone::new(self.rank, self.parse_rays()?).map_err(domain)
    }
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
pub struct FanDoc {
    pub rank: usize,
    pub support: Option<ConeDoc>,
    pub cones: Vec<ConeDoc>,
}

impl FanDoc {
    pub fn from_fan(fan: &Fan) -> FanDoc {
        FanDoc {
            rank: fan.rank(),
            support: fan.support().map(ConeDoc::from_cone),
            cones: fan.cones().iter().map(ConeDoc::from_cone).collect(),
        }
    }

    pub fn to_fan(&self) -> Result<Fan, JsonError> {
        let support = self.support.as_ref().map(|c| c.to_cone()).transpose()?;
        let cones: Result<Vec<Cone>, JsonError> =
            self.cones.iter().map(|c| c.to_cone()).collect();
        Fan::new(self.rank, cones?, support).map_err(domain)
    }
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
pub struct BelyiDoc {
    pub factors: Vec<Vec<String>>,
    pub sections: Vec<String>,
    pub infinity: bool,
}

impl BelyiDoc {
    pub fn from_state(state: &BelyiState) -> BelyiDoc {
        BelyiDoc {
            factors: state
                .factors()
                .iter()
                .map(|f| f.coeffs().iter().map(format_rational).collect())
                .collect(),
            sections: state.sections().iter().map(format_rational).collect(),
            infinity: state.has_infinity(),
        }
    }

    pub fn to_state(&self) -> Result<BelyiState, JsonError> {
        let mut factors = Vec::with_capacity(self.factors.len());
        for coeffs in &self.factors {
            let parsed: Result<Vec<_>, _> = coeffs.iter().map(|s| parse_rational(s)).collect();
            factors.push(RatPoly::from_coeffs(parsed.map_err(bad)?));
        }
        let sections: Result<Vec<_>, _> =
            self.sections.iter().map(|s| parse_rational(s)).collect();
        BelyiState::new(factors, sections.map_err(bad)?, self.infinity).map_err(domain)
    }
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
pub struct ClassDoc {
    pub members: Vec<u32>,
    pub mult: BTreeMap<String, u64>,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
pub struct ComponentDoc {
    pub id: u32,
    pub classes: Vec<ClassDoc>,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
pub struct SeparationDoc {
    pub sections: u32,
    pub components: Vec<ComponentDoc>,
}

fn parse_pair_key(key: &str) -> Result<(u32, u32), JsonError> {
    let (i, j) = key
        .split_once(',')
        .ok_or_else(|| bad(format!("multiplicity key `{key}` is not of the form \"i,j\"")))?;
    let i: u32 = i.trim().parse().map_err(bad)?;
    let j: u32 = j.trim().parse().map_err(bad)?;
    Ok(if i < j { (i, j) } else { (j, i) })
}

impl SeparationDoc {
    pub fn from_state(state: &SeparationState) -> SeparationDoc {
        SeparationDoc {
            sections: state.sections,
            components: state
                .components
                .iter()
                .map(|c| ComponentDoc {
                    id: c.id,
                    classes: c
                        .classes
                        .iter()
                        .map(|class| ClassDoc {
                            members: class.members.iter().copied().collect(),
                            mult: class
                                .mult
                                .iter()
                                .map(|(&(i, j), &v)| (format!("{i},{j}"), v))
                                .collect(),
                        })
                        .collect(),
                })
                .collect(),
        }
    }

    pub fn to_state(&self) -> Result<SeparationState, JsonError> {
        let mut components = Vec::with_capacity(self.components.len());
        for c in &self.components {
            let mut classes = Vec::with_capacity(c.classes.len());
            for class in &c.classes {
                let mut mult = BTreeMap::new();
                for (key, &value) in &class.mult {
                    mult.insert(parse_pair_key(key)?, value);
                }
                classes.push(ContactClass::new(class.members.iter().copied(), mult));
            }
            components.push(ComponentRecord { id: c.id, classes });
        }
        let state = SeparationState {
            sections: self.sections,
            components,
        };
        state.validate().map_err(domain)?;
        Ok(state)
    }
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
pub struct ToricDoc {
    pub rank: usize,
    pub monomials: Vec<Vec<String>>,
    pub extra_affine_rank: usize,
}

impl ToricDoc {
    pub fn monomial_vectors(&self) -> Result<Vec<LatticeVector>, JsonError> {
        self.monomials
            .iter()
            .map(|m| {
                let entries: Result<Vec<BigInt>, _> = m.iter().map(|s| parse_bigint(s)).collect();
                Ok(LatticeVector::new(entries.map_err(bad)?))
            })
            .collect()
    }
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
pub struct StratumDoc {
    pub label: String,
    pub codim: usize,
    pub support: ConeDoc,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
pub struct RelationDoc {
    pub small: String,
    pub big: String,
    pub map: Vec<Vec<String>>,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
pub struct StrataDoc {
    pub strata: Vec<StratumDoc>,
    pub relations: Vec<RelationDoc>,
}

impl StrataDoc {
    pub fn to_system(&self) -> Result<StrataSystem, JsonError> {
        let strata: Result<Vec<Stratum>, JsonError> = self
            .strata
            .iter()
            .map(|s| {
                Ok(Stratum {
                    label: s.label.clone(),
                    codim: s.codim,
                    support: s.support.to_cone()?,
                })
            })
            .collect();
        let relations: Result<Vec<StrataRelation>, JsonError> = self
            .relations
            .iter()
            .map(|r| {
                let rows = r.map.len();
                let cols = r.map.first().map(|row| row.len()).unwrap_or(0);
                let mut entries = Vec::with_capacity(rows * cols);
                for row in &r.map {
                    if row.len() != cols {
                        return Err(bad("ragged inclusion matrix"));
                    }
                    for s in row {
                        entries.push(parse_bigint(s).map_err(bad)?);
                    }
                }
                Ok(StrataRelation {
                    small: r.small.clone(),
                    big: r.big.clone(),
                    map: IntMatrix::from_entries(rows, cols, entries).map_err(bad)?,
                })
            })
            .collect();
        Ok(StrataSystem {
            strata: strata?,
            relations: relations?,
        })
    }
}

/// A parsed instance file: the `kind` tag selects the payload schema.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum InstanceFile {
    Cone(ConeDoc),
    Fan(FanDoc),
    ToricModel(ToricDoc),
    Belyi(BelyiDoc),
    Separation(SeparationDoc),
    Strata {
        system: StrataDoc,
        family: BTreeMap<String, FanDoc>,
    },
}

impl InstanceFile {
    pub fn parse(text: &str) -> Result<InstanceFile, JsonError> {
        serde_json::from_str(text).map_err(bad)
    }

    pub fn kind(&self) -> &'static str {
        match self {
            InstanceFile::Cone(_) => "cone",
            InstanceFile::Fan(_) => "fan",
            InstanceFile::ToricModel(_) => "toric-model",
            InstanceFile::Belyi(_) => "belyi",
            InstanceFile::Separation(_) => "separation",
            InstanceFile::Strata { .. } => "strata",
        }
    }
}

pub fn family_from_docs(
    docs: &BTreeMap<String, FanDoc>,
) -> Result<CompatibleFamily, JsonError> {
    let mut subdivisions = BTreeMap::new();
    for (label, doc) in docs {
        subdivisions.insert(label.clone(), doc.to_fan()?);
    }
    Ok(CompatibleFamily { subdivisions })
}
