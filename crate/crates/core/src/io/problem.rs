use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::parse::{parse_poly, parse_rational, ParseError};
use crate::chart::{Chart, ChartError, DivisorLabel, LabelOrigin};
use crate::idealistic::{IdealisticError, IdealisticSpace, MarkedIdeal};
use crate::poly::{CoordSubspace, PolyError, RationalPoint};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ProblemError {
    #[error("malformed problem file: {0}")]
    Json(String),
    #[error("label `{0}` must look like E<number>")]
    LabelName(String),
    #[error("ideal {index}: {source}")]
    Poly { index: usize, source: ParseError },
    #[error("seed {index}: expected {expected} coordinates, found {found}")]
    SeedLength { index: usize, expected: usize, found: usize },
    #[error("seed {index}: {source}")]
    Seed { index: usize, source: ParseError },
    #[error(transparent)]
    Chart(#[from] ChartError),
    #[error(transparent)]
    Idealistic(#[from] IdealisticError),
    #[error(transparent)]
    Subspace(#[from] PolyError),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OriginTag {
    Old,
    New,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DivisorEntry {
    pub label: String,
    pub variable: String,
    pub origin: OriginTag,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct IdealEntry {
    pub poly: String,
    pub mark: u32,
}

/// On-disk form of an idealistic space.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProblemFile {
    pub variables: Vec<String>,
    #[serde(default)]
    pub divisor: Vec<DivisorEntry>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub subspace: Option<Vec<String>>,
    pub ideals: Vec<IdealEntry>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub seeds: Vec<Vec<String>>,
}

fn label_id(name: &str) -> Result<u32, ProblemError> {
    name.strip_prefix('E').and_then(|d| d.parse().ok()).ok_or_else(|| ProblemError::LabelName(name.to_string()))
}

impl ProblemFile {
    pub fn from_json(text: &str) -> Result<Self, ProblemError> {
        serde_json::from_str(text).map_err(|e| ProblemError::Json(e.to_string()))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("problem files serialize")
    }

    pub fn to_space(&self) -> Result<IdealisticSpace, ProblemError> {
        let mut chart = Chart::new(self.variables.clone())?;
        for entry in &self.divisor {
            let origin = match entry.origin {
                OriginTag::Old => LabelOrigin::Old,
                OriginTag::New => LabelOrigin::Exceptional { step: 0 },
            };
            let var = chart.var_index(&entry.variable)?;
            chart = chart.with_label(DivisorLabel { id: label_id(&entry.label)?, origin }, var)?;
        }
        if let Some(zeroed) = &self.subspace {
            let vars = zeroed.iter().map(|n| chart.var_index(n)).collect::<Result<Vec<_>, _>>()?;
            chart = chart.with_subspace(Some(CoordSubspace::new(vars)?))?;
        }
        let ideals = self
            .ideals
            .iter()
            .enumerate()
            .map(|(index, e)| {
                let poly = parse_poly(&e.poly, &self.variables).map_err(|source| ProblemError::Poly { index, source })?;
                Ok(MarkedIdeal::new(poly, e.mark))
            })
            .collect::<Result<Vec<_>, ProblemError>>()?;
        Ok(IdealisticSpace::new(chart, ideals)?)
    }

    pub fn seed_points(&self) -> Result<Vec<RationalPoint>, ProblemError> {
        self.seeds
            .iter()
            .enumerate()
            .map(|(index, seed)| {
                if seed.len() != self.variables.len() {
                    return Err(ProblemError::SeedLength { index, expected: self.variables.len(), found: seed.len() });
                }
                let coords = seed
                    .iter()
                    .map(|c| parse_rational(c).map_err(|source| ProblemError::Seed { index, source }))
                    .collect::<Result<Vec<_>, _>>()?;
                Ok(RationalPoint::new(coords))
            })
            .collect()
    }

    /// Problem file describing `space`; seeds are not part of a space.
    pub fn from_space(space: &IdealisticSpace) -> Self {
        let chart = space.chart();
        let names = chart.variables();
        ProblemFile {
            variables: names.to_vec(),
            divisor: chart
                .divisor()
                .iter()
                .map(|(l, &v)| DivisorEntry {
                    label: l.name(),
                    variable: names[v].clone(),
                    origin: match l.origin {
                        LabelOrigin::Old => OriginTag::Old,
                        LabelOrigin::Exceptional { .. } => OriginTag::New,
                    },
                })
                .collect(),
            subspace: chart.subspace().map(|s| chart.names_of(s.vars())),
            ideals: space
                .ideals()
                .iter()
                .map(|m| IdealEntry { poly: m.poly.display(names).to_string(), mark: m.mark })
                .collect(),
            seeds: Vec::new(),
        }
    }
}
