//! JSON form of a mined explanation set.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::featurization::{Predicate, PredicateIndex};
use crate::miner::{annotate, ExplanationSet};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportRow {
    pub predicates: Vec<Predicate>,
    pub actions: usize,
    pub followers: usize,
    pub followups: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExplanationReport {
    pub influencer: u64,
    pub total_followups: usize,
    pub explanations: Vec<ReportRow>,
    pub total_coverage: usize,
    pub relative_coverage: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub algorithm: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    pub truncated: bool,
}

impl ExplanationReport {
    /// Annotates every explanation of `set` against `index`.
    pub fn new(index: &PredicateIndex, set: &ExplanationSet, influencer: u64) -> Result<Self> {
        let explanations = set
            .explanations
            .iter()
            .map(|e| {
                let a = annotate(index, e)?;
                Ok(ReportRow {
                    predicates: e.predicates.iter().map(|&p| index.predicate(p).clone()).collect(),
                    actions: a.actions,
                    followers: a.followers,
                    followups: a.followups,
                })
            })
            .collect::<Result<_>>()?;
        Ok(ExplanationReport {
            influencer,
            total_followups: set.universe(),
            explanations,
            total_coverage: set.total_coverage(),
            relative_coverage: set.relative_coverage(),
            algorithm: None,
            seed: None,
            truncated: set.truncated,
        })
    }

    pub fn with_algorithm(mut self, algorithm: &str, seed: Option<u64>) -> Self {
        self.algorithm = Some(algorithm.to_string());
        self.seed = seed;
        self
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|source| Error::Json {
            context: "explanation report".into(),
            source,
        })
    }
}
