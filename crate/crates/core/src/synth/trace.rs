use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::formula::{Formula, LogicIndex};
use crate::parse::{parse_internal, ParseError};
use crate::print::print;

/// Labelled intermediate formulas of one synthesis run. The first stage is
/// the input and the last is the returned fixed point.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SynthTrace {
    pub input: Formula,
    pub n: LogicIndex,
    pub stages: Vec<(String, Formula)>,
}

#[derive(Debug, Error)]
pub enum TraceFormatError {
    #[error("malformed trace JSON: {0}")]
    Json(#[from] serde_json::Error),
    #[error("stage {index} ({label}): {source}")]
    Formula {
        index: usize,
        label: String,
        #[source]
        source: ParseError,
    },
    #[error("trace has no stages")]
    Empty,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawStage {
    label: String,
    formula: String,
}

impl SynthTrace {
    pub(crate) fn new(input: Formula, n: LogicIndex) -> Self {
        SynthTrace {
            stages: vec![],
            input,
            n,
        }
    }

    pub(crate) fn push(&mut self, label: impl Into<String>, f: Formula) {
        self.stages.push((label.into(), f));
    }

    pub fn last(&self) -> Option<&Formula> {
        self.stages.last().map(|(_, f)| f)
    }

    pub fn get(&self, label: &str) -> Option<&Formula> {
        self.stages.iter().find(|(l, _)| l == label).map(|(_, f)| f)
    }

    /// `[{"label": .., "formula": ..}, ..]`, sugar-free, newline-terminated.
    pub fn to_json(&self) -> String {
        let raw: Vec<RawStage> = self
            .stages
            .iter()
            .map(|(label, f)| RawStage {
                label: label.clone(),
                formula: print(f, false),
            })
            .collect();
        let mut s = serde_json::to_string(&raw).expect("trace serialises");
        s.push('\n');
        s
    }

    /// Parses the stage list; the first stage becomes the input.
    pub fn from_json(text: &str, n: LogicIndex) -> Result<Self, TraceFormatError> {
        let raw: Vec<RawStage> = serde_json::from_str(text)?;
        let mut stages = Vec::with_capacity(raw.len());
        for (index, st) in raw.into_iter().enumerate() {
            let f = parse_internal(&st.formula).map_err(|source| TraceFormatError::Formula {
                index,
                label: st.label.clone(),
                source,
            })?;
            stages.push((st.label, f));
        }
        let input = stages.first().map(|(_, f)| f.clone()).ok_or(TraceFormatError::Empty)?;
        Ok(SynthTrace { input, n, stages })
    }
}
