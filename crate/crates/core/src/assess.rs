use serde::Serialize;
use thiserror::Error;

use crate::metrics::{attach_proofs, compose_report, CDAReport, MetricsError};
use crate::reasoner::{saturate, ReasonError, SaturationResult};
use crate::report::{diff_reports, FieldChange};
use crate::scenario::{apply_overrides, load_doc, parse_scenario, LoadResult, Override, ScenarioDoc, ScenarioError};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error(transparent)]
    Scenario(#[from] ScenarioError),
    #[error(transparent)]
    Reason(#[from] ReasonError),
    #[error(transparent)]
    Metrics(#[from] MetricsError),
}

/// A loaded scenario, its saturation and the report composed from it.
#[derive(Debug, Clone)]
pub struct Assessment {
    pub load: LoadResult,
    pub result: SaturationResult,
    pub report: CDAReport,
}

pub fn assess_loaded(load: LoadResult, trace: bool) -> Result<Assessment, Error> {
    let result = saturate(load.kb.clone(), &load.axioms)?;
    let mut report = compose_report(&result, &load.id, &load.config.likelihood_bands)?;
    if trace {
        attach_proofs(&mut report, &result)?;
    }
    Ok(Assessment { load, result, report })
}

pub fn assess_doc(doc: &ScenarioDoc, trace: bool) -> Result<Assessment, Error> {
    assess_loaded(load_doc(doc)?, trace)
}

/// Load, saturate and report in one call.
pub fn assess(text: &str, trace: bool) -> Result<Assessment, Error> {
    assess_doc(&parse_scenario(text)?, trace)
}

/// A scenario's report beside the report with overrides applied.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct WhatIf {
    pub overrides: Vec<Override>,
    pub base: CDAReport,
    pub whatif: CDAReport,
    pub diff: Vec<FieldChange>,
}

pub fn whatif(doc: &ScenarioDoc, overrides: &[Override], trace: bool) -> Result<WhatIf, Error> {
    let base = assess_doc(doc, trace)?.report;
    let whatif = assess_doc(&apply_overrides(doc, overrides), trace)?.report;
    let diff = diff_reports(&base, &whatif);
    Ok(WhatIf { overrides: overrides.to_vec(), base, whatif, diff })
}
