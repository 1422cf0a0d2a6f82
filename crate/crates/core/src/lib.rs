//! Collateral damage assessment for AI-system target engagement: a typed
//! closed-world knowledge base, a class-expression rule language, a
//! forward-chaining reasoner with audit trails, and assessment reports.

mod assess;
pub mod dsl;
pub mod kb;
pub mod metrics;
pub mod reasoner;
pub mod report;
pub mod scenario;
pub mod seed;

pub use assess::{assess, assess_doc, assess_loaded, whatif, Assessment, Error, WhatIf};
