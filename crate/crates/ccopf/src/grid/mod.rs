//! Network case ingestion, admittance assembly, and uncertainty
//! specifications.

mod admittance;
mod case;
mod uncertainty;

pub use admittance::build_admittance;
pub use case::{
    apply_modifications, parse_case, parse_case_str, serialize_case, Bus, BusKind,
    CaseModifications, Generator, Line, NetworkCase,
};
pub use uncertainty::{
    load_uncertainty, GermConfig, InjectionConfig, UncertaintyConfig, UncertaintySpec,
};

use thiserror::Error;

#[derive(Debug, Error)]
pub enum GridError {
    #[error("{path}:{line}: {message}")]
    Parse {
        path: String,
        line: usize,
        message: String,
    },
    #[error("case error: {0}")]
    Invalid(String),
    #[error("io error reading {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("uncertainty config: {0}")]
    Uncertainty(String),
    #[error(transparent)]
    Pce(#[from] crate::pce::PceError),
}
