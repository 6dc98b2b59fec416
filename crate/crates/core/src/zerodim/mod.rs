//! Deciding or bounding `Zero(I_s) = {0}`.

pub mod certificate;
pub mod groebner;
pub mod probe;
pub mod search;

pub use certificate::{
    elimination_certificate, verify_certificate, CertificateReport, EliminationCertificate,
};
pub use groebner::{
    groebner_zero_dim_test, GbConfig, InconclusiveReason, ZeroDimOutcome, ZeroDimVerdict,
};
pub use probe::{random_rank_probe, ProbeField, RankProbeReport};
pub use search::{smax_search, Budget, Evidence, SearchEntry, SearchStatus, SmaxSearchReport};
