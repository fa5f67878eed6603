//! Torsion loci: scanning, certification and counting.

pub mod exceptional;
pub mod scan;

pub use exceptional::{exceptional_scan, section_is_torsion, section_order, ExceptionalHit};
pub use scan::{
    count_rational, exact_order_oracle, oracle_roots, psi_numerator, scan_torsion, verify_hit, Certificate,
    CompletenessWarning, CountReport, ScanOptions, ScanReport, ScanWindow, TorsionHit,
};
