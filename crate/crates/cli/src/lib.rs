//! Command-line workbench around the `pomonoid` library: a plain-text file
//! format for finite ordered algebras, literal syntaxes for words, signed
//! words, antichains, and quasi-inequalities, a cached catalog of small
//! pomonoids, and the statement-replay verification suite.

pub mod catalog;
pub mod io;
pub mod suite;

pub use catalog::{as_sl_monoid, catalog_cache_path, load_catalog};
pub use suite::{
    check_triangle_identities, run_suite, Status, SuiteConfig,
    VerificationReport,
};
