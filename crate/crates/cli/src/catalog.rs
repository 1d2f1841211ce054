//! Cached catalogs of small pomonoids.
//!
//! Enumerating every pomonoid up to isomorphism is cheap for the sizes the
//! verification suite uses, but not free; the result is also the anchor for
//! the regression counts.  This module stores the enumerated catalog in a
//! content-named text file (same format as [`crate::io`]) and reloads it on
//! subsequent runs, regenerating from scratch whenever the cache is missing
//! or unreadable.

use std::fs;
use std::path::PathBuf;

use anyhow::Context;
use pomonoid::{
    enumerate_algebras, validate, AlgebraKind, FinitePomonoid, Signature,
};

use crate::io;

/// Environment variable that overrides the cache directory.
pub const CACHE_DIR_VAR: &str = "POMONOID_CACHE_DIR";

/// Location of the cache file for catalogs up to `n_max` elements.
pub fn catalog_cache_path(n_max: usize) -> PathBuf {
    let dir = std::env::var_os(CACHE_DIR_VAR)
        .map(PathBuf::from)
        .unwrap_or_else(std::env::temp_dir);
    dir.join(format!("pomonoid-catalog-v1-n{n_max}.txt"))
}

/// Loads the catalog of all pomonoids with at most `n_max` elements, one
/// representative per isomorphism class, in a deterministic order.
///
/// The first call enumerates and writes the cache file plus a sibling
/// `.counts` file recording how many members each size contributes; later
/// calls parse the cache.  A corrupt cache is silently regenerated.
pub fn load_catalog(n_max: usize) -> anyhow::Result<Vec<FinitePomonoid>> {
    let path = catalog_cache_path(n_max);
    if let Ok(text) = fs::read_to_string(&path) {
        if let Ok(members) = parse_catalog(&text) {
            if !members.is_empty() {
                return Ok(members);
            }
        }
    }
    let members = enumerate_algebras(n_max, AlgebraKind::new(Signature::Pomonoid))
        .context("catalog enumeration failed")?;
    let mut text = String::new();
    for m in &members {
        text.push_str(&io::serialize_algebra(m));
        text.push('\n');
    }
    // Cache writes are best-effort: a read-only cache directory should not
    // stop the caller from using the freshly enumerated catalog.
    if fs::write(&path, &text).is_ok() {
        let mut counts = String::new();
        for (n, k) in per_size_counts(&members, n_max) {
            counts.push_str(&format!("n={n} {k}\n"));
        }
        let _ = fs::write(path.with_extension("counts"), counts);
    }
    Ok(members)
}

fn parse_catalog(text: &str) -> Result<Vec<FinitePomonoid>, io::ParseError> {
    let mut members = Vec::new();
    for chunk in text.split("\n\n") {
        if chunk.trim().is_empty() {
            continue;
        }
        let (alg, maps) = io::parse_algebra(chunk)?;
        debug_assert!(maps.is_empty());
        members.push(alg);
    }
    Ok(members)
}

/// Number of catalog members of each size `1..=n_max`.
pub fn per_size_counts(members: &[FinitePomonoid], n_max: usize) -> Vec<(usize, usize)> {
    (1..=n_max)
        .map(|n| (n, members.iter().filter(|m| m.n() == n).count()))
        .collect()
}

/// Reinterprets a catalog pomonoid as a semilattice-ordered monoid, if its
/// order happens to have all binary joins.  Returns `None` otherwise.
pub fn as_sl_monoid(m: &FinitePomonoid) -> Option<FinitePomonoid> {
    let mut s = m.clone().with_joins().ok()?;
    s.signature = Signature::SlMonoid;
    let report = validate(&s, AlgebraKind::new(Signature::SlMonoid)).ok()?;
    report.ok().then_some(s)
}

#[cfg(test)]
mod tests {
    use std::sync::Mutex;

    use super::*;

    /// The cache directory is selected through a process-wide environment
    /// variable, so tests that touch it must not interleave.
    static ENV_LOCK: Mutex<()> = Mutex::new(());

    fn with_scratch_cache<T>(f: impl FnOnce() -> T) -> T {
        let _guard = ENV_LOCK.lock().unwrap();
        let dir = tempfile::tempdir().expect("tempdir");
        std::env::set_var(CACHE_DIR_VAR, dir.path());
        let out = f();
        std::env::remove_var(CACHE_DIR_VAR);
        out
    }

    #[test]
    fn catalog_round_trips_through_the_cache_file() {
        with_scratch_cache(|| {
            let first = load_catalog(2).expect("enumerate");
            assert!(catalog_cache_path(2).exists());
            let second = load_catalog(2).expect("reload");
            assert_eq!(first.len(), second.len());
            for (a, b) in first.iter().zip(&second) {
                assert_eq!(a.name, b.name);
                assert_eq!(io::serialize_algebra(a), io::serialize_algebra(b));
            }
        });
    }

    #[test]
    fn sl_view_exists_exactly_when_joins_do() {
        let members = with_scratch_cache(|| load_catalog(2).expect("enumerate"));
        for m in &members {
            let has_joins = m.clone().with_joins().is_ok();
            assert_eq!(as_sl_monoid(m).is_some(), has_joins, "{}", m.name);
            if let Some(s) = as_sl_monoid(m) {
                assert_eq!(s.signature, Signature::SlMonoid);
                assert!(s.join(0, 0).is_some());
            }
        }
    }
}
