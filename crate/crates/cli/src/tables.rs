//! Locating, loading and generating coefficient caches.

use std::path::{Path, PathBuf};

use cuspsum_core::coefficients::{
    generate_delta_coefficients_with, load_cache, save_cache, CoefficientTable, GenerationBudget, DEFAULT_N_MAX,
};

use crate::{CliError, CACHE_DIR_ENV};

/// `$CUSPSUM_CACHE_DIR`, else `$XDG_CACHE_HOME/cuspsum`, else
/// `$HOME/.cache/cuspsum`, else `.cuspsum-cache`.
pub fn cache_dir() -> PathBuf {
    let env = |k| std::env::var_os(k).filter(|v| !v.is_empty()).map(PathBuf::from);
    if let Some(d) = env(CACHE_DIR_ENV) {
        return d;
    }
    if let Some(d) = env("XDG_CACHE_HOME") {
        return d.join("cuspsum");
    }
    if let Some(d) = env("HOME") {
        return d.join(".cache").join("cuspsum");
    }
    PathBuf::from(".cuspsum-cache")
}

pub fn cache_file(dir: &Path, n_max: usize) -> PathBuf {
    dir.join(format!("delta-n{n_max}.coeffs"))
}

fn cached_sizes(dir: &Path) -> Vec<(usize, PathBuf)> {
    let Ok(entries) = std::fs::read_dir(dir) else {
        return Vec::new();
    };
    let mut out: Vec<(usize, PathBuf)> = entries
        .filter_map(|e| {
            let path = e.ok()?.path();
            let name = path.file_name()?.to_str()?;
            let n = name.strip_prefix("delta-n")?.strip_suffix(".coeffs")?.parse().ok()?;
            Some((n, path))
        })
        .collect();
    out.sort();
    out
}

/// Writes through a temporary file so readers never see a partial cache.
pub fn save_atomic(t: &CoefficientTable, path: &Path) -> Result<(), CliError> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir)?;
    }
    let tmp = path.with_extension(format!("tmp{}", std::process::id()));
    save_cache(t, &tmp)?;
    std::fs::rename(&tmp, path)?;
    Ok(())
}

pub fn generate(n_max: usize) -> Result<CoefficientTable, CliError> {
    Ok(generate_delta_coefficients_with(n_max, GenerationBudget::default())?)
}

fn load(path: &Path) -> Result<CoefficientTable, CliError> {
    let (t, report) = load_cache(path)?;
    for w in report.warnings_for_loaded() {
        eprintln!("cuspsum: warning: {}: {w:?}", path.display());
    }
    Ok(t)
}

/// A table covering `1..=needed`: the explicit cache file if given, else the
/// smallest sufficient file in the cache directory, else a freshly generated
/// table of at least the default length, saved for later runs.
pub fn table_for(explicit: Option<&Path>, needed: u64) -> Result<CoefficientTable, CliError> {
    let needed = needed.max(1) as usize;
    if let Some(path) = explicit {
        if path.exists() {
            let t = load(path)?;
            t.require(needed as u64)?;
            return Ok(t);
        }
        let t = generate(needed.max(DEFAULT_N_MAX))?;
        save_atomic(&t, path)?;
        return Ok(t);
    }
    let dir = cache_dir();
    if let Some((_, path)) = cached_sizes(&dir).into_iter().find(|(n, _)| *n >= needed) {
        return load(&path);
    }
    let n = needed.max(DEFAULT_N_MAX);
    let t = generate(n)?;
    save_atomic(&t, &cache_file(&dir, n))?;
    Ok(t)
}

/// The table a `validate` run audits.
pub fn existing_cache(explicit: Option<&Path>, n_max: Option<usize>) -> Result<PathBuf, CliError> {
    if let Some(p) = explicit {
        return Ok(p.to_path_buf());
    }
    let dir = cache_dir();
    let found = cached_sizes(&dir)
        .into_iter()
        .find(|(n, _)| n_max.is_none_or(|m| *n == m))
        .map(|(_, p)| p);
    found.ok_or_else(|| {
        CliError::Resource(format!(
            "no coefficient cache in {}; run `cuspsum gen` first",
            dir.display()
        ))
    })
}
