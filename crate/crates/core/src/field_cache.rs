//! Plain-text cache of field construction results, so repeated runs skip the
//! modulus and primitive-element searches.
//!
//! One entry per line: `p=<p> n=<n> modulus=<c0,...,cn> theta=<index>`, with
//! `#` starting a comment. Entries are never trusted blindly: on a hit the
//! modulus is re-checked for monic irreducibility and theta for full
//! multiplicative order, and anything stale or unparsable is ignored and
//! rebuilt from scratch, appending a fresh entry. The last entry for a given
//! (p, n) wins, so a rebuilt entry shadows a corrupted one.

use std::fs;
use std::io::Write as _;
use std::path::Path;

use thiserror::Error;

use crate::finite_field::{
    build_field_with_cap, field_from_parts, FieldError, FieldStructure, DEFAULT_Q_CAP,
};

#[derive(Debug, Error)]
pub enum CacheError {
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Field(#[from] FieldError),
}

pub fn build_field_cached(p: usize, n: u32, path: &Path) -> Result<FieldStructure, CacheError> {
    build_field_cached_with_cap(p, n, path, DEFAULT_Q_CAP)
}

pub fn build_field_cached_with_cap(
    p: usize,
    n: u32,
    path: &Path,
    cap: usize,
) -> Result<FieldStructure, CacheError> {
    if path.exists() {
        let text = fs::read_to_string(path)?;
        if let Some((modulus, theta)) = find_entry(&text, p, n) {
            if let Ok(field) = field_from_parts(p, n, modulus, theta, cap) {
                return Ok(field);
            }
        }
    }
    let field = build_field_with_cap(p, n, cap)?;
    append_entry(path, &field)?;
    Ok(field)
}

/// Appends one cache line for a constructed field.
pub fn append_entry(path: &Path, field: &FieldStructure) -> std::io::Result<()> {
    let mut file = fs::OpenOptions::new().create(true).append(true).open(path)?;
    let coeffs: Vec<String> = field
        .modulus_coeffs()
        .iter()
        .map(|c| c.to_string())
        .collect();
    writeln!(
        file,
        "p={} n={} modulus={} theta={}",
        field.p(),
        field.n(),
        coeffs.join(","),
        field.theta()
    )
}

fn find_entry(text: &str, p: usize, n: u32) -> Option<(Vec<usize>, usize)> {
    let mut hit = None;
    for raw in text.lines() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let mut entry_p = None;
        let mut entry_n = None;
        let mut modulus = None;
        let mut theta = None;
        for token in line.split_whitespace() {
            let Some((key, val)) = token.split_once('=') else {
                continue;
            };
            match key {
                "p" => entry_p = val.parse::<usize>().ok(),
                "n" => entry_n = val.parse::<u32>().ok(),
                "theta" => theta = val.parse::<usize>().ok(),
                "modulus" => {
                    modulus = val
                        .split(',')
                        .map(|c| c.parse::<usize>().ok())
                        .collect::<Option<Vec<usize>>>()
                }
                _ => {}
            }
        }
        if entry_p == Some(p) && entry_n == Some(n) {
            if let (Some(m), Some(t)) = (modulus, theta) {
                hit = Some((m, t));
            }
        }
    }
    hit
}
