//! Polytope input: a JSON list of `{"normal": [..], "offset": d}` records or
//! plain text with one facet per line (`n_1 … n_{2n+1} d`, commas or spaces,
//! `#` comments). Each record is the half-space `⟨ξ, ν⟩ > d`.

use std::path::Path;

use heisenberg_hardy::domains::{DomainError, HalfSpace, Polytope};
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Largest tolerated `| |ν| − 1 |` before a normal is reported as rescaled.
pub const NORMALIZATION_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Error)]
pub enum PolytopeFileError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
    #[error("malformed JSON: {0}")]
    Json(#[from] serde_json::Error),
    #[error("line {line}: {message}")]
    Text { line: usize, message: String },
    #[error("facet {index}: {source}")]
    Facet { index: usize, source: DomainError },
    #[error(transparent)]
    Domain(#[from] DomainError),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FacetRecord {
    pub normal: Vec<f64>,
    pub offset: f64,
}

#[derive(Debug, Clone)]
pub struct LoadedPolytope {
    pub polytope: Polytope,
    /// One entry per facet whose normal had to be rescaled.
    pub warnings: Vec<String>,
}

fn parse_text(text: &str) -> Result<Vec<FacetRecord>, PolytopeFileError> {
    let mut out = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let nums: Result<Vec<f64>, _> = line
            .split(|c: char| c == ',' || c.is_whitespace())
            .filter(|s| !s.is_empty())
            .map(str::parse::<f64>)
            .collect();
        let mut nums = nums.map_err(|e| PolytopeFileError::Text {
            line: i + 1,
            message: e.to_string(),
        })?;
        if nums.len() < 4 {
            return Err(PolytopeFileError::Text {
                line: i + 1,
                message: "expected a normal of length 2n+1 followed by an offset".into(),
            });
        }
        let offset = nums.pop().unwrap_or_default();
        out.push(FacetRecord { normal: nums, offset });
    }
    Ok(out)
}

/// Parses either format, normalizing every normal to unit length.
pub fn parse_polytope(text: &str) -> Result<LoadedPolytope, PolytopeFileError> {
    let records: Vec<FacetRecord> = if text.trim_start().starts_with('[') {
        serde_json::from_str(text)?
    } else {
        parse_text(text)?
    };
    let mut facets = Vec::with_capacity(records.len());
    let mut warnings = Vec::new();
    for (index, r) in records.into_iter().enumerate() {
        let (h, len) =
            HalfSpace::normalized(r.normal, r.offset).map_err(|source| PolytopeFileError::Facet { index, source })?;
        if (len - 1.0).abs() > NORMALIZATION_TOLERANCE {
            let msg = format!("facet {index}: normal had length {len}; rescaled to unit length");
            log::warn!("{msg}");
            warnings.push(msg);
        }
        facets.push(h);
    }
    let polytope = match Polytope::new(facets.clone(), None) {
        Err(DomainError::EmptyInterior(_)) => {
            let interior = feasible_point(&facets).ok_or(DomainError::EmptyInterior("no strictly feasible point found"))?;
            Polytope::new(facets, Some(interior))?
        }
        other => other?,
    };
    Ok(LoadedPolytope { polytope, warnings })
}

/// Cyclic projections onto the facets shifted inwards by a small slack.
fn feasible_point(facets: &[HalfSpace]) -> Option<Vec<f64>> {
    const SLACK: f64 = 1e-6;
    let mut x = vec![0.0; facets.first()?.normal().len()];
    for _ in 0..10_000 {
        let mut moved = false;
        for f in facets {
            let s = f.signed_distance(&x);
            if s < SLACK {
                x.iter_mut().zip(f.normal()).for_each(|(xi, ni)| *xi += (2.0 * SLACK - s) * ni);
                moved = true;
            }
        }
        if !moved {
            return Some(x);
        }
    }
    None
}

pub fn load_polytope(path: &Path) -> Result<LoadedPolytope, PolytopeFileError> {
    let text = std::fs::read_to_string(path).map_err(|source| PolytopeFileError::Io {
        path: path.display().to_string(),
        source,
    })?;
    parse_polytope(&text)
}
