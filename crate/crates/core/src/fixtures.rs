//! Name resolution for bundled objects and data files. An argument is tried
//! as a filesystem path first, then inside the directory named by the
//! `MORITA_SSUM_FIXTURES` environment variable, and finally against the
//! built-in constructors.

use crate::groups::GroupTable;
use crate::hopf::{HopfError, HopfJson, StructuredBialgebra};
use crate::scalar::Scalar;
use crate::skeletal::{SkeletalData, SkeletalError, SkeletalJson};
use crate::statesum::{Triangulation, TriangulationJson, TriError};
use std::path::{Path, PathBuf};

#[derive(Debug, thiserror::Error)]
pub enum FixtureError {
    #[error("cannot resolve `{0}` as a file or builtin name")]
    NotFound(String),
    #[error("io error on {0}: {1}")]
    Io(String, std::io::Error),
    #[error("parse error in {0}: {1}")]
    Parse(String, String),
    #[error(transparent)]
    Hopf(#[from] HopfError),
    #[error(transparent)]
    Skeletal(#[from] SkeletalError),
    #[error(transparent)]
    Tri(#[from] TriError),
}

/// Bundled Hopf algebras: `f_<group>` function algebras, `k_<group>` group
/// algebras, over the bundled groups.
pub fn bundled_hopf<S: Scalar>(name: &str) -> Option<StructuredBialgebra<S>> {
    let (kind, group) = name.split_once('_')?;
    let g = GroupTable::by_name(group).ok()?;
    match kind {
        "f" => Some(StructuredBialgebra::function_algebra(&g)),
        "k" => Some(StructuredBialgebra::group_algebra(&g)),
        _ => None,
    }
}

fn candidate_paths(arg: &str) -> Vec<PathBuf> {
    let mut out = vec![PathBuf::from(arg)];
    if let Ok(dir) = std::env::var("MORITA_SSUM_FIXTURES") {
        out.push(Path::new(&dir).join(arg));
        out.push(Path::new(&dir).join(format!("{arg}.json")));
    }
    out
}

fn read_file(arg: &str) -> Option<(String, String)> {
    for p in candidate_paths(arg) {
        if p.is_file() {
            match std::fs::read_to_string(&p) {
                Ok(text) => return Some((p.display().to_string(), text)),
                Err(_) => continue,
            }
        }
    }
    None
}

fn stem(arg: &str) -> String {
    Path::new(arg)
        .file_stem()
        .map(|s| s.to_string_lossy().to_string())
        .unwrap_or_else(|| arg.to_string())
}

pub fn resolve_hopf<S: Scalar>(arg: &str) -> Result<StructuredBialgebra<S>, FixtureError> {
    if let Some((name, text)) = read_file(arg) {
        let j: HopfJson = serde_json::from_str(&text)
            .map_err(|e| FixtureError::Parse(name.clone(), e.to_string()))?;
        return Ok(StructuredBialgebra::from_json(&j)?);
    }
    // strip a possible ".hopf"-style suffix when matching builtins
    let key = stem(arg);
    let key = key.strip_suffix(".hopf").unwrap_or(&key);
    bundled_hopf(key).ok_or_else(|| FixtureError::NotFound(arg.to_string()))
}

pub fn resolve_skeletal<S: Scalar>(arg: &str) -> Result<SkeletalData<S>, FixtureError> {
    if let Some((name, text)) = read_file(arg) {
        let j: SkeletalJson = serde_json::from_str(&text)
            .map_err(|e| FixtureError::Parse(name.clone(), e.to_string()))?;
        return Ok(SkeletalData::from_json(&j)?);
    }
    let key = stem(arg);
    crate::skeletal::builtin(&key).map_err(|e| match e {
        SkeletalError::UnknownBuiltin(_) => FixtureError::NotFound(arg.to_string()),
        other => FixtureError::Skeletal(other),
    })
}

pub fn resolve_triangulation(arg: &str) -> Result<Triangulation, FixtureError> {
    if let Some((name, text)) = read_file(arg) {
        let j: TriangulationJson = serde_json::from_str(&text)
            .map_err(|e| FixtureError::Parse(name.clone(), e.to_string()))?;
        return Ok(Triangulation::from_json(&j)?);
    }
    let key = stem(arg);
    crate::statesum::bundled_triangulation(&key).map_err(|e| match e {
        TriError::Input(msg) if msg.contains("unknown bundled") => {
            FixtureError::NotFound(arg.to_string())
        }
        other => FixtureError::Tri(other),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::Rat;

    #[test]
    fn builtin_resolution() {
        assert!(resolve_hopf::<Rat>("f_s3").is_ok());
        assert!(resolve_hopf::<Rat>("k_z2").is_ok());
        assert!(resolve_skeletal::<Rat>("vec_z3").is_ok());
        assert!(resolve_triangulation("t3").is_ok());
        assert!(resolve_hopf::<Rat>("nonsense").is_err());
    }
}
