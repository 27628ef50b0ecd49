//! System spec files: exponent to rational-string maps for `phi`, `F`, `g`.

use std::collections::BTreeMap;
use std::path::Path;

use lienard_core::poly::{format_rational, parse_rational, Rational};
use lienard_core::system::{build_system, GeneralizedLienardSystem, SystemError};
use num_traits::Zero;
use serde::{Deserialize, Serialize};

#[derive(Debug, thiserror::Error)]
pub enum SpecError {
    #[error("cannot read {path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error("malformed spec: {0}")]
    Json(#[from] serde_json::Error),
    #[error("bad rational {value:?} for {poly} exponent {exponent}")]
    BadRational { poly: &'static str, exponent: u32, value: String },
    #[error(transparent)]
    System(#[from] SystemError),
}

impl SpecError {
    pub fn kind(&self) -> &'static str {
        match self {
            SpecError::Io { .. } => "io",
            SpecError::Json(_) => "malformed-spec",
            SpecError::BadRational { .. } => "bad-rational",
            SpecError::System(_) => "invalid-system",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct SystemSpecFile {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub label: Option<String>,
    pub phi: BTreeMap<u32, String>,
    #[serde(rename = "F")]
    pub damping: BTreeMap<u32, String>,
    pub g: BTreeMap<u32, String>,
}

fn terms(poly: &'static str, map: &BTreeMap<u32, String>) -> Result<Vec<(u32, Rational)>, SpecError> {
    let mut out = Vec::new();
    for (&e, v) in map {
        let q = parse_rational(v).ok_or_else(|| SpecError::BadRational { poly, exponent: e, value: v.clone() })?;
        if !q.is_zero() {
            out.push((e, q));
        }
    }
    Ok(out)
}

impl SystemSpecFile {
    pub fn parse(text: &str) -> Result<SystemSpecFile, SpecError> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn load(path: &Path) -> Result<SystemSpecFile, SpecError> {
        let text = std::fs::read_to_string(path).map_err(|source| SpecError::Io { path: path.display().to_string(), source })?;
        SystemSpecFile::parse(&text)
    }

    pub fn system(&self) -> Result<GeneralizedLienardSystem, SpecError> {
        Ok(build_system(&terms("phi", &self.phi)?, &terms("F", &self.damping)?, &terms("g", &self.g)?)?)
    }

    pub fn from_system(sys: &GeneralizedLienardSystem, label: Option<String>) -> SystemSpecFile {
        let map = |p: &lienard_core::poly::Poly| p.terms().map(|(e, c)| (e, format_rational(c))).collect();
        SystemSpecFile { label, phi: map(&sys.phi), damping: map(&sys.damping), g: map(&sys.restoring) }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_system_d() {
        let s = SystemSpecFile::parse(r#"{"phi": {"3": "-1", "7": "-1"}, "F": {"4": "1"}, "g": {"3": "-1", "5": "-1"}, "label": "d"}"#)
            .unwrap();
        let sys = s.system().unwrap();
        assert_eq!(sys.exponents().phi_high, 7);
        assert_eq!(SystemSpecFile::from_system(&sys, Some("d".into())), s);
    }

    #[test]
    fn rejects_bad_input() {
        let bad = SystemSpecFile::parse(r#"{"phi": {"3": "x"}, "F": {"4": "1"}, "g": {"3": "-1"}}"#).unwrap();
        assert!(matches!(bad.system(), Err(SpecError::BadRational { .. })));
        let empty = SystemSpecFile::parse(r#"{"phi": {}, "F": {"4": "1"}, "g": {"3": "-1"}}"#).unwrap();
        assert!(matches!(empty.system(), Err(SpecError::System(_))));
        assert!(SystemSpecFile::parse("{").is_err());
    }
}
