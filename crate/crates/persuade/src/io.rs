//! Instance files and JSON encodings of mechanisms, certificates and bounds.

use std::fs;
use std::path::{Path, PathBuf};

use persuade_core::approx::ConstructionCertificate;
use persuade_core::instances::GeneratorSpec;
use persuade_core::model::induce_mechanism;
use persuade_core::oracle::OracleBound;
use persuade_core::{Mechanism, SignalLabel, ValueDistribution};
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

#[derive(Debug, thiserror::Error)]
pub enum LoadError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("{path}:{line}:{column}: {message}")]
    Parse {
        path: PathBuf,
        line: usize,
        column: usize,
        message: String,
    },
    #[error("{path}: {source}")]
    Invalid {
        path: PathBuf,
        source: persuade_core::Error,
    },
}

/// On-disk instance. `family` and `spec` record where the instance came from.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InstanceFile {
    pub m: usize,
    pub support: Vec<Vec<f64>>,
    pub prob: Vec<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub family: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub spec: Option<String>,
}

impl InstanceFile {
    pub fn from_dist(dist: &ValueDistribution, family: Option<&str>, spec: Option<&GeneratorSpec>) -> Self {
        Self {
            m: dist.m(),
            support: dist.support().to_vec(),
            prob: dist.prob().to_vec(),
            name: dist.name().map(str::to_owned),
            family: family.map(str::to_owned),
            spec: spec.map(|s| s.to_string()),
        }
    }

    pub fn into_dist(self) -> persuade_core::Result<ValueDistribution> {
        let dist = ValueDistribution::new(self.m, self.support, self.prob)?;
        Ok(match self.name {
            Some(name) => dist.with_name(name),
            None => dist,
        })
    }
}

pub fn parse_instance(text: &str, path: &Path) -> Result<ValueDistribution, LoadError> {
    let file: InstanceFile = serde_json::from_str(text).map_err(|e| LoadError::Parse {
        path: path.to_owned(),
        line: e.line(),
        column: e.column(),
        message: e.to_string(),
    })?;
    file.into_dist().map_err(|source| LoadError::Invalid {
        path: path.to_owned(),
        source,
    })
}

pub fn load_instance(path: &Path) -> Result<ValueDistribution, LoadError> {
    let text = fs::read_to_string(path).map_err(|source| LoadError::Io {
        path: path.to_owned(),
        source,
    })?;
    parse_instance(&text, path)
}

pub fn write_instance(path: &Path, file: &InstanceFile) -> std::io::Result<()> {
    let text = serde_json::to_string_pretty(file).map_err(std::io::Error::other)?;
    fs::write(path, text + "\n")
}

/// Finite numbers as JSON numbers, everything else (withheld products) as null.
pub fn num(x: f64) -> Value {
    if x.is_finite() {
        json!(x)
    } else {
        Value::Null
    }
}

pub fn label_json(label: &SignalLabel) -> Value {
    match label {
        SignalLabel::Products(set) => json!(set),
        SignalLabel::Id(id) => json!(format!("s{id}")),
    }
}

/// `{"signals", "kernel", "prices", "alloc", "payments"}`; `prices` is null
/// for mechanisms that are not item pricings.
pub fn mechanism_json(mech: &Mechanism, prices: Option<&[f64]>) -> Value {
    let info = mech.info();
    json!({
        "signals": info.signals().iter().map(label_json).collect::<Vec<_>>(),
        "kernel": info.kernel(),
        "prices": prices.map(|p| p.iter().map(|&x| num(x)).collect::<Vec<_>>()),
        "alloc": mech.alloc(),
        "payments": mech.price(),
    })
}

pub fn certificate_json(dist: &ValueDistribution, cert: &ConstructionCertificate) -> persuade_core::Result<Value> {
    let mech = induce_mechanism(dist, &cert.mechanism)?;
    Ok(json!({
        "branch": cert.branch.as_str(),
        "guarantee": cert.guarantee,
        "revenue": cert.revenue,
        "opt_wel": cert.opt_wel,
        "ratio": cert.ratio(),
        "mechanism": mechanism_json(&mech, Some(&cert.mechanism.prices)),
    }))
}

pub fn bound_json(bound: &OracleBound) -> Value {
    json!({
        "lower": bound.lower,
        "lower_witness": {
            "source": bound.lower_witness.source,
            "mechanism": mechanism_json(&bound.lower_witness.mechanism, None),
        },
        "upper": bound.upper,
        "upper_provenance": bound.upper_provenance.as_str(),
        "dual_flow": bound.dual_flow,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use persuade_core::instances;

    #[test]
    fn parse_errors_carry_position() {
        let text = "{\n  \"m\": 2,\n  \"support\": [[1, 2]],\n  \"prob\": [1.0,]\n}";
        match parse_instance(text, Path::new("x.json")) {
            Err(LoadError::Parse { line, .. }) => assert_eq!(line, 4),
            other => panic!("{other:?}"),
        }
        let missing = "{\"m\": 1, \"support\": [[1]]}";
        let err = parse_instance(missing, Path::new("y.json")).unwrap_err().to_string();
        assert!(err.contains("prob"), "{err}");
        let bad = "{\"m\": 1, \"support\": [[1]], \"prob\": [0.5]}";
        assert!(matches!(parse_instance(bad, Path::new("z.json")), Err(LoadError::Invalid { .. })));
    }

    #[test]
    fn round_trip() {
        for id in instances::BUILTIN_IDS {
            let d = instances::builtin(id, None, None).unwrap();
            let file = InstanceFile::from_dist(&d, Some("example"), None);
            let text = serde_json::to_string(&file).unwrap();
            let back = parse_instance(&text, Path::new("rt.json")).unwrap();
            assert_eq!(back, d, "{id}");
        }
    }

    #[test]
    fn withheld_prices_are_null() {
        let d = instances::appendix_no_full_surplus();
        let cert = persuade_core::approx::best_of_three_two_products(&d).unwrap();
        let v = certificate_json(&d, &cert).unwrap();
        assert_eq!(v["branch"], "m1");
        assert_eq!(v["mechanism"]["prices"][1], Value::Null);
        assert_eq!(v["mechanism"]["signals"][0], json!("s0"));
    }
}
