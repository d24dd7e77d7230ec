//! JSON model files.

use std::fs;
use std::path::Path;

use polyra::{BaseShape, BoundingBox, DnfForm64, FitConfig, LogicNode64, PolyraError, Polytope64, Swarm64};
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::{CliError, CliResult};

pub const FORMAT_VERSION: u32 = 1;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "payload", rename_all = "lowercase")]
pub enum Payload {
    Swarm(Vec<BaseShape<f64>>),
    Dnf(Vec<Polytope64>),
    Tree(LogicNode64),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ModelFile {
    pub format_version: u32,
    pub dim: usize,
    #[serde(default, skip_serializing_if = "Value::is_null")]
    pub hyperparameters: Value,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub bounds: Option<BoundingBox<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub start_point: Option<Vec<f64>>,
    #[serde(flatten)]
    pub payload: Payload,
}

/// A loaded model, checked for consistent dimensions.
#[derive(Clone, Debug)]
pub enum Model {
    Swarm(Swarm64),
    Dnf(DnfForm64),
    Tree(LogicNode64, usize),
}

impl ModelFile {
    pub fn from_swarm(s: &Swarm64) -> Self {
        Self {
            format_version: FORMAT_VERSION,
            dim: s.dim(),
            hyperparameters: s.fit_config().map_or(Value::Null, |c| serde_json::to_value(c).expect("plain struct")),
            bounds: Some(s.data_bounds().clone()),
            start_point: s.start_point().map(<[f64]>::to_vec),
            payload: Payload::Swarm(s.base_shapes().to_vec()),
        }
    }

    pub fn from_dnf(d: &DnfForm64, bounds: Option<BoundingBox<f64>>, hyperparameters: Value) -> Self {
        Self {
            format_version: FORMAT_VERSION,
            dim: d.dim(),
            hyperparameters,
            bounds,
            start_point: None,
            payload: Payload::Dnf(d.terms().to_vec()),
        }
    }

    pub fn kind(&self) -> &'static str {
        match self.payload {
            Payload::Swarm(_) => "swarm",
            Payload::Dnf(_) => "dnf",
            Payload::Tree(_) => "tree",
        }
    }

    pub fn to_model(&self) -> CliResult<Model> {
        if self.format_version != FORMAT_VERSION {
            return Err(CliError::Data(format!(
                "unsupported format_version {} (expected {FORMAT_VERSION})",
                self.format_version
            )));
        }
        if let Some(b) = &self.bounds {
            BoundingBox::new(b.lo().to_vec(), b.hi().to_vec())?;
            check(self.dim, b.dim())?;
        }
        if let Some(p) = &self.start_point {
            check(self.dim, p.len())?;
        }
        Ok(match &self.payload {
            Payload::Swarm(shapes) => {
                let bounds = self.bounds.clone().ok_or_else(|| CliError::Data("swarm model needs bounds".into()))?;
                let shapes = shapes
                    .iter()
                    .map(|f| BaseShape::new(f.condition().clone(), f.consequent().clone()))
                    .collect::<Result<Vec<_>, _>>()?;
                let mut s = Swarm64::new(shapes, bounds)?;
                if !self.hyperparameters.is_null() {
                    let cfg: FitConfig = serde_json::from_value(self.hyperparameters.clone())
                        .map_err(|e| CliError::Data(format!("hyperparameters: {e}")))?;
                    s = s.with_fit_config(cfg);
                }
                if let Some(p) = &self.start_point {
                    s = s.with_start_point(p.clone())?;
                }
                Model::Swarm(s)
            }
            Payload::Dnf(terms) => Model::Dnf(DnfForm64::new(self.dim, terms.clone())?),
            Payload::Tree(t) => {
                if let Some(d) = t.dim() {
                    check(self.dim, d)?;
                }
                check_leaves(t, self.dim)?;
                Model::Tree(t.clone(), self.dim)
            }
        })
    }
}

fn check(expected: usize, found: usize) -> CliResult<()> {
    if expected != found {
        return Err(CliError::Data(format!("model has dimension {expected} but a part has {found}")));
    }
    Ok(())
}

fn check_leaves(t: &LogicNode64, dim: usize) -> CliResult<()> {
    match t {
        LogicNode64::Leaf(h) => check(dim, h.dim()),
        LogicNode64::Not(c) => check_leaves(c, dim),
        LogicNode64::And(cs) | LogicNode64::Or(cs) => cs.iter().try_for_each(|c| check_leaves(c, dim)),
        LogicNode64::True | LogicNode64::False => Ok(()),
    }
}

impl Model {
    pub fn dim(&self) -> usize {
        match self {
            Self::Swarm(s) => s.dim(),
            Self::Dnf(d) => d.dim(),
            Self::Tree(_, dim) => *dim,
        }
    }

    pub fn contains(&self, x: &[f64]) -> CliResult<bool> {
        Ok(match self {
            Self::Swarm(s) => s.contains(x)?,
            Self::Dnf(d) => d.contains(x)?,
            Self::Tree(t, dim) => {
                if x.len() != *dim {
                    return Err(PolyraError::DimensionMismatch { expected: *dim, found: x.len() }.into());
                }
                t.eval(x)?
            }
        })
    }

    pub fn as_tree(&self) -> LogicNode64 {
        match self {
            Self::Swarm(s) => polyra::swarm_to_tree(s),
            Self::Dnf(d) => d.to_tree(),
            Self::Tree(t, _) => t.clone(),
        }
    }

    pub fn swarm(&self, what: &str) -> CliResult<&Swarm64> {
        match self {
            Self::Swarm(s) => Ok(s),
            _ => Err(CliError::Usage(format!("{what} needs a swarm model"))),
        }
    }
}

pub fn load(path: &Path) -> CliResult<(ModelFile, Model)> {
    let text = fs::read_to_string(path).map_err(CliError::io(path.display().to_string()))?;
    let file: ModelFile = serde_json::from_str(&text).map_err(|e| CliError::Data(format!("{}: {e}", path.display())))?;
    let model = file.to_model()?;
    Ok((file, model))
}

pub fn to_json(file: &ModelFile) -> String {
    let mut s = serde_json::to_string_pretty(file).expect("model files serialize");
    s.push('\n');
    s
}

pub fn save(path: &Path, file: &ModelFile) -> CliResult<()> {
    fs::write(path, to_json(file)).map_err(CliError::io(path.display().to_string()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use polyra::{fit, Dataset64};

    #[test]
    fn swarm_round_trip() {
        let pts: Vec<Vec<f64>> = (0..50).map(|i| vec![i as f64 * 0.1, (i as f64).sin()]).collect();
        let s = fit(&Dataset64::new(&pts).unwrap(), &FitConfig { n_models: 10, ..Default::default() }).unwrap();
        let file = ModelFile::from_swarm(&s);
        let text = to_json(&file);
        let back: ModelFile = serde_json::from_str(&text).unwrap();
        assert_eq!(back, file);
        assert_eq!(to_json(&back), text);
        let Model::Swarm(loaded) = back.to_model().unwrap() else { panic!("expected a swarm") };
        assert_eq!(loaded, s);
    }

    #[test]
    fn rejects_mismatched_dimensions() {
        let text = r#"{"format_version":1,"dim":3,"kind":"dnf","payload":[{"dim":2,"rows":[[1.0,0.0]],"bounds":[1.0]}]}"#;
        let file: ModelFile = serde_json::from_str(text).unwrap();
        assert!(file.to_model().is_err());
    }
}
