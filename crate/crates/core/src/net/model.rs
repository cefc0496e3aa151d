//! Trained-model container and its text file format.
//!
//! ```text
//! format_version:1
//! arch:mlp
//! param_count:41001
//! seed:42
//! activation:relu
//!
//! layer0.weight 200,103 <values>
//! layer0.bias 200 <values>
//! ...
//! ```
//!
//! Values are written with 17 significant digits, so a load reproduces every
//! parameter bit for bit.

use std::collections::BTreeMap;
use std::path::Path;

use super::layer::Activation;
use super::network::Network;
use super::presets::Architecture;
use super::tensor::Tensor;
use crate::error::{Error, Result};
use crate::util::fmt_exact;

pub const MODEL_FORMAT_VERSION: u32 = 1;

const RESERVED: [&str; 5] = ["format_version", "arch", "param_count", "seed", "activation"];

#[derive(Debug, Clone, PartialEq)]
pub struct Model {
    pub arch: Architecture,
    pub activation: Activation,
    pub seed: u64,
    pub network: Network,
    /// Extra header entries (training split, Reynolds filter, ...).
    pub meta: BTreeMap<String, String>,
}

impl Model {
    pub fn new(arch: Architecture, activation: Activation, seed: u64) -> Self {
        Self {
            arch,
            activation,
            seed,
            network: arch.build(activation, seed),
            meta: BTreeMap::new(),
        }
    }

    pub fn to_text(&self) -> String {
        let mut out = format!(
            "format_version:{MODEL_FORMAT_VERSION}\narch:{}\nparam_count:{}\nseed:{}\nactivation:{}\n",
            self.arch,
            self.network.parameter_count(),
            self.seed,
            self.activation
        );
        for (k, v) in &self.meta {
            out.push_str(&format!("{k}:{v}\n"));
        }
        out.push('\n');
        for (name, t) in self.network.param_names().iter().zip(self.network.params()) {
            let shape: Vec<String> = t.shape().iter().map(|d| d.to_string()).collect();
            out.push_str(name);
            out.push(' ');
            out.push_str(&shape.join(","));
            for v in t.data() {
                out.push(' ');
                out.push_str(&fmt_exact(*v));
            }
            out.push('\n');
        }
        out
    }

    pub fn parse(text: &str) -> Result<Self> {
        let mut lines = text.lines().enumerate();
        let mut header = BTreeMap::new();
        for (i, line) in lines.by_ref() {
            if line.trim().is_empty() {
                break;
            }
            let (k, v) = line.split_once(':').ok_or_else(|| Error::MalformedRecord {
                line: i + 1,
                reason: format!("expected key:value, got {line:?}"),
            })?;
            header.insert(k.trim().to_string(), v.trim().to_string());
        }

        let version = header.get("format_version").cloned().unwrap_or_default();
        if version != MODEL_FORMAT_VERSION.to_string() {
            return Err(Error::FormatVersionMismatch {
                found: version,
                expected: MODEL_FORMAT_VERSION,
            });
        }
        let field = |k: &str| {
            header.get(k).ok_or_else(|| Error::MalformedRecord {
                line: 0,
                reason: format!("missing header key {k}"),
            })
        };
        let arch: Architecture = field("arch")?.parse()?;
        let activation: Activation = header
            .get("activation")
            .map(|s| s.parse())
            .transpose()?
            .unwrap_or(Activation::Relu);
        let bad_number = |k: &str| Error::MalformedRecord {
            line: 0,
            reason: format!("header key {k} is not an integer"),
        };
        let seed: u64 = field("seed")?.parse().map_err(|_| bad_number("seed"))?;
        let count: usize = field("param_count")?
            .parse()
            .map_err(|_| bad_number("param_count"))?;

        let mut model = Model::new(arch, activation, seed);
        if count != model.network.parameter_count() {
            return Err(Error::MalformedRecord {
                line: 0,
                reason: format!(
                    "param_count {count} does not match {arch} ({})",
                    model.network.parameter_count()
                ),
            });
        }
        model.meta = header
            .into_iter()
            .filter(|(k, _)| !RESERVED.contains(&k.as_str()))
            .collect();

        let names = model.network.param_names();
        let mut params = model.network.params_mut().into_iter();
        let mut seen = 0;
        for (i, line) in lines.filter(|(_, l)| !l.trim().is_empty()) {
            let malformed = |reason: String| Error::MalformedRecord { line: i + 1, reason };
            let mut tokens = line.split_whitespace();
            let name = tokens.next().unwrap_or_default();
            let expected = names
                .get(seen)
                .ok_or_else(|| malformed(format!("unexpected tensor {name}")))?;
            if name != expected {
                return Err(malformed(format!("expected tensor {expected}, found {name}")));
            }
            let target = params.next().expect("names and params align");
            let shape: Vec<usize> = tokens
                .next()
                .unwrap_or_default()
                .split(',')
                .map(|d| d.parse().map_err(|_| malformed(format!("bad shape for {name}"))))
                .collect::<Result<_>>()?;
            if shape != target.shape() {
                return Err(malformed(format!("{name} has shape {shape:?}, expected {:?}", target.shape())));
            }
            let values: Vec<f64> = tokens
                .map(|t| t.parse().map_err(|_| malformed(format!("bad value {t:?} in {name}"))))
                .collect::<Result<_>>()?;
            if values.len() != target.len() {
                return Err(malformed(format!("{name} has {} values, expected {}", values.len(), target.len())));
            }
            *target = Tensor::new(shape, values)?;
            seen += 1;
        }
        if seen != names.len() {
            return Err(Error::MalformedRecord {
                line: 0,
                reason: format!("found {seen} of {} parameter tensors", names.len()),
            });
        }
        Ok(model)
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        std::fs::write(path, self.to_text()).map_err(|e| Error::io(path, e))
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::parse(&text)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip_is_exact() {
        let mut m = Model::new(Architecture::AeroCnn1, Activation::Relu, 9);
        m.meta.insert("split".into(), "0.85".into());
        for p in m.network.params_mut() {
            for (i, v) in p.data_mut().iter_mut().enumerate() {
                *v += (i as f64).sin() * 1e-3 + 1.0 / 3.0;
            }
        }
        let back = Model::parse(&m.to_text()).unwrap();
        assert_eq!(back, m);
    }

    #[test]
    fn version_and_shape_errors() {
        let m = Model::new(Architecture::Mlp, Activation::Tanh, 1);
        let text = m.to_text();
        let wrong = text.replacen("format_version:1", "format_version:7", 1);
        assert!(matches!(Model::parse(&wrong), Err(Error::FormatVersionMismatch { .. })));
        let truncated: String = text.lines().take(9).collect::<Vec<_>>().join("\n");
        assert!(matches!(Model::parse(&truncated), Err(Error::MalformedRecord { .. })));
        let bad_arch = text.replacen("arch:mlp", "arch:aerocnn2", 1);
        assert!(Model::parse(&bad_arch).is_err());
        assert_eq!(Model::parse(&text).unwrap().activation, Activation::Tanh);
    }
}
