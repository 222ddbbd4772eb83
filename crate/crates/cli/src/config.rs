//! Run configuration: the JSON schema, defaults, and validation into solver inputs.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use fracspec::assembly::{DEFAULT_N_REF, QUAD_MARGIN};
use fracspec::{Expr, FracParams, NormInterval, ProblemSpec, Variant};
use serde::{Deserialize, Serialize};

use crate::CliError;

fn default_variant() -> String {
    "acute".into()
}

fn default_n_ref() -> usize {
    DEFAULT_N_REF
}

fn default_grid_points() -> usize {
    1001
}

fn default_norm_interval() -> String {
    "reference".into()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub alpha: f64,
    pub r: f64,
    #[serde(default = "default_variant")]
    pub variant: String,
    pub k: String,
    pub b: String,
    pub c: String,
    pub f: String,
    #[serde(rename = "N")]
    pub n: usize,
    #[serde(rename = "N_ref", default = "default_n_ref")]
    pub n_ref: usize,
    #[serde(rename = "Ns", default, skip_serializing_if = "Option::is_none")]
    pub ns: Option<Vec<usize>>,
    #[serde(default)]
    pub quad_points: Option<usize>,
    #[serde(default = "default_grid_points")]
    pub grid_points: usize,
    /// `"unit"` for `(0, 1)` or `"reference"` for `(-1, 1)`.
    #[serde(default = "default_norm_interval")]
    pub norm_interval: String,
    /// Named diffusivities for `compare`; `k` alone when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub k_variants: Option<BTreeMap<String, String>>,
    #[serde(default)]
    pub output: Option<PathBuf>,
}

/// A validated configuration with every default filled in.
#[derive(Debug, Clone)]
pub struct Resolved {
    pub config: RunConfig,
    pub spec: ProblemSpec,
    pub norm_interval: NormInterval,
    pub k_variants: Vec<(String, Expr)>,
    pub output: PathBuf,
}

fn parse_expr(field: &str, src: &str) -> Result<Expr, CliError> {
    src.parse().map_err(|e| CliError::Config(format!("{field} = {src:?}: {e}")))
}

fn invalid(msg: impl Into<String>) -> CliError {
    CliError::Config(msg.into())
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
        serde_json::from_str(&text).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))
    }

    /// Checks the schema and builds the solver inputs. No numerics beyond the
    /// skewness root solve run here.
    pub fn resolve(mut self, out_override: Option<PathBuf>) -> Result<Resolved, CliError> {
        if !(self.alpha > 1.0 && self.alpha < 2.0) {
            return Err(invalid(format!("alpha must lie in (1, 2), got {}", self.alpha)));
        }
        if !(0.0..=1.0).contains(&self.r) {
            return Err(invalid(format!("r must lie in [0, 1], got {}", self.r)));
        }
        let variant: Variant = self.variant.parse().map_err(|e: fracspec::Error| invalid(e.to_string()))?;
        let norm_interval: NormInterval =
            self.norm_interval.parse().map_err(|e: fracspec::Error| invalid(e.to_string()))?;
        if self.n < 1 {
            return Err(invalid("N must be at least 1"));
        }
        let quad_points = self.quad_points.unwrap_or(self.n + QUAD_MARGIN);
        if quad_points < self.n + QUAD_MARGIN {
            return Err(invalid(format!("quad_points must be at least N + {QUAD_MARGIN}, got {quad_points}")));
        }
        self.quad_points = Some(quad_points);
        if self.grid_points < 2 {
            return Err(invalid(format!("grid_points must be at least 2, got {}", self.grid_points)));
        }
        if let Some(ns) = &self.ns {
            if ns.is_empty() || ns.contains(&0) {
                return Err(invalid("Ns must be a non-empty list of positive degrees"));
            }
            if ns.windows(2).any(|w| w[0] >= w[1]) {
                return Err(invalid(format!("Ns must be strictly increasing, got {ns:?}")));
            }
            if ns.iter().any(|&n| n >= self.n_ref) {
                return Err(invalid(format!("every entry of Ns must be below N_ref = {}", self.n_ref)));
            }
        }
        let output = out_override
            .or_else(|| self.output.clone())
            .ok_or_else(|| invalid("no output directory: set \"output\" or pass --out"))?;
        self.output = Some(output.clone());

        let k = parse_expr("k", &self.k)?;
        let b = parse_expr("b", &self.b)?;
        let c = parse_expr("c", &self.c)?;
        let f = parse_expr("f", &self.f)?;
        let k_variants = match &self.k_variants {
            None => vec![("k".to_string(), k.clone())],
            Some(map) if map.is_empty() => return Err(invalid("k_variants must not be empty")),
            Some(map) => map
                .iter()
                .map(|(name, src)| {
                    if name.is_empty() || !name.chars().all(|ch| ch.is_ascii_alphanumeric() || ch == '_' || ch == '-') {
                        return Err(invalid(format!("k_variants name {name:?} must be alphanumeric")));
                    }
                    Ok((name.clone(), parse_expr(&format!("k_variants.{name}"), src)?))
                })
                .collect::<Result<_, _>>()?,
        };

        let fp = FracParams::solve(self.alpha, self.r).map_err(|e| invalid(e.to_string()))?;
        let mut spec = ProblemSpec::new(fp, variant, k, b, c, f, self.n);
        spec.quad_points = quad_points;
        spec.n_ref = self.n_ref;
        Ok(Resolved { config: self, spec, norm_interval, k_variants, output })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn base() -> serde_json::Value {
        serde_json::json!({
            "alpha": 1.3, "r": 0.5, "k": "1+2*x", "b": "exp(x)", "c": "5+sin(x)", "f": "1",
            "N": 8, "output": "out"
        })
    }

    fn resolve(v: serde_json::Value) -> Result<Resolved, CliError> {
        serde_json::from_value::<RunConfig>(v).unwrap().resolve(None)
    }

    #[test]
    fn defaults_are_filled() {
        let r = resolve(base()).unwrap();
        assert_eq!(r.config.quad_points, Some(28));
        assert_eq!(r.config.n_ref, 40);
        assert_eq!(r.config.grid_points, 1001);
        assert_eq!(r.config.variant, "acute");
        assert_eq!(r.norm_interval, NormInterval::Reference);
        assert_eq!(r.k_variants.len(), 1);
        assert!((r.spec.fp.beta - 0.65).abs() < 1e-12);
    }

    #[test]
    fn rejects_bad_fields() {
        let cases = [
            ("alpha", serde_json::json!(2.0)),
            ("r", serde_json::json!(-0.1)),
            ("variant", serde_json::json!("sideways")),
            ("N", serde_json::json!(0)),
            ("quad_points", serde_json::json!(10)),
            ("grid_points", serde_json::json!(1)),
            ("Ns", serde_json::json!([10, 8])),
            ("Ns", serde_json::json!([8, 40])),
            ("k", serde_json::json!("1+*x")),
            ("norm_interval", serde_json::json!("half")),
        ];
        for (field, value) in cases {
            let mut v = base();
            v[field] = value;
            assert!(matches!(resolve(v), Err(CliError::Config(_))), "{field}");
        }
        let mut v = base();
        v["unknown"] = serde_json::json!(1);
        assert!(serde_json::from_value::<RunConfig>(v).is_err());
    }

    #[test]
    fn out_flag_wins() {
        let cfg: RunConfig = serde_json::from_value(base()).unwrap();
        let r = cfg.resolve(Some(PathBuf::from("elsewhere"))).unwrap();
        assert_eq!(r.output, PathBuf::from("elsewhere"));
        let mut v = base();
        v.as_object_mut().unwrap().remove("output");
        assert!(resolve(v).is_err());
    }
}
