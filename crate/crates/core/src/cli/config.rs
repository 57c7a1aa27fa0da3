use std::path::{Path, PathBuf};

use serde::Deserialize;

use super::custom::read_model_file;
use crate::error::{Error, Result};
use crate::models::{bell3_epsilon_model, bell3_model, helix_model, minimal_model, HelixParams, MinimalModelParams, TargetedModel};
use crate::operators::C64;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ModelKind {
    Bell3,
    Bell3Epsilon,
    Minimal,
    Helix,
    Custom,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Observable {
    PurityDeficit,
    Fidelity,
    ReducedFidelity,
    Gap,
    GammaChTheorem,
    GammaChExpansion,
    Criterion,
}

impl Observable {
    pub fn needs_ness(self) -> bool {
        matches!(self, Self::PurityDeficit | Self::Fidelity | Self::ReducedFidelity)
    }

    pub fn needs_gamma_ch(self) -> bool {
        matches!(self, Self::GammaChTheorem | Self::GammaChExpansion)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Scale {
    #[default]
    Linear,
    Log,
}

#[derive(Clone, Debug, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RangeSpec {
    pub start: f64,
    pub stop: f64,
    pub points: usize,
    /// Required in the file; `linear` or `log`.
    pub scale: Scale,
}

/// Either an explicit list or an inclusive range.
#[derive(Clone, Debug, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Grid {
    pub values: Option<Vec<f64>>,
    pub range: Option<RangeSpec>,
}

impl Grid {
    pub fn list(values: Vec<f64>) -> Self {
        Self { values: Some(values), range: None }
    }

    pub fn points(&self, location: &str) -> Result<Vec<f64>> {
        let pts = match (&self.values, &self.range) {
            (Some(v), None) => v.clone(),
            (None, Some(r)) => expand_range(r, location)?,
            _ => return Err(Error::config(location, "give exactly one of `values` or `range`")),
        };
        if pts.is_empty() {
            return Err(Error::config(location, "grid is empty"));
        }
        if let Some(i) = pts.iter().position(|x| !x.is_finite()) {
            return Err(Error::config(format!("{location}[{i}]"), "value is not finite"));
        }
        Ok(pts)
    }
}

fn expand_range(r: &RangeSpec, location: &str) -> Result<Vec<f64>> {
    let loc = format!("{location}.range");
    if r.points == 0 {
        return Err(Error::config(loc, "points must be at least 1"));
    }
    if !(r.start.is_finite() && r.stop.is_finite()) {
        return Err(Error::config(loc, "start and stop must be finite"));
    }
    let n = r.points;
    let t = |i: usize| if n == 1 { 0.0 } else { i as f64 / (n - 1) as f64 };
    Ok(match r.scale {
        Scale::Linear => (0..n).map(|i| r.start + (r.stop - r.start) * t(i)).collect(),
        Scale::Log => {
            if !(r.start > 0.0 && r.stop > 0.0) {
                return Err(Error::config(loc, "log range needs start > 0 and stop > 0"));
            }
            let (a, b) = (r.start.log10(), r.stop.log10());
            (0..n).map(|i| 10f64.powf(a + (b - a) * t(i))).collect()
        }
    })
}

#[derive(Clone, Debug, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AxisSpec {
    /// Key of `model_params` overridden at each point.
    pub name: String,
    pub values: Option<Vec<f64>>,
    pub range: Option<RangeSpec>,
}

impl AxisSpec {
    pub fn grid(&self) -> Grid {
        Grid {
            values: self.values.clone(),
            range: self.range.clone(),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Format {
    #[default]
    Csv,
    Json,
}

#[derive(Clone, Debug, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSpec {
    pub path: PathBuf,
    pub format: Format,
    /// Adds a `wall_time_ms` column; output is then no longer reproducible.
    #[serde(default)]
    pub wall_time: bool,
    /// Leading `#` line listing gnuplot column numbers.
    #[serde(default)]
    pub gnuplot_header: bool,
}

/// One run: a model, optionally a sweep over one of its parameters and
/// over Γ, and what to record.
#[derive(Clone, Debug, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepConfig {
    pub model: ModelKind,
    #[serde(default)]
    pub model_params: toml::Table,
    pub sweep_axis: Option<AxisSpec>,
    pub gammas: Option<Grid>,
    #[serde(default)]
    pub observables: Vec<Observable>,
    pub output: Option<OutputSpec>,
    /// Directory against which a relative custom-model path is resolved.
    #[serde(skip)]
    pub base_dir: Option<PathBuf>,
}

impl SweepConfig {
    pub fn from_toml_str(text: &str, source: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::config(source, e.to_string().trim_end()))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::config(path.display().to_string(), e.to_string()))?;
        let mut cfg = Self::from_toml_str(&text, &path.display().to_string())?;
        cfg.base_dir = path.parent().map(Path::to_path_buf);
        Ok(cfg)
    }

    /// Checks everything a sweep needs and returns `(axis, gammas)` with
    /// the Γ grid sorted ascending.
    pub fn validate_sweep(&self) -> Result<(Option<(String, Vec<f64>)>, Vec<f64>)> {
        let gammas = self
            .gammas
            .as_ref()
            .ok_or_else(|| Error::config("gammas", "missing"))?
            .points("gammas")?;
        if let Some(i) = gammas.iter().position(|&g| !(g > 0.0)) {
            return Err(Error::config(format!("gammas[{i}]"), "gamma must be > 0"));
        }
        let mut gammas = gammas;
        gammas.sort_by(f64::total_cmp);
        if self.observables.is_empty() {
            return Err(Error::config("observables", "no observables requested"));
        }
        if self.output.is_none() {
            return Err(Error::config("output", "missing"));
        }
        let axis = match &self.sweep_axis {
            None => None,
            Some(a) => {
                if self.model == ModelKind::Custom {
                    return Err(Error::config("sweep_axis", "custom models have no parameters to sweep"));
                }
                let pts = a.grid().points("sweep_axis")?;
                // fail early on a bad axis name or value
                self.build_model(Some((&a.name, pts[0])))?;
                Some((a.name.clone(), pts))
            }
        };
        if axis.is_none() {
            self.build_model(None)?;
        }
        Ok((axis, gammas))
    }

    /// Builds the model, with `model_params[name] = value` if given.
    pub fn build_model(&self, over: Option<(&str, f64)>) -> Result<TargetedModel> {
        let mut params = self.model_params.clone();
        if let Some((name, value)) = over {
            if !params.contains_key(name) && !AXIS_KEYS.iter().any(|(k, keys)| *k == self.model && keys.contains(&name)) {
                return Err(Error::config("sweep_axis.name", format!("`{name}` is not a parameter of this model")));
            }
            params.insert(name.to_string(), toml::Value::Float(value));
        }
        let p = Params(&params);
        let built = match self.model {
            ModelKind::Bell3 => {
                p.only(&["lambda"])?;
                bell3_model(p.f64("lambda")?)
            }
            ModelKind::Bell3Epsilon => {
                p.only(&["epsilon"])?;
                bell3_epsilon_model(p.f64("epsilon")?)
            }
            ModelKind::Helix => {
                p.only(&["n", "theta", "gamma"])?;
                helix_model(&HelixParams {
                    n: p.usize("n")?,
                    theta: p.f64("theta")?,
                    gamma_twist: p.f64("gamma")?,
                })
            }
            ModelKind::Minimal => minimal_model(&minimal_params(&p)?),
            ModelKind::Custom => {
                p.only(&["path"])?;
                let rel = PathBuf::from(p.str("path")?);
                let path = match (&self.base_dir, rel.is_relative()) {
                    (Some(base), true) => base.join(rel),
                    _ => rel,
                };
                return read_model_file(&path);
            }
        };
        built.map_err(|e| match e {
            Error::InvalidArgument(m) | Error::DimensionMismatch(m) => Error::config("model_params", m),
            other => other,
        })
    }
}

const AXIS_KEYS: &[(ModelKind, &[&str])] = &[
    (ModelKind::Bell3, &["lambda"]),
    (ModelKind::Bell3Epsilon, &["epsilon"]),
    (ModelKind::Helix, &["n", "theta", "gamma"]),
    (ModelKind::Minimal, &["n", "kappa"]),
];

fn minimal_params(p: &Params) -> Result<MinimalModelParams> {
    p.only(&["preset", "n", "lambda", "kappa", "eta", "d"])?;
    let n = p.usize("n")?;
    if n == 0 || n > 6 {
        return Err(Error::config("model_params.n", "n must be in 1..=6"));
    }
    let mut m = match p.get("preset") {
        Some(_) => match p.str("preset")? {
            "fig4" => MinimalModelParams::fig4(n),
            other => return Err(Error::config("model_params.preset", format!("unknown preset `{other}`"))),
        },
        None => {
            for key in ["lambda", "kappa", "eta", "d"] {
                if p.get(key).is_none() {
                    return Err(Error::config(format!("model_params.{key}"), "missing (or set preset = \"fig4\")"));
                }
            }
            MinimalModelParams::fig4(n)
        }
    };
    if p.get("lambda").is_some() {
        m.lambda = p.f64_list("lambda")?;
    }
    if p.get("kappa").is_some() {
        m.kappa = p.complex("kappa")?;
    }
    if p.get("eta").is_some() {
        m.eta = p.complex_list("eta")?;
    }
    if p.get("d").is_some() {
        m.d = p.f64_list("d")?;
    }
    m.validate().map_err(|e| Error::config("model_params", e.to_string()))?;
    Ok(m)
}

struct Params<'a>(&'a toml::Table);

impl Params<'_> {
    fn loc(key: &str) -> String {
        format!("model_params.{key}")
    }

    fn get(&self, key: &str) -> Option<&toml::Value> {
        self.0.get(key)
    }

    fn require(&self, key: &str) -> Result<&toml::Value> {
        self.get(key).ok_or_else(|| Error::config(Self::loc(key), "missing"))
    }

    fn only(&self, allowed: &[&str]) -> Result<()> {
        match self.0.keys().find(|k| !allowed.contains(&k.as_str())) {
            Some(k) => Err(Error::config(Self::loc(k), format!("unknown key (expected one of {})", allowed.join(", ")))),
            None => Ok(()),
        }
    }

    fn f64(&self, key: &str) -> Result<f64> {
        as_f64(self.require(key)?).ok_or_else(|| Error::config(Self::loc(key), "expected a number"))
    }

    fn usize(&self, key: &str) -> Result<usize> {
        let x = self.f64(key)?;
        if x < 0.0 || x.fract() != 0.0 || x > 1e6 {
            return Err(Error::config(Self::loc(key), format!("expected a nonnegative integer, got {x}")));
        }
        Ok(x as usize)
    }

    fn str(&self, key: &str) -> Result<&str> {
        self.require(key)?
            .as_str()
            .ok_or_else(|| Error::config(Self::loc(key), "expected a string"))
    }

    fn array(&self, key: &str) -> Result<&Vec<toml::Value>> {
        self.require(key)?
            .as_array()
            .ok_or_else(|| Error::config(Self::loc(key), "expected an array"))
    }

    fn f64_list(&self, key: &str) -> Result<Vec<f64>> {
        self.array(key)?
            .iter()
            .enumerate()
            .map(|(i, v)| as_f64(v).ok_or_else(|| Error::config(format!("{}[{i}]", Self::loc(key)), "expected a number")))
            .collect()
    }

    fn complex(&self, key: &str) -> Result<C64> {
        as_complex(self.require(key)?).ok_or_else(|| Error::config(Self::loc(key), "expected a number or [re, im]"))
    }

    fn complex_list(&self, key: &str) -> Result<Vec<C64>> {
        self.array(key)?
            .iter()
            .enumerate()
            .map(|(i, v)| as_complex(v).ok_or_else(|| Error::config(format!("{}[{i}]", Self::loc(key)), "expected a number or [re, im]")))
            .collect()
    }
}

fn as_f64(v: &toml::Value) -> Option<f64> {
    match v {
        toml::Value::Float(x) => Some(*x),
        toml::Value::Integer(i) => Some(*i as f64),
        _ => None,
    }
}

fn as_complex(v: &toml::Value) -> Option<C64> {
    match v {
        toml::Value::Array(a) if a.len() == 2 => Some(C64::new(as_f64(&a[0])?, as_f64(&a[1])?)),
        other => as_f64(other).map(|x| C64::new(x, 0.0)),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn log_range_endpoints() {
        let r = RangeSpec { start: 1.0, stop: 1e4, points: 5, scale: Scale::Log };
        let pts = expand_range(&r, "g").unwrap();
        assert_eq!(pts.len(), 5);
        assert!((pts[2] - 100.0).abs() < 1e-10);
        assert!((pts[4] - 1e4).abs() < 1e-8);
    }

    #[test]
    fn unknown_param_named() {
        let cfg = SweepConfig::from_toml_str("model = \"bell3\"\n[model_params]\nlambda = 1\nmu = 2\n", "t").unwrap();
        let e = cfg.build_model(None).unwrap_err().to_string();
        assert!(e.contains("model_params.mu"), "{e}");
    }
}
