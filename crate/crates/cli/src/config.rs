//! Run configuration: a single JSON document, overridable from flags.

use std::fmt;
use std::path::{Path, PathBuf};

use orlicz_core::distribution::{Distribution, DistributionSpec};
use orlicz_core::orlicz::{normalize_by_linearization, GridSpec, NormalizeMode, OrliczFunction, PowerTerm};
use orlicz_core::{io, Error, Result};
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    Norm,
    MakeDist,
    MakeOrlicz,
    Conditions,
    Verify,
    Roundtrip,
    Embed,
}

impl Command {
    pub fn uses_monte_carlo(self) -> bool {
        matches!(self, Command::Verify | Command::Embed)
    }
}

impl fmt::Display for Command {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = serde_json::to_value(self).ok();
        write!(f, "{}", s.as_ref().and_then(|v| v.as_str()).unwrap_or("?"))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum MapKind {
    /// `M_X` from `E max`.
    Max,
    /// `M_{X,p}`.
    PNorm,
    /// `M_{X,p,q}`.
    QPower,
    /// Map driven by a generator `N`.
    General,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum TheoremId {
    Max,
    Pnorm,
    LqGeneration,
    Tensor,
}

/// Exponent that may be infinite; JSON accepts a number or `"inf"`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Exponent(pub f64);

impl Serialize for Exponent {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        if self.0.is_infinite() {
            s.serialize_str("inf")
        } else {
            s.serialize_f64(self.0)
        }
    }
}

impl<'de> Deserialize<'de> for Exponent {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        match serde_json::Value::deserialize(d)? {
            serde_json::Value::Number(n) => n.as_f64().map(Exponent).ok_or_else(|| D::Error::custom("bad number")),
            serde_json::Value::String(s) => s.parse().map_err(D::Error::custom),
            _ => Err(D::Error::custom("exponent must be a number or \"inf\"")),
        }
    }
}

impl std::str::FromStr for Exponent {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s.trim().to_ascii_lowercase().as_str() {
            "inf" | "infinity" | "∞" => Ok(Exponent(f64::INFINITY)),
            t => t.parse().map(Exponent).map_err(|_| format!("invalid exponent {s:?}")),
        }
    }
}

/// Compact description of an Orlicz function.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum OrliczShape {
    Power { r: f64 },
    ScaledPower { c: f64, r: f64 },
    SumOfPowers { terms: Vec<PowerTerm> },
    ShiftedLinear { a: f64 },
    PiecewisePower { breaks: Vec<f64>, exponents: Vec<f64> },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OrliczShorthand {
    #[serde(flatten)]
    pub shape: OrliczShape,
    /// Linearize the tail so that `∫ x dM'(x) = 1`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub normalize: Option<NormalizeMode>,
}

impl OrliczShorthand {
    fn build(&self) -> Result<OrliczFunction> {
        let m = match &self.shape {
            OrliczShape::Power { r } => OrliczFunction::power(*r),
            OrliczShape::ScaledPower { c, r } => OrliczFunction::scaled_power(*c, *r),
            OrliczShape::SumOfPowers { terms } => OrliczFunction::sum_of_powers(terms),
            OrliczShape::ShiftedLinear { a } => OrliczFunction::shifted_linear(*a),
            OrliczShape::PiecewisePower { breaks, exponents } => OrliczFunction::piecewise_power(breaks, exponents),
        }?;
        match self.normalize {
            Some(mode) => normalize_by_linearization(&m, mode),
            None => Ok(m),
        }
    }
}

fn read<T: serde::de::DeserializeOwned>(path: &Path) -> Result<T> {
    io::read_json(path).map_err(|e| Error::InvalidInput(format!("{}: {e}", path.display())))
}

/// Orlicz input: a file path, a shorthand with `kind`, or a full branch list.
#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(untagged)]
pub enum OrliczInput {
    Path(PathBuf),
    Shorthand(OrliczShorthand),
    Function(OrliczFunction),
}

impl<'de> Deserialize<'de> for OrliczInput {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let v = serde_json::Value::deserialize(d)?;
        match &v {
            serde_json::Value::String(s) => Ok(OrliczInput::Path(s.into())),
            serde_json::Value::Object(o) if o.contains_key("kind") => {
                serde_json::from_value(v).map(OrliczInput::Shorthand).map_err(D::Error::custom)
            }
            _ => serde_json::from_value(v).map(OrliczInput::Function).map_err(D::Error::custom),
        }
    }
}

impl OrliczInput {
    /// Replaces a path by the document it names.
    fn inline(self) -> Result<Self> {
        match self {
            OrliczInput::Path(p) => match read(&p)? {
                OrliczInput::Path(_) => Err(Error::InvalidInput(format!("{} refers to another path", p.display()))),
                other => Ok(other),
            },
            other => Ok(other),
        }
    }

    pub fn build(&self) -> Result<OrliczFunction> {
        match self {
            OrliczInput::Path(p) => Err(Error::InvalidInput(format!("unresolved path {}", p.display()))),
            OrliczInput::Shorthand(s) => s.build(),
            OrliczInput::Function(m) => Ok(m.clone()),
        }
    }
}

/// Distribution input: a file path or an inline spec.
#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(untagged)]
pub enum DistributionInput {
    Path(PathBuf),
    Spec(DistributionSpec),
}

impl<'de> Deserialize<'de> for DistributionInput {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let v = serde_json::Value::deserialize(d)?;
        match v {
            serde_json::Value::String(s) => Ok(DistributionInput::Path(s.into())),
            v => serde_json::from_value(v).map(DistributionInput::Spec).map_err(D::Error::custom),
        }
    }
}

impl DistributionInput {
    fn inline(self) -> Result<Self> {
        match self {
            DistributionInput::Path(p) => Ok(DistributionInput::Spec(read(&p)?)),
            other => Ok(other),
        }
    }

    pub fn build(&self) -> Result<Distribution> {
        match self {
            DistributionInput::Path(p) => Err(Error::InvalidInput(format!("unresolved path {}", p.display()))),
            DistributionInput::Spec(s) => Distribution::from_spec(s),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Tolerances {
    /// Sup-relative bound for the M → X → M round trip.
    pub roundtrip: f64,
    /// Pointwise relative bound for density reconstruction.
    pub density: f64,
    /// Ratio spread bound for `verify`; defaults per theorem when absent.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub spread: Option<f64>,
    /// Bound on the distortion proxy for `embed`.
    pub stability: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            roundtrip: 1e-4,
            density: 1e-6,
            spread: None,
            stability: 4.0,
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub command: Option<Command>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub orlicz: Option<OrliczInput>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub distribution: Option<DistributionInput>,
    /// Generator `N` for the general map.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub generator: Option<OrliczInput>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub map: Option<MapKind>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub theorem: Option<TheoremId>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub p: Option<Exponent>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub q: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub x: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ns: Option<Vec<usize>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub per_n: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub replicates: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    /// Thread count; results do not depend on it.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub workers: Option<usize>,
    /// Output directory for artifacts.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub out: Option<PathBuf>,
    #[serde(default)]
    pub grid: GridSpec,
    #[serde(default)]
    pub tolerances: Tolerances,
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self> {
        io::read_json(path)
    }

    /// Inlines referenced files so the stored config is self-contained.
    pub fn resolve(mut self) -> Result<Self> {
        self.orlicz = self.orlicz.map(OrliczInput::inline).transpose()?;
        self.generator = self.generator.map(OrliczInput::inline).transpose()?;
        self.distribution = self.distribution.map(DistributionInput::inline).transpose()?;
        Ok(self)
    }

    pub fn validate(&self) -> Result<Command> {
        let command = self
            .command
            .ok_or_else(|| Error::InvalidInput("no command given".into()))?;
        if let Some(q) = self.q {
            if !(q > 1.0) || !q.is_finite() {
                return Err(Error::InvalidInput(format!("q must lie in (1, ∞), got {q}")));
            }
        }
        if let Some(Exponent(p)) = self.p {
            if !(p >= 1.0) {
                return Err(Error::InvalidInput(format!("p must be at least 1, got {p}")));
            }
            if let Some(q) = self.q {
                if !(q < p) {
                    return Err(Error::InvalidInput(format!("need q < p, got q = {q}, p = {p}")));
                }
            }
        }
        if command.uses_monte_carlo() && self.seed.is_none() {
            return Err(Error::InvalidInput(format!("`{command}` needs an explicit seed")));
        }
        if self.workers == Some(0) {
            return Err(Error::InvalidInput("workers must be positive".into()));
        }
        Ok(command)
    }

    pub fn orlicz(&self) -> Result<OrliczFunction> {
        self.orlicz.as_ref().ok_or_else(|| missing("orlicz"))?.build()
    }

    pub fn generator(&self) -> Result<OrliczFunction> {
        self.generator.as_ref().ok_or_else(|| missing("generator"))?.build()
    }

    pub fn distribution(&self) -> Result<Distribution> {
        self.distribution.as_ref().ok_or_else(|| missing("distribution"))?.build()
    }

    pub fn p(&self) -> Result<f64> {
        self.p.map(|e| e.0).ok_or_else(|| missing("p"))
    }

    pub fn q(&self) -> Result<f64> {
        self.q.ok_or_else(|| missing("q"))
    }

    pub fn seed(&self) -> Result<u64> {
        self.seed.ok_or_else(|| missing("seed"))
    }
}

fn missing(field: &str) -> Error {
    Error::InvalidInput(format!("config field `{field}` is required here"))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exponent_accepts_inf() {
        let e: Exponent = serde_json::from_str("\"inf\"").unwrap();
        assert!(e.0.is_infinite());
        assert_eq!(serde_json::to_string(&e).unwrap(), "\"inf\"");
        assert_eq!(serde_json::from_str::<Exponent>("2.5").unwrap(), Exponent(2.5));
    }

    #[test]
    fn orlicz_input_forms() {
        let s: OrliczInput = serde_json::from_str(r#"{"kind":"power","r":1.7,"normalize":"default"}"#).unwrap();
        assert!(s.build().unwrap().is_normalized());
        let full = serde_json::to_string(&s.build().unwrap()).unwrap();
        let f: OrliczInput = serde_json::from_str(&full).unwrap();
        assert!(matches!(f, OrliczInput::Function(_)));
        let p: OrliczInput = serde_json::from_str("\"m.json\"").unwrap();
        assert_eq!(p, OrliczInput::Path("m.json".into()));
    }

    #[test]
    fn config_round_trips() {
        let text = r#"{"command":"verify","theorem":"tensor","orlicz":{"kind":"power","r":1.7,"normalize":"default"},
            "p":2,"q":1.5,"ns":[4,8],"seed":3,"tolerances":{"spread":3}}"#;
        let c: RunConfig = serde_json::from_str(text).unwrap();
        let back: RunConfig = serde_json::from_str(&serde_json::to_string(&c).unwrap()).unwrap();
        assert_eq!(c, back);
        assert_eq!(c.validate().unwrap(), Command::Verify);
    }

    #[test]
    fn validation() {
        let mut c = RunConfig {
            command: Some(Command::Embed),
            ..RunConfig::default()
        };
        assert!(c.validate().is_err());
        c.seed = Some(1);
        assert!(c.validate().is_ok());
        c.q = Some(2.0);
        c.p = Some(Exponent(2.0));
        assert!(c.validate().is_err());
        assert!(serde_json::from_str::<RunConfig>(r#"{"command":"norm","bogus":1}"#).is_err());
    }
}
