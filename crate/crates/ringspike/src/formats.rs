//! JSON documents: profiles, Jordan data, basis matrices and experiment
//! configurations, plus the `kind:params` profile grammar of the CLI.

use std::fs;
use std::path::Path;

use ringspike_core::jordan::{BasisSpec, JordanGroup, JordanSpec};
use ringspike_core::mc::{ExperimentConfig, MatrixModel, SpectrumMethod};
use ringspike_core::profiles::SingularProfile;
use ringspike_core::randmat::IsotropicForm;
use ringspike_core::{CMatrix, Complex64};
use serde::{Deserialize, Serialize};

use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum ProfileJson {
    Uniform { lo: f64, hi: f64 },
    QuarterCircle,
    PointMass { value: f64 },
    Explicit { values: Vec<f64> },
}

impl From<&SingularProfile> for ProfileJson {
    fn from(p: &SingularProfile) -> Self {
        match p {
            SingularProfile::Uniform { lo, hi } => Self::Uniform { lo: *lo, hi: *hi },
            SingularProfile::QuarterCircle => Self::QuarterCircle,
            SingularProfile::PointMass(c) => Self::PointMass { value: *c },
            SingularProfile::ExplicitList(v) => Self::Explicit { values: v.clone() },
        }
    }
}

impl ProfileJson {
    pub fn into_profile(self) -> Result<SingularProfile> {
        let p = match self {
            Self::Uniform { lo, hi } => SingularProfile::Uniform { lo, hi },
            Self::QuarterCircle => SingularProfile::QuarterCircle,
            Self::PointMass { value } => SingularProfile::PointMass(value),
            Self::Explicit { values } => SingularProfile::ExplicitList(values),
        };
        p.validate().map_err(|e| Error::Usage(e.to_string()))?;
        Ok(p)
    }
}

/// A complex entry: a bare real number or `[re, im]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ComplexJson {
    Real(f64),
    Pair([f64; 2]),
}

impl From<ComplexJson> for Complex64 {
    fn from(c: ComplexJson) -> Self {
        match c {
            ComplexJson::Real(x) => Complex64::new(x, 0.0),
            ComplexJson::Pair([re, im]) => Complex64::new(re, im),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GroupJson {
    pub theta: [f64; 2],
    /// `[p, beta]` pairs.
    pub blocks: Vec<[usize; 2]>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpecJson {
    pub groups: Vec<GroupJson>,
}

impl From<&JordanSpec> for SpecJson {
    fn from(s: &JordanSpec) -> Self {
        Self {
            groups: s
                .groups()
                .iter()
                .map(|g| GroupJson {
                    theta: [g.theta.re, g.theta.im],
                    blocks: g.blocks.iter().map(|b| [b.p, b.beta]).collect(),
                })
                .collect(),
        }
    }
}

impl SpecJson {
    pub fn into_spec(self) -> Result<JordanSpec> {
        let groups = self
            .groups
            .into_iter()
            .map(|g| {
                let blocks: Vec<(usize, usize)> = g.blocks.iter().map(|b| (b[0], b[1])).collect();
                JordanGroup::new(Complex64::new(g.theta[0], g.theta[1]), &blocks)
            })
            .collect();
        JordanSpec::new(groups).map_err(|e| Error::Usage(e.to_string()))
    }
}

/// `"identity"` or a row-major array of rows of complex entries.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum BasisJson {
    Named(String),
    Rows(Vec<Vec<ComplexJson>>),
}

impl Default for BasisJson {
    fn default() -> Self {
        Self::Named("identity".into())
    }
}

impl From<&BasisSpec> for BasisJson {
    fn from(b: &BasisSpec) -> Self {
        let q = b.q();
        Self::Rows(
            (0..q.rows())
                .map(|i| q.row(i).iter().map(|z| ComplexJson::Pair([z.re, z.im])).collect())
                .collect(),
        )
    }
}

impl BasisJson {
    pub fn into_basis(self, rank: usize) -> Result<BasisSpec> {
        match self {
            Self::Named(s) if s == "identity" => Ok(BasisSpec::identity(rank)),
            Self::Named(s) => Err(Error::Usage(format!("unknown basis name {s:?}; use \"identity\""))),
            Self::Rows(rows) => {
                if rows.len() != rank || rows.iter().any(|r| r.len() != rank) {
                    return Err(Error::Usage(format!("basis matrix must be {rank} x {rank}")));
                }
                let data = rows.into_iter().flatten().map(Complex64::from).collect();
                let q = CMatrix::from_row_major(rank, rank, data).map_err(|e| Error::Usage(e.to_string()))?;
                BasisSpec::new(q).map_err(|e| Error::Usage(e.to_string()))
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FormJson {
    #[default]
    Ut,
    Utv,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum ModelJson {
    Isotropic {
        profile: ProfileJson,
        #[serde(default)]
        form: FormJson,
    },
    Ginibre,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MethodJson {
    Dense,
    Krylov,
    #[default]
    Auto,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputsJson {
    #[serde(default)]
    pub summary: Option<String>,
    #[serde(default)]
    pub trials_csv: Option<String>,
    #[serde(default)]
    pub svg: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigJson {
    pub model: ModelJson,
    pub spec: SpecJson,
    #[serde(default)]
    pub q: BasisJson,
    pub n: usize,
    pub trials: usize,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub epsilon: Option<f64>,
    #[serde(default)]
    pub delta: Option<f64>,
    #[serde(default)]
    pub method: MethodJson,
    #[serde(default)]
    pub outputs: Option<OutputsJson>,
}

impl ConfigJson {
    pub fn into_config(self) -> Result<ExperimentConfig> {
        let model = match self.model {
            ModelJson::Ginibre => MatrixModel::Ginibre,
            ModelJson::Isotropic { profile, form } => MatrixModel::Isotropic {
                profile: profile.into_profile()?,
                form: match form {
                    FormJson::Ut => IsotropicForm::UT,
                    FormJson::Utv => IsotropicForm::UTV,
                },
            },
        };
        let spec = self.spec.into_spec()?;
        let basis = self.q.into_basis(spec.rank())?;
        let mut cfg = ExperimentConfig::new(model, spec, basis, self.n);
        cfg.trials = self.trials;
        cfg.base_seed = self.seed;
        cfg.epsilon = self.epsilon;
        cfg.delta = self.delta;
        cfg.method = match self.method {
            MethodJson::Dense => SpectrumMethod::Dense,
            MethodJson::Krylov => SpectrumMethod::Krylov,
            MethodJson::Auto => SpectrumMethod::Auto,
        };
        cfg.validate().map_err(|e| Error::Usage(e.to_string()))?;
        Ok(cfg)
    }
}

/// Matrix model selected by the `--profile` flag.
#[derive(Debug, Clone, PartialEq)]
pub enum ProfileArg {
    Profile(SingularProfile),
    Ginibre,
}

fn numbers(params: &str) -> Result<Vec<f64>> {
    params
        .split(',')
        .map(|t| {
            t.trim()
                .parse::<f64>()
                .map_err(|_| Error::Usage(format!("not a number: {t:?}")))
        })
        .collect()
}

/// Parses `uniform:lo,hi`, `quarter_circle`, `point_mass:c`, `explicit:v1,v2,…`,
/// `ginibre`, an inline JSON object, or a path to a JSON file.
pub fn parse_profile_arg(arg: &str) -> Result<ProfileArg> {
    let arg = arg.trim();
    if arg.starts_with('{') || arg.ends_with(".json") {
        let p: ProfileJson = parse_json_or_file(arg)?;
        return Ok(ProfileArg::Profile(p.into_profile()?));
    }
    let (kind, params) = arg.split_once(':').unwrap_or((arg, ""));
    let json = match kind.replace('-', "_").as_str() {
        "ginibre" if params.is_empty() => return Ok(ProfileArg::Ginibre),
        "uniform" => match numbers(params)?[..] {
            [lo, hi] => ProfileJson::Uniform { lo, hi },
            _ => return Err(Error::Usage("uniform takes two parameters: uniform:lo,hi".into())),
        },
        "quarter_circle" if params.is_empty() => ProfileJson::QuarterCircle,
        "point_mass" => match numbers(params)?[..] {
            [value] => ProfileJson::PointMass { value },
            _ => return Err(Error::Usage("point_mass takes one parameter: point_mass:c".into())),
        },
        "explicit" => ProfileJson::Explicit {
            values: numbers(params)?,
        },
        _ => return Err(Error::Usage(format!("unknown profile {arg:?}"))),
    };
    Ok(ProfileArg::Profile(json.into_profile()?))
}

/// Deserializes an inline JSON value, or the file at `arg` when it does not
/// look like JSON.
pub fn parse_json_or_file<T: for<'de> Deserialize<'de>>(arg: &str) -> Result<T> {
    let t = arg.trim_start();
    let text = if t.starts_with('{') || t.starts_with('[') || t.starts_with('"') {
        arg.to_owned()
    } else {
        fs::read_to_string(Path::new(arg)).map_err(|e| Error::Usage(format!("cannot read {arg}: {e}")))?
    };
    serde_json::from_str(&text).map_err(|e| Error::Usage(format!("invalid JSON in {arg:?}: {e}")))
}

pub fn parse_spec_arg(arg: &str) -> Result<JordanSpec> {
    parse_json_or_file::<SpecJson>(arg)?.into_spec()
}

pub fn parse_basis_arg(arg: &str, rank: usize) -> Result<BasisSpec> {
    if arg.trim() == "identity" {
        return Ok(BasisSpec::identity(rank));
    }
    parse_json_or_file::<BasisJson>(arg)?.into_basis(rank)
}

pub fn load_config(path: &Path) -> Result<(ExperimentConfig, Option<OutputsJson>)> {
    let text = fs::read_to_string(path).map_err(|e| Error::Usage(format!("cannot read {}: {e}", path.display())))?;
    let json: ConfigJson =
        serde_json::from_str(&text).map_err(|e| Error::Usage(format!("invalid config {}: {e}", path.display())))?;
    let outputs = json.outputs.clone();
    Ok((json.into_config()?, outputs))
}
