//! JSON model files.
//!
//! ```json
//! {
//!   "meta": { "title": "three atoms", "seed": 1 },
//!   "space": { "finite": 3 },
//!   "measures": { "P": { "weights": [0.25, "1/4", 0.5] } },
//!   "variables": { "X": { "values": [1, 2, 3] } },
//!   "families": { "F": { "members": ["X"], "measures": ["P"] } }
//! }
//! ```
//!
//! A measure is one of `weights` (finite spaces), `atoms` (sparse
//! `[index, weight]` pairs), `weight` + `tail` (formulas on the countable
//! space) or `plugin`. A variable is `values` (finite spaces) or `expr` with
//! optional `growth` and `moment_tail` formulas. A family with one measure
//! is classical; several measures, or a plugin, give the upper expectation
//! over them. Numbers may be given as formula strings without `n`.

use std::collections::BTreeMap;
use std::fmt;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use serde::Deserialize;
use thiserror::Error;

use crate::error::Error;
use crate::family::{FamilyOfRVs, MeasureContext};
use crate::modelspec::expr::{ModelExpr, ParseError};
use crate::prob::{AtomSpace, Measure, RandomVariable, DEFAULT_NORMALIZATION_TOL};
use crate::sublinear::remark::RemarkCounterexample;
use crate::sublinear::{ClosedFormPlugin, MeasureSet, SublinearExpectation, REMARK_PLUGIN};

/// Per-index measures materialized for plugins unless `n_max` is given.
pub const DEFAULT_PLUGIN_N_MAX: u64 = 1000;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ModelError {
    #[error("{path}: {message}")]
    Io { path: PathBuf, message: String },
    #[error("line {line}, column {column}: {message}")]
    Json {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("{path}: {message}")]
    Schema { path: String, message: String },
    #[error("{path}: formula `{text}`: {source}")]
    Formula {
        path: String,
        text: String,
        source: ParseError,
    },
    #[error("{path}: unknown {what} `{name}`")]
    UnknownName {
        path: String,
        what: &'static str,
        name: String,
    },
    #[error("{path}: unknown plugin `{name}`")]
    UnknownPlugin { path: String, name: String },
    #[error("{path}: {source}")]
    Invalid { path: String, source: Error },
}

impl ModelError {
    /// Stable short name of the diagnostic.
    pub fn kind(&self) -> &'static str {
        match self {
            ModelError::Io { .. } => "io",
            ModelError::Json { .. } => "json",
            ModelError::Schema { .. } => "schema",
            ModelError::Formula { .. } => "formula",
            ModelError::UnknownName { .. } => "unknown_name",
            ModelError::UnknownPlugin { .. } => "unknown_plugin",
            ModelError::Invalid { source, .. } => match source {
                Error::Normalization { .. } => "normalization",
                Error::TailBound { .. } => "tail_bound",
                Error::InvalidMeasure(_) => "invalid_measure",
                Error::InvalidVariable(_) => "invalid_variable",
                Error::SpaceMismatch(_) => "space_mismatch",
                Error::Expr { .. } => "evaluation",
                Error::EmptyFamily => "empty_family",
                Error::MissingTailBound(_) => "missing_tail_bound",
                Error::InvalidSpace(_) => "invalid_space",
                _ => "invalid",
            },
        }
    }

    /// JSON pointer of the offending value, when known.
    pub fn path(&self) -> Option<&str> {
        match self {
            ModelError::Schema { path, .. }
            | ModelError::Formula { path, .. }
            | ModelError::UnknownName { path, .. }
            | ModelError::UnknownPlugin { path, .. }
            | ModelError::Invalid { path, .. } => Some(path),
            _ => None,
        }
    }
}

type MResult<T> = std::result::Result<T, ModelError>;

#[derive(Debug, Clone, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Meta {
    #[serde(default)]
    pub title: Option<String>,
    #[serde(default)]
    pub seed: Option<u64>,
}

#[derive(Debug, Deserialize)]
#[serde(rename_all = "lowercase", deny_unknown_fields)]
enum RawSpace {
    Finite(usize),
    Countable,
}

#[derive(Debug, Deserialize)]
#[serde(untagged)]
enum Number {
    Value(f64),
    Formula(String),
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawMeasure {
    weights: Option<Vec<Number>>,
    atoms: Option<Vec<(u64, Number)>>,
    weight: Option<String>,
    tail: Option<String>,
    plugin: Option<String>,
    n_max: Option<u64>,
    tol: Option<f64>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawVariable {
    values: Option<Vec<Number>>,
    expr: Option<String>,
    growth: Option<String>,
    moment_tail: Option<String>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawFamily {
    members: Vec<String>,
    measures: Vec<String>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawModel {
    #[serde(default)]
    meta: Meta,
    space: RawSpace,
    #[serde(default)]
    measures: BTreeMap<String, RawMeasure>,
    #[serde(default)]
    variables: BTreeMap<String, RawVariable>,
    #[serde(default)]
    families: BTreeMap<String, RawFamily>,
}

#[derive(Clone)]
pub enum MeasureEntry {
    Measure(Measure),
    Plugin(Arc<dyn ClosedFormPlugin>),
}

impl fmt::Debug for MeasureEntry {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            MeasureEntry::Measure(m) => f.debug_tuple("Measure").field(m).finish(),
            MeasureEntry::Plugin(p) => f.debug_tuple("Plugin").field(&p.name()).finish(),
        }
    }
}

/// A validated model.
#[derive(Debug, Clone)]
pub struct ModelFile {
    pub meta: Meta,
    pub space: AtomSpace,
    pub measures: BTreeMap<String, MeasureEntry>,
    pub variables: BTreeMap<String, RandomVariable>,
    pub families: BTreeMap<String, FamilyOfRVs>,
}

impl ModelFile {
    /// The named family, or the first family by name when `name` is `None`.
    pub fn family(&self, name: Option<&str>) -> Result<&FamilyOfRVs, Error> {
        match name {
            Some(n) => self
                .families
                .get(n)
                .ok_or_else(|| Error::InvalidArgument(format!("no family `{n}` in model"))),
            None => self
                .families
                .values()
                .next()
                .ok_or_else(|| Error::InvalidArgument("model defines no families".into())),
        }
    }
}

/// Reads and validates a model file; `path.json` is tried when `path` does
/// not exist.
pub fn load_model(path: impl AsRef<Path>) -> MResult<ModelFile> {
    let path = path.as_ref();
    let resolved = if !path.exists() && path.extension().is_none() {
        let mut p = path.as_os_str().to_owned();
        p.push(".json");
        PathBuf::from(p)
    } else {
        path.to_path_buf()
    };
    let text = std::fs::read_to_string(&resolved).map_err(|e| ModelError::Io {
        path: resolved.clone(),
        message: e.to_string(),
    })?;
    parse_model(&text)
}

/// Validates a model given as JSON text.
pub fn parse_model(text: &str) -> MResult<ModelFile> {
    let raw: RawModel = serde_json::from_str(text).map_err(|e| ModelError::Json {
        line: e.line(),
        column: e.column(),
        message: e.to_string(),
    })?;
    build(raw)
}

/// A one-family model around a named plugin and `X(n) = n`.
pub fn plugin_model(name: &str, n_max: u64) -> MResult<ModelFile> {
    let plugin = make_plugin(name, Some(n_max), "/plugin")?;
    let space = plugin.space();
    let x = RandomVariable::identity();
    let e = SublinearExpectation::new(MeasureSet::ClosedForm(plugin.clone()));
    let family = FamilyOfRVs::sublinear(vec![x.clone()], e).map_err(invalid("/families/default"))?;
    Ok(ModelFile {
        meta: Meta {
            title: Some(name.to_string()),
            seed: None,
        },
        space,
        measures: BTreeMap::from([(name.to_string(), MeasureEntry::Plugin(plugin))]),
        variables: BTreeMap::from([("X".to_string(), x)]),
        families: BTreeMap::from([("default".to_string(), family)]),
    })
}

fn make_plugin(name: &str, n_max: Option<u64>, path: &str) -> MResult<Arc<dyn ClosedFormPlugin>> {
    match name {
        REMARK_PLUGIN => {
            let p = RemarkCounterexample::new(n_max.unwrap_or(DEFAULT_PLUGIN_N_MAX)).map_err(invalid(path))?;
            Ok(Arc::new(p))
        }
        _ => Err(ModelError::UnknownPlugin {
            path: path.to_string(),
            name: name.to_string(),
        }),
    }
}

fn invalid(path: &str) -> impl FnOnce(Error) -> ModelError + '_ {
    move |source| ModelError::Invalid {
        path: path.to_string(),
        source,
    }
}

fn schema(path: String, message: impl Into<String>) -> ModelError {
    ModelError::Schema {
        path,
        message: message.into(),
    }
}

/// JSON-pointer escaping of a key.
fn key(k: &str) -> String {
    k.replace('~', "~0").replace('/', "~1")
}

fn formula(path: &str, text: &str) -> MResult<ModelExpr> {
    ModelExpr::parse(text).map_err(|source| ModelError::Formula {
        path: path.to_string(),
        text: text.to_string(),
        source,
    })
}

fn number(path: String, n: &Number) -> MResult<f64> {
    match n {
        Number::Value(v) => Ok(*v),
        Number::Formula(text) => {
            let e = formula(&path, text)?;
            e.eval_const().map_err(|source| ModelError::Invalid {
                path,
                source: Error::Expr { atom: 0, source },
            })
        }
    }
}

fn numbers(path: &str, ns: &[Number]) -> MResult<Vec<f64>> {
    ns.iter()
        .enumerate()
        .map(|(i, n)| number(format!("{path}/{i}"), n))
        .collect()
}

fn build(raw: RawModel) -> MResult<ModelFile> {
    let space = match raw.space {
        RawSpace::Finite(n) => AtomSpace::finite(n).map_err(invalid("/space"))?,
        RawSpace::Countable => AtomSpace::Countable,
    };

    let mut measures = BTreeMap::new();
    for (name, m) in &raw.measures {
        let path = format!("/measures/{}", key(name));
        measures.insert(name.clone(), build_measure(&path, space, m)?);
    }

    let mut variables = BTreeMap::new();
    for (name, v) in &raw.variables {
        let path = format!("/variables/{}", key(name));
        variables.insert(name.clone(), build_variable(&path, space, v)?);
    }

    let mut families = BTreeMap::new();
    for (name, f) in &raw.families {
        let path = format!("/families/{}", key(name));
        let members = f
            .members
            .iter()
            .enumerate()
            .map(|(i, m)| {
                variables.get(m).cloned().ok_or_else(|| ModelError::UnknownName {
                    path: format!("{path}/members/{i}"),
                    what: "variable",
                    name: m.clone(),
                })
            })
            .collect::<MResult<Vec<_>>>()?;
        let mut entries = Vec::with_capacity(f.measures.len());
        for (i, m) in f.measures.iter().enumerate() {
            let entry = measures.get(m).ok_or_else(|| ModelError::UnknownName {
                path: format!("{path}/measures/{i}"),
                what: "measure",
                name: m.clone(),
            })?;
            entries.push(entry.clone());
        }
        let context = match entries.as_slice() {
            [] => return Err(schema(format!("{path}/measures"), "a family needs at least one measure")),
            [MeasureEntry::Measure(p)] => MeasureContext::Classical(p.clone()),
            [MeasureEntry::Plugin(p)] => {
                MeasureContext::Sublinear(SublinearExpectation::new(MeasureSet::ClosedForm(p.clone())))
            }
            many => {
                let mut list = Vec::with_capacity(many.len());
                for (i, e) in many.iter().enumerate() {
                    match e {
                        MeasureEntry::Measure(p) => list.push(p.clone()),
                        MeasureEntry::Plugin(_) => {
                            return Err(schema(
                                format!("{path}/measures/{i}"),
                                "a plugin must be the family's only measure",
                            ))
                        }
                    }
                }
                let set = MeasureSet::explicit(list).map_err(invalid(&path))?;
                MeasureContext::Sublinear(SublinearExpectation::new(set))
            }
        };
        if let MeasureContext::Sublinear(e) = &context {
            if let Some(p) = e.plugin() {
                if let Some(i) = members.iter().position(|x| !p.supports(x)) {
                    return Err(schema(
                        format!("{path}/members/{i}"),
                        format!("plugin `{}` does not support this variable", p.name()),
                    ));
                }
            }
        }
        let family = FamilyOfRVs::new(members, context).map_err(invalid(&path))?;
        families.insert(name.clone(), family);
    }

    Ok(ModelFile {
        meta: raw.meta,
        space,
        measures,
        variables,
        families,
    })
}

fn build_measure(path: &str, space: AtomSpace, m: &RawMeasure) -> MResult<MeasureEntry> {
    let forms = [
        m.weights.is_some(),
        m.atoms.is_some(),
        m.weight.is_some() || m.tail.is_some(),
        m.plugin.is_some(),
    ];
    if forms.iter().filter(|&&b| b).count() != 1 {
        return Err(schema(
            path.to_string(),
            "give exactly one of `weights`, `atoms`, `weight` + `tail`, `plugin`",
        ));
    }
    if m.n_max.is_some() && m.plugin.is_none() {
        return Err(schema(format!("{path}/n_max"), "`n_max` applies to plugins only"));
    }
    let tol = m.tol.unwrap_or(DEFAULT_NORMALIZATION_TOL);
    if let Some(name) = &m.plugin {
        if m.tol.is_some() {
            return Err(schema(format!("{path}/tol"), "`tol` does not apply to plugins"));
        }
        let p = make_plugin(name, m.n_max, &format!("{path}/plugin"))?;
        p.space().check_same(&space, "plugin vs model space").map_err(invalid(path))?;
        return Ok(MeasureEntry::Plugin(p));
    }
    if let Some(ws) = &m.weights {
        let wpath = format!("{path}/weights");
        if let AtomSpace::Finite(n) = space {
            if ws.len() != n {
                return Err(ModelError::Invalid {
                    path: wpath,
                    source: Error::SpaceMismatch(format!("{} weights on {space}", ws.len())),
                });
            }
        } else {
            return Err(ModelError::Invalid {
                path: wpath,
                source: Error::SpaceMismatch("`weights` lists need a finite space".into()),
            });
        }
        let w = numbers(&wpath, ws)?;
        return Measure::finite_with_tolerance(w, tol)
            .map(MeasureEntry::Measure)
            .map_err(invalid(&wpath));
    }
    if let Some(atoms) = &m.atoms {
        let apath = format!("{path}/atoms");
        let pairs = atoms
            .iter()
            .enumerate()
            .map(|(i, (a, w))| Ok((*a, number(format!("{apath}/{i}/1"), w)?)))
            .collect::<MResult<Vec<_>>>()?;
        return Measure::sparse_with_tolerance(space, pairs, tol)
            .map(MeasureEntry::Measure)
            .map_err(invalid(&apath));
    }
    let (Some(weight), Some(tail)) = (&m.weight, &m.tail) else {
        let missing = if m.weight.is_none() { "weight" } else { "tail" };
        return Err(ModelError::Invalid {
            path: format!("{path}/{missing}"),
            source: Error::MissingTailBound(format!("formula measures need both `weight` and `tail`, `{missing}` is missing")),
        });
    };
    if space != AtomSpace::Countable {
        return Err(ModelError::Invalid {
            path: path.to_string(),
            source: Error::SpaceMismatch("formula measures need the countable space".into()),
        });
    }
    let w = formula(&format!("{path}/weight"), weight)?;
    let t = formula(&format!("{path}/tail"), tail)?;
    Measure::countable_with_tolerance(w, t, tol)
        .map(MeasureEntry::Measure)
        .map_err(invalid(path))
}

fn build_variable(path: &str, space: AtomSpace, v: &RawVariable) -> MResult<RandomVariable> {
    match (&v.values, &v.expr) {
        (Some(values), None) => {
            if v.growth.is_some() || v.moment_tail.is_some() {
                return Err(schema(path.to_string(), "`growth` and `moment_tail` go with `expr`"));
            }
            let vpath = format!("{path}/values");
            if space.len() != Some(values.len()) {
                return Err(ModelError::Invalid {
                    path: vpath,
                    source: Error::SpaceMismatch(format!("{} values on {space}", values.len())),
                });
            }
            RandomVariable::finite(numbers(&vpath, values)?).map_err(invalid(&vpath))
        }
        (None, Some(expr)) => {
            let value = formula(&format!("{path}/expr"), expr)?;
            let growth = v
                .growth
                .as_deref()
                .map(|g| formula(&format!("{path}/growth"), g))
                .transpose()?;
            let moment_tail = v
                .moment_tail
                .as_deref()
                .map(|r| formula(&format!("{path}/moment_tail"), r))
                .transpose()?;
            let x = RandomVariable::formula(space, value, growth, moment_tail);
            if space.is_finite() {
                x.table().map_err(invalid(path))?;
            } else {
                // spot-check the first atoms so typos surface at load time
                for atom in 0..16 {
                    x.value(atom).map_err(invalid(path))?;
                }
            }
            Ok(x)
        }
        _ => Err(schema(path.to_string(), "give exactly one of `values`, `expr`")),
    }
}
