//! The JSON problem file.
//!
//! ```json
//! {
//!   "name": "example",
//!   "p": 1,
//!   "q": 2,
//!   "cone": { "type": "orthant", "dim": 2 },
//!   "map": { "type": "affine", "matrix": [[1, 0, 0], [0, 1, 0], [0, 0, 1]], "offset": [-1, 0, 0] },
//!   "start": [0, 0, 0],
//!   "options": { "max_iter": 500 }
//! }
//! ```
//!
//! `map` is one of
//! - `affine`: `F(z) = matrix z + offset`, `matrix` given by rows;
//! - `combination`: `F = I - T` with `T(z) = sum_i f_i(z) w^i`, each term
//!   holding a scalar function `f` and a weight `w` in `L`;
//! - `builtin`: a built-in problem by `id`; `p`, `q` and `cone` must match it.
//!
//! The second-order cone stores its scalar component last.

use std::path::Path;
use std::sync::Arc;

use elcone::isotone::{build_combination, CombinationTerm, IsotoneCombination};
use elcone::map::{AffineMap, IdentityMinus};
use elcone::{example, ConeSpec, Mapping, Point, Problem, SolveOptions, Tolerance};
use serde::{Deserialize, Serialize};

use crate::exit::CliError;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
pub enum MapSpec {
    Affine { matrix: Vec<Vec<f64>>, offset: Vec<f64> },
    Combination { terms: Vec<CombinationTerm> },
    Builtin { id: String },
}

/// Overrides of the default solve options.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OptionsOverride {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max_iter: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tol_step: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tol_residual: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub monotone_check: Option<bool>,
    /// Slack for order and membership tests.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub eps: Option<f64>,
}

impl OptionsOverride {
    pub fn apply(&self, mut opts: SolveOptions) -> Result<SolveOptions, CliError> {
        if let Some(v) = self.max_iter {
            opts.max_iter = v;
        }
        if let Some(v) = self.tol_step {
            opts.tol_step = v;
        }
        if let Some(v) = self.tol_residual {
            opts.tol_residual = v;
        }
        if let Some(v) = self.monotone_check {
            opts.monotone_check = v;
        }
        if let Some(v) = self.eps {
            opts.tol = Tolerance::new(v).map_err(|e| CliError::invalid("options.eps", e))?;
        }
        opts.validate().map_err(|e| CliError::invalid("options", e))?;
        Ok(opts)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProblemFile {
    pub name: String,
    pub p: usize,
    pub q: usize,
    pub cone: ConeSpec,
    pub map: MapSpec,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub start: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub options: Option<OptionsOverride>,
}

impl ProblemFile {
    /// Parses JSON; errors carry the field path and the line and column.
    pub fn from_json(text: &str) -> Result<Self, CliError> {
        let mut de = serde_json::Deserializer::from_str(text);
        let file: ProblemFile = serde_path_to_error::deserialize(&mut de).map_err(|e| {
            let path = e.path().to_string();
            let inner = e.into_inner();
            if path == "." {
                CliError::Validation(format!("parse error: {inner}"))
            } else {
                CliError::Validation(format!("parse error in `{path}`: {inner}"))
            }
        })?;
        de.end()
            .map_err(|e| CliError::Validation(format!("parse error: {e}")))?;
        Ok(file)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("problem files serialize")
    }

    /// The problem file describing a built-in problem.
    pub fn builtin(id: &str) -> Result<Self, CliError> {
        let problem = example::builtin(id).ok_or_else(|| unknown_builtin(id))?;
        Ok(ProblemFile {
            name: id.to_string(),
            p: problem.p(),
            q: problem.q(),
            cone: problem.cone().clone(),
            map: MapSpec::Builtin { id: id.to_string() },
            start: None,
            options: None,
        })
    }

    /// Validates every field against `p` and `q` and builds the problem.
    pub fn build(&self) -> Result<Problem, CliError> {
        let (p, q) = (self.p, self.q);
        if p == 0 || q == 0 {
            return Err(CliError::Validation(format!(
                "p and q must be positive, got p = {p}, q = {q}"
            )));
        }
        self.cone
            .validate(Tolerance::DEFAULT)
            .map_err(|e| CliError::invalid("cone", e))?;
        if self.cone.dim() != q {
            return Err(CliError::Validation(format!(
                "cone: dimension {} does not match q = {q}",
                self.cone.dim()
            )));
        }
        let map: Arc<dyn Mapping> = match &self.map {
            MapSpec::Affine { matrix, offset } => {
                if matrix.len() != p + q {
                    return Err(CliError::Validation(format!(
                        "map.matrix: {} rows do not match p + q = {}",
                        matrix.len(),
                        p + q
                    )));
                }
                Arc::new(AffineMap::from_rows(matrix, offset.clone()).map_err(|e| CliError::invalid("map", e))?)
            }
            MapSpec::Combination { terms } => {
                let comb = IsotoneCombination {
                    p,
                    q,
                    terms: terms.clone(),
                };
                let t = build_combination(&comb, Tolerance::DEFAULT).map_err(|e| CliError::invalid("map.terms", e))?;
                Arc::new(IdentityMinus(t))
            }
            MapSpec::Builtin { id } => {
                let b = example::builtin(id).ok_or_else(|| unknown_builtin(id))?;
                if (b.p(), b.q()) != (p, q) {
                    return Err(CliError::Validation(format!(
                        "map.id: built-in `{id}` has p = {}, q = {}, file has p = {p}, q = {q}",
                        b.p(),
                        b.q()
                    )));
                }
                if b.cone() != &self.cone {
                    return Err(CliError::Validation(format!(
                        "cone: built-in `{id}` requires the cone {:?}",
                        b.cone()
                    )));
                }
                b.map().clone()
            }
        };
        let problem =
            Problem::new(self.name.clone(), p, q, self.cone.clone(), map).map_err(|e| CliError::invalid("problem", e))?;
        if let Some(start) = &self.start {
            start_point(&problem, start.clone())?;
        }
        Ok(problem)
    }

    pub fn solve_options(&self) -> Result<SolveOptions, CliError> {
        self.options.clone().unwrap_or_default().apply(SolveOptions::default())
    }
}

/// Checks a start vector against the problem split.
pub fn start_point(problem: &Problem, data: Vec<f64>) -> Result<Point, CliError> {
    if data.len() != problem.p() + problem.q() {
        return Err(CliError::Validation(format!(
            "start: {} values do not match p + q = {}",
            data.len(),
            problem.p() + problem.q()
        )));
    }
    if data.iter().any(|v| !v.is_finite()) {
        return Err(CliError::Validation("start: values must be finite".into()));
    }
    problem.point(data).map_err(|e| CliError::invalid("start", e))
}

fn unknown_builtin(id: &str) -> CliError {
    CliError::Validation(format!(
        "unknown built-in problem `{id}`; available: {}",
        example::BUILTIN_ID
    ))
}

/// Reads, parses and validates a problem file.
pub fn parse_problem(path: &Path) -> Result<(ProblemFile, Problem), CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
    let file = ProblemFile::from_json(&text)?;
    let problem = file.build()?;
    Ok((file, problem))
}
