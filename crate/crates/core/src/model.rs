//! Autonomous ODE systems with constant + linear + bilinear right-hand sides,
//! and the built-in HIV / CD8⁺ T-cell preset.

use std::collections::{BTreeMap, HashSet};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// One bilinear term `coef · x_j · x_k` feeding `dx_target/dt`, with `j <= k`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct QuadraticTerm {
    pub target: usize,
    pub j: usize,
    pub k: usize,
    pub coef: f64,
}

/// `dx_i/dt = c_i + Σ_j A_ij x_j + Σ coef · x_j · x_k`.
#[derive(Clone, Debug, PartialEq)]
pub struct QuadraticOdeSystem {
    names: Vec<String>,
    init: Vec<f64>,
    constant: Vec<f64>,
    linear: Vec<Vec<f64>>,
    quadratic: Vec<QuadraticTerm>,
}

impl QuadraticOdeSystem {
    /// Validates and canonicalizes a system. Quadratic terms given with
    /// `j > k` are swapped; duplicate `(target, j, k)` entries are rejected.
    pub fn new(
        names: Vec<String>,
        init: Vec<f64>,
        constant: Vec<f64>,
        linear: Vec<Vec<f64>>,
        quadratic: Vec<QuadraticTerm>,
    ) -> Result<Self> {
        let n = names.len();
        if n == 0 {
            return Err(Error::invariant("states", "system has no states"));
        }
        let mut seen = HashSet::new();
        for (i, name) in names.iter().enumerate() {
            if name.is_empty() {
                return Err(Error::invariant(format!("states[{i}].name"), "empty name"));
            }
            if !seen.insert(name.as_str()) {
                return Err(Error::invariant(
                    format!("states[{i}].name"),
                    format!("duplicate state name {name:?}"),
                ));
            }
        }
        if init.len() != n {
            return Err(Error::invariant(
                "states",
                "init length differs from state count",
            ));
        }
        if constant.len() != n {
            return Err(Error::invariant(
                "constant",
                format!("expected {n} entries, got {}", constant.len()),
            ));
        }
        if linear.len() != n {
            return Err(Error::invariant(
                "linear",
                format!("expected {n} rows, got {}", linear.len()),
            ));
        }
        for (i, row) in linear.iter().enumerate() {
            if row.len() != n {
                return Err(Error::invariant(
                    format!("linear[{i}]"),
                    format!("expected {n} entries, got {}", row.len()),
                ));
            }
        }
        let finite = init
            .iter()
            .chain(&constant)
            .chain(linear.iter().flatten())
            .all(|v| v.is_finite());
        if !finite {
            return Err(Error::invariant(
                "",
                "non-finite coefficient or initial value",
            ));
        }

        let mut keys = HashSet::new();
        let mut canonical = Vec::with_capacity(quadratic.len());
        for (idx, q) in quadratic.into_iter().enumerate() {
            if q.target >= n || q.j >= n || q.k >= n {
                return Err(Error::invariant(
                    format!("quadratic[{idx}]"),
                    format!("index out of range for {n} states"),
                ));
            }
            if !q.coef.is_finite() {
                return Err(Error::invariant(
                    format!("quadratic[{idx}].coef"),
                    "non-finite coefficient",
                ));
            }
            let (j, k) = if q.j <= q.k { (q.j, q.k) } else { (q.k, q.j) };
            if !keys.insert((q.target, j, k)) {
                return Err(Error::invariant(
                    format!("quadratic[{idx}]"),
                    "duplicate (target, j, k) entry",
                ));
            }
            canonical.push(QuadraticTerm {
                target: q.target,
                j,
                k,
                coef: q.coef,
            });
        }

        Ok(QuadraticOdeSystem {
            names,
            init,
            constant,
            linear,
            quadratic: canonical,
        })
    }

    pub fn dim(&self) -> usize {
        self.names.len()
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.names.iter().position(|n| n == name)
    }

    pub fn init(&self) -> &[f64] {
        &self.init
    }

    pub fn constant(&self) -> &[f64] {
        &self.constant
    }

    pub fn linear(&self) -> &[Vec<f64>] {
        &self.linear
    }

    pub fn quadratic(&self) -> &[QuadraticTerm] {
        &self.quadratic
    }

    /// Same right-hand side, different initial values.
    pub fn with_init(&self, init: Vec<f64>) -> Result<Self> {
        QuadraticOdeSystem::new(
            self.names.clone(),
            init,
            self.constant.clone(),
            self.linear.clone(),
            self.quadratic.clone(),
        )
    }

    /// Evaluates `dx/dt` at `x`.
    pub fn rhs_eval(&self, x: &[f64]) -> Result<Vec<f64>> {
        if x.len() != self.dim() {
            return Err(Error::InvalidArgument(format!(
                "state vector has length {}, system has {} states",
                x.len(),
                self.dim()
            )));
        }
        let mut out = vec![0.0; self.dim()];
        self.rhs_into(x, &mut out);
        Ok(out)
    }

    /// Unchecked variant of [`rhs_eval`](Self::rhs_eval) writing into `out`.
    pub(crate) fn rhs_into(&self, x: &[f64], out: &mut [f64]) {
        for (i, o) in out.iter_mut().enumerate() {
            *o = self.constant[i]
                + self.linear[i]
                    .iter()
                    .zip(x)
                    .map(|(a, v)| a * v)
                    .sum::<f64>();
        }
        for q in &self.quadratic {
            out[q.target] += q.coef * x[q.j] * x[q.k];
        }
    }

    /// Serializes back into the custom-system document form.
    pub fn to_config(&self) -> ModelConfig {
        ModelConfig {
            preset: None,
            overrides: None,
            states: Some(
                self.names
                    .iter()
                    .zip(&self.init)
                    .map(|(name, &init)| StateSpec {
                        name: name.clone(),
                        init,
                    })
                    .collect(),
            ),
            constant: Some(self.constant.clone()),
            linear: Some(LinearSpec::Rows(self.linear.clone())),
            quadratic: Some(
                self.quadratic
                    .iter()
                    .map(|q| QuadraticSpec {
                        target: self.names[q.target].clone(),
                        j: self.names[q.j].clone(),
                        k: self.names[q.k].clone(),
                        coef: q.coef,
                    })
                    .collect(),
            ),
        }
    }
}

/// Parameters of the HIV / CD8⁺ T-cell model. Rates are per day, densities
/// per mm³.
#[derive(Clone, Debug, PartialEq)]
pub struct HivCd8Params {
    pub lambda_t: f64,
    pub mu_t: f64,
    pub chi: f64,
    pub mu_i: f64,
    pub eps_v: f64,
    pub mu_v: f64,
    pub alpha: f64,
    pub lambda_z: f64,
    pub mu_z: f64,
    pub beta: f64,
    pub mu_za: f64,
    pub t0: f64,
    pub i0: f64,
    pub v0: f64,
    pub z0: f64,
    pub za0: f64,
}

impl Default for HivCd8Params {
    /// Default rates, with initial state `(T, I, V, Z, Za) = (1000, 0, 1,
    /// 500, 0)`. The initial state is inferred: it is the constant part of
    /// the reference order-5 series, not a value given with the rates.
    fn default() -> Self {
        HivCd8Params {
            lambda_t: 10.0,
            mu_t: 0.01,
            chi: 0.000024,
            mu_i: 0.5,
            eps_v: 100.0,
            mu_v: 3.0,
            alpha: 0.02,
            lambda_z: 20.0,
            mu_z: 0.06,
            beta: 0.004,
            mu_za: 0.004,
            t0: 1000.0,
            i0: 0.0,
            v0: 1.0,
            z0: 500.0,
            za0: 0.0,
        }
    }
}

/// Names accepted in `overrides`, in declaration order.
pub const HIV_PARAM_NAMES: [&str; 16] = [
    "lambda_T", "mu_T", "chi", "mu_I", "eps_V", "mu_V", "alpha", "lambda_Z", "mu_Z", "beta",
    "mu_Za", "T0", "I0", "V0", "Z0", "Za0",
];

/// State labels of the HIV preset.
pub const HIV_STATE_NAMES: [&str; 5] = ["T", "I", "V", "Z", "Za"];

impl HivCd8Params {
    fn slot(&mut self, name: &str) -> Option<&mut f64> {
        Some(match name {
            "lambda_T" => &mut self.lambda_t,
            "mu_T" => &mut self.mu_t,
            "chi" => &mut self.chi,
            "mu_I" => &mut self.mu_i,
            "eps_V" => &mut self.eps_v,
            "mu_V" => &mut self.mu_v,
            "alpha" => &mut self.alpha,
            "lambda_Z" => &mut self.lambda_z,
            "mu_Z" => &mut self.mu_z,
            "beta" => &mut self.beta,
            "mu_Za" => &mut self.mu_za,
            "T0" => &mut self.t0,
            "I0" => &mut self.i0,
            "V0" => &mut self.v0,
            "Z0" => &mut self.z0,
            "Za0" => &mut self.za0,
            _ => return None,
        })
    }

    /// Sets a parameter by its document name.
    pub fn set(&mut self, name: &str, value: f64) -> Result<()> {
        let path = format!("overrides.{name}");
        let slot = self
            .slot(name)
            .ok_or_else(|| Error::schema(path.clone(), "unknown parameter"))?;
        *slot = value;
        Ok(())
    }

    pub fn validate(&self) -> Result<()> {
        let rates = [
            ("lambda_T", self.lambda_t),
            ("mu_T", self.mu_t),
            ("chi", self.chi),
            ("mu_I", self.mu_i),
            ("eps_V", self.eps_v),
            ("mu_V", self.mu_v),
            ("alpha", self.alpha),
            ("lambda_Z", self.lambda_z),
            ("mu_Z", self.mu_z),
            ("beta", self.beta),
            ("mu_Za", self.mu_za),
        ];
        for (name, v) in rates {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::invariant(name, format!("rate must be > 0, got {v}")));
            }
        }
        let inits = [
            ("T0", self.t0),
            ("I0", self.i0),
            ("V0", self.v0),
            ("Z0", self.z0),
            ("Za0", self.za0),
        ];
        for (name, v) in inits {
            if !(v.is_finite() && v >= 0.0) {
                return Err(Error::invariant(
                    name,
                    format!("initial value must be >= 0, got {v}"),
                ));
            }
        }
        Ok(())
    }
}

/// Builds the five-state HIV / CD8⁺ system (`T, I, V, Z, Za`).
pub fn hiv_cd8_system(p: &HivCd8Params) -> Result<QuadraticOdeSystem> {
    p.validate()?;
    const T: usize = 0;
    const I: usize = 1;
    const V: usize = 2;
    const Z: usize = 3;
    const ZA: usize = 4;

    let mut linear = vec![vec![0.0; 5]; 5];
    linear[T][T] = -p.mu_t;
    linear[I][I] = -p.mu_i;
    linear[V][V] = -p.mu_v;
    linear[Z][Z] = -p.mu_z;
    linear[ZA][ZA] = -p.mu_za;
    linear[V][I] = p.eps_v * p.mu_i;

    let q = |target, j, k, coef| QuadraticTerm { target, j, k, coef };
    QuadraticOdeSystem::new(
        HIV_STATE_NAMES.iter().map(|s| s.to_string()).collect(),
        vec![p.t0, p.i0, p.v0, p.z0, p.za0],
        vec![p.lambda_t, 0.0, 0.0, p.lambda_z, 0.0],
        linear,
        vec![
            q(T, T, V, -p.chi),
            q(I, T, V, p.chi),
            q(I, I, ZA, -p.alpha),
            q(Z, I, Z, -p.beta),
            q(ZA, I, Z, p.beta),
        ],
    )
}

/// The HIV preset with default parameters.
pub fn hiv_cd8_default() -> QuadraticOdeSystem {
    hiv_cd8_system(&HivCd8Params::default()).expect("default parameters are valid")
}

/// Resolves a preset name.
pub fn preset(name: &str) -> Result<QuadraticOdeSystem> {
    match name {
        "hiv-cd8" => Ok(hiv_cd8_default()),
        other => Err(Error::schema("preset", format!("unknown preset {other:?}"))),
    }
}

// ---------------------------------------------------------------------------
// Model-config document

#[derive(Clone, Debug, Default, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct ModelConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub preset: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub overrides: Option<BTreeMap<String, f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub states: Option<Vec<StateSpec>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub constant: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub linear: Option<LinearSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub quadratic: Option<Vec<QuadraticSpec>>,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct StateSpec {
    pub name: String,
    pub init: f64,
}

/// Row-major linear part: either a list of rows or a flat list of `n²` reals.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
#[serde(untagged)]
pub enum LinearSpec {
    Rows(Vec<Vec<f64>>),
    Flat(Vec<f64>),
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct QuadraticSpec {
    pub target: String,
    pub j: String,
    pub k: String,
    pub coef: f64,
}

impl ModelConfig {
    pub fn into_system(self) -> Result<QuadraticOdeSystem> {
        match (&self.preset, &self.states) {
            (Some(_), Some(_)) => Err(Error::schema(
                "",
                "exactly one of `preset` and `states` may be present",
            )),
            (None, None) => Err(Error::schema("", "one of `preset` or `states` is required")),
            (Some(name), None) => {
                for key in ["constant", "linear", "quadratic"] {
                    let present = match key {
                        "constant" => self.constant.is_some(),
                        "linear" => self.linear.is_some(),
                        _ => self.quadratic.is_some(),
                    };
                    if present {
                        return Err(Error::schema(key, "not allowed together with `preset`"));
                    }
                }
                if name != "hiv-cd8" {
                    return Err(Error::schema("preset", format!("unknown preset {name:?}")));
                }
                let mut params = HivCd8Params::default();
                for (k, &v) in self.overrides.iter().flatten() {
                    params.set(k, v)?;
                }
                hiv_cd8_system(&params)
            }
            (None, Some(states)) => {
                if self.overrides.is_some() {
                    return Err(Error::schema(
                        "overrides",
                        "only valid together with `preset`",
                    ));
                }
                self.custom_system(states)
            }
        }
    }

    fn custom_system(&self, states: &[StateSpec]) -> Result<QuadraticOdeSystem> {
        let n = states.len();
        let names: Vec<String> = states.iter().map(|s| s.name.clone()).collect();
        let mut seen = HashSet::new();
        for (i, name) in names.iter().enumerate() {
            if !seen.insert(name.as_str()) {
                return Err(Error::schema(
                    format!("states[{i}].name"),
                    format!("duplicate state name {name:?}"),
                ));
            }
        }
        let init = states.iter().map(|s| s.init).collect();
        let constant = self.constant.clone().unwrap_or_else(|| vec![0.0; n]);
        let linear = match &self.linear {
            None => vec![vec![0.0; n]; n],
            Some(LinearSpec::Rows(rows)) => rows.clone(),
            Some(LinearSpec::Flat(flat)) => {
                if flat.len() != n * n {
                    return Err(Error::invariant(
                        "linear",
                        format!("expected {} entries, got {}", n * n, flat.len()),
                    ));
                }
                flat.chunks(n).map(<[f64]>::to_vec).collect()
            }
        };
        let lookup = |path: String, name: &str| {
            names
                .iter()
                .position(|s| s == name)
                .ok_or_else(|| Error::invariant(path, format!("unknown state {name:?}")))
        };
        let mut quadratic = Vec::new();
        for (idx, q) in self.quadratic.iter().flatten().enumerate() {
            quadratic.push(QuadraticTerm {
                target: lookup(format!("quadratic[{idx}].target"), &q.target)?,
                j: lookup(format!("quadratic[{idx}].j"), &q.j)?,
                k: lookup(format!("quadratic[{idx}].k"), &q.k)?,
                coef: q.coef,
            });
        }
        QuadraticOdeSystem::new(names, init, constant, linear, quadratic)
    }
}

/// Parses and validates a JSON model-config document.
pub fn load_system(document: &str) -> Result<QuadraticOdeSystem> {
    let de = &mut serde_json::Deserializer::from_str(document);
    let config: ModelConfig = serde_path_to_error::deserialize(de).map_err(|e| {
        let path = e.path().to_string();
        let inner = e.into_inner();
        if inner.is_data() {
            Error::schema(path, inner.to_string())
        } else {
            Error::Parse {
                path,
                message: inner.to_string(),
            }
        }
    })?;
    config.into_system()
}
