//! Serialized artifacts: series JSON and diagnostic CSV.
//!
//! Reals in CSV are written with 17 significant digits so that they parse
//! back to the same `f64`.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::diagnostics::{ComparisonRow, HbarCurve, ResidualGrid};
use crate::engine::DeformationSeries;
use crate::error::{Error, Result};
use crate::model::{ModelConfig, QuadraticOdeSystem};
use crate::series::BiPoly;

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct TermRecord {
    pub hbar_exp: u32,
    pub t_exp: u32,
    pub coef: f64,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct StateSeries {
    pub name: String,
    /// `components[m]` holds the terms of `x_m`.
    pub components: Vec<Vec<TermRecord>>,
    pub partial_sum: Vec<TermRecord>,
}

/// Series export document. The embedded model makes it self-contained for
/// re-ingestion.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct SeriesDocument {
    pub order: usize,
    pub model: ModelConfig,
    pub states: Vec<StateSeries>,
}

pub fn terms_of(p: &BiPoly) -> Vec<TermRecord> {
    p.terms()
        .map(|(m, c)| TermRecord {
            hbar_exp: m.hbar,
            t_exp: m.t,
            coef: c,
        })
        .collect()
}

pub fn poly_of(terms: &[TermRecord]) -> BiPoly {
    BiPoly::from_terms(terms.iter().map(|r| (r.hbar_exp, r.t_exp, r.coef)))
}

impl SeriesDocument {
    pub fn from_series(series: &DeformationSeries) -> Self {
        let sys = series.system();
        let states = sys
            .names()
            .iter()
            .enumerate()
            .map(|(i, name)| StateSeries {
                name: name.clone(),
                components: (0..=series.order())
                    .map(|m| terms_of(series.component(i, m)))
                    .collect(),
                partial_sum: terms_of(&series.partial_sum(i)),
            })
            .collect();
        SeriesDocument {
            order: series.order(),
            model: sys.to_config(),
            states,
        }
    }

    /// Rebuilds the series; stored partial sums must match the components.
    pub fn into_series(self) -> Result<DeformationSeries> {
        let system: QuadraticOdeSystem = self.model.into_system()?;
        if self.states.len() != system.dim() {
            return Err(Error::schema(
                "states",
                "state count differs from the model",
            ));
        }
        let mut components = vec![Vec::with_capacity(system.dim()); self.order + 1];
        for (i, st) in self.states.iter().enumerate() {
            if st.name != system.names()[i] {
                return Err(Error::schema(
                    format!("states[{i}].name"),
                    format!("expected {:?}", system.names()[i]),
                ));
            }
            if st.components.len() != self.order + 1 {
                return Err(Error::schema(
                    format!("states[{i}].components"),
                    format!("expected {} orders", self.order + 1),
                ));
            }
            for (m, terms) in st.components.iter().enumerate() {
                components[m].push(poly_of(terms));
            }
        }
        let series = DeformationSeries::from_components(system, components)?;
        for (i, st) in self.states.iter().enumerate() {
            if poly_of(&st.partial_sum) != series.partial_sum(i) {
                return Err(Error::schema(
                    format!("states[{i}].partial_sum"),
                    "does not equal the sum of the components",
                ));
            }
        }
        Ok(series)
    }
}

pub fn series_to_json(series: &DeformationSeries) -> String {
    serde_json::to_string_pretty(&SeriesDocument::from_series(series))
        .expect("series document serializes")
}

pub fn series_from_json(text: &str) -> Result<DeformationSeries> {
    let de = &mut serde_json::Deserializer::from_str(text);
    let doc: SeriesDocument = serde_path_to_error::deserialize(de).map_err(|e| Error::Parse {
        path: e.path().to_string(),
        message: e.into_inner().to_string(),
    })?;
    doc.into_series()
}

/// Formats a real with 17 significant digits.
pub fn fmt_real(x: f64) -> String {
    format!("{x:.16e}")
}

pub fn curve_csv(curve: &HbarCurve) -> String {
    let mut out = String::from("hbar,value\n");
    for &(h, v) in curve.samples() {
        let _ = writeln!(out, "{},{}", fmt_real(h), fmt_real(v));
    }
    out
}

pub fn residual_csv(grid: &ResidualGrid, names: &[String]) -> String {
    let mut out = String::from("t");
    for n in names {
        let _ = write!(out, ",E_{n}");
    }
    out.push('\n');
    for (t, row) in grid.t_samples.iter().zip(&grid.values) {
        out.push_str(&fmt_real(*t));
        for v in row {
            out.push(',');
            out.push_str(&fmt_real(*v));
        }
        out.push('\n');
    }
    out
}

pub fn comparison_csv(rows: &[ComparisonRow], names: &[String]) -> String {
    let mut out = String::from("t,state,hatm,oracle,rel_err\n");
    for r in rows {
        let _ = writeln!(
            out,
            "{},{},{},{},{}",
            fmt_real(r.t),
            names[r.state],
            fmt_real(r.hatm),
            fmt_real(r.oracle),
            fmt_real(r.rel_err)
        );
    }
    out
}
