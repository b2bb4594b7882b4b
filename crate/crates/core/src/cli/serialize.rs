//! CSV and JSON encodings of a sweep. Both are byte-stable: values are
//! printed with 17 significant digits and in fixed column order.

use std::fmt::Write as _;

use serde_json::{json, Value};

use crate::dynamics::Basis;
use crate::spectra::{Decomposition, SpectraBundle, SpectraPoint};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Csv,
    Json,
}

impl Format {
    pub fn extension(self) -> &'static str {
        match self {
            Format::Csv => "csv",
            Format::Json => "json",
        }
    }
}

/// Maps `omega` to the plotted axis, `(omega - center) / scale`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AxisNorm {
    pub center: f64,
    pub scale: f64,
}

impl AxisNorm {
    pub fn apply(&self, omega: f64) -> f64 {
        (omega - self.center) / self.scale
    }
}

pub fn columns(basis: Basis) -> [&'static str; 12] {
    let (d1, d2) = match basis {
        Basis::Bare => ("S1", "S2"),
        Basis::Supermode => ("S_plus", "S_minus"),
    };
    [
        "omega",
        "omega_norm",
        "T_R",
        "T_L",
        "R_R",
        "R_L",
        "S_R_th",
        d1,
        d2,
        "S_R_vac",
        "S_R_out",
        "isolation_db",
    ]
}

/// Row values in column order. `S_R_out` is divided by `N_th` when `N_th > 0`.
pub fn row(p: &SpectraPoint, axis: &AxisNorm) -> [f64; 12] {
    let (d1, d2) = match p.decomposition {
        Decomposition::Paths { s1, s2 } => (s1, s2),
        Decomposition::Supermodes { s_plus, s_minus } => (s_plus, s_minus),
    };
    let s_out = if p.n_th > 0.0 { p.s_r_out_per_nth() } else { p.s_r_out };
    [
        p.omega,
        axis.apply(p.omega),
        p.t_r,
        p.t_l,
        p.r_r,
        p.r_l,
        p.s_r_th,
        d1,
        d2,
        p.s_r_vac,
        s_out,
        p.isolation_db,
    ]
}

fn fmt_f64(x: f64) -> String {
    if x.is_nan() {
        "nan".into()
    } else if x.is_infinite() {
        if x > 0.0 { "inf" } else { "-inf" }.into()
    } else {
        format!("{x:.16e}")
    }
}

pub fn to_csv(bundle: &SpectraBundle, axis: &AxisNorm) -> String {
    let mut out = columns(bundle.basis).join(",");
    out.push('\n');
    for p in &bundle.points {
        let cells: Vec<String> = row(p, axis).iter().map(|&x| fmt_f64(x)).collect();
        let _ = writeln!(out, "{}", cells.join(","));
    }
    out
}

fn json_number(x: f64) -> Value {
    if x.is_finite() {
        json!(x)
    } else {
        json!(fmt_f64(x))
    }
}

pub fn to_json_value(bundle: &SpectraBundle, axis: &AxisNorm) -> Value {
    let rows: Vec<Value> = bundle
        .points
        .iter()
        .map(|p| Value::Array(row(p, axis).iter().map(|&x| json_number(x)).collect()))
        .collect();
    json!({
        "basis": bundle.basis.name(),
        "unstable": bundle.unstable,
        "columns": columns(bundle.basis),
        "rows": rows,
    })
}

pub fn to_json(bundle: &SpectraBundle, axis: &AxisNorm) -> String {
    let mut s = serde_json::to_string_pretty(&to_json_value(bundle, axis)).expect("plain JSON");
    s.push('\n');
    s
}

pub fn serialize(bundle: &SpectraBundle, axis: &AxisNorm, format: Format) -> String {
    match format {
        Format::Csv => to_csv(bundle, axis),
        Format::Json => to_json(bundle, axis),
    }
}
