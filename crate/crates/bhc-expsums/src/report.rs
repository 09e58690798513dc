use std::collections::BTreeMap;

use serde::Serialize;

/// One measured quantity next to the bound it is compared with.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ReportRow {
    pub params: BTreeMap<String, f64>,
    pub value: f64,
    pub bound: f64,
    pub ratio: f64,
}

impl ReportRow {
    pub fn new<'a, I: IntoIterator<Item = (&'a str, f64)>>(params: I, value: f64, bound: f64) -> Self {
        let ratio = if bound == 0.0 {
            if value == 0.0 { 0.0 } else { f64::INFINITY }
        } else {
            value / bound
        };
        Self { params: params.into_iter().map(|(k, v)| (k.to_string(), v)).collect(), value, bound, ratio }
    }
}
