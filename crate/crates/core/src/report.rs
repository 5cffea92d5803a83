//! Check reports shared by every verification routine.

use std::fmt;

use num_rational::Ratio;
use serde::{Serialize, Serializer};
use serde_json::{Map, Value};

use crate::lambda::LambdaElem;
use crate::matrix::Matrix;
use crate::series::TruncSeries;

/// A valuation, with `Infinite` for an exact zero.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum Val {
    Finite(Ratio<i64>),
    Infinite,
}

impl Val {
    pub fn int(n: i64) -> Self {
        Val::Finite(Ratio::from_integer(n))
    }
    pub fn from_opt(v: Option<Ratio<i64>>) -> Self {
        v.map_or(Val::Infinite, Val::Finite)
    }
    pub fn at_least(&self, n: Ratio<i64>) -> bool {
        match self {
            Val::Infinite => true,
            Val::Finite(v) => *v >= n,
        }
    }
}

impl fmt::Display for Val {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Val::Infinite => write!(f, "inf"),
            Val::Finite(v) => write!(f, "{v}"),
        }
    }
}

impl Serialize for Val {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

/// The valuation of a residual: its first known nonzero term, or its
/// precision when it vanishes to precision.
pub fn residual_val_series(x: &TruncSeries) -> Val {
    if x.is_known_zero() {
        Val::from_opt(x.prec_valuation())
    } else {
        Val::from_opt(x.valuation())
    }
}

pub fn residual_val_lambda(x: &LambdaElem) -> Val {
    let offs = |j: usize| Ratio::new(j as i64, x.comps().len() as i64);
    x.comps()
        .iter()
        .enumerate()
        .map(|(j, c)| match residual_val_series(c) {
            Val::Finite(v) => Val::Finite(v - offs(j)),
            Val::Infinite => Val::Infinite,
        })
        .min()
        .unwrap_or(Val::Infinite)
}

pub fn residual_val_matrix(m: &Matrix<TruncSeries>) -> Val {
    m.entries().iter().map(residual_val_series).min().unwrap_or(Val::Infinite)
}

pub fn residual_val_lmatrix(m: &Matrix<LambdaElem>) -> Val {
    m.entries().iter().map(residual_val_lambda).min().unwrap_or(Val::Infinite)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    Pass,
    Fail,
    /// Informational only, no threshold.
    Diagnostic,
}

#[derive(Clone, Debug, Serialize)]
pub struct CheckReport {
    pub check: String,
    pub params: Map<String, Value>,
    pub residual_valuation: Option<Val>,
    pub target: Option<Val>,
    pub status: Status,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub notes: Vec<String>,
}

impl CheckReport {
    pub fn new(check: &str) -> Self {
        CheckReport {
            check: check.to_string(),
            params: Map::new(),
            residual_valuation: None,
            target: None,
            status: Status::Pass,
            notes: vec![],
        }
    }
    pub fn param(mut self, k: &str, v: impl Into<Value>) -> Self {
        self.params.insert(k.to_string(), v.into());
        self
    }
    pub fn note(&mut self, s: impl Into<String>) {
        self.notes.push(s.into());
    }
    /// Pass iff the residual reaches the target.
    pub fn with_residual(mut self, residual: Val, target: Ratio<i64>) -> Self {
        self.status = if residual.at_least(target) { Status::Pass } else { Status::Fail };
        self.residual_valuation = Some(residual);
        self.target = Some(Val::Finite(target));
        self
    }
    pub fn with_status(mut self, ok: bool) -> Self {
        self.status = if ok { Status::Pass } else { Status::Fail };
        self
    }
    /// Combine: the first failure wins.
    pub fn and(mut self, ok: bool, why: &str) -> Self {
        if !ok {
            self.status = Status::Fail;
            self.notes.push(format!("failed: {why}"));
        }
        self
    }
    pub fn passed(&self) -> bool {
        self.status != Status::Fail
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::FieldConfig;
    use crate::ratfunc::RatFunc;

    #[test]
    fn residual_of_truncated_zero_is_its_precision() {
        let f = FieldConfig::builtin(3).unwrap();
        let z = TruncSeries::zero_to(f, 1, 12);
        assert_eq!(residual_val_series(&z), Val::int(12));
        assert_eq!(residual_val_series(&TruncSeries::zero(f, 1)), Val::Infinite);
        let x = TruncSeries::monomial(RatFunc::one(f), 5, 2).truncate(20);
        assert_eq!(residual_val_series(&x), Val::Finite(Ratio::new(5, 2)));
        let l = LambdaElem::lambda(f).scale(&TruncSeries::zero_to(f, 1, 4));
        assert_eq!(residual_val_lambda(&l), Val::Finite(Ratio::new(7, 2)));
    }

    #[test]
    fn report_json_shape() {
        let r = CheckReport::new("tau").param("q", 3).with_residual(Val::int(61), Ratio::from_integer(60));
        let s = serde_json::to_string(&r).unwrap();
        assert_eq!(s, r#"{"check":"tau","params":{"q":3},"residual_valuation":"61","target":"60","status":"pass"}"#);
    }
}
