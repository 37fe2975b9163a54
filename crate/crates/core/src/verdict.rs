//! Pass/fail outcomes of the diagnostic checks, with the first failing location.

use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};

use crate::error::Error;
use crate::matrix::EntryMismatch;

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Location {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub component: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub row: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub col: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub exponent: Option<Vec<u32>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub index: Option<u64>,
}

impl Location {
    pub fn component(name: impl Into<String>) -> Self {
        Self {
            component: Some(name.into()),
            ..Self::default()
        }
    }
    pub fn entry(component: impl Into<String>, m: &EntryMismatch) -> Self {
        Self {
            component: Some(component.into()),
            row: Some(m.row),
            col: Some(m.col),
            exponent: Some(m.exponent.clone()),
            index: None,
        }
    }
    pub fn with_exponent(mut self, e: Vec<u32>) -> Self {
        self.exponent = Some(e);
        self
    }
    pub fn with_index(mut self, i: u64) -> Self {
        self.index = Some(i);
        self
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Verdict {
    pub name: String,
    pub pass: bool,
    pub worst_valuation_deficit: i64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub location: Option<Location>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub detail: Option<String>,
}

impl Verdict {
    pub fn pass(name: impl Into<String>) -> Self {
        Self {
            name: name.into(),
            pass: true,
            worst_valuation_deficit: 0,
            location: None,
            detail: None,
        }
    }

    pub fn fail(name: impl Into<String>, deficit: i64, location: Option<Location>) -> Self {
        Self {
            name: name.into(),
            pass: false,
            worst_valuation_deficit: deficit,
            location,
            detail: None,
        }
    }

    /// Failure caused by an error raised while running the check.
    pub fn error(name: impl Into<String>, err: &Error) -> Self {
        Self::fail(name, 0, None).with_detail(err.to_string())
    }

    pub fn from_mismatch(name: impl Into<String>, component: &str, m: Option<EntryMismatch>) -> Self {
        match m {
            None => Self::pass(name),
            Some(m) => Self::fail(name, m.deficit, Some(Location::entry(component, &m))),
        }
    }

    pub fn with_detail(mut self, d: impl Into<String>) -> Self {
        self.detail = Some(d.into());
        self
    }

    /// Combines several sub-checks; the first failure (by order) supplies the location.
    pub fn all(name: impl Into<String>, parts: impl IntoIterator<Item = Verdict>) -> Self {
        let mut out = Self::pass(name);
        for v in parts {
            if !v.pass {
                if out.pass {
                    out.pass = false;
                    out.location = v.location.clone();
                    out.detail = v.detail.clone().or_else(|| Some(v.name.clone()));
                }
                out.worst_valuation_deficit = out.worst_valuation_deficit.max(v.worst_valuation_deficit);
            }
        }
        out
    }
}

/// Ordered collection of verdicts.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct VerdictSet {
    pub verdicts: Vec<Verdict>,
}

impl VerdictSet {
    pub fn push(&mut self, v: Verdict) {
        self.verdicts.push(v);
    }
    pub fn all_pass(&self) -> bool {
        self.verdicts.iter().all(|v| v.pass)
    }
    pub fn get(&self, name: &str) -> Option<&Verdict> {
        self.verdicts.iter().find(|v| v.name == name)
    }
    pub fn failures(&self) -> impl Iterator<Item = &Verdict> {
        self.verdicts.iter().filter(|v| !v.pass)
    }

    /// `{name: {"pass", "worst_valuation_deficit", "location"?, "detail"?}}`.
    pub fn to_json(&self) -> Value {
        let mut m = Map::new();
        for v in &self.verdicts {
            let mut body = serde_json::to_value(v).expect("verdict serializes");
            if let Value::Object(o) = &mut body {
                o.remove("name");
            }
            m.insert(v.name.clone(), body);
        }
        Value::Object(m)
    }
}

impl Extend<Verdict> for VerdictSet {
    fn extend<I: IntoIterator<Item = Verdict>>(&mut self, iter: I) {
        self.verdicts.extend(iter);
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn combine_keeps_first_failure() {
        let a = Verdict::pass("a");
        let b = Verdict::fail("b", 2, Some(Location::component("x")));
        let c = Verdict::fail("c", 5, Some(Location::component("y")));
        let all = Verdict::all("all", [a, b, c]);
        assert!(!all.pass);
        assert_eq!(all.worst_valuation_deficit, 5);
        assert_eq!(all.location.unwrap().component.as_deref(), Some("x"));
    }

    #[test]
    fn json_shape() {
        let mut s = VerdictSet::default();
        s.push(Verdict::pass("pairing"));
        let j = s.to_json();
        assert_eq!(j["pairing"]["pass"], true);
        assert!(j["pairing"].get("location").is_none());
    }
}
