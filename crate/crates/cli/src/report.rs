//! Reports: measured residuals with their bounds, serialized as JSON.

use std::collections::BTreeMap;
use std::str::FromStr;

use serde_json::{Map, Number, Value};

use crate::config::Scenario;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Relation {
    /// `value ≤ bound`.
    AtMost,
    /// `value ≥ bound`.
    AtLeast,
    /// `value > bound`.
    Above,
    /// `value < bound`.
    Below,
}

impl Relation {
    fn as_str(self) -> &'static str {
        match self {
            Relation::AtMost => "<=",
            Relation::AtLeast => ">=",
            Relation::Above => ">",
            Relation::Below => "<",
        }
    }

    fn parse(s: &str) -> Option<Self> {
        match s {
            "<=" => Some(Relation::AtMost),
            ">=" => Some(Relation::AtLeast),
            ">" => Some(Relation::Above),
            "<" => Some(Relation::Below),
            _ => None,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Check {
    pub name: String,
    pub value: f64,
    pub relation: Relation,
    pub bound: f64,
}

impl Check {
    pub fn passed(&self) -> bool {
        match self.relation {
            Relation::AtMost => self.value <= self.bound,
            Relation::AtLeast => self.value >= self.bound,
            Relation::Above => self.value > self.bound,
            Relation::Below => self.value < self.bound,
        }
    }

    /// How close the check is to failing; values above 1 fail.
    pub fn severity(&self) -> f64 {
        if !self.value.is_finite() {
            return f64::INFINITY;
        }
        let ratio = |num: f64, den: f64| if den.abs() > 0.0 { num / den.abs() } else if num > 0.0 { f64::INFINITY } else { 0.0 };
        match self.relation {
            Relation::AtMost | Relation::Below if self.passed() => ratio(self.value, self.bound).max(0.0).min(1.0),
            Relation::AtMost | Relation::Below => f64::INFINITY,
            Relation::AtLeast | Relation::Above => {
                if self.passed() {
                    ratio(self.bound, self.value).min(1.0)
                } else {
                    f64::INFINITY
                }
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Report {
    pub scenario: Scenario,
    pub name: String,
    pub seed: u64,
    pub rng: String,
    pub parameters: BTreeMap<String, f64>,
    pub checks: Vec<Check>,
    /// Measurements recorded without a pass/fail bound.
    pub info: BTreeMap<String, f64>,
    /// Errors that stopped the scenario early.
    pub errors: Vec<String>,
}

impl Report {
    pub fn new(scenario: Scenario, name: String, seed: u64) -> Self {
        Self {
            scenario,
            name,
            seed,
            rng: g2lab::sampling::RNG_ALGORITHM.to_string(),
            parameters: BTreeMap::new(),
            checks: Vec::new(),
            info: BTreeMap::new(),
            errors: Vec::new(),
        }
    }

    pub fn check(&mut self, name: &str, value: f64, relation: Relation, bound: f64) {
        self.checks.push(Check { name: name.to_string(), value, relation, bound });
    }

    pub fn at_most(&mut self, name: &str, value: f64, bound: f64) {
        self.check(name, value, Relation::AtMost, bound);
    }

    pub fn at_least(&mut self, name: &str, value: f64, bound: f64) {
        self.check(name, value, Relation::AtLeast, bound);
    }

    pub fn param(&mut self, name: &str, value: f64) {
        self.parameters.insert(name.to_string(), value);
    }

    pub fn info(&mut self, name: &str, value: f64) {
        self.info.insert(name.to_string(), value);
    }

    pub fn passed(&self) -> bool {
        self.errors.is_empty() && !self.checks.is_empty() && self.checks.iter().all(Check::passed)
    }

    pub fn status(&self) -> &'static str {
        if self.passed() {
            "PASS"
        } else {
            "FAIL"
        }
    }

    pub fn worst(&self) -> Option<&Check> {
        self.checks.iter().max_by(|a, b| a.severity().total_cmp(&b.severity()))
    }

    pub fn to_json(&self) -> Value {
        let mut root = Map::new();
        root.insert("scenario".into(), Value::String(self.scenario.as_str().into()));
        root.insert("name".into(), Value::String(self.name.clone()));
        root.insert("seed".into(), Value::Number(self.seed.into()));
        root.insert("rng".into(), Value::String(self.rng.clone()));
        root.insert("status".into(), Value::String(self.status().into()));
        root.insert("parameters".into(), number_map(&self.parameters));
        root.insert("info".into(), number_map(&self.info));
        let checks = self
            .checks
            .iter()
            .map(|c| {
                let mut m = Map::new();
                m.insert("name".into(), Value::String(c.name.clone()));
                m.insert("value".into(), number(c.value));
                m.insert("relation".into(), Value::String(c.relation.as_str().into()));
                m.insert("bound".into(), number(c.bound));
                m.insert("pass".into(), Value::Bool(c.passed()));
                Value::Object(m)
            })
            .collect();
        root.insert("checks".into(), Value::Array(checks));
        root.insert("errors".into(), Value::Array(self.errors.iter().cloned().map(Value::String).collect()));
        Value::Object(root)
    }

    pub fn to_json_string(&self) -> String {
        let mut s = serde_json::to_string_pretty(&self.to_json()).expect("report serializes");
        s.push('\n');
        s
    }

    pub fn from_json(text: &str) -> Result<Self, String> {
        let v: Value = serde_json::from_str(text).map_err(|e| e.to_string())?;
        let field = |k: &str| v.get(k).ok_or_else(|| format!("missing field `{k}`"));
        let text_of = |k: &str| -> Result<String, String> {
            field(k)?.as_str().map(str::to_string).ok_or_else(|| format!("field `{k}` is not a string"))
        };
        let scenario_name = text_of("scenario")?;
        let scenario = Scenario::ALL
            .into_iter()
            .find(|s| s.as_str() == scenario_name)
            .ok_or_else(|| format!("unknown scenario `{scenario_name}`"))?;
        let mut report = Report::new(scenario, text_of("name")?, field("seed")?.as_u64().ok_or("field `seed` is not an integer")?);
        report.rng = text_of("rng")?;
        report.parameters = read_number_map(field("parameters")?)?;
        report.info = read_number_map(field("info")?)?;
        for c in field("checks")?.as_array().ok_or("field `checks` is not an array")? {
            let name = c.get("name").and_then(Value::as_str).ok_or("check without a name")?;
            let relation = c.get("relation").and_then(Value::as_str).and_then(Relation::parse).ok_or("check without a relation")?;
            report.check(name, read_number(c.get("value"))?, relation, read_number(c.get("bound"))?);
        }
        for e in field("errors")?.as_array().ok_or("field `errors` is not an array")? {
            report.errors.push(e.as_str().ok_or("error entry is not a string")?.to_string());
        }
        let stated = text_of("status")?;
        if stated != report.status() {
            return Err(format!("stated status {stated} disagrees with the checks"));
        }
        Ok(report)
    }
}

/// Decimal with 17 significant digits; non-finite values become strings.
pub fn number(x: f64) -> Value {
    if x.is_finite() {
        Value::Number(Number::from_str(&format!("{x:.16e}")).expect("formatted float parses"))
    } else {
        Value::String(format!("{x}"))
    }
}

fn number_map(m: &BTreeMap<String, f64>) -> Value {
    Value::Object(m.iter().map(|(k, &v)| (k.clone(), number(v))).collect())
}

fn read_number(v: Option<&Value>) -> Result<f64, String> {
    match v {
        Some(Value::Number(n)) => n.as_f64().ok_or_else(|| "number out of range".to_string()),
        Some(Value::String(s)) => s.parse::<f64>().map_err(|_| format!("not a number: {s}")),
        _ => Err("missing number".to_string()),
    }
}

fn read_number_map(v: &Value) -> Result<BTreeMap<String, f64>, String> {
    v.as_object()
        .ok_or("expected an object")?
        .iter()
        .map(|(k, x)| Ok((k.clone(), read_number(Some(x))?)))
        .collect()
}

/// Consolidated table, one row per report.
pub fn summarize(reports: &[(String, Report)]) -> String {
    let mut out = String::from("report\tscenario\tstatus\tworst_check\tworst_value\tbound\n");
    for (path, r) in reports {
        let (name, value, bound) = match r.worst() {
            Some(c) => (c.name.as_str(), format!("{:.16e}", c.value), format!("{} {:.16e}", c.relation.as_str(), c.bound)),
            None => ("-", "-".to_string(), "-".to_string()),
        };
        out.push_str(&format!("{path}\t{}\t{}\t{name}\t{value}\t{bound}\n", r.scenario, r.status()));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> Report {
        let mut r = Report::new(Scenario::VerifyTorsion, "t".into(), 7);
        r.at_most("torsion", 1.5e-13, 1e-10);
        r.at_least("order", 2.01, 1.9);
        r.info("nan", f64::NAN);
        r
    }

    #[test]
    fn json_round_trip() {
        let r = sample();
        let text = r.to_json_string();
        assert!(text.contains("1.4999999999999999e-13"));
        let back = Report::from_json(&text).unwrap();
        assert_eq!(back.checks, r.checks);
        assert_eq!(back.status(), "PASS");
        assert!(back.info["nan"].is_nan());
    }

    #[test]
    fn severity_and_status() {
        let mut r = sample();
        assert_eq!(r.worst().unwrap().name, "order");
        r.at_least("order2", 1.0, 1.9);
        assert_eq!(r.status(), "FAIL");
        assert_eq!(r.worst().unwrap().name, "order2");
        assert!(Report::new(Scenario::FlowGh, "x".into(), 0).worst().is_none());
    }

    #[test]
    fn tampered_status_is_rejected() {
        let text = sample().to_json_string().replace("\"PASS\"", "\"FAIL\"");
        assert!(Report::from_json(&text).is_err());
    }
}
