use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

/// Which side of an inequality is expected to be larger.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Direction {
    /// lhs >= rhs; slack = lhs - rhs.
    LhsGeRhs,
    /// lhs <= rhs; slack = rhs - lhs.
    LhsLeRhs,
    /// lhs == rhs; slack = -|lhs - rhs|.
    Equal,
}

/// Outcome of evaluating one inequality (values in nats).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoundReport {
    pub name: String,
    #[serde(serialize_with = "ser_real", deserialize_with = "de_real")]
    pub lhs: f64,
    #[serde(serialize_with = "ser_real", deserialize_with = "de_real")]
    pub rhs: f64,
    #[serde(serialize_with = "ser_real", deserialize_with = "de_real")]
    pub slack: f64,
    pub holds: bool,
    pub direction: Direction,
    /// The bound says nothing for this input (e.g. a vanishing argument of a log).
    #[serde(default)]
    pub vacuous: bool,
    #[serde(default)]
    pub context: BTreeMap<String, String>,
}

impl BoundReport {
    pub fn new(name: impl Into<String>, lhs: f64, rhs: f64, direction: Direction, tol: f64) -> Self {
        let slack = match direction {
            Direction::LhsGeRhs => lhs - rhs,
            Direction::LhsLeRhs => rhs - lhs,
            Direction::Equal => -(lhs - rhs).abs(),
        };
        let holds = if direction == Direction::Equal {
            -slack <= tol
        } else {
            slack >= -tol
        };
        BoundReport {
            name: name.into(),
            lhs,
            rhs,
            slack,
            holds,
            direction,
            vacuous: false,
            context: BTreeMap::new(),
        }
    }

    pub fn vacuous(name: impl Into<String>, lhs: f64, direction: Direction) -> Self {
        BoundReport {
            name: name.into(),
            lhs,
            rhs: f64::NAN,
            slack: f64::NAN,
            holds: true,
            direction,
            vacuous: true,
            context: BTreeMap::new(),
        }
    }

    pub fn with(mut self, key: &str, value: impl ToString) -> Self {
        self.context.insert(key.to_string(), value.to_string());
        self
    }

    /// |slack| within `tol`: the inequality is saturated.
    pub fn is_tight(&self, tol: f64) -> bool {
        self.slack.abs() <= tol
    }

    /// One JSON object, reals printed with 17 significant digits.
    pub fn to_json(&self) -> String {
        let mut s = String::from("{");
        let _ = write!(s, "\"name\":{}", json_str(&self.name));
        let _ = write!(s, ",\"lhs\":{}", fmt_real(self.lhs));
        let _ = write!(s, ",\"rhs\":{}", fmt_real(self.rhs));
        let _ = write!(s, ",\"slack\":{}", fmt_real(self.slack));
        let _ = write!(s, ",\"holds\":{}", self.holds);
        let _ = write!(
            s,
            ",\"direction\":{}",
            serde_json::to_string(&self.direction).expect("enum serializes")
        );
        let _ = write!(s, ",\"vacuous\":{}", self.vacuous);
        s.push_str(",\"context\":{");
        for (i, (k, v)) in self.context.iter().enumerate() {
            if i > 0 {
                s.push(',');
            }
            let _ = write!(s, "{}:{}", json_str(k), json_str(v));
        }
        s.push_str("}}");
        s
    }
}

fn json_str(s: &str) -> String {
    serde_json::to_string(s).expect("strings serialize")
}

/// 17 significant digits; non-finite values become `null`.
pub(crate) fn fmt_real(x: f64) -> String {
    if x.is_finite() {
        format!("{x:.16e}")
    } else {
        "null".to_string()
    }
}

fn ser_real<S: Serializer>(x: &f64, s: S) -> Result<S::Ok, S::Error> {
    if x.is_finite() {
        s.serialize_f64(*x)
    } else {
        s.serialize_none()
    }
}

fn de_real<'de, D: Deserializer<'de>>(d: D) -> Result<f64, D::Error> {
    Ok(Option::<f64>::deserialize(d)?.unwrap_or(f64::NAN))
}
