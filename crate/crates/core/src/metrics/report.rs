use serde::Serialize;

/// Outcome of checking an inequality `lhs <= rhs` (or an equality, when
/// built with [`CheckReport::eq`]).
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CheckReport {
    pub claim: String,
    pub lhs: f64,
    pub rhs: f64,
    pub holds: bool,
    pub tolerance: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

impl CheckReport {
    /// `lhs <= rhs + tolerance`.
    pub fn le(claim: impl Into<String>, lhs: f64, rhs: f64, tolerance: f64) -> Self {
        CheckReport {
            claim: claim.into(),
            lhs,
            rhs,
            holds: lhs <= rhs + tolerance,
            tolerance,
            note: None,
        }
    }

    /// `|lhs - rhs| <= tolerance`.
    pub fn eq(claim: impl Into<String>, lhs: f64, rhs: f64, tolerance: f64) -> Self {
        CheckReport {
            claim: claim.into(),
            lhs,
            rhs,
            holds: (lhs - rhs).abs() <= tolerance,
            tolerance,
            note: None,
        }
    }

    /// A pass/fail condition with no natural numeric sides.
    pub fn boolean(claim: impl Into<String>, holds: bool) -> Self {
        CheckReport {
            claim: claim.into(),
            lhs: holds as u8 as f64,
            rhs: 1.0,
            holds,
            tolerance: 0.0,
            note: None,
        }
    }

    pub fn with_note(mut self, note: impl Into<String>) -> Self {
        self.note = Some(note.into());
        self
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("report serialization is infallible")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn json_fields() {
        let r = CheckReport::le("a <= b", 1.0, 2.0, 1e-9);
        let v: serde_json::Value = serde_json::from_str(&r.to_json()).unwrap();
        for key in ["claim", "lhs", "rhs", "holds", "tolerance"] {
            assert!(v.get(key).is_some(), "{key}");
        }
        assert!(v.get("note").is_none());
        assert!(!CheckReport::eq("x", 1.0, 1.1, 0.01).holds);
    }
}
