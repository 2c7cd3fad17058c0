use std::collections::BTreeMap;

use serde::Serialize;

/// Outcome of one exhaustive verification sweep.
///
/// The census partitions the examined population: every examined object
/// increments exactly one census bucket, so the bucket counts always sum
/// to `population`. A report passes iff `violations` is empty.
///
/// `wall_ms` is measured but optional in the serialized form; the CLI
/// strips it by default so report output is byte-identical across runs
/// and worker counts.
#[derive(Debug, Clone, Serialize)]
pub struct VerificationReport {
    pub schema: u32,
    pub theorem_id: String,
    pub params: BTreeMap<String, String>,
    pub population: u64,
    pub census: BTreeMap<String, u64>,
    pub violations: Vec<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub wall_ms: Option<u64>,
    pub pass: bool,
}

pub const SCHEMA_VERSION: u32 = 1;

impl VerificationReport {
    pub fn new(
        theorem_id: &str,
        params: &[(&str, String)],
        population: u64,
        census: BTreeMap<String, u64>,
        mut violations: Vec<String>,
        wall_ms: u64,
    ) -> Self {
        violations.sort();
        let pass = violations.is_empty();
        VerificationReport {
            schema: SCHEMA_VERSION,
            theorem_id: theorem_id.to_string(),
            params: params.iter().map(|(k, v)| (k.to_string(), v.clone())).collect(),
            population,
            census,
            violations,
            wall_ms: Some(wall_ms),
            pass,
        }
    }

    pub fn census_count(&self, key: &str) -> u64 {
        self.census.get(key).copied().unwrap_or(0)
    }

    /// Serialized form with timing removed, for deterministic output.
    pub fn without_timing(&self) -> Self {
        let mut r = self.clone();
        r.wall_ms = None;
        r
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("report serialization cannot fail")
    }

    /// Human summary derived from the JSON content.
    pub fn to_text(&self) -> String {
        let params: Vec<String> = self.params.iter().map(|(k, v)| format!("{k}={v}")).collect();
        let census: Vec<String> = self.census.iter().map(|(k, v)| format!("{k}={v}")).collect();
        format!(
            "{} [{}] population={} census[{}] violations={} => {}",
            self.theorem_id,
            params.join(" "),
            self.population,
            census.join(" "),
            self.violations.len(),
            if self.pass { "PASS" } else { "FAIL" }
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn census_sums_and_pass_flag() {
        let mut census = BTreeMap::new();
        census.insert("ok".to_string(), 3);
        let r = VerificationReport::new("t", &[("n", "2".into())], 3, census, vec![], 5);
        assert!(r.pass);
        assert_eq!(r.census_count("ok"), 3);
        assert_eq!(r.census_count("missing"), 0);
        let bad = VerificationReport::new("t", &[], 1, BTreeMap::new(), vec!["x".into()], 0);
        assert!(!bad.pass);
    }

    #[test]
    fn timing_stripped_form_is_deterministic() {
        let r = VerificationReport::new("t", &[], 0, BTreeMap::new(), vec![], 7);
        let s = r.without_timing().to_json();
        assert!(!s.contains("wall_ms"));
        assert!(r.to_json().contains("wall_ms"));
    }
}
