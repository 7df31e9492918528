use std::io::Write;
use std::path::Path;
use std::time::{SystemTime, UNIX_EPOCH};

use serde::Serialize;

use sphere_spd::certify::{Certificate, Verdict};
use sphere_spd::gram::WitnessReport;

use crate::spec::SpecFile;

/// Verdicts of every product-space procedure on one support.
#[derive(Debug, Clone, Serialize)]
pub struct CrossCheck {
    pub parity_tails: Verdict,
    pub gamma_loop: Verdict,
    pub circle_outer: Verdict,
    pub sphere_outer: Verdict,
    /// Characterizations agree and no sufficient test contradicts them.
    pub coherent: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct Report {
    pub command: &'static str,
    pub spec: SpecFile,
    #[serde(flatten)]
    pub certificate: Option<Certificate>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<WitnessReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub lambda_min: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub is_pd: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub points: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub value: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub crosscheck: Option<CrossCheck>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub timestamp: Option<u64>,
}

impl Report {
    pub fn new(command: &'static str, spec: SpecFile) -> Self {
        Report {
            command,
            spec,
            certificate: None,
            witness: None,
            lambda_min: None,
            is_pd: None,
            points: None,
            value: None,
            crosscheck: None,
            note: None,
            timestamp: None,
        }
    }

    pub fn stamp(&mut self) {
        self.timestamp = Some(SystemTime::now().duration_since(UNIX_EPOCH).map_or(0, |d| d.as_secs()));
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes") + "\n"
    }

    /// One-line human summary.
    pub fn summary(&self) -> String {
        let mut parts = vec![format!("{}: {}", self.command, self.spec.space)];
        if let Some(c) = &self.certificate {
            parts.push(format!("verdict {} via {:?}", c.verdict, c.method));
        }
        if let Some(v) = self.value {
            parts.push(format!("value {v}"));
        }
        if let Some(l) = self.lambda_min {
            parts.push(format!("lambda_min {l:e}"));
        }
        if let Some(w) = &self.witness {
            parts.push(format!("{:?} witness, residual {:e} (scale {:e})", w.kind, w.residual, w.scale));
        }
        if let Some(n) = &self.note {
            parts.push(n.clone());
        }
        parts.join("; ")
    }
}

/// `(n, λ_min)` rows as CSV.
pub fn write_curve_csv(path: &Path, curve: &[(usize, f64)]) -> std::io::Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    w.write_record(["n", "lambda_min"])?;
    for (n, lambda) in curve {
        w.write_record([n.to_string(), format!("{lambda:e}")])?;
    }
    w.flush()
}

pub fn write_text(path: &Path, text: &str) -> std::io::Result<()> {
    let mut f = std::fs::File::create(path)?;
    f.write_all(text.as_bytes())
}
