//! Report documents. The structured format is JSON with full-precision
//! floats (shortest round-trip), so reparsing recovers the exact numbers;
//! the table format mirrors journal-style coefficient tables with the
//! † / ∗ / ∗∗ significance legend.

use eqsys::inference::TestResult;
use serde::{Deserialize, Serialize};
use std::fmt::Write as _;

#[derive(Debug, Serialize, Deserialize)]
pub struct Report {
    pub command: String,
    pub config: ConfigEcho,
    pub data: DataDigest,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub probit: Option<ProbitReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub biprobit: Option<BiprobitReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sure: Option<SureReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub spec_test: Option<SpecTestReport>,
}

#[derive(Debug, Serialize, Deserialize)]
pub struct ConfigEcho {
    pub input: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub formula1: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub formula2: Option<String>,
    pub no_constant: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
}

#[derive(Debug, Serialize, Deserialize)]
pub struct DataDigest {
    /// "business" (risk features computed) or "generic" numeric CSV.
    pub mode: String,
    pub n_rows_used: usize,
    pub n_rows_skipped: usize,
    pub outcome_means: Vec<f64>,
}

#[derive(Debug, Serialize, Deserialize)]
pub struct CoefficientRow {
    pub name: String,
    pub estimate: f64,
    pub std_error: f64,
    pub t_statistic: f64,
    pub p_value: f64,
    pub marker: String,
}

#[derive(Debug, Serialize, Deserialize)]
pub struct ProbitReport {
    pub outcome: String,
    pub coefficients: Vec<CoefficientRow>,
    pub loglik: f64,
    pub aic: f64,
    pub auc: f64,
    pub converged: bool,
    pub n: usize,
}

#[derive(Debug, Serialize, Deserialize)]
pub struct JointSection {
    pub athrho: f64,
    pub athrho_se: f64,
    pub athrho_marker: String,
    pub rho: f64,
    /// Delta-method standard error, (1 − ρ²)·se(athrho).
    pub rho_se: f64,
}

#[derive(Debug, Serialize, Deserialize)]
pub struct BiprobitReport {
    pub outcome1: String,
    pub outcome2: String,
    pub equation1: Vec<CoefficientRow>,
    pub equation2: Vec<CoefficientRow>,
    pub joint: JointSection,
    pub loglik: f64,
    pub aic: f64,
    pub converged: bool,
    pub boundary_rho: bool,
    pub n: usize,
}

#[derive(Debug, Serialize, Deserialize)]
pub struct BreuschPaganRow {
    pub statistic: f64,
    pub p_value: f64,
    pub marker: String,
}

#[derive(Debug, Serialize, Deserialize)]
pub struct SureReport {
    pub outcome1: String,
    pub outcome2: String,
    pub equation1: Vec<CoefficientRow>,
    pub equation2: Vec<CoefficientRow>,
    pub sigma: [[f64; 2]; 2],
    pub residual_correlation: f64,
    pub breusch_pagan: BreuschPaganRow,
    pub n: usize,
}

#[derive(Debug, Serialize, Deserialize)]
pub struct SpecTestReport {
    pub loglik_joint: f64,
    pub loglik_separate: f64,
    pub loglik_difference: f64,
    pub aic_joint: f64,
    pub aic_separate: f64,
    pub preferred: String,
    pub rho: f64,
    pub converged: bool,
}

pub fn coefficient_row(name: &str, estimate: f64, se: f64, test: &TestResult) -> CoefficientRow {
    CoefficientRow {
        name: name.to_string(),
        estimate,
        std_error: se,
        t_statistic: test.statistic,
        p_value: test.p_value,
        marker: test.marker().to_string(),
    }
}

const LEGEND: &str = "Significance levels:  † : 10%   ∗ : 5%   ∗∗ : 1%";

fn push_table(out: &mut String, title: &str, rows: &[CoefficientRow]) {
    let _ = writeln!(out, "{title}");
    let _ = writeln!(out, "{:<22} {:>12}    {:>12}", "Variable", "Coefficient", "(Std. Err.)");
    for r in rows {
        let _ = writeln!(
            out,
            "{:<22} {:>12.6}{:<3} ({:.6})",
            r.name, r.estimate, r.marker, r.std_error
        );
    }
}

impl Report {
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serialization");
        s.push('\n');
        s
    }

    pub fn to_table(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "command: {}", self.command);
        let _ = writeln!(
            out,
            "input: {} ({} rows used, {} skipped, {} mode)",
            self.config.input, self.data.n_rows_used, self.data.n_rows_skipped, self.data.mode
        );
        let _ = writeln!(out);
        if let Some(p) = &self.probit {
            let _ = writeln!(out, "Dependent variable: {}    AUC = {:.3}", p.outcome, p.auc);
            push_table(&mut out, "", &p.coefficients);
            let _ = writeln!(out);
            let _ = writeln!(
                out,
                "n = {}   log-likelihood = {:.4}   AIC = {:.3}   converged = {}",
                p.n, p.loglik, p.aic, p.converged
            );
        }
        if let Some(b) = &self.biprobit {
            push_table(
                &mut out,
                &format!("Equation 1: {}", b.outcome1),
                &b.equation1,
            );
            let _ = writeln!(out);
            push_table(
                &mut out,
                &format!("Equation 2: {}", b.outcome2),
                &b.equation2,
            );
            let _ = writeln!(out);
            let _ = writeln!(out, "Joint:");
            let _ = writeln!(
                out,
                "{:<22} {:>12.6}{:<3} ({:.6})",
                "athrho", b.joint.athrho, b.joint.athrho_marker, b.joint.athrho_se
            );
            let _ = writeln!(
                out,
                "{:<22} {:>12.6}    ({:.6})",
                "rho", b.joint.rho, b.joint.rho_se
            );
            let _ = writeln!(out);
            let _ = writeln!(
                out,
                "n = {}   log-likelihood = {:.4}   AIC = {:.3}   converged = {}",
                b.n, b.loglik, b.aic, b.converged
            );
            if b.boundary_rho {
                let _ = writeln!(out, "warning: correlation estimate sits on the boundary");
            }
        }
        if let Some(s) = &self.sure {
            push_table(
                &mut out,
                &format!("Equation 1 (FGLS): {}", s.outcome1),
                &s.equation1,
            );
            let _ = writeln!(out);
            push_table(
                &mut out,
                &format!("Equation 2 (FGLS): {}", s.outcome2),
                &s.equation2,
            );
            let _ = writeln!(out);
            let _ = writeln!(
                out,
                "residual covariance: [[{:.6}, {:.6}], [{:.6}, {:.6}]]",
                s.sigma[0][0], s.sigma[0][1], s.sigma[1][0], s.sigma[1][1]
            );
            let _ = writeln!(out, "Breusch-Pagan test of independence:");
            let _ = writeln!(
                out,
                "{:<22} {:>12.6}{:<3} (statistic {:.4}, p = {:.6})",
                "Correlation",
                s.residual_correlation,
                s.breusch_pagan.marker,
                s.breusch_pagan.statistic,
                s.breusch_pagan.p_value
            );
            let _ = writeln!(out, "n = {}", s.n);
        }
        if let Some(t) = &self.spec_test {
            let _ = writeln!(out, "{:<28} {:>8}  {:>12}", "Model", "params", "AIC");
            let _ = writeln!(
                out,
                "{:<28} {:>8}  {:>12.4}",
                "separate (two probits)", "", t.aic_separate
            );
            let _ = writeln!(
                out,
                "{:<28} {:>8}  {:>12.4}",
                "joint (bivariate probit)", "", t.aic_joint
            );
            let _ = writeln!(out);
            let _ = writeln!(
                out,
                "log-likelihood difference = {:.6} (joint preferred when > 1.0)",
                t.loglik_difference
            );
            let _ = writeln!(out, "preferred: {}", t.preferred);
            let _ = writeln!(out, "rho = {:.6}   converged = {}", t.rho, t.converged);
        }
        let _ = writeln!(out);
        let _ = writeln!(out, "{LEGEND}");
        out
    }
}
