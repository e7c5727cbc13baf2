//! Command execution: input loading, estimation, report assembly.

use crate::report::*;
use crate::{Cli, Command, FitArgs, OutputFormat, SimKind, SimLaw, SimulateArgs};
use eqsys::datamodel::{
    build_design, compute_risk_features_opts, load_csv, sample_controls, write_records_csv,
    CsvSchema, Equation, Formula, Frame,
};
use eqsys::estimators::{
    fit_biprobit, fit_probit, fit_sure, predict_probit, BivariateProbitFit, ProbitFit, SureFit,
};
use eqsys::inference::{auc, breusch_pagan, spec_test, std_errors, t_test};
use eqsys::synthetic::{gen_biprobit, gen_sure, GeneratorSpec, RegressorLaw};
use std::fmt;
use std::path::{Path, PathBuf};

pub enum CliError {
    Config(String),
    Core(eqsys::Error),
    Io(std::io::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 2,
            CliError::Core(eqsys::Error::Formula(_)) => 2,
            CliError::Core(eqsys::Error::Io(_)) => 5,
            CliError::Core(_) => 3,
            CliError::Io(_) => 5,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Config(msg) => write!(f, "configuration: {msg}"),
            CliError::Core(err) => write!(f, "{err}"),
            CliError::Io(err) => write!(f, "io: {err}"),
        }
    }
}

impl From<eqsys::Error> for CliError {
    fn from(err: eqsys::Error) -> Self {
        CliError::Core(err)
    }
}

impl From<std::io::Error> for CliError {
    fn from(err: std::io::Error) -> Self {
        CliError::Io(err)
    }
}

const EXIT_OK: i32 = 0;
const EXIT_NONCONVERGENCE: i32 = 4;

pub fn execute(cli: Cli) -> Result<i32, CliError> {
    match cli.command {
        Command::FitProbit(args) => fit_probit_cmd(args),
        Command::FitBiprobit(args) => fit_biprobit_cmd(args),
        Command::FitSure(args) => fit_sure_cmd(args),
        Command::SpecTest(args) => spec_test_cmd(args),
        Command::Features {
            input,
            leave_one_out,
            out,
        } => features_cmd(&input, leave_one_out, out.as_deref()),
        Command::Sample {
            input,
            sample_n,
            window_start,
            seed,
            out,
        } => sample_cmd(&input, sample_n, window_start, seed, &out),
        Command::Simulate(args) => simulate_cmd(args),
    }
}

struct LoadedInput {
    frame: Frame,
    mode: &'static str,
    skipped: usize,
}

fn is_business_csv(path: &Path) -> Result<bool, CliError> {
    let mut reader = csv::ReaderBuilder::new()
        .from_path(path)
        .map_err(|e| CliError::Core(eqsys::Error::Csv {
            line: 0,
            message: e.to_string(),
        }))?;
    let headers = reader
        .headers()
        .map_err(|e| CliError::Core(eqsys::Error::Csv {
            line: 1,
            message: e.to_string(),
        }))?;
    let schema = CsvSchema::default();
    let required = [
        schema.id.as_str(),
        schema.category.as_str(),
        schema.zip.as_str(),
        schema.price.as_str(),
        schema.rating.as_str(),
        schema.n_reviews.as_str(),
        schema.is_closed.as_str(),
        schema.is_groupon.as_str(),
        schema.last_review_date.as_str(),
    ];
    Ok(required
        .iter()
        .all(|col| headers.iter().any(|h| h == *col)))
}

fn load_input(path: &Path) -> Result<LoadedInput, CliError> {
    if is_business_csv(path)? {
        let (records, report) = load_csv(path, &CsvSchema::default())?;
        if records.is_empty() {
            return Err(CliError::Core(eqsys::Error::InvalidParameter(
                "no valid business records in input".into(),
            )));
        }
        let features = compute_risk_features_opts(&records, false);
        let frame = Frame::from_records(&records, &features)?;
        Ok(LoadedInput {
            frame,
            mode: "business",
            skipped: report.skip_count(),
        })
    } else {
        Ok(LoadedInput {
            frame: Frame::read_csv(path)?,
            mode: "generic",
            skipped: 0,
        })
    }
}

fn parse_formula(raw: &str, no_constant: bool) -> Result<Formula, CliError> {
    let formula = Formula::parse(raw)?;
    Ok(if no_constant {
        formula.without_intercept()
    } else {
        formula
    })
}

fn second_formula(args: &FitArgs) -> Result<&str, CliError> {
    args.formula2.as_deref().ok_or_else(|| {
        CliError::Config("this command requires both --formula1 and --formula2".into())
    })
}

fn config_echo(args: &FitArgs) -> ConfigEcho {
    ConfigEcho {
        input: args.input.display().to_string(),
        formula1: Some(args.formula1.clone()),
        formula2: args.formula2.clone(),
        no_constant: args.no_constant,
        seed: None,
    }
}

fn digest(input: &LoadedInput, outcomes: &[&Equation]) -> DataDigest {
    DataDigest {
        mode: input.mode.to_string(),
        n_rows_used: input.frame.len(),
        n_rows_skipped: input.skipped,
        outcome_means: outcomes.iter().map(|e| e.outcome.mean()).collect(),
    }
}

fn coefficient_rows(
    names: &[String],
    estimates: &eqsys::nalgebra::DVector<f64>,
    cov: &eqsys::nalgebra::DMatrix<f64>,
) -> Result<Vec<CoefficientRow>, CliError> {
    let ses = std_errors(cov)?;
    names
        .iter()
        .zip(estimates.iter().zip(ses.iter()))
        .map(|(name, (&est, &se))| {
            // Non-converged fits carry NaN covariance; keep the report
            // writable with blank test columns.
            if se.is_finite() && se > 0.0 {
                let test = t_test(est, se)?;
                Ok(coefficient_row(name, est, se, &test))
            } else {
                Ok(CoefficientRow {
                    name: name.clone(),
                    estimate: est,
                    std_error: se,
                    t_statistic: f64::NAN,
                    p_value: f64::NAN,
                    marker: String::new(),
                })
            }
        })
        .collect()
}

fn probit_report(eq: &Equation, fit: &ProbitFit) -> Result<ProbitReport, CliError> {
    let scores = predict_probit(fit, &eq.x)?;
    let auc_value = auc(scores.as_slice(), eq.outcome.as_slice())?;
    Ok(ProbitReport {
        outcome: eq.outcome_name.clone(),
        coefficients: coefficient_rows(&eq.regressor_names, &fit.beta, &fit.cov_beta)?,
        loglik: fit.loglik,
        aic: fit.aic,
        auc: auc_value,
        converged: fit.converged,
        n: fit.n,
    })
}

fn biprobit_report(
    eq1: &Equation,
    eq2: &Equation,
    fit: &BivariateProbitFit,
) -> Result<BiprobitReport, CliError> {
    let k1 = fit.k1;
    let k2 = fit.k2;
    let cov1 = fit.cov_params.view((0, 0), (k1, k1)).into_owned();
    let cov2 = fit.cov_params.view((k1, k1), (k2, k2)).into_owned();
    let athrho_se = fit.se_athrho().unwrap_or(f64::NAN);
    let athrho_marker = if athrho_se.is_finite() && athrho_se > 0.0 {
        t_test(fit.athrho, athrho_se)?.marker().to_string()
    } else {
        String::new()
    };
    Ok(BiprobitReport {
        outcome1: eq1.outcome_name.clone(),
        outcome2: eq2.outcome_name.clone(),
        equation1: coefficient_rows(&eq1.regressor_names, &fit.beta1, &cov1)?,
        equation2: coefficient_rows(&eq2.regressor_names, &fit.beta2, &cov2)?,
        joint: JointSection {
            athrho: fit.athrho,
            athrho_se,
            athrho_marker,
            rho: fit.rho,
            rho_se: fit.se_rho().unwrap_or(f64::NAN),
        },
        loglik: fit.loglik,
        aic: fit.aic,
        converged: fit.converged,
        boundary_rho: fit.boundary_rho,
        n: fit.n,
    })
}

fn sure_report(eq1: &Equation, eq2: &Equation, fit: &SureFit) -> Result<SureReport, CliError> {
    let k1 = fit.beta1.len();
    let k2 = fit.beta2.len();
    let cov1 = fit.cov_beta.view((0, 0), (k1, k1)).into_owned();
    let cov2 = fit.cov_beta.view((k1, k1), (k2, k2)).into_owned();
    let bp = breusch_pagan(fit)?;
    Ok(SureReport {
        outcome1: eq1.outcome_name.clone(),
        outcome2: eq2.outcome_name.clone(),
        equation1: coefficient_rows(&eq1.regressor_names, &fit.beta1, &cov1)?,
        equation2: coefficient_rows(&eq2.regressor_names, &fit.beta2, &cov2)?,
        sigma: fit.sigma,
        residual_correlation: fit.resid_corr,
        breusch_pagan: BreuschPaganRow {
            statistic: bp.statistic,
            p_value: bp.p_value,
            marker: bp.marker().to_string(),
        },
        n: fit.n,
    })
}

fn write_report(report: &Report, format: OutputFormat, out: Option<&Path>) -> Result<(), CliError> {
    let rendered = match format {
        OutputFormat::Structured => report.to_json(),
        OutputFormat::Table => report.to_table(),
    };
    match out {
        Some(path) => std::fs::write(path, rendered)?,
        None => print!("{rendered}"),
    }
    Ok(())
}

fn fit_probit_cmd(args: FitArgs) -> Result<i32, CliError> {
    if args.formula2.is_some() {
        return Err(CliError::Config(
            "fit-probit takes exactly one formula; use fit-biprobit for joint models".into(),
        ));
    }
    let input = load_input(&args.input)?;
    let formula = parse_formula(&args.formula1, args.no_constant)?;
    let eq = build_design(&input.frame, &formula)?;
    let fit = fit_probit(&eq.x, &eq.outcome, &Default::default())?;
    let report = Report {
        command: "fit-probit".into(),
        config: config_echo(&args),
        data: digest(&input, &[&eq]),
        probit: Some(probit_report(&eq, &fit)?),
        biprobit: None,
        sure: None,
        spec_test: None,
    };
    write_report(&report, args.format, args.out.as_deref())?;
    Ok(if fit.converged {
        EXIT_OK
    } else {
        EXIT_NONCONVERGENCE
    })
}

fn fit_biprobit_cmd(args: FitArgs) -> Result<i32, CliError> {
    let input = load_input(&args.input)?;
    let f1 = parse_formula(&args.formula1, args.no_constant)?;
    let f2 = parse_formula(second_formula(&args)?, args.no_constant)?;
    let eq1 = build_design(&input.frame, &f1)?;
    let eq2 = build_design(&input.frame, &f2)?;
    let fit = fit_biprobit(
        &eq1.x,
        &eq1.outcome,
        &eq2.x,
        &eq2.outcome,
        &Default::default(),
    )?;
    let report = Report {
        command: "fit-biprobit".into(),
        config: config_echo(&args),
        data: digest(&input, &[&eq1, &eq2]),
        probit: None,
        biprobit: Some(biprobit_report(&eq1, &eq2, &fit)?),
        sure: None,
        spec_test: None,
    };
    write_report(&report, args.format, args.out.as_deref())?;
    Ok(if fit.converged {
        EXIT_OK
    } else {
        EXIT_NONCONVERGENCE
    })
}

fn fit_sure_cmd(args: FitArgs) -> Result<i32, CliError> {
    let input = load_input(&args.input)?;
    let f1 = parse_formula(&args.formula1, args.no_constant)?;
    let f2 = parse_formula(second_formula(&args)?, args.no_constant)?;
    let eq1 = build_design(&input.frame, &f1)?;
    let eq2 = build_design(&input.frame, &f2)?;
    let fit = fit_sure(&eq1.x, &eq1.outcome, &eq2.x, &eq2.outcome)?;
    let report = Report {
        command: "fit-sure".into(),
        config: config_echo(&args),
        data: digest(&input, &[&eq1, &eq2]),
        probit: None,
        biprobit: None,
        sure: Some(sure_report(&eq1, &eq2, &fit)?),
        spec_test: None,
    };
    write_report(&report, args.format, args.out.as_deref())?;
    Ok(EXIT_OK)
}

fn spec_test_cmd(args: FitArgs) -> Result<i32, CliError> {
    let input = load_input(&args.input)?;
    let f1 = parse_formula(&args.formula1, args.no_constant)?;
    let f2 = parse_formula(second_formula(&args)?, args.no_constant)?;
    let eq1 = build_design(&input.frame, &f1)?;
    let eq2 = build_design(&input.frame, &f2)?;
    let config = Default::default();
    let fit1 = fit_probit(&eq1.x, &eq1.outcome, &config)?;
    let fit2 = fit_probit(&eq2.x, &eq2.outcome, &config)?;
    let joint = fit_biprobit(&eq1.x, &eq1.outcome, &eq2.x, &eq2.outcome, &config)?;
    let result = spec_test(&joint, &fit1, &fit2)?;
    let converged = fit1.converged && fit2.converged && joint.converged;
    let report = Report {
        command: "spec-test".into(),
        config: config_echo(&args),
        data: digest(&input, &[&eq1, &eq2]),
        probit: None,
        biprobit: None,
        sure: None,
        spec_test: Some(SpecTestReport {
            loglik_joint: joint.loglik,
            loglik_separate: fit1.loglik + fit2.loglik,
            loglik_difference: result.loglik_difference,
            aic_joint: result.aic_joint,
            aic_separate: result.aic_separate,
            preferred: result.preferred.to_string(),
            rho: joint.rho,
            converged,
        }),
    };
    write_report(&report, args.format, args.out.as_deref())?;
    Ok(if converged {
        EXIT_OK
    } else {
        EXIT_NONCONVERGENCE
    })
}

fn features_cmd(input: &Path, leave_one_out: bool, out: Option<&Path>) -> Result<i32, CliError> {
    if !is_business_csv(input)? {
        return Err(CliError::Core(eqsys::Error::InvalidParameter(
            "features requires a business-record CSV with the canonical header".into(),
        )));
    }
    let (records, _report) = load_csv(input, &CsvSchema::default())?;
    let features = compute_risk_features_opts(&records, leave_one_out);
    let mut rendered = String::from("id,fzrisk,fprisk,gzrisk,gprisk\n");
    for r in &records {
        let f = features[&r.id];
        rendered.push_str(&format!(
            "{},{},{},{},{}\n",
            r.id, f.fzrisk, f.fprisk, f.gzrisk, f.gprisk
        ));
    }
    match out {
        Some(path) => std::fs::write(path, rendered)?,
        None => print!("{rendered}"),
    }
    Ok(EXIT_OK)
}

fn sample_cmd(
    input: &Path,
    sample_n: usize,
    window_start: chrono::NaiveDate,
    seed: u64,
    out: &Path,
) -> Result<i32, CliError> {
    let (records, _report) = load_csv(input, &CsvSchema::default())?;
    let sampled = sample_controls(&records, sample_n, window_start, seed)?;
    write_records_csv(out, &sampled)?;
    Ok(EXIT_OK)
}

fn parse_beta(raw: &str, name: &str) -> Result<Vec<f64>, CliError> {
    raw.split(',')
        .map(|tok| {
            tok.trim()
                .parse::<f64>()
                .map_err(|_| CliError::Config(format!("{name}: bad number `{tok}`")))
        })
        .collect()
}

fn simulate_cmd(args: SimulateArgs) -> Result<i32, CliError> {
    let beta1 = parse_beta(&args.beta1, "--beta1")?;
    let beta2 = parse_beta(&args.beta2, "--beta2")?;
    let mut spec = GeneratorSpec::new(args.n, beta1, beta2, args.rho, args.seed);
    spec.sigma1 = args.sigma1;
    spec.sigma2 = args.sigma2;
    spec.intercept = !args.no_intercept;
    spec.regressor_law = match args.law {
        SimLaw::Normal => RegressorLaw::StandardNormal,
        SimLaw::Uniform => RegressorLaw::Uniform01,
    };
    let (dataset, truth) = match args.kind {
        SimKind::Biprobit => gen_biprobit(&spec)?,
        SimKind::Sure => gen_sure(&spec)?,
    };

    // Export outcome and non-intercept regressor columns; the intercept is
    // reconstructed by the fitting formula.
    let mut frame = Frame::new();
    for i in 0..dataset.n_equations() {
        let eq = dataset.equation(i);
        frame.push(eq.outcome_name.clone(), eq.outcome.as_slice().to_vec())?;
        for (j, name) in eq.regressor_names.iter().enumerate() {
            if name == "intercept" {
                continue;
            }
            frame.push(name.clone(), eq.x.column(j).iter().copied().collect())?;
        }
    }
    frame.write_csv(&args.out)?;

    let truth_path = sidecar_path(&args.out);
    let mut truth_json =
        serde_json::to_string_pretty(&truth).map_err(|e| CliError::Config(e.to_string()))?;
    truth_json.push('\n');
    std::fs::write(&truth_path, truth_json)?;
    eprintln!(
        "wrote {} rows to {} (truth: {})",
        args.n,
        args.out.display(),
        truth_path.display()
    );
    Ok(EXIT_OK)
}

fn sidecar_path(out: &Path) -> PathBuf {
    let mut name = out.file_name().map_or_else(
        || std::ffi::OsString::from("dataset"),
        |n| n.to_os_string(),
    );
    name.push(".truth.json");
    out.with_file_name(name)
}
