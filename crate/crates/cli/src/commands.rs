//! One function per subcommand. Each returns the structured result, a CSV
//! table and a short text rendering; `main` picks one by `--format`.

use bbg_core::diophantine::{
    discrepancy_report, discrepancy_table, erdos_turan_bound, inv_two_pi_cf, saddle_error_audit,
    three_distance_gaps, wild_enumerate, wild_table, DEFAULT_WILD_DELTA,
};
use bbg_core::export::CsvTable;
use bbg_core::fourier::{contribution_table, harmonic_sum_r, phi_value};
use bbg_core::report::run_battery;
use bbg_core::series::{convergence_trace, decompose_at, partial_sum_s_with, trace_table, SumOptions};
use bbg_core::{Error, HpReal, PrecisionContext, SeriesResult};
use serde_json::{json, Value};

use crate::config::{Format, Settings};

pub const DEFAULT_N: u64 = 1000;
pub const DEFAULT_KMAX: u64 = 4;
pub const DEFAULT_TERMS: u64 = 200;
pub const DEFAULT_WILD_MAX: u64 = 10_000;
pub const DEFAULT_DEPTH: usize = 8;
pub const DEFAULT_S: &str = "2";
pub const DEFAULT_TRACE: [u64; 4] = [1_000, 10_000, 100_000, 1_000_000];

#[derive(Debug)]
pub enum CliError {
    /// Bad flag or config value; exit 2.
    Usage(String),
    Core(Error),
    Io(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Core(Error::Precondition { .. })
            | CliError::Core(Error::IndexBeyondHint { .. })
            | CliError::Core(Error::Precision(_))
            | CliError::Core(Error::Parse(_)) => 2,
            CliError::Core(_) | CliError::Io(_) => 1,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Usage(m) | CliError::Io(m) => f.write_str(m),
            CliError::Core(e) => write!(f, "{e}"),
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        CliError::Core(e)
    }
}

pub struct Output {
    pub result: Value,
    pub table: CsvTable,
    pub text: String,
    /// False when a reported check failed.
    pub passed: bool,
    pub default_format: Format,
}

impl Output {
    fn new(result: Value, table: CsvTable, text: String) -> Self {
        Self {
            result,
            table,
            text,
            passed: true,
            default_format: Format::Text,
        }
    }
}

fn to_value<T: serde::Serialize>(v: &T) -> Value {
    serde_json::to_value(v).expect("results serialize")
}

fn decimal(name: &str, text: &str, ctx: &PrecisionContext) -> Result<HpReal, CliError> {
    HpReal::parse(text, ctx.working_bits()).map_err(|_| CliError::Usage(format!("--{name}: {text:?} is not a decimal number")))
}

fn series_text(label: &str, r: &SeriesResult) -> String {
    let mut text = format!(
        "{label} = {}\nN = {}\nerror estimate = {} ({})\nmethod = {}\nprecision_bits = {}\n",
        r.value,
        r.truncation_n,
        r.error_estimate.to_digits(6),
        match r.error_kind {
            bbg_core::ErrorKind::RigorousTailBound => "rigorous tail bound",
            bbg_core::ErrorKind::HeuristicExtrapolation => "heuristic",
        },
        r.method,
        r.precision_bits
    );
    for (n, v) in &r.checkpoints {
        text.push_str(&format!("  N = {n}: {}\n", v.to_digits(12)));
    }
    text
}

fn checkpoint_table(label: &str, r: &SeriesResult) -> CsvTable {
    let mut table = CsvTable::new(&["N", label]);
    for (n, v) in &r.checkpoints {
        table.push(vec![n.to_string(), v.to_decimal()]);
    }
    table
}

pub fn sum(s: &Settings, ctx: &PrecisionContext) -> Result<Output, CliError> {
    let n = s.n.unwrap_or(DEFAULT_N);
    let alpha = s.alpha.as_deref().map(|a| decimal("alpha", a, ctx)).transpose()?;
    let opts = SumOptions {
        alpha: alpha.map(HpReal::into_float),
        exact: s.exact,
        checkpoints: s.checkpoints.clone(),
    };
    let r = partial_sum_s_with(n, &opts, ctx)?;
    let mut result = to_value(&r);
    result["N"] = json!(n);
    result["S_N"] = to_value(&r.value);
    Ok(Output::new(result, checkpoint_table("S_N", &r), series_text("S_N", &r)))
}

pub fn decompose(s: &Settings, ctx: &PrecisionContext) -> Result<Output, CliError> {
    let n = s.n.unwrap_or(DEFAULT_N);
    let marks = match &s.checkpoints {
        Some(c) => c.clone(),
        None => decades(n),
    };
    let d = decompose_at(n, &marks, ctx)?;
    let mut table = CsvTable::new(&["N", "S_N", "M_N", "R_N"]);
    for cp in &d.checkpoints {
        table.push(vec![cp.n.to_string(), cp.s_n.to_decimal(), cp.m_n.to_decimal(), cp.r_n.to_decimal()]);
    }
    let text = format!(
        "N = {}\nS_N = {}\nM_N = {}\nR_N = {}\ntarget_S = {}\ntarget_R = {}\ngap_S = {}\ngap_R = {}\n",
        d.n, d.s_n, d.m_n, d.r_n, d.target_s, d.target_r, d.gap_s.to_digits(6), d.gap_r.to_digits(6)
    );
    Ok(Output::new(to_value(&d), table, text))
}

fn decades(n: u64) -> Vec<u64> {
    let mut out: Vec<u64> = std::iter::successors(Some(10u64), |p| p.checked_mul(10)).take_while(|&p| p < n).collect();
    out.push(n);
    out
}

pub fn harmonics(s: &Settings, ctx: &PrecisionContext) -> Result<Output, CliError> {
    let report = harmonic_sum_r(s.kmax.unwrap_or(DEFAULT_KMAX), s.terms.unwrap_or(DEFAULT_TERMS), ctx)?;
    let mut text = format!("sum of 2 Re H_k(1), N = {}\n", report.result.truncation_n);
    for c in &report.contributions {
        text.push_str(&format!(
            "  k = {}: {}  running {}\n",
            c.k,
            c.contribution.to_digits(8),
            c.running_total.to_digits(8)
        ));
    }
    text.push_str(&format!("total = {}\n", report.result.value));
    Ok(Output::new(to_value(&report), contribution_table(&report.contributions), text))
}

fn wild_delta(s: &Settings, ctx: &PrecisionContext) -> Result<HpReal, CliError> {
    match &s.delta {
        Some(d) => decimal("delta", d, ctx),
        None => Ok(HpReal::new(ctx.float(DEFAULT_WILD_DELTA))),
    }
}

pub fn wild(s: &Settings, ctx: &PrecisionContext) -> Result<Output, CliError> {
    let delta = wild_delta(s, ctx)?;
    let n_max = s.max.or(s.n).unwrap_or(DEFAULT_WILD_MAX);
    let records = wild_enumerate(&delta, n_max, ctx)?;
    let audit = saddle_error_audit(&delta, n_max, ctx)?;
    let mut text = format!("wild integers n <= {n_max} with sin n > 1 - {delta}: {}\n", records.len());
    for b in &audit.buckets {
        text.push_str(&format!(
            "  eps < {:e}: {} records, max relative saddle error {}\n",
            b.epsilon_below,
            b.count,
            b.max_rel_error.as_ref().map_or("-".into(), |e| e.to_digits(4))
        ));
    }
    let result = json!({ "count": records.len(), "audit": audit, "records": records });
    Ok(Output::new(result, wild_table(&records), text))
}

pub fn cf(s: &Settings, ctx: &PrecisionContext) -> Result<Output, CliError> {
    let cf = inv_two_pi_cf(s.depth.unwrap_or(DEFAULT_DEPTH), ctx)?;
    let mut table = CsvTable::new(&["j", "a_j", "p_j", "q_j"]);
    let mut text = format!("1/(2 pi) = {}\n", cf.notation());
    for (j, (p, q)) in cf.convergents.iter().enumerate() {
        let a = if j == 0 { "0".to_string() } else { cf.partial_quotients[j - 1].to_string() };
        table.push(vec![j.to_string(), a, p.to_string(), q.to_string()]);
        text.push_str(&format!("  {p}/{q}\n"));
    }
    Ok(Output::new(to_value(&cf), table, text))
}

pub fn discrepancy(s: &Settings, ctx: &PrecisionContext) -> Result<Output, CliError> {
    let n = s.n.unwrap_or(DEFAULT_N);
    let report = discrepancy_report(n, ctx)?;
    let bound = erdos_turan_bound(n, n, ctx)?;
    let gaps = if n >= 2 { Some(three_distance_gaps(n, ctx)?) } else { None };
    let text = format!(
        "N = {n}\nD*_N = {}\nN D*_N = {}\nErdos-Turan bound = {} (H = {})\ndistinct gaps = {}\n",
        report.d_star.to_digits(8),
        report.n_times_d_star.to_digits(8),
        bound.optimal_bound.to_digits(8),
        bound.optimal_h,
        gaps.as_ref().map_or("-".into(), |g| g.distinct().to_string())
    );
    let table = discrepancy_table(std::slice::from_ref(&report));
    let result = json!({ "discrepancy": report, "erdos_turan": bound, "gaps": gaps });
    Ok(Output::new(result, table, text))
}

pub fn phi(s: &Settings, ctx: &PrecisionContext) -> Result<Output, CliError> {
    let exponent = decimal("s", s.s.as_deref().unwrap_or(DEFAULT_S), ctx)?;
    let r = phi_value(&exponent, s.terms.or(s.n).unwrap_or(DEFAULT_N), ctx)?;
    Ok(Output::new(to_value(&r), checkpoint_table("Phi_N", &r), series_text("Phi_N(s)", &r)))
}

pub fn report(ctx: &PrecisionContext) -> Result<Output, CliError> {
    let battery = run_battery(ctx);
    let mut table = CsvTable::new(&["criterion", "name", "target", "computed", "tolerance", "pass"]);
    let mut text = String::new();
    for c in &battery.checks {
        table.push(vec![
            c.criterion.to_string(),
            c.name.clone(),
            c.target.clone(),
            c.computed.clone(),
            c.tolerance.clone(),
            c.pass.to_string(),
        ]);
        text.push_str(&format!("[{}] {}: {} (target {})\n", if c.pass { "pass" } else { "FAIL" }, c.name, c.computed, c.target));
    }
    let passed = battery.passed;
    text.push_str(if passed { "all checks pass\n" } else { "some checks fail\n" });
    Ok(Output {
        result: to_value(&battery),
        table,
        text,
        passed,
        default_format: Format::Json,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum PlotKind {
    Trace,
    Harmonics,
    Wild,
    Discrepancy,
}

pub fn plotdata(kind: PlotKind, s: &Settings, ctx: &PrecisionContext) -> Result<Output, CliError> {
    let mut out = match kind {
        PlotKind::Trace => {
            let marks = s.checkpoints.clone().unwrap_or_else(|| DEFAULT_TRACE.to_vec());
            let rows = convergence_trace(&marks, ctx)?;
            Output::new(to_value(&rows), trace_table(&rows), String::new())
        }
        PlotKind::Harmonics => harmonics(s, ctx)?,
        PlotKind::Wild => {
            let delta = wild_delta(s, ctx)?;
            let records = wild_enumerate(&delta, s.max.or(s.n).unwrap_or(DEFAULT_WILD_MAX), ctx)?;
            Output::new(to_value(&records), wild_table(&records), String::new())
        }
        PlotKind::Discrepancy => {
            let marks = s.checkpoints.clone().unwrap_or_else(|| decades(s.n.unwrap_or(DEFAULT_N)));
            let reports = marks
                .iter()
                .map(|&n| discrepancy_report(n, ctx))
                .collect::<Result<Vec<_>, _>>()?;
            Output::new(to_value(&reports), discrepancy_table(&reports), String::new())
        }
    };
    out.default_format = Format::Csv;
    Ok(out)
}
