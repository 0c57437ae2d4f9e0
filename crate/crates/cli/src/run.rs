//! `run`: evaluate a scenario for every scale factor and method.

use std::io::{self, Write};

use colreg_risk::colregs::Rule;
use colreg_risk::estimator::{assess_des, assess_kde_with, KdeOptions, Method, RiskAssessment};
use colreg_risk::Exec;

use crate::config::ScenarioConfig;
use crate::{csv_f64, CliError, CliResult};

/// One table row: a scale factor, a method and its assessment.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ResultRow {
    pub alpha: f64,
    pub assessment: RiskAssessment,
}

impl ResultRow {
    pub fn method(&self) -> Method {
        self.assessment.method
    }

    pub fn p_rule(&self, rule: Rule) -> f64 {
        self.assessment.p_rule.rule(rule)
    }
}

/// Command-line overrides of the config file.
#[derive(Debug, Clone, Default)]
pub struct RunOverrides {
    pub seed: Option<u64>,
    pub samples: Option<usize>,
    pub methods: Option<Vec<Method>>,
}

pub fn run_scenario(cfg: &ScenarioConfig, overrides: &RunOverrides, exec: Exec) -> CliResult<Vec<ResultRow>> {
    let mut cfg = cfg.clone();
    if let Some(n) = overrides.samples {
        cfg.n_samples = n;
    }
    if let Some(s) = overrides.seed {
        cfg.seed = s;
    }
    if let Some(m) = &overrides.methods {
        cfg.methods = m.iter().map(|&m| m.into()).collect();
    }
    cfg.validate()?;
    let methods: Vec<Method> = cfg.methods.iter().map(|&m| m.into()).collect();

    let zone = cfg.zone()?;
    let automaton = cfg.automaton()?;
    let opts = KdeOptions {
        exec,
        ..KdeOptions::default()
    };
    let mut rows = Vec::new();
    for &alpha in &cfg.alpha_list {
        let (own, target) = cfg.perturbers(alpha)?;
        for &m in &methods {
            let assessment = match m {
                Method::Kde => assess_kde_with(&own, &target, &zone, cfg.n_samples, cfg.seed, &opts).map(|(r, _)| r),
                Method::Des => assess_des(&own, &target, &automaton, cfg.n_samples, cfg.seed, exec),
            }
            .map_err(|e| CliError::numeric(&format!("alpha {alpha}, {m}"), e))?;
            rows.push(ResultRow { alpha, assessment });
        }
    }
    Ok(rows)
}

const TABLE_HEADER: [&str; 8] = [
    "alpha",
    "method",
    "P(d_act)",
    "P(R0)",
    "P(R13)",
    "P(R14)",
    "P(R15)",
    "P(give-way)",
];

/// Aligned text table with three decimals.
pub fn write_table<W: Write>(out: &mut W, title: &str, rows: &[ResultRow]) -> io::Result<()> {
    if !title.is_empty() {
        writeln!(out, "{title}")?;
    }
    let cells: Vec<[String; 8]> = rows
        .iter()
        .map(|r| {
            let a = &r.assessment;
            [
                format!("{}", r.alpha),
                a.method.to_string(),
                format!("{:.3}", a.p_risk),
                format!("{:.3}", r.p_rule(Rule::R0)),
                format!("{:.3}", r.p_rule(Rule::R13)),
                format!("{:.3}", r.p_rule(Rule::R14)),
                format!("{:.3}", r.p_rule(Rule::R15)),
                format!("{:.3}", a.p_give_way),
            ]
        })
        .collect();
    let widths: Vec<usize> = (0..8)
        .map(|i| {
            cells
                .iter()
                .map(|c| c[i].len())
                .chain([TABLE_HEADER[i].len()])
                .max()
                .unwrap_or(0)
        })
        .collect();
    let line = |cols: Vec<&str>| -> String {
        cols.iter()
            .zip(&widths)
            .enumerate()
            .map(|(i, (c, w))| if i == 1 { format!("{c:<w$}") } else { format!("{c:>w$}") })
            .collect::<Vec<_>>()
            .join("  ")
    };
    writeln!(out, "{}", line(TABLE_HEADER.to_vec()))?;
    for c in &cells {
        writeln!(out, "{}", line(c.iter().map(String::as_str).collect()))?;
    }
    Ok(())
}

pub const CSV_HEADER: &str =
    "alpha,method,p_risk,p_tcpa_window,p_R0,p_R13,p_R14,p_R15,p_give_way,p_stand_on,n_samples,seed";

/// Full-precision CSV, one line per row.
pub fn write_csv<W: Write>(out: &mut W, rows: &[ResultRow]) -> io::Result<()> {
    writeln!(out, "{CSV_HEADER}")?;
    for r in rows {
        let a = &r.assessment;
        let probs = [
            a.p_risk,
            a.p_tcpa_window,
            r.p_rule(Rule::R0),
            r.p_rule(Rule::R13),
            r.p_rule(Rule::R14),
            r.p_rule(Rule::R15),
            a.p_give_way,
            a.p_stand_on,
        ];
        let probs: Vec<String> = probs.into_iter().map(csv_f64).collect();
        writeln!(
            out,
            "{},{},{},{},{}",
            csv_f64(r.alpha),
            a.method,
            probs.join(","),
            a.n_samples,
            a.seed
        )?;
    }
    Ok(())
}
