//! Scenario execution. Scenarios run in parallel; each writes its own CSV and
//! the summary is assembled in config order.

use std::fs;
use std::path::Path;

use rayon::prelude::*;

use crate::error::{LabError, Result};
use crate::multiplier::{
    h_bound, inclusion_chain_probe, membership_with, multiplier_probe, MembershipReport,
    OperatorSeriesSpec, Space,
};
use crate::orlicz_pettis::{antosik_matrix, weak_strong_gap};
use crate::space::{sample_functionals, Functional};
use crate::summability::ConvergenceVerdict;
use crate::summing::{
    continuity_witness, summing_apply, summing_norm_estimate, tail_decay_profile,
};

use super::config::{Analysis, ScenarioConfig};
use super::report::{render_csv, AnalysisError, ReportRow, RunSummary, ScenarioSummary};

struct Ctx<'a> {
    cfg: &'a ScenarioConfig,
    series: OperatorSeriesSpec,
    functionals: Vec<Functional>,
    rows: Vec<ReportRow>,
}

impl Ctx<'_> {
    fn row(
        &mut self,
        analysis: Analysis,
        metric: impl Into<String>,
        verdict: impl Into<String>,
        limit_norm: Option<f64>,
        residual: Option<f64>,
        depth: usize,
    ) {
        self.rows.push(ReportRow {
            scenario: self.cfg.name.clone(),
            analysis: analysis.as_str().into(),
            metric: metric.into(),
            verdict: verdict.into(),
            limit_norm,
            residual,
            depth,
            seed: self.cfg.seed,
        });
    }

    fn verdict_row(&mut self, analysis: Analysis, metric: &str, v: &ConvergenceVerdict) {
        let norm = v.limit.as_ref().map(|l| l.norm(self.series.y_norm));
        self.row(
            analysis,
            metric,
            v.kind.as_str(),
            norm,
            Some(v.residual),
            v.depth_used,
        );
    }

    fn membership(&mut self) -> Result<MembershipReport> {
        let c = self.cfg;
        membership_with(
            &self.series,
            &c.multiplier,
            &c.weights,
            &c.schedule,
            &self.functionals,
        )
    }

    fn run(&mut self, a: Analysis) -> Result<()> {
        let c = self.cfg;
        let depth = c.schedule.final_depth();
        match a {
            Analysis::Membership => {
                let m = self.membership()?;
                for (space, v) in m.iter() {
                    self.verdict_row(a, space.label(), v);
                }
            }
            Analysis::HBound => {
                let h = h_bound(&self.series, depth, c.trials, c.seed)?;
                let kind = if h.exact { "exact" } else { "lower_bound" };
                self.row(a, "H", kind, Some(h.estimate), None, depth);
                if let Some(u) = h.upper {
                    self.row(a, "H_upper", "upper_bound", Some(u), None, depth);
                }
            }
            Analysis::Summing => {
                match summing_apply(&self.series, &c.multiplier, &c.weights, &c.schedule) {
                    Ok(s) => {
                        let n = s.value.norm(self.series.y_norm);
                        self.row(
                            a,
                            "S",
                            s.kind.as_str(),
                            Some(n),
                            Some(s.residual),
                            s.depth_used,
                        );
                        let w = continuity_witness(
                            &self.series,
                            &c.multiplier,
                            &c.weights,
                            &c.schedule,
                        )?;
                        let kind = if w.holds { "holds" } else { "violated" };
                        self.row(
                            a,
                            "continuity",
                            kind,
                            Some(w.lhs),
                            Some(w.rhs - w.lhs),
                            depth,
                        );
                    }
                    // outside the domain is an outcome, not a failure
                    Err(LabError::Domain { report, .. }) => {
                        let v = &report.m_r;
                        self.row(
                            a,
                            "S",
                            v.kind.as_str(),
                            None,
                            Some(v.residual),
                            v.depth_used,
                        );
                    }
                    Err(e) => return Err(e),
                }
                let sn =
                    summing_norm_estimate(&self.series, &c.weights, c.trials, c.seed, &c.schedule)?;
                self.row(
                    a,
                    "summing_norm",
                    "lower_bound",
                    Some(sn.estimate),
                    None,
                    depth,
                );
            }
            Analysis::Tail => {
                let t =
                    tail_decay_profile(&self.series, &c.weights, &c.tail_depths, c.trials, c.seed)?;
                let kind = if t.decaying {
                    "decaying"
                } else {
                    "not_decaying"
                };
                for (n, v) in t.depths.iter().zip(&t.tail_norms) {
                    self.row(a, format!("tail@{n}"), kind, Some(*v), None, *n);
                }
            }
            Analysis::Gap => {
                let g = weak_strong_gap(
                    &self.series,
                    &c.multiplier,
                    &c.weights,
                    &self.functionals,
                    &c.schedule,
                )?;
                let d = g.strong.depth_used;
                self.row(
                    a,
                    "gap",
                    g.strong.kind.as_str(),
                    Some(g.gap),
                    Some(g.strong_residual),
                    d,
                );
                if let Some(l) = g.limit_gap {
                    self.row(
                        a,
                        "limit_gap",
                        g.weak.kind.as_str(),
                        Some(l),
                        Some(g.weak_residual),
                        d,
                    );
                }
            }
            Analysis::Antosik => {
                let part = c.intervals.partition()?;
                let r = antosik_matrix(
                    &self.series,
                    &c.multiplier,
                    &part,
                    &self.functionals,
                    &c.weights,
                    c.schedule.tol(),
                )?;
                let pass = |b: bool| if b { "pass" } else { "fail" };
                let n = r.diagonal.len();
                let tail = r.diagonal[n / 2..]
                    .iter()
                    .fold(0.0_f64, |m, h| m.max(h.abs()));
                let end = part.end();
                self.row(
                    a,
                    "column_decay",
                    pass(r.column_decay),
                    Some(r.c),
                    None,
                    end,
                );
                self.row(
                    a,
                    "diagonal_decay",
                    pass(r.diagonal_decay),
                    Some(tail),
                    None,
                    end,
                );
                self.row(a, "consistent", pass(r.consistent), None, None, end);
            }
            Analysis::Chain => {
                let r =
                    inclusion_chain_probe(&self.series, &c.multiplier, &c.weights, &c.schedule)?;
                for (space, &ok) in Space::CHAIN.iter().zip(&r.chain) {
                    self.row(
                        a,
                        format!("chain:{}", space.label()),
                        if ok { "yes" } else { "no" },
                        None,
                        None,
                        depth,
                    );
                }
                let verdict = match r.violation {
                    None => "consistent".to_string(),
                    Some((p, q)) => format!("violation:{}>{}", p.label(), q.label()),
                };
                self.row(a, "chain", verdict, None, None, depth);
            }
            Analysis::Probe => {
                let r = multiplier_probe(
                    &self.series,
                    c.class,
                    c.trials,
                    c.seed,
                    &c.weights,
                    &c.schedule,
                )?;
                let t = r.trials as f64;
                let worst = r.worst.as_ref().map_or("Converged", |w| w.kind.as_str());
                let worst_res = r.worst.as_ref().map(|w| w.residual);
                self.row(
                    a,
                    format!("probe:{}:M", c.class),
                    worst,
                    Some(r.counts.converged as f64 / t),
                    worst_res,
                    depth,
                );
                self.row(
                    a,
                    format!("probe:{}:M_R", c.class),
                    "fraction",
                    Some(r.counts_r.converged as f64 / t),
                    None,
                    depth,
                );
            }
        }
        Ok(())
    }
}

fn setup(cfg: &ScenarioConfig) -> Result<Ctx<'_>> {
    let series = cfg.series.spec()?.with_norms(cfg.x_norm, cfg.y_norm);
    let functionals =
        sample_functionals(series.dim_out(), cfg.functionals, cfg.seed, series.y_norm)?;
    Ok(Ctx {
        cfg,
        series,
        functionals,
        rows: Vec::new(),
    })
}

/// Rows of a single analysis; errors keep their kind.
pub fn run_analysis(cfg: &ScenarioConfig, a: Analysis) -> Result<Vec<ReportRow>> {
    let mut ctx = setup(cfg)?;
    ctx.run(a)?;
    Ok(ctx.rows)
}

/// Rows and per-analysis errors for one scenario.
pub fn run_scenario(cfg: &ScenarioConfig) -> (Vec<ReportRow>, Vec<AnalysisError>) {
    let mut ctx = match setup(cfg) {
        Ok(c) => c,
        Err(e) => {
            let errors = vec![AnalysisError {
                analysis: "setup".into(),
                message: e.to_string(),
            }];
            return (Vec::new(), errors);
        }
    };
    let mut errors = Vec::new();
    for &a in &cfg.analyses {
        if let Err(e) = ctx.run(a) {
            errors.push(AnalysisError {
                analysis: a.as_str().into(),
                message: e.to_string(),
            });
        }
    }
    (ctx.rows, errors)
}

/// Runs every scenario, writing `<name>.csv` and `summary.jsonl` under `out`.
pub fn run_scenarios(configs: &[ScenarioConfig], out: &Path) -> Result<RunSummary> {
    fs::create_dir_all(out)?;
    let scenarios: Vec<ScenarioSummary> = configs
        .par_iter()
        .map(|cfg| {
            let (rows, errors) = run_scenario(cfg);
            let csv = format!("{}.csv", cfg.name);
            fs::write(out.join(&csv), render_csv(&rows))?;
            Ok(ScenarioSummary {
                scenario: cfg.name.clone(),
                status: if errors.is_empty() { "ok" } else { "error" },
                rows: rows.len(),
                csv,
                errors,
            })
        })
        .collect::<Result<_>>()?;
    let summary = RunSummary {
        count: scenarios.len(),
        failed: scenarios.iter().filter(|s| !s.errors.is_empty()).count(),
        scenarios,
    };
    fs::write(out.join("summary.jsonl"), summary.to_jsonl())?;
    Ok(summary)
}
