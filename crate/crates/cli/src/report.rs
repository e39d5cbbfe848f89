//! Command execution and output rendering.

use coopcap_core::bounds::{c_bc, c_mac, c_nc, mimo_waterfill, BoundSet};
use coopcap_core::montecarlo::{run_sweep, Scheme, SweepSpec};
use coopcap_core::rx_coop::r_rx;
use coopcap_core::tx_coop::r_tx;
use coopcap_core::txrx_coop::r_txrx_with_corners;
use coopcap_core::{Assumption, BandwidthAlloc, CoopChannel, PhaseFading, PowerAlloc};
use serde_json::{json, Value};

use crate::parse::{write_sweep_csv, SweepRow};
use crate::{CliError, Command, Format, Realization, RunConfig};

/// Slack of the `txrx >= max(tx, rx)` self-check.
pub const DOMINANCE_TOL: f64 = 1e-6;
/// Slack of the upper-bound and ordering self-checks.
pub const BOUND_TOL: f64 = 1e-9;

/// Rendered output plus the self-checks that failed. A report with
/// problems is still written; the process exits nonzero.
#[derive(Debug, Clone, PartialEq)]
pub struct Report {
    pub body: String,
    pub problems: Vec<String>,
}

pub fn execute(cfg: &RunConfig) -> Result<Report, CliError> {
    match cfg.command {
        Command::Rates => rates(cfg),
        Command::Sweep => sweep(cfg),
        Command::Bounds => bounds(cfg),
    }
}

fn runtime(e: impl std::fmt::Display) -> CliError {
    CliError::Runtime(e.to_string())
}

fn realization(cfg: &RunConfig) -> Result<PhaseFading, CliError> {
    match cfg.realization.expect("rates and bounds carry a realization") {
        Realization::Thetas(t) => PhaseFading::new(t).map_err(runtime),
        Realization::Sample { seed, index } => Ok(PhaseFading::sample(seed, index)),
    }
}

fn realization_json(cfg: &RunConfig, ch: &PhaseFading) -> Value {
    let (seed, index) = match cfg.realization {
        Some(Realization::Sample { seed, index }) => (Some(seed), Some(index)),
        _ => (None, None),
    };
    json!({ "thetas": ch.theta(), "seed": seed, "index": index, "phi": ch.phi() })
}

fn envelope(spec: Value, results: Value, extra: Value) -> String {
    let mut doc = json!({
        "version": env!("CARGO_PKG_VERSION"),
        "spec": spec,
        "results": results,
    });
    if let (Some(doc), Value::Object(extra)) = (doc.as_object_mut(), extra) {
        doc.extend(extra);
    }
    let mut text = serde_json::to_string_pretty(&doc).expect("JSON values serialize");
    text.push('\n');
    text
}

fn csv_text(header: &[&str], rows: impl IntoIterator<Item = Vec<String>>) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(header).expect("in-memory write");
    for row in rows {
        w.write_record(&row).expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("in-memory flush")).expect("ASCII output")
}

struct SchemeRate {
    scheme: Scheme,
    rate: f64,
    power: Option<PowerAlloc>,
    bandwidths: Option<BandwidthAlloc>,
    diagnostics: Value,
}

fn rates(cfg: &RunConfig) -> Result<Report, CliError> {
    let ch = realization(cfg)?;
    let p = cfg.budget();
    let g = cfg.gains()[0];
    let link = CoopChannel::new(g).map_err(runtime)?;
    let mimo = mimo_waterfill(&ch, p).map_err(runtime)?;
    let needs = |s: Scheme| cfg.schemes.contains(&s);

    let tx = if needs(Scheme::Tx) || needs(Scheme::TxRx) {
        Some(r_tx(&ch, &link, p, cfg.assumption).map_err(runtime)?)
    } else {
        None
    };
    let rx = if needs(Scheme::Rx) || needs(Scheme::TxRx) {
        Some(r_rx(&ch, &link, p, cfg.assumption, &cfg.rx_search).map_err(runtime)?)
    } else {
        None
    };

    let mut out = Vec::new();
    for &scheme in &cfg.schemes {
        let row = match scheme {
            Scheme::Nc => SchemeRate {
                scheme,
                rate: c_nc(p),
                power: Some(PowerAlloc::new(p / 2.0, p / 2.0, 0.0, 0.0, 0.0).map_err(runtime)?),
                bandwidths: Some(match cfg.assumption {
                    Assumption::Dedicated => BandwidthAlloc::dedicated(false, false),
                    Assumption::Shared => BandwidthAlloc::shared(0.0, 1.0, 0.0).map_err(runtime)?,
                }),
                diagnostics: json!({}),
            },
            Scheme::Tx => {
                let r = tx.expect("computed above");
                SchemeRate {
                    scheme,
                    rate: r.sum_rate,
                    power: Some(r.power),
                    bandwidths: Some(r.bandwidths),
                    diagnostics: json!({ "p_t_star": r.p_t_star, "branch": r.branch }),
                }
            }
            Scheme::Rx => {
                let r = rx.expect("computed above");
                SchemeRate {
                    scheme,
                    rate: r.sum_rate,
                    power: Some(r.power),
                    bandwidths: Some(r.bandwidths),
                    diagnostics: json!({ "n_hat": r.n_hat, "wide_search": cfg.rx_search.wide }),
                }
            }
            Scheme::TxRx => {
                let (t, r) = (tx.expect("computed above"), rx.expect("computed above"));
                let j =
                    r_txrx_with_corners(&ch, &link, p, cfg.assumption, &cfg.txrx_search, &t, &r).map_err(runtime)?;
                SchemeRate {
                    scheme,
                    rate: j.sum_rate,
                    power: Some(j.power),
                    bandwidths: Some(j.bandwidths),
                    diagnostics: json!({
                        "n_hat_targets": [j.n_hat_targets.0, j.n_hat_targets.1],
                        "order": j.order,
                        "source": j.source,
                    }),
                }
            }
            Scheme::Bc => SchemeRate {
                scheme,
                rate: c_bc(&ch, p),
                power: None,
                bandwidths: None,
                diagnostics: json!({}),
            },
            Scheme::Mac => SchemeRate {
                scheme,
                rate: c_mac(&ch, p).map_err(runtime)?,
                power: None,
                bandwidths: None,
                diagnostics: json!({}),
            },
            Scheme::Mimo => SchemeRate {
                scheme,
                rate: mimo.rate,
                power: None,
                bandwidths: None,
                diagnostics: json!({
                    "mode_gains": mimo.gains,
                    "mode_powers": mimo.powers,
                    "water_level": mimo.water_level,
                }),
            },
        };
        out.push(row);
    }

    let mut checks = Vec::new();
    for r in &out {
        checks.push((format!("{} rate is finite", r.scheme), r.rate.is_finite()));
        checks.push((
            format!("{} <= mimo + {BOUND_TOL:e}", r.scheme),
            r.rate <= mimo.rate + BOUND_TOL,
        ));
    }
    let rate_of = |s: Scheme| out.iter().find(|r| r.scheme == s).map(|r| r.rate);
    if let Some(joint) = rate_of(Scheme::TxRx) {
        let floor = tx.expect("computed").sum_rate.max(rx.expect("computed").sum_rate);
        checks.push((
            format!("txrx >= max(tx, rx) - {DOMINANCE_TOL:e}"),
            joint >= floor - DOMINANCE_TOL,
        ));
    }
    if let (Some(r), Assumption::Dedicated) = (rate_of(Scheme::Rx), cfg.assumption) {
        checks.push((format!("rx >= nc - {BOUND_TOL:e}"), r >= c_nc(p) - BOUND_TOL));
    }
    let problems: Vec<String> = checks
        .iter()
        .filter(|(_, ok)| !ok)
        .map(|(name, _)| format!("self-check failed: {name}"))
        .collect();

    let body = match cfg.format {
        Format::Csv => csv_text(
            &[
                "scheme",
                "rate_bits",
                "p1",
                "p2",
                "p_t",
                "p_r1",
                "p_r2",
                "b_t",
                "b",
                "b_r",
            ],
            out.iter().map(|r| {
                let mut row = vec![r.scheme.to_string(), r.rate.to_string()];
                match r.power {
                    Some(a) => row.extend([a.p1, a.p2, a.p_t, a.p_r1, a.p_r2].map(|v| v.to_string())),
                    None => row.extend(std::iter::repeat_n(String::new(), 5)),
                }
                match r.bandwidths {
                    Some(b) => row.extend([b.b_t, b.b, b.b_r].map(|v| v.to_string())),
                    None => row.extend(std::iter::repeat_n(String::new(), 3)),
                }
                row
            }),
        ),
        Format::Json => envelope(
            json!({
                "command": "rates",
                "realization": realization_json(cfg, &ch),
                "p_db": cfg.p_db,
                "budget": p,
                "g_db": cfg.g_db[0],
                "g": g,
                "assumption": cfg.assumption,
                "schemes": cfg.schemes,
                "rx_search": cfg.rx_search,
                "txrx_search": cfg.txrx_search,
            }),
            out.iter()
                .map(|r| {
                    json!({
                        "scheme": r.scheme,
                        "rate_bits": r.rate,
                        "power": r.power,
                        "bandwidths": r.bandwidths,
                        "diagnostics": r.diagnostics,
                    })
                })
                .collect(),
            json!({ "checks": checks_json(&checks) }),
        ),
    };
    Ok(Report { body, problems })
}

fn checks_json(checks: &[(String, bool)]) -> Value {
    checks
        .iter()
        .map(|(name, ok)| json!({ "check": name, "passed": ok }))
        .collect()
}

fn bounds(cfg: &RunConfig) -> Result<Report, CliError> {
    let ch = realization(cfg)?;
    let p = cfg.budget();
    let set = BoundSet::evaluate(&ch, p).map_err(runtime)?;
    let holds = set.ordering_holds(BOUND_TOL);
    let check = format!("c_nc <= c_bc = c_mac <= c_mimo within {BOUND_TOL:e}");
    let problems = if holds {
        Vec::new()
    } else {
        vec![format!("self-check failed: {check}")]
    };
    let rows = [
        ("c_nc", set.c_nc),
        ("c_bc", set.c_bc),
        ("c_mac", set.c_mac),
        ("c_mimo", set.c_mimo),
    ];
    let body = match cfg.format {
        Format::Csv => csv_text(
            &["bound", "rate_bits"],
            rows.iter().map(|(name, v)| vec![name.to_string(), v.to_string()]),
        ),
        Format::Json => envelope(
            json!({
                "command": "bounds",
                "realization": realization_json(cfg, &ch),
                "p_db": cfg.p_db,
                "budget": p,
            }),
            rows.iter()
                .map(|(name, v)| json!({ "bound": name, "rate_bits": v }))
                .collect(),
            json!({ "checks": checks_json(&[(check, holds)]) }),
        ),
    };
    Ok(Report { body, problems })
}

fn sweep(cfg: &RunConfig) -> Result<Report, CliError> {
    let spec = SweepSpec {
        g_grid: cfg.gains(),
        budget: cfg.budget(),
        assumption: cfg.assumption,
        samples: cfg.samples,
        master_seed: cfg.seed,
        schemes: cfg.schemes.clone(),
        rx_search: cfg.rx_search,
        txrx_search: cfg.txrx_search,
    };
    let result = run_sweep(&spec, cfg.workers).map_err(runtime)?;
    let g_db_of = |k: usize| cfg.g_db[k / cfg.schemes.len()];
    let problems: Vec<String> = result
        .failures
        .iter()
        .map(|f| format!("sample {} failed: {}", f.index, f.message))
        .collect();

    let body = match cfg.format {
        Format::Csv => write_sweep_csv(
            &result
                .cells
                .iter()
                .enumerate()
                .map(|(k, c)| SweepRow {
                    g_db: g_db_of(k),
                    scheme: c.scheme,
                    mean_rate_bits: c.mean,
                    stderr: c.stderr,
                    samples: c.samples,
                    seed: cfg.seed,
                })
                .collect::<Vec<_>>(),
        ),
        Format::Json => envelope(
            json!({
                "command": "sweep",
                "p_db": cfg.p_db,
                "g_db": cfg.g_db,
                "sweep": result.spec,
                "workers": cfg.workers,
            }),
            result
                .cells
                .iter()
                .enumerate()
                .map(|(k, c)| {
                    json!({
                        "g_db": g_db_of(k),
                        "g": c.g,
                        "scheme": c.scheme,
                        "mean_rate_bits": c.mean,
                        "stderr": c.stderr,
                        "samples": c.samples,
                        "seed": cfg.seed,
                    })
                })
                .collect(),
            json!({
                "failures": result.failures,
                "realization_digest": format!("{:016x}", result.realization_digest),
                "wall_time_s": result.wall_time_s,
            }),
        ),
    };
    Ok(Report { body, problems })
}
