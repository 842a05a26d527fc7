//! Sweep execution and CSV emission.

use rayon::prelude::*;

use hybridlink::presets::db_to_linear;
use hybridlink::{
    estimate_ber, estimate_outage, Combiner, Error, HybridLink, LinkModel, McConfig, McEstimate,
};

use crate::config::{LinkKind, SweepConfig, Task};

pub const CSV_HEADER: &str = "sweep_snr_db,analytical,mc_point,mc_ci_low,mc_ci_high,status";

#[derive(Debug, Clone)]
pub struct Row {
    pub snr_db: f64,
    pub analytical: Option<f64>,
    pub mc: Option<McEstimate>,
    pub status: &'static str,
}

fn status_of(err: &Error) -> &'static str {
    match err {
        Error::InvalidParameter(_) => "invalid_parameter",
        Error::IncompatibleModulation(_) => "incompatible_modulation",
        Error::PoleSeparation(_) => "pole_separation",
        Error::Convergence(_) => "convergence_error",
    }
}

fn build_link(cfg: &SweepConfig, sweep_db: f64) -> Result<LinkModel, String> {
    let fso_db = if cfg.sweep_is_fso() {
        sweep_db
    } else {
        cfg.fixed_fso_db().unwrap_or(0.0)
    };
    let rf_db = if cfg.sweep_is_fso() {
        cfg.fixed_rf_db().unwrap_or(0.0)
    } else {
        sweep_db
    };
    Ok(match cfg.link {
        LinkKind::Fso => LinkModel::Fso(cfg.fso_at(fso_db)?),
        LinkKind::Rf => LinkModel::Rf(cfg.rf_at(rf_db)?),
        LinkKind::Sc => LinkModel::Hybrid(
            HybridLink::new(cfg.fso_at(fso_db)?, cfg.rf_at(rf_db)?),
            Combiner::Sc,
        ),
        LinkKind::Mrc => LinkModel::Hybrid(
            HybridLink::new(cfg.fso_at(fso_db)?, cfg.rf_at(rf_db)?),
            Combiner::Mrc,
        ),
    })
}

/// Run the sweep; one row per sweep point, in sweep order. Numerical
/// failures are reported in the row status instead of aborting.
pub fn run(task: Task, cfg: &SweepConfig, mc_enabled: bool, seed: u64) -> Result<Vec<Row>, String> {
    let points = cfg.sweep_points();
    let rows: Vec<Row> = points
        .par_iter()
        .enumerate()
        .map(|(idx, &snr_db)| {
            let link = match build_link(cfg, snr_db) {
                Ok(l) => l,
                Err(_) => {
                    return Row {
                        snr_db,
                        analytical: None,
                        mc: None,
                        status: "invalid_parameter",
                    }
                }
            };
            let mut status = "ok";
            let analytical = match task {
                Task::Op => link.analytical_outage(db_to_linear(cfg.threshold_db.unwrap())),
                Task::Ber => link.analytical_avg_ber(cfg.modulation.as_ref().unwrap()),
            };
            let analytical = match analytical {
                Ok(v) => Some(v),
                Err(e) => {
                    status = status_of(&e);
                    None
                }
            };
            let mc = if mc_enabled {
                let mc_cfg = McConfig {
                    samples: cfg.mc.samples,
                    // one deterministic stream family per row
                    master_seed: seed.wrapping_add((idx as u64).wrapping_mul(0x9e3779b97f4a7c15)),
                    workers: cfg.mc.workers,
                    ci_level: 0.9973,
                };
                let est = match task {
                    Task::Op => {
                        estimate_outage(&link, db_to_linear(cfg.threshold_db.unwrap()), &mc_cfg)
                    }
                    Task::Ber => estimate_ber(&link, cfg.modulation.as_ref().unwrap(), &mc_cfg),
                };
                match est {
                    Ok(e) => Some(e),
                    Err(e) => {
                        if status == "ok" {
                            status = status_of(&e);
                        }
                        None
                    }
                }
            } else {
                None
            };
            Row {
                snr_db,
                analytical,
                mc,
                status,
            }
        })
        .collect();
    Ok(rows)
}

fn sci(v: f64) -> String {
    format!("{v:.16e}")
}

/// Render rows as the stable CSV schema (UTF-8, LF, `.` decimals).
pub fn to_csv(rows: &[Row]) -> String {
    let mut out = String::from(CSV_HEADER);
    out.push('\n');
    for row in rows {
        let analytical = row.analytical.map(sci).unwrap_or_default();
        let (p, lo, hi) = match &row.mc {
            Some(e) => (sci(e.point), sci(e.ci_low), sci(e.ci_high)),
            None => (String::new(), String::new(), String::new()),
        };
        out.push_str(&format!(
            "{},{},{},{},{},{}\n",
            sci(row.snr_db),
            analytical,
            p,
            lo,
            hi,
            row.status
        ));
    }
    out
}

/// Companion gnuplot script consuming the CSV (plot emission is delegated
/// to the plotting tool; this program only writes data).
pub fn plot_script(csv_path: &str, task: Task) -> String {
    let ylabel = match task {
        Task::Op => "outage probability",
        Task::Ber => "average BER",
    };
    format!(
        "set datafile separator ','\n\
         set logscale y\n\
         set xlabel 'average SNR (dB)'\n\
         set ylabel '{ylabel}'\n\
         set grid\n\
         set key bottom left\n\
         plot '{csv_path}' skip 1 using 1:2 with linespoints title 'analytical', \\\n\
         \x20    '{csv_path}' skip 1 using 1:3:4:5 with yerrorbars title 'Monte Carlo'\n"
    )
}

/// True when at least one row carries a numerical failure.
pub fn any_failed(rows: &[Row]) -> bool {
    rows.iter().any(|r| r.status != "ok")
}
