//! CSV tables and the run manifest.
//!
//! Floats are printed in Rust's shortest round-trip form, so every table
//! re-parses to the exact values that were aggregated.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use super::config::ScenarioConfig;
use super::experiment::{DiameterRule, RadiusRow, RunResult, RunSeeds, SweepRow};
use crate::Result;

/// `t,tracker,run,node,est_x1,est_x2,err`, with 1-based slots and nodes.
pub fn estimates_csv(result: &RunResult) -> String {
    let mut out = String::from("t,tracker,run,node,est_x1,est_x2,err\n");
    for rec in &result.records {
        for tr in &rec.trackers {
            let name = tr.kind.name();
            for (t, (ests, errs)) in tr.estimates.iter().zip(&tr.errors).enumerate() {
                for (n, (e, err)) in ests.iter().zip(errs).enumerate() {
                    let _ = writeln!(
                        out,
                        "{},{},{},{},{},{},{}",
                        t + 1,
                        name,
                        rec.run,
                        n + 1,
                        e.pos[0],
                        e.pos[1],
                        err
                    );
                }
            }
        }
    }
    out
}

/// `tracker,rmse,divergences,packets_per_node`.
pub fn summary_csv(result: &RunResult) -> Result<String> {
    let mut out = String::from("tracker,rmse,divergences,packets_per_node\n");
    for &k in &result.trackers {
        let packets = result.mean_packets(k)?.map_or(String::new(), |p| p.to_string());
        let _ = writeln!(
            out,
            "{},{},{},{}",
            k.name(),
            result.rmse(k)?,
            result.divergences(k)?,
            packets
        );
    }
    Ok(out)
}

/// `tracker,n_it,rmse`.
pub fn sweep_csv(rows: &[SweepRow]) -> String {
    let mut out = String::from("tracker,n_it,rmse\n");
    for r in rows {
        let _ = writeln!(out, "{},{},{}", r.tracker.name(), r.iterations, r.rmse);
    }
    out
}

/// `tracker,t,rmse`.
pub fn time_csv(result: &RunResult) -> Result<String> {
    let mut out = String::from("tracker,t,rmse\n");
    for &k in &result.trackers {
        for (t, v) in result.rmse_per_slot(k)?.iter().enumerate() {
            let _ = writeln!(out, "{},{},{}", k.name(), t + 1, v);
        }
    }
    Ok(out)
}

/// Method label: the method name, suffixed with `-realized` when the
/// realized network diameter was used.
pub fn method_label(r: &RadiusRow) -> String {
    match r.diameter {
        DiameterRule::AreaRule => r.method.name().to_string(),
        DiameterRule::Realized => format!("{}-realized", r.method.name()),
    }
}

/// `R,P,method,packets`.
pub fn radius_csv(rows: &[RadiusRow]) -> String {
    let mut out = String::from("R,P,method,packets\n");
    for r in rows {
        let _ = writeln!(
            out,
            "{},{},{},{}",
            r.comm_radius,
            r.packet_size,
            method_label(r),
            r.packets
        );
    }
    out
}

/// `R,method,packets_per_node`, for a sweep at a single packet size.
pub fn cost_csv(rows: &[RadiusRow]) -> String {
    let mut out = String::from("R,method,packets_per_node\n");
    for r in rows {
        let _ = writeln!(out, "{},{},{}", r.comm_radius, method_label(r), r.packets);
    }
    out
}

/// Config echo followed by the child seeds of each run.
pub fn manifest(cfg: &ScenarioConfig, command: &str, seeds: &[(usize, RunSeeds)]) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "# command = {command}");
    out.push_str(&cfg.to_text());
    if !seeds.is_empty() {
        out.push_str("\n# run,stream,seed\n");
        for (run, s) in seeds {
            for (stream, seed) in s.iter() {
                let _ = writeln!(out, "# {run},{},{seed}", stream.name());
            }
        }
    }
    out
}

/// Write `contents` to `dir/name`, creating `dir` if needed.
pub fn write_file(dir: &Path, name: &str, contents: &str) -> Result<()> {
    fs::create_dir_all(dir)?;
    fs::write(dir.join(name), contents)?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::harness::config::ScenarioConfig;
    use crate::harness::experiment::{CostMethod, RunSeeds};
    use crate::tracker::TrackerKind;

    #[test]
    fn headers() {
        assert_eq!(sweep_csv(&[]), "tracker,n_it,rmse\n");
        let rows = [
            RadiusRow {
                comm_radius: 45.0,
                packet_size: 500,
                diameter: DiameterRule::AreaRule,
                method: CostMethod::NcpfMean,
                packets: 2.5,
            },
            RadiusRow {
                comm_radius: 45.0,
                packet_size: 500,
                diameter: DiameterRule::Realized,
                method: CostMethod::Dpf,
                packets: 6.0,
            },
        ];
        assert_eq!(
            radius_csv(&rows),
            "R,P,method,packets\n45,500,ncpf-mean,2.5\n45,500,dpf-realized,6\n"
        );
        assert_eq!(
            cost_csv(&rows),
            "R,method,packets_per_node\n45,ncpf-mean,2.5\n45,dpf-realized,6\n"
        );
        let s = sweep_csv(&[SweepRow {
            tracker: TrackerKind::Exact,
            iterations: 3,
            rmse: 0.1,
        }]);
        assert_eq!(s, "tracker,n_it,rmse\nexact,3,0.1\n");
    }

    #[test]
    fn manifest_reparses_as_config() {
        let cfg = ScenarioConfig::preset("paper-loopy-25").unwrap();
        let m = manifest(&cfg, "simulate", &[(0, RunSeeds::derive(1, 0))]);
        assert_eq!(ScenarioConfig::parse(&m).unwrap(), cfg);
        assert!(m.contains("# 0,network,"));
    }
}
