use std::fs;
use std::path::{Path, PathBuf};

use anyhow::Context;
use serde_json::json;
use tetrafold_core::bands::{strip_svg, BandReport, SvgOptions};
use tetrafold_core::classify::{enumerate_common_with, CommonOptions};
use tetrafold_core::embed::{to_obj, EmbedReport};
use tetrafold_core::{build_mesh, relax_max_volume, trace_bands_along, unfold_band, volume_table, StripDirection};

use crate::formats;
use crate::Command;

pub struct Outcome {
    pub command: &'static str,
    pub parameters: serde_json::Value,
    pub seed: Option<u64>,
    pub outputs: Vec<PathBuf>,
    /// False when a numerical result fell short of its tolerance.
    pub success: bool,
}

impl Outcome {
    fn ok(command: &'static str, parameters: serde_json::Value) -> Self {
        Outcome { command, parameters, seed: None, outputs: Vec::new(), success: true }
    }
}

fn write_or_print(path: Option<&Path>, text: &str, outputs: &mut Vec<PathBuf>) -> anyhow::Result<()> {
    match path {
        Some(p) => {
            fs::write(p, text).with_context(|| format!("writing {}", p.display()))?;
            outputs.push(p.to_path_buf());
        }
        None => print!("{text}"),
    }
    Ok(())
}

fn to_json<T: serde::Serialize>(value: &T) -> anyhow::Result<String> {
    Ok(serde_json::to_string_pretty(value)? + "\n")
}

fn svg_paths(base: &Path, n: usize) -> Vec<PathBuf> {
    if n == 1 {
        return vec![base.to_path_buf()];
    }
    let stem = base.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
    let ext = base.extension().map(|e| e.to_string_lossy().into_owned()).unwrap_or_else(|| "svg".into());
    (0..n).map(|i| base.with_file_name(format!("{stem}-{i}.{ext}"))).collect()
}

pub fn dispatch(cmd: &Command) -> anyhow::Result<Outcome> {
    match cmd {
        Command::Mesh { a, b, out } => {
            let m = build_mesh(*a, *b)?;
            let mut o = Outcome::ok("mesh", json!({ "a": a, "b": b }));
            write_or_print(out.as_deref(), &to_json(&m.to_document())?, &mut o.outputs)?;
            Ok(o)
        }
        Command::Bands { a, b, direction, svg, scale_mm, out } => {
            let dir = StripDirection::from(*direction);
            let m = build_mesh(*a, *b)?;
            let bands = trace_bands_along(&m, dir)?;
            let report = BandReport::new(&m, dir, &bands);
            let mut o = Outcome::ok("bands", json!({ "a": a, "b": b, "direction": dir, "scale_mm": scale_mm }));
            eprintln!("{} bands × {} faces", report.band_count, report.band_length);
            if let Some(base) = svg {
                let opts = SvgOptions { mm_per_unit: *scale_mm, ..Default::default() };
                for (band, path) in bands.iter().zip(svg_paths(base, bands.len())) {
                    let text = strip_svg(&unfold_band(band), &opts);
                    fs::write(&path, text).with_context(|| format!("writing {}", path.display()))?;
                    o.outputs.push(path);
                }
            }
            if out.is_some() || svg.is_none() {
                write_or_print(out.as_deref(), &to_json(&report)?, &mut o.outputs)?;
            }
            Ok(o)
        }
        Command::Common { s_max, csv, json: json_path, include_non_coprime } => {
            let groups = enumerate_common_with(*s_max, CommonOptions { include_non_coprime: *include_non_coprime });
            let mut o = Outcome::ok("common", json!({ "s_max": s_max, "include_non_coprime": include_non_coprime }));
            if let Some(p) = json_path {
                write_or_print(Some(p), &to_json(&groups)?, &mut o.outputs)?;
            }
            if csv.is_some() || json_path.is_none() {
                write_or_print(csv.as_deref(), &formats::common_csv(&groups)?, &mut o.outputs)?;
            }
            Ok(o)
        }
        Command::Embed { a, b, relax, obj, report } => {
            let cfg = relax.config();
            let m = build_mesh(*a, *b)?;
            let result = relax_max_volume::<f64>(&m, &cfg)?;
            let rep = EmbedReport::new(&m, &cfg, &result)?;
            let mut o = Outcome::ok("embed", json!({ "a": a, "b": b, "config": cfg }));
            o.seed = Some(cfg.seed);
            o.success = rep.converged;
            eprintln!(
                "relative volume {:.6} (residual {:.1e}, seed {})",
                rep.metrics.relative_volume, rep.residual, rep.seed
            );
            if let Some(p) = obj {
                write_or_print(Some(p), &to_obj(&result.best, &m), &mut o.outputs)?;
            }
            if report.is_some() || obj.is_none() {
                write_or_print(report.as_deref(), &to_json(&rep)?, &mut o.outputs)?;
            }
            Ok(o)
        }
        Command::Table { max, relax, csv } => {
            let cfg = relax.config();
            if *max < 1 {
                anyhow::bail!(tetrafold_core::Error::InvalidConfig(format!("--max must be at least 1, got {max}")));
            }
            let table = volume_table(*max, *max, &cfg)?;
            let mut o = Outcome::ok("table", json!({ "max": max, "config": cfg }));
            o.seed = Some(cfg.seed);
            o.success = table.cells.iter().all(|c| c.result.is_converged());
            write_or_print(csv.as_deref(), &formats::table_csv(&table)?, &mut o.outputs)?;
            Ok(o)
        }
        Command::Replay { .. } => unreachable!("replay is resolved before dispatch"),
    }
}
