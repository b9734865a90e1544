//! `hwfr export`: turn a grid file into a plot-ready CSV.
//!
//! Kinds:
//! * `curve` — a 1D grid as `t,value` rows (t = cell midpoints in `[0,1]`)
//! * `slice` — one plane of a 3D grid: `--axis u|v|w --index k`; columns
//!   name the two free axes, e.g. `u,v,value` for a `w`-slice
//! * `topq`  — the top `--q` fraction of cells by value, largest first
//!   (ties broken by flat index): coordinates plus value, suited to
//!   inclusion-frequency maps
//!
//! Output: `export.csv` + `resolved_config.json` in `--out`.

use std::path::PathBuf;

use clap::Args;
use hwfr::{cell_midpoints, Grid};
use serde::{Deserialize, Serialize};

use crate::config::{self, merge_params};
use crate::error::{CliError, Result};
use crate::formats::{self, GridData};

use super::prepare_out;

#[derive(Debug, Args, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExportParams {
    /// JSON config file; command-line flags override its values.
    #[arg(long, value_name = "FILE")]
    #[serde(skip)]
    pub config: Option<PathBuf>,

    /// Grid file (.hwv) to export.
    #[arg(long)]
    pub grid: Option<String>,

    /// Export kind: curve, slice, or topq.
    #[arg(long)]
    pub kind: Option<String>,

    /// Slice axis: u, v, or w.
    #[arg(long)]
    pub axis: Option<String>,

    /// Slice index along the chosen axis.
    #[arg(long)]
    pub index: Option<usize>,

    /// Fraction of cells to keep for topq, in (0, 1].
    #[arg(long)]
    pub q: Option<f64>,

    /// Output directory.
    #[arg(long)]
    pub out: Option<String>,
}

merge_params!(ExportParams { grid, kind, axis, index, q, out });

#[derive(Debug, Serialize)]
struct ExportResolved {
    command: &'static str,
    grid: String,
    kind: String,
    axis: Option<String>,
    index: Option<usize>,
    q: Option<f64>,
    out: String,
}

pub fn run(mut params: ExportParams) -> Result<()> {
    let config_path = params.config.take();
    let p = config::merge_config(params, config_path.as_deref(), "export")?;

    let kind = config::one_of(
        "kind",
        config::require(p.kind, "kind")?,
        &["curve", "slice", "topq"],
    )?;
    let mut resolved = ExportResolved {
        command: "export",
        grid: config::require(p.grid, "grid")?,
        kind,
        axis: None,
        index: None,
        q: None,
        out: config::require(p.out, "out")?,
    };
    match resolved.kind.as_str() {
        "slice" => {
            resolved.axis = Some(config::one_of(
                "axis",
                config::require(p.axis, "axis")?,
                &["u", "v", "w"],
            )?);
            resolved.index = Some(config::require(p.index, "index")?);
            config::forbid(&p.q, "q", "to slice exports")?;
        }
        "topq" => {
            let q = config::require(p.q, "q")?;
            if !(q > 0.0 && q <= 1.0) {
                return Err(CliError::config(format!(
                    "--q must be inside (0, 1], got {q}"
                )));
            }
            resolved.q = Some(q);
            config::forbid(&p.axis, "axis", "to topq exports")?;
            config::forbid(&p.index, "index", "to topq exports")?;
        }
        _ => {
            config::forbid(&p.axis, "axis", "to curve exports")?;
            config::forbid(&p.index, "index", "to curve exports")?;
            config::forbid(&p.q, "q", "to curve exports")?;
        }
    }

    let grid = formats::read_grid(std::path::Path::new(&resolved.grid))?;
    let rows = make_rows(&grid, &resolved)?;

    let out_dir = prepare_out(&resolved.out)?;
    formats::write_json(&out_dir.join("resolved_config.json"), &resolved)?;
    let path = out_dir.join("export.csv");
    let mut w = csv::Writer::from_path(&path)
        .map_err(|e| CliError::io(format!("cannot create {}: {e}", path.display())))?;
    for record in rows {
        w.write_record(record)?;
    }
    w.flush()
        .map_err(|e| CliError::io(format!("cannot write {}: {e}", path.display())))
}

fn make_rows(grid: &GridData, resolved: &ExportResolved) -> Result<Vec<Vec<String>>> {
    match resolved.kind.as_str() {
        "curve" => {
            let g = match grid {
                GridData::OneD(g) => g,
                GridData::ThreeD(_) => {
                    return Err(CliError::config(
                        "curve export needs a 1D grid; use slice or topq for volumes",
                    ))
                }
            };
            let mut rows = vec![vec!["t".to_string(), "value".to_string()]];
            for (t, v) in cell_midpoints(g.len()).zip(g.values()) {
                rows.push(vec![format!("{t}"), format!("{v}")]);
            }
            Ok(rows)
        }
        "slice" => {
            let g = match grid {
                GridData::ThreeD(g) => g,
                GridData::OneD(_) => {
                    return Err(CliError::config("slice export needs a 3D grid"))
                }
            };
            let (nu, nv, nw) = g.shape();
            let axis = resolved.axis.as_deref().expect("resolved slice has axis");
            let index = resolved.index.expect("resolved slice has index");
            let limit = match axis {
                "u" => nu,
                "v" => nv,
                _ => nw,
            };
            if index >= limit {
                return Err(CliError::config(format!(
                    "--index {index} out of range for axis {axis} of length {limit}"
                )));
            }
            let mids = |n: usize| cell_midpoints(n).collect::<Vec<f64>>();
            let (mu, mv, mw) = (mids(nu), mids(nv), mids(nw));
            let mut rows = Vec::new();
            match axis {
                "u" => {
                    rows.push(vec!["v".into(), "w".into(), "value".into()]);
                    for (w, wm) in mw.iter().enumerate() {
                        for (v, vm) in mv.iter().enumerate() {
                            rows.push(vec![
                                format!("{vm}"),
                                format!("{wm}"),
                                format!("{}", g.at(index, v, w)),
                            ]);
                        }
                    }
                }
                "v" => {
                    rows.push(vec!["u".into(), "w".into(), "value".into()]);
                    for (w, wm) in mw.iter().enumerate() {
                        for (u, um) in mu.iter().enumerate() {
                            rows.push(vec![
                                format!("{um}"),
                                format!("{wm}"),
                                format!("{}", g.at(u, index, w)),
                            ]);
                        }
                    }
                }
                _ => {
                    rows.push(vec!["u".into(), "v".into(), "value".into()]);
                    for (v, vm) in mv.iter().enumerate() {
                        for (u, um) in mu.iter().enumerate() {
                            rows.push(vec![
                                format!("{um}"),
                                format!("{vm}"),
                                format!("{}", g.at(u, v, index)),
                            ]);
                        }
                    }
                }
            }
            Ok(rows)
        }
        _ => {
            let q = resolved.q.expect("resolved topq has q");
            let values = grid.values();
            let keep = ((q * values.len() as f64).ceil() as usize).clamp(1, values.len());
            let mut order: Vec<usize> = (0..values.len()).collect();
            order.sort_by(|&a, &b| {
                values[b]
                    .partial_cmp(&values[a])
                    .expect("grid values are finite")
                    .then(a.cmp(&b))
            });
            order.truncate(keep);
            match grid {
                GridData::OneD(g) => {
                    let mids: Vec<f64> = cell_midpoints(g.len()).collect();
                    let mut rows = vec![vec!["t".to_string(), "value".to_string()]];
                    for i in order {
                        rows.push(vec![format!("{}", mids[i]), format!("{}", values[i])]);
                    }
                    Ok(rows)
                }
                GridData::ThreeD(g) => {
                    let (nu, nv, _) = g.shape();
                    let mids = |n: usize| cell_midpoints(n).collect::<Vec<f64>>();
                    let (mu, mv, mw) = (mids(nu), mids(nv), mids(g.shape().2));
                    let mut rows =
                        vec![vec!["u".to_string(), "v".to_string(), "w".to_string(), "value".to_string()]];
                    for i in order {
                        let (u, v, w) = (i % nu, (i / nu) % nv, i / (nu * nv));
                        rows.push(vec![
                            format!("{}", mu[u]),
                            format!("{}", mv[v]),
                            format!("{}", mw[w]),
                            format!("{}", values[i]),
                        ]);
                    }
                    Ok(rows)
                }
            }
        }
    }
}
