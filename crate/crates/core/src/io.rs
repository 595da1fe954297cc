//! CSV and JSON artifacts. Every file carries the resolved config and the kernel hash.

use std::fs;
use std::path::Path;
use std::sync::Arc;

use serde::Serialize;
use serde_json::{json, Map, Value};

use crate::config::RunConfig;
use crate::error::{Error, Result};
use crate::radial::{RadialGrid, StatePair};
use crate::solver::IterRecord;

/// Shortest representation that parses back to the same `f64`.
pub fn fmt_f64(x: f64) -> String {
    format!("{x:e}")
}

/// `# key = value` lines for a CSV preamble.
pub fn header_text(config: &RunConfig, kernel_hash: Option<&str>) -> String {
    let mut out: String = config.resolved().iter().map(|(k, v)| format!("# {k} = {v}\n")).collect();
    out.push_str(&format!("# kernel_sha256 = {}\n", kernel_hash.unwrap_or("none")));
    out
}

pub fn write_csv(path: &Path, header: &str, columns: &[&str], rows: &[Vec<String>]) -> Result<()> {
    let mut text = String::from(header);
    text.push_str(&columns.join(","));
    text.push('\n');
    for row in rows {
        if row.len() != columns.len() {
            return Err(Error::Config(format!("row of {} cells under {} columns", row.len(), columns.len())));
        }
        text.push_str(&row.join(","));
        text.push('\n');
    }
    if let Some(dir) = path.parent() {
        fs::create_dir_all(dir)?;
    }
    fs::write(path, text)?;
    Ok(())
}

pub fn write_numeric_csv(path: &Path, header: &str, columns: &[&str], rows: &[Vec<f64>]) -> Result<()> {
    let rows: Vec<Vec<String>> = rows.iter().map(|r| r.iter().map(|x| fmt_f64(*x)).collect()).collect();
    write_csv(path, header, columns, &rows)
}

pub fn json_document<T: Serialize>(config: &RunConfig, kernel_hash: Option<&str>, value: &T) -> Result<Value> {
    let cfg: Map<String, Value> = config.resolved().into_iter().map(|(k, v)| (k, Value::String(v))).collect();
    Ok(json!({
        "config": cfg,
        "kernel_sha256": kernel_hash,
        "result": serde_json::to_value(value)?,
    }))
}

pub fn write_json<T: Serialize>(path: &Path, config: &RunConfig, kernel_hash: Option<&str>, value: &T) -> Result<()> {
    let doc = json_document(config, kernel_hash, value)?;
    if let Some(dir) = path.parent() {
        fs::create_dir_all(dir)?;
    }
    fs::write(path, serde_json::to_string_pretty(&doc)? + "\n")?;
    Ok(())
}

pub fn write_iteration_log(path: &Path, header: &str, log: &[IterRecord]) -> Result<()> {
    let rows: Vec<Vec<String>> = log
        .iter()
        .map(|r| vec![r.k.to_string(), fmt_f64(r.energy), fmt_f64(r.pohozaev), fmt_f64(r.residual), fmt_f64(r.step)])
        .collect();
    write_csv(path, header, &["k", "J", "P", "residual", "step"], &rows)
}

pub fn write_field(path: &Path, header: &str, grid: &RadialGrid, values: &[f64]) -> Result<()> {
    let rows: Vec<Vec<f64>> = grid.nodes.iter().zip(values).map(|(r, v)| vec![*r, *v]).collect();
    write_numeric_csv(path, header, &["r", "value"], &rows)
}

/// `u.csv` and `v.csv` in `dir`.
pub fn write_state(dir: &Path, header: &str, state: &StatePair) -> Result<()> {
    write_field(&dir.join("u.csv"), header, &state.grid, &state.u)?;
    write_field(&dir.join("v.csv"), header, &state.grid, &state.v)
}

/// Reads a two-column field CSV, skipping `#` lines and the column row.
pub fn read_field(path: &Path) -> Result<(Vec<f64>, Vec<f64>)> {
    let text = fs::read_to_string(path)?;
    let mut r = Vec::new();
    let mut f = Vec::new();
    let mut seen_columns = false;
    for (n, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        if !seen_columns {
            seen_columns = true;
            continue;
        }
        let bad = || Error::Parse(format!("{}:{}: expected r,value", path.display(), n + 1));
        let (a, b) = line.split_once(',').ok_or_else(bad)?;
        r.push(a.trim().parse().map_err(|_| bad())?);
        f.push(b.trim().parse().map_err(|_| bad())?);
    }
    Ok((r, f))
}

/// Loads `u.csv`/`v.csv`; the nodes must be exactly those of `grid`.
pub fn read_state(dir: &Path, grid: &Arc<RadialGrid>, rho1: f64, rho2: f64) -> Result<StatePair> {
    let (ru, u) = read_field(&dir.join("u.csv"))?;
    let (rv, v) = read_field(&dir.join("v.csv"))?;
    if ru != grid.nodes || rv != grid.nodes {
        return Err(Error::GridMismatch);
    }
    Ok(StatePair::new(grid.clone(), u, v, rho1, rho2))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::radial::GridSpec;

    fn config() -> RunConfig {
        RunConfig::parse("N=3\nalpha=1\np=1.4\nq=1.4\nr1=1.5\nr2=1.5\nR=8\npanels=4\nouter_panels=0\n").unwrap()
    }

    #[test]
    fn state_round_trip_is_exact() {
        let c = config();
        let grid = Arc::new(RadialGrid::new(c.grid));
        let u: Vec<f64> = grid.nodes.iter().map(|r| (-r * r / 3.0).exp()).collect();
        let v: Vec<f64> = grid.nodes.iter().map(|r| 1.0 / (1.0 + r).powf(2.7)).collect();
        let s = StatePair::new(grid.clone(), u, v, 1.0, 1.0);
        let dir = tempfile::tempdir().unwrap();
        write_state(dir.path(), &header_text(&c, Some("abc")), &s).unwrap();
        let back = read_state(dir.path(), &grid, 1.0, 1.0).unwrap();
        assert_eq!(back.u, s.u);
        assert_eq!(back.v, s.v);

        let other = Arc::new(RadialGrid::new(GridSpec { radius: 9.0, ..c.grid }));
        assert!(matches!(read_state(dir.path(), &other, 1.0, 1.0), Err(Error::GridMismatch)));
    }

    #[test]
    fn header_embeds_config_and_hash() {
        let c = config();
        let h = header_text(&c, Some("deadbeef"));
        assert!(h.contains("# p = 7/5\n"));
        assert!(h.contains("# M = 96\n"));
        assert!(h.ends_with("# kernel_sha256 = deadbeef\n"));
        let doc = json_document(&c, Some("deadbeef"), &json!({"x": 1})).unwrap();
        assert_eq!(doc["config"]["r1"], "3/2");
        assert_eq!(doc["kernel_sha256"], "deadbeef");
    }

    #[test]
    fn iteration_log_columns() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("log.csv");
        let log = [IterRecord { k: 0, energy: -0.25, pohozaev: 1e-7, residual: 0.5, step: 0.0 }];
        write_iteration_log(&path, "# x = 1\n", &log).unwrap();
        let text = fs::read_to_string(&path).unwrap();
        assert_eq!(text, "# x = 1\nk,J,P,residual,step\n0,-2.5e-1,1e-7,5e-1,0e0\n");
    }
}
