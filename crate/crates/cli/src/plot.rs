//! Learning-curve figures: one standalone SVG per (sequence, strategy),
//! showing each task's test accuracy across the whole training run for the
//! best seed.

use std::fmt::Write as FmtWrite;
use std::path::{Path, PathBuf};

use crate::csv::{read_curves, read_summary, CurveRow, CURVES_FILE, SUMMARY_FILE};
use crate::error::{CliError, Result};
use crate::report::summarize;

const WIDTH: f64 = 800.0;
const HEIGHT: f64 = 500.0;
const LEFT: f64 = 60.0;
const RIGHT: f64 = 650.0;
const TOP: f64 = 45.0;
const BOTTOM: f64 = 455.0;

/// Fixed per-task palette (task id 1..6).
const COLORS: [&str; 6] = ["#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd", "#8c564b"];

/// `plot --in DIR --out DIR2`: emit one SVG per (sequence, strategy) found in
/// the run outputs, using each pair's best seed. Returns the written paths.
pub fn cmd_plot(input_dir: &Path, out_dir: &Path) -> Result<Vec<PathBuf>> {
    let summary_rows = read_summary(&input_dir.join(SUMMARY_FILE))?;
    let curve_rows = read_curves(&input_dir.join(CURVES_FILE))?;
    let summaries = summarize(&summary_rows)?;
    std::fs::create_dir_all(out_dir).map_err(|e| CliError::Data(e.to_string()))?;

    let mut written = Vec::new();
    for group in &summaries {
        let seed = group.best_seed().seed;
        let rows: Vec<&CurveRow> = curve_rows
            .iter()
            .filter(|r| {
                r.sequence == group.sequence && r.strategy == group.strategy && r.seed == seed
            })
            .collect();
        if rows.is_empty() {
            continue;
        }
        let svg = render_curves(&group.sequence, &group.strategy, seed, &rows);
        let path = out_dir.join(format!("curves_{}_{}.svg", group.sequence, group.strategy));
        std::fs::write(&path, svg).map_err(|e| CliError::Data(e.to_string()))?;
        written.push(path);
    }
    if written.is_empty() {
        return Err(CliError::Data("no curve data to plot".into()));
    }
    Ok(written)
}

fn render_curves(sequence: &str, strategy: &str, seed: u64, rows: &[&CurveRow]) -> String {
    let max_iter = rows.iter().map(|r| r.iteration).max().unwrap_or(1).max(1);
    let n_epochs = rows.iter().map(|r| r.epoch).max().unwrap_or(1).max(1);

    let x = |iter: f64| LEFT + (RIGHT - LEFT) * iter / max_iter as f64;
    let y = |acc: f64| BOTTOM - (BOTTOM - TOP) * acc;

    let mut svg = String::new();
    let _ = writeln!(
        svg,
        r#"<svg xmlns="http://www.w3.org/2000/svg" viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="13">"#
    );
    let _ = writeln!(svg, r#"<rect width="{WIDTH}" height="{HEIGHT}" fill="white"/>"#);
    let _ = writeln!(
        svg,
        r#"<text x="{LEFT}" y="24" font-size="16">{strategy} — sequence {sequence} (seed {seed})</text>"#
    );

    // horizontal gridlines and y labels
    for k in 0..=4 {
        let acc = k as f64 * 0.25;
        let yy = y(acc);
        let _ = writeln!(
            svg,
            r##"<line x1="{LEFT}" y1="{yy:.2}" x2="{RIGHT}" y2="{yy:.2}" stroke="#dddddd"/>"##
        );
        let _ = writeln!(
            svg,
            r#"<text x="{:.2}" y="{:.2}" text-anchor="end">{acc:.2}</text>"#,
            LEFT - 8.0,
            yy + 4.0
        );
    }
    // epoch boundaries
    let per_epoch = max_iter as f64 / n_epochs as f64;
    for e in 0..=n_epochs {
        let xx = x(e as f64 * per_epoch);
        let _ = writeln!(
            svg,
            r##"<line x1="{xx:.2}" y1="{TOP}" x2="{xx:.2}" y2="{BOTTOM}" stroke="#eeeeee"/>"##
        );
        if e < n_epochs {
            let mid = x((e as f64 + 0.5) * per_epoch);
            let _ = writeln!(
                svg,
                r#"<text x="{mid:.2}" y="{:.2}" text-anchor="middle">{}</text>"#,
                BOTTOM + 18.0,
                e + 1
            );
        }
    }
    let _ = writeln!(
        svg,
        r#"<text x="{:.2}" y="{:.2}" text-anchor="middle">epoch</text>"#,
        (LEFT + RIGHT) / 2.0,
        BOTTOM + 38.0
    );
    let _ = writeln!(
        svg,
        r#"<text x="18" y="{:.2}" transform="rotate(-90 18 {:.2})" text-anchor="middle">test accuracy</text>"#,
        (TOP + BOTTOM) / 2.0,
        (TOP + BOTTOM) / 2.0
    );
    let _ = writeln!(
        svg,
        r##"<rect x="{LEFT}" y="{TOP}" width="{:.2}" height="{:.2}" fill="none" stroke="#444444"/>"##,
        RIGHT - LEFT,
        BOTTOM - TOP
    );

    // one polyline per task, legend entries in task order
    let mut task_ids: Vec<u8> = rows.iter().map(|r| r.task_id).collect();
    task_ids.sort_unstable();
    task_ids.dedup();
    for (slot, task_id) in task_ids.iter().enumerate() {
        let color = COLORS[(*task_id as usize - 1) % COLORS.len()];
        let mut points = String::new();
        for r in rows.iter().filter(|r| r.task_id == *task_id) {
            let _ = write!(points, "{:.2},{:.2} ", x(r.iteration as f64), y(r.accuracy));
        }
        let _ = writeln!(
            svg,
            r#"<polyline points="{}" fill="none" stroke="{color}" stroke-width="1.5"/>"#,
            points.trim_end()
        );
        let ly = TOP + 10.0 + slot as f64 * 22.0;
        let _ = writeln!(
            svg,
            r#"<line x1="{:.2}" y1="{ly:.2}" x2="{:.2}" y2="{ly:.2}" stroke="{color}" stroke-width="2"/>"#,
            RIGHT + 14.0,
            RIGHT + 44.0
        );
        let _ = writeln!(
            svg,
            r#"<text x="{:.2}" y="{:.2}">task {task_id}</text>"#,
            RIGHT + 50.0,
            ly + 4.0
        );
    }
    svg.push_str("</svg>\n");
    svg
}
