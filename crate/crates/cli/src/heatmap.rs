//! Renders a phase-diagram CSV as a PNG heatmap.
//!
//! Color runs blue (small RMSE) to red (large) on a log scale; skipped cells
//! are gray. Feature count increases left to right, sample size bottom to
//! top. Cosmetic output only.

use std::collections::BTreeSet;

use anyhow::{bail, Context};
use image::{Rgb, RgbImage};

use crate::HeatmapArgs;

struct Cell {
    m: usize,
    n: usize,
    mean_rmse: f64,
    skipped: bool,
}

pub fn cmd_heatmap(args: HeatmapArgs) -> anyhow::Result<()> {
    let text = std::fs::read_to_string(&args.input)
        .with_context(|| format!("reading {}", args.input.display()))?;
    let mut cells = Vec::new();
    for line in text.lines() {
        let trimmed = line.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') || trimmed.starts_with('m') {
            continue;
        }
        let fields: Vec<&str> = trimmed.split(',').collect();
        if fields.len() < 6 {
            bail!("bad phase row: {trimmed:?}");
        }
        cells.push(Cell {
            m: fields[0].parse().context("m column")?,
            n: fields[1].parse().context("N column")?,
            mean_rmse: fields[2].parse().unwrap_or(f64::NAN),
            skipped: fields[5].trim() == "1",
        });
    }
    if cells.is_empty() {
        bail!("no cells in {}", args.input.display());
    }

    let m_values: Vec<usize> = cells.iter().map(|c| c.m).collect::<BTreeSet<_>>().into_iter().collect();
    let n_values: Vec<usize> = cells.iter().map(|c| c.n).collect::<BTreeSet<_>>().into_iter().collect();

    let finite: Vec<f64> = cells
        .iter()
        .filter(|c| !c.skipped && c.mean_rmse.is_finite() && c.mean_rmse > 0.0)
        .map(|c| c.mean_rmse.ln())
        .collect();
    let (lo, hi) = finite
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &v| (lo.min(v), hi.max(v)));

    let cell_px = args.cell.max(1);
    let mut img = RgbImage::new(n_values.len() as u32 * cell_px, m_values.len() as u32 * cell_px);
    for cell in &cells {
        let col = n_values.iter().position(|&n| n == cell.n).unwrap() as u32;
        // Largest m at the top row.
        let row_from_bottom = m_values.iter().position(|&m| m == cell.m).unwrap() as u32;
        let row = m_values.len() as u32 - 1 - row_from_bottom;
        let color = if cell.skipped || !cell.mean_rmse.is_finite() {
            Rgb([128, 128, 128])
        } else {
            let t = if hi > lo { (cell.mean_rmse.ln() - lo) / (hi - lo) } else { 0.5 };
            lerp_blue_red(t)
        };
        for dy in 0..cell_px {
            for dx in 0..cell_px {
                img.put_pixel(col * cell_px + dx, row * cell_px + dy, color);
            }
        }
    }
    img.save(&args.out).with_context(|| format!("writing {}", args.out.display()))?;
    println!("wrote {}", args.out.display());
    Ok(())
}

fn lerp_blue_red(t: f64) -> Rgb<u8> {
    let t = t.clamp(0.0, 1.0);
    let r = (255.0 * t) as u8;
    let b = (255.0 * (1.0 - t)) as u8;
    let g = (96.0 * (1.0 - (2.0 * t - 1.0).abs())) as u8;
    Rgb([r, g, b])
}
