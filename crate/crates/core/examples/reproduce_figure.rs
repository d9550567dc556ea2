//! Writes the datasets behind one figure.
//!
//!     cargo run --release --example reproduce_figure -- 4 out/fig4

use std::path::PathBuf;

use geotgate::figures::{reproduce_figure, FigureOptions};

fn main() -> geotgate::Result<()> {
    let mut args = std::env::args().skip(1);
    let id: u32 = args.next().and_then(|a| a.parse().ok()).unwrap_or(4);
    let out = PathBuf::from(args.next().unwrap_or_else(|| format!("out/fig{id}")));
    let report = reproduce_figure(id, &out, &FigureOptions { grid: Some(41), ..Default::default() })?;
    for panel in &report.manifest.panels {
        println!("{}", out.join(&panel.file).display());
    }
    if report.failed_cells > 0 {
        eprintln!("{} cells failed", report.failed_cells);
    }
    Ok(())
}
