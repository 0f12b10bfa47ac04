//! Writes the on-disk artifacts of a sweep: records CSV, summary CSV, their
//! metadata sidecars and one SVG per split.
//!
//!     cargo run --release --example report_and_plot [out_dir]

use std::path::PathBuf;

use rfm::presets::{run_metadata, Overrides, Preset};
use rfm::report::{self, Metadata, PlotOptions};
use rfm::sweep::{run_experiment, summarize_all, SplitKind};

fn main() -> rfm::Result<()> {
    let dir = PathBuf::from(std::env::args().nth(1).unwrap_or_else(|| "sweep-out".into()));
    std::fs::create_dir_all(&dir)?;

    let o = Overrides {
        n: Some(100),
        reps: Some(3),
        sigma: Some(0.01),
        d_step_fine: Some(4),
        d_step_coarse: Some(10),
        ..Overrides::default()
    };
    let specs = Preset::Noise.specs(&o)?;
    let mut records = Vec::new();
    for spec in &specs {
        records.extend(run_experiment(spec)?);
    }
    let records_path = dir.join("records.csv");
    report::write_records_file(&records_path, &records)?;
    run_metadata(Some(Preset::Noise), &specs).write_file(&report::sidecar_path(&records_path))?;

    let summary = summarize_all(&records)?;
    let summary_path = dir.join("summary.csv");
    report::write_summary_file(&summary_path, &summary)?;
    let mut meta = Metadata::new();
    meta.set("source", records_path.display());
    meta.write_file(&report::sidecar_path(&summary_path))?;

    for exp in report::experiments(&summary) {
        for split in [SplitKind::Train, SplitKind::Test] {
            let svg = report::render_svg(&summary, &exp, split, &PlotOptions::default(), &meta)?;
            let path = dir.join(format!("{exp}_{}.svg", split.as_str()));
            std::fs::write(&path, svg)?;
            println!("wrote {}", path.display());
        }
    }
    println!("wrote {} records and {} summary rows under {}", records.len(), summary.len(), dir.display());
    Ok(())
}
