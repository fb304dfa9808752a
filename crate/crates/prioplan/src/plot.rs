//! SVG charts of a suite summary: one chart per metric and
//! (environment, mode), metric against robot count with standard-error bars.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use anyhow::{anyhow, Result};
use plotters::prelude::*;

use crate::bench::CellSummary;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Metric {
    Coverage,
    Runtime,
    Speedup,
    Messages,
    Prolongation,
}

impl Metric {
    pub const ALL: [Metric; 5] = [Metric::Coverage, Metric::Runtime, Metric::Speedup, Metric::Messages, Metric::Prolongation];

    pub fn name(self) -> &'static str {
        match self {
            Metric::Coverage => "coverage",
            Metric::Runtime => "runtime",
            Metric::Speedup => "speedup",
            Metric::Messages => "messages",
            Metric::Prolongation => "prolongation",
        }
    }

    fn axis(self) -> &'static str {
        match self {
            Metric::Coverage => "solved fraction",
            Metric::Runtime => "time to solution [s]",
            Metric::Speedup => "speed-up",
            Metric::Messages => "broadcasts",
            Metric::Prolongation => "prolongation",
        }
    }

    /// Mean and standard error, if the cell has this metric.
    fn value(self, c: &CellSummary) -> Option<(f64, f64)> {
        match self {
            Metric::Coverage => Some((c.coverage, 0.0)),
            Metric::Runtime => c.runtime_mean.zip(c.runtime_se),
            Metric::Speedup => c.speedup_mean.zip(c.speedup_se),
            Metric::Messages => c.messages_mean.zip(c.messages_se),
            Metric::Prolongation => c.prolongation_mean.zip(c.prolongation_se),
        }
    }
}

type Series = BTreeMap<String, Vec<(usize, f64, f64)>>;

fn series(cells: &[&CellSummary], metric: Metric) -> Series {
    let mut out: Series = BTreeMap::new();
    for c in cells {
        if let Some((m, se)) = metric.value(c) {
            out.entry(c.algorithm.clone()).or_default().push((c.robots, m, se));
        }
    }
    for pts in out.values_mut() {
        pts.sort_by_key(|p| p.0);
    }
    out
}

fn y_range(s: &Series) -> (f64, f64) {
    let lo = s.values().flatten().map(|p| p.1 - p.2).fold(0.0, f64::min);
    let hi = s.values().flatten().map(|p| p.1 + p.2).fold(f64::MIN, f64::max);
    let hi = if hi > lo { hi } else { lo + 1.0 };
    (lo, hi + 0.05 * (hi - lo))
}

fn draw(path: &Path, title: &str, metric: Metric, s: &Series) -> Result<()> {
    let ns: Vec<usize> = {
        let mut v: Vec<usize> = s.values().flatten().map(|p| p.0).collect();
        v.sort();
        v.dedup();
        v
    };
    let (ylo, yhi) = y_range(s);
    let root = SVGBackend::new(path, (720, 480)).into_drawing_area();
    root.fill(&WHITE).map_err(|e| anyhow!("{e}"))?;
    let err = |e: DrawingAreaErrorKind<_>| anyhow!("drawing {}: {e:?}", path.display());
    let algos: Vec<&String> = s.keys().collect();
    if ns.len() == 1 {
        // a single robot count has no trend; compare algorithms side by side
        let k = algos.len();
        let mut chart = ChartBuilder::on(&root)
            .caption(title, ("sans-serif", 20))
            .margin(12)
            .x_label_area_size(40)
            .y_label_area_size(60)
            .build_cartesian_2d(0f64..k as f64, ylo..yhi)
            .map_err(err)?;
        chart
            .configure_mesh()
            .disable_x_mesh()
            .x_labels(k)
            .x_label_formatter(&|x| {
                let i = x.floor() as usize;
                algos.get(i).map(|a| a.to_string()).unwrap_or_default()
            })
            .y_desc(metric.axis())
            .x_desc(format!("n = {}", ns[0]))
            .draw()
            .map_err(err)?;
        for (i, a) in algos.iter().enumerate() {
            let (_, m, se) = s[*a][0];
            let color = Palette99::pick(i).to_rgba();
            let x0 = i as f64 + 0.15;
            let x1 = i as f64 + 0.85;
            chart
                .draw_series(std::iter::once(Rectangle::new([(x0, 0.0), (x1, m)], color.filled())))
                .map_err(err)?;
            chart
                .draw_series(std::iter::once(ErrorBar::new_vertical(i as f64 + 0.5, m - se, m, m + se, BLACK.filled(), 8)))
                .map_err(err)?;
        }
    } else {
        let (xlo, xhi) = (ns[0] as f64 - 0.5, ns[ns.len() - 1] as f64 + 0.5);
        let mut chart = ChartBuilder::on(&root)
            .caption(title, ("sans-serif", 20))
            .margin(12)
            .x_label_area_size(40)
            .y_label_area_size(60)
            .build_cartesian_2d(xlo..xhi, ylo..yhi)
            .map_err(err)?;
        chart
            .configure_mesh()
            .x_desc("robots")
            .y_desc(metric.axis())
            .draw()
            .map_err(err)?;
        for (i, a) in algos.iter().enumerate() {
            let pts = &s[*a];
            let color = Palette99::pick(i).to_rgba();
            chart
                .draw_series(LineSeries::new(pts.iter().map(|p| (p.0 as f64, p.1)), color.stroke_width(2)))
                .map_err(err)?
                .label(a.as_str())
                .legend(move |(x, y)| PathElement::new(vec![(x, y), (x + 16, y)], color.stroke_width(2)));
            chart
                .draw_series(pts.iter().map(|p| ErrorBar::new_vertical(p.0 as f64, p.1 - p.2, p.1, p.1 + p.2, color.filled(), 6)))
                .map_err(err)?;
        }
        chart
            .configure_series_labels()
            .background_style(WHITE.mix(0.8))
            .border_style(BLACK)
            .draw()
            .map_err(err)?;
    }
    root.present().map_err(|e| anyhow!("{e}"))?;
    Ok(())
}

/// Writes `<env>_<mode>_<metric>.svg` files into `out`; returns the paths.
/// Metrics that no algorithm reports in a group are skipped with a note.
pub fn plot_summary(summary: &[CellSummary], out: &Path) -> Result<Vec<PathBuf>> {
    std::fs::create_dir_all(out)?;
    let mut groups: BTreeMap<(String, String), Vec<&CellSummary>> = BTreeMap::new();
    for c in summary {
        groups.entry((c.environment.clone(), c.mode.clone())).or_default().push(c);
    }
    let mut written = Vec::new();
    for ((env, mode), cells) in groups {
        for metric in Metric::ALL {
            let s = series(&cells, metric);
            if s.is_empty() {
                log::info!("{env}/{mode}: no {} values, chart omitted", metric.name());
                continue;
            }
            let path = out.join(format!("{env}_{mode}_{}.svg", metric.name()));
            draw(&path, &format!("{env}, {mode}: {}", metric.name()), metric, &s)?;
            written.push(path);
        }
    }
    Ok(written)
}
