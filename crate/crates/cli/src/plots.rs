//! SVG figures, each written next to a CSV holding exactly the plotted data.

use std::error::Error as StdError;
use std::path::{Path, PathBuf};

use plotters::prelude::*;

use crate::config::Axis;
use crate::sweep::{Row, SweepResult, TrajectorySample};

type PlotResult<T> = Result<T, Box<dyn StdError + Send + Sync>>;

const SIZE: (u32, u32) = (800, 600);
const PALETTE: [RGBColor; 4] = [RGBColor(31, 119, 180), RGBColor(214, 39, 40), RGBColor(44, 160, 44), RGBColor(148, 103, 189)];

/// Writes all figures for a sweep into `dir` and returns the SVG paths.
/// Nothing is written for an empty table.
pub fn emit_plots(dir: &Path, result: &SweepResult, axis: Axis) -> PlotResult<Vec<PathBuf>> {
    let mut written = Vec::new();
    if result.rows.is_empty() {
        return Ok(written);
    }
    std::fs::create_dir_all(dir)?;
    let (x_name, x_label, x_of): (&str, &str, fn(&Row) -> f64) = match axis {
        Axis::Pump => ("pump_total", "total pump n0 P (1/ps)", |r| r.pump_total),
        Axis::Emitters => ("n0", "emitters n0", |r| f64::from(r.n0)),
    };
    let suffix = match axis {
        Axis::Pump => "pump",
        Axis::Emitters => "emitters",
    };

    let g2 = collect(&result.rows, x_of, |r| r.g2_zero);
    if !g2.is_empty() {
        let stem = dir.join(format!("g2_vs_{suffix}"));
        write_series_csv(&stem.with_extension("csv"), x_name, "g2_zero", &g2)?;
        line_plot(&stem.with_extension("svg"), "g2(0)", x_label, "g2(0)", &g2, false)?;
        written.push(stem.with_extension("svg"));
    }
    let widths = collect(&result.rows, x_of, |r| r.linewidth_fwhm.filter(|w| *w > 0.0));
    if !widths.is_empty() {
        let stem = dir.join(format!("linewidth_vs_{suffix}"));
        write_series_csv(&stem.with_extension("csv"), x_name, "linewidth_fwhm", &widths)?;
        line_plot(&stem.with_extension("svg"), "linewidth", x_label, "FWHM (1/ps)", &widths, true)?;
        written.push(stem.with_extension("svg"));
    }
    for t in &result.trajectories {
        written.extend(trajectory_plots(dir, t)?);
    }
    Ok(written)
}

type Series = Vec<(&'static str, Vec<(f64, f64)>)>;

fn collect(rows: &[Row], x_of: fn(&Row) -> f64, y_of: impl Fn(&Row) -> Option<f64>) -> Series {
    let mut series: Series = Vec::new();
    for r in rows {
        let Some(y) = y_of(r).filter(|y| y.is_finite()) else {
            continue;
        };
        match series.iter_mut().find(|(m, _)| *m == r.method) {
            Some((_, pts)) => pts.push((x_of(r), y)),
            None => series.push((r.method, vec![(x_of(r), y)])),
        }
    }
    series
}

fn write_series_csv(path: &Path, x_name: &str, y_name: &str, series: &Series) -> PlotResult<()> {
    let mut w = csv::Writer::from_path(path)?;
    w.write_record(["method", x_name, y_name])?;
    for (method, pts) in series {
        for (x, y) in pts {
            w.serialize((method, x, y))?;
        }
    }
    w.flush()?;
    Ok(())
}

fn bounds(values: impl Iterator<Item = f64>, log: bool) -> (f64, f64) {
    let (lo, hi) = values.fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| (lo.min(v), hi.max(v)));
    if log {
        let (lo, hi) = if lo < hi { (lo, hi) } else { (lo / 2.0, hi * 2.0) };
        (lo / 1.2, hi * 1.2)
    } else {
        let pad = if hi > lo { 0.05 * (hi - lo) } else { 0.5 * hi.abs().max(1.0) };
        (lo - pad, hi + pad)
    }
}

fn line_plot(path: &Path, title: &str, x_label: &str, y_label: &str, series: &Series, log_y: bool) -> PlotResult<()> {
    let all = || series.iter().flat_map(|(_, p)| p.iter().copied());
    let log_x = all().all(|(x, _)| x > 0.0);
    let (x0, x1) = bounds(all().map(|p| p.0), log_x);
    let (y0, y1) = bounds(all().map(|p| p.1), log_y);
    let root = SVGBackend::new(path, SIZE).into_drawing_area();
    root.fill(&WHITE)?;
    let mut builder = ChartBuilder::on(&root);
    builder
        .caption(title, ("sans-serif", 22))
        .margin(15)
        .x_label_area_size(45)
        .y_label_area_size(70);
    // Every log/linear pairing is a distinct chart type, hence the macro.
    macro_rules! draw {
        ($x:expr, $y:expr) => {{
            let mut chart = builder.build_cartesian_2d($x, $y)?;
            chart.configure_mesh().x_desc(x_label).y_desc(y_label).draw()?;
            for (i, (method, pts)) in series.iter().enumerate() {
                let color = PALETTE[i % PALETTE.len()];
                chart
                    .draw_series(LineSeries::new(pts.iter().copied(), color.stroke_width(2)))?
                    .label(*method)
                    .legend(move |(x, y)| PathElement::new(vec![(x, y), (x + 20, y)], color.stroke_width(2)));
                chart.draw_series(pts.iter().map(|&p| Circle::new(p, 3, color.filled())))?;
            }
            chart
                .configure_series_labels()
                .background_style(WHITE.mix(0.8))
                .border_style(BLACK)
                .draw()?;
        }};
    }
    match (log_x, log_y) {
        (true, true) => draw!((x0..x1).log_scale(), (y0..y1).log_scale()),
        (true, false) => draw!((x0..x1).log_scale(), y0..y1),
        (false, true) => draw!(x0..x1, (y0..y1).log_scale()),
        (false, false) => draw!(x0..x1, y0..y1),
    }
    root.present()?;
    Ok(())
}

fn trajectory_plots(dir: &Path, t: &TrajectorySample) -> PlotResult<Vec<PathBuf>> {
    let tag = format!("point_{:03}", t.point);
    let caption = format!("n0 = {}, P = {} /ps, alpha = {}", t.params.n0, t.params.pump, t.params.alpha);
    let mut out = Vec::new();

    // Phase portrait.
    let stem = dir.join(format!("{tag}_phase_portrait"));
    let mut w = csv::Writer::from_path(stem.with_extension("csv"))?;
    w.write_record(["t_ps", "re_e", "im_e"])?;
    for (time, e) in t.time.iter().zip(&t.field) {
        w.serialize((time, e.re, e.im))?;
    }
    w.flush()?;
    let r = t.field.iter().map(|e| e.norm()).fold(1.0, f64::max) * 1.05;
    {
        let svg = stem.with_extension("svg");
        let root = SVGBackend::new(&svg, (700, 700)).into_drawing_area();
        root.fill(&WHITE)?;
        let mut chart = ChartBuilder::on(&root)
            .caption(format!("field, {caption}"), ("sans-serif", 18))
            .margin(15)
            .x_label_area_size(45)
            .y_label_area_size(60)
            .build_cartesian_2d(-r..r, -r..r)?;
        chart.configure_mesh().x_desc("Re E").y_desc("Im E").draw()?;
        chart.draw_series(t.field.iter().map(|e| Circle::new((e.re, e.im), 1, PALETTE[0].mix(0.4).filled())))?;
        root.present()?;
    }
    out.push(stem.with_extension("svg"));

    // Photon histogram.
    let stem = dir.join(format!("{tag}_histogram"));
    nanolase::export::write_distribution(std::fs::File::create(stem.with_extension("csv"))?, &t.distribution)?;
    let top = t.distribution.iter().copied().fold(0.0, f64::max).max(1e-12) * 1.1;
    {
        let svg = stem.with_extension("svg");
        let root = SVGBackend::new(&svg, SIZE).into_drawing_area();
        root.fill(&WHITE)?;
        let n = t.distribution.len() as f64;
        let mut chart = ChartBuilder::on(&root)
            .caption(format!("photon distribution, {caption}"), ("sans-serif", 18))
            .margin(15)
            .x_label_area_size(45)
            .y_label_area_size(70)
            .build_cartesian_2d(-0.5..n - 0.5, 0.0..top)?;
        chart.configure_mesh().x_desc("photon number n").y_desc("p(n)").draw()?;
        chart.draw_series(t.distribution.iter().enumerate().map(|(k, &p)| {
            let x = k as f64;
            Rectangle::new([(x - 0.4, 0.0), (x + 0.4, p)], PALETTE[0].filled())
        }))?;
        root.present()?;
    }
    out.push(stem.with_extension("svg"));

    // Drift-subtracted real part against time.
    let stem = dir.join(format!("{tag}_field"));
    let mut w = csv::Writer::from_path(stem.with_extension("csv"))?;
    w.write_record(["t_ps", "re_e_detrended", "im_e_detrended"])?;
    for (time, e) in t.time.iter().zip(&t.detrended) {
        w.serialize((time, e.re, e.im))?;
    }
    w.flush()?;
    if let (Some(&t0), Some(&t1)) = (t.time.first(), t.time.last()) {
        let svg = stem.with_extension("svg");
        let root = SVGBackend::new(&svg, (1000, 400)).into_drawing_area();
        root.fill(&WHITE)?;
        let t1 = if t1 > t0 { t1 } else { t0 + 1.0 };
        let mut chart = ChartBuilder::on(&root)
            .caption(format!("Re E, mean drift removed, {caption}"), ("sans-serif", 18))
            .margin(15)
            .x_label_area_size(45)
            .y_label_area_size(60)
            .build_cartesian_2d(t0..t1, -r..r)?;
        chart.configure_mesh().x_desc("t (ps)").y_desc("Re E").draw()?;
        chart.draw_series(LineSeries::new(
            t.time.iter().zip(&t.detrended).map(|(&x, e)| (x, e.re)),
            PALETTE[0].stroke_width(1),
        ))?;
        root.present()?;
        out.push(stem.with_extension("svg"));
    }
    Ok(out)
}
