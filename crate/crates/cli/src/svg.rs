//! Minimal hand-written SVG charts: calibration panels and sweep curves.
//! Output is a pure function of the input, so files are byte-reproducible.

use std::fmt::Write;

use ipw_eval::deployment::SweepRow;
use ipw_eval::experiments::ScenarioResult;
use ipw_eval::summary::Estimator;

const WIDTH: f64 = 420.0;
const HEIGHT: f64 = 360.0;
const MARGIN_LEFT: f64 = 60.0;
const MARGIN_RIGHT: f64 = 20.0;
const MARGIN_TOP: f64 = 36.0;
const MARGIN_BOTTOM: f64 = 50.0;

fn color(e: Estimator) -> &'static str {
    match e {
        Estimator::Actual => "#2ca02c",
        Estimator::Observed => "#d62728",
        Estimator::Weighted => "#1f77b4",
    }
}

/// Maps data coordinates into one plotting panel.
struct Panel {
    x0: f64,
    y0: f64,
    x_range: (f64, f64),
    y_range: (f64, f64),
    x_log: bool,
}

impl Panel {
    fn plot_w(&self) -> f64 {
        WIDTH - MARGIN_LEFT - MARGIN_RIGHT
    }

    fn plot_h(&self) -> f64 {
        HEIGHT - MARGIN_TOP - MARGIN_BOTTOM
    }

    fn tx(&self, x: f64) -> f64 {
        let (a, b) = self.x_range;
        let f = if self.x_log {
            (x.log10() - a.log10()) / (b.log10() - a.log10())
        } else {
            (x - a) / (b - a)
        };
        self.x0 + MARGIN_LEFT + f * self.plot_w()
    }

    fn ty(&self, y: f64) -> f64 {
        let (a, b) = self.y_range;
        self.y0 + MARGIN_TOP + (1.0 - (y - a) / (b - a)) * self.plot_h()
    }

    fn frame(&self, out: &mut String, title: &str, x_label: &str, y_label: &str, x_ticks: &[f64]) {
        let left = self.x0 + MARGIN_LEFT;
        let top = self.y0 + MARGIN_TOP;
        let (w, h) = (self.plot_w(), self.plot_h());
        let _ = writeln!(
            out,
            r##"<rect x="{left:.2}" y="{top:.2}" width="{w:.2}" height="{h:.2}" fill="none" stroke="#333"/>"##
        );
        let _ = writeln!(
            out,
            r#"<text x="{:.2}" y="{:.2}" text-anchor="middle" font-size="14">{}</text>"#,
            left + w / 2.0,
            self.y0 + 22.0,
            escape(title)
        );
        let _ = writeln!(
            out,
            r#"<text x="{:.2}" y="{:.2}" text-anchor="middle" font-size="12">{}</text>"#,
            left + w / 2.0,
            top + h + 38.0,
            escape(x_label)
        );
        let (yx, yy) = (self.x0 + 16.0, top + h / 2.0);
        let _ = writeln!(
            out,
            r#"<text x="{yx:.2}" y="{yy:.2}" text-anchor="middle" font-size="12" transform="rotate(-90 {yx:.2} {yy:.2})">{}</text>"#,
            escape(y_label)
        );
        for &t in x_ticks {
            let x = self.tx(t);
            let _ = writeln!(
                out,
                r##"<line x1="{x:.2}" y1="{:.2}" x2="{x:.2}" y2="{:.2}" stroke="#333"/><text x="{x:.2}" y="{:.2}" text-anchor="middle" font-size="10">{t}</text>"##,
                top + h,
                top + h + 4.0,
                top + h + 16.0
            );
        }
        let (ya, yb) = self.y_range;
        for k in 0..=5 {
            let v = ya + (yb - ya) * k as f64 / 5.0;
            let y = self.ty(v);
            let _ = writeln!(
                out,
                r##"<line x1="{:.2}" y1="{y:.2}" x2="{left:.2}" y2="{y:.2}" stroke="#333"/><text x="{:.2}" y="{:.2}" text-anchor="end" font-size="10">{v:.2}</text>"##,
                left - 4.0,
                left - 6.0,
                y + 3.0
            );
        }
    }

    fn polyline(&self, out: &mut String, points: &[(f64, f64)], stroke: &str, dashed: bool) {
        if points.is_empty() {
            return;
        }
        let coords: Vec<String> = points
            .iter()
            .map(|&(x, y)| format!("{:.2},{:.2}", self.tx(x), self.ty(y)))
            .collect();
        let dash = if dashed {
            r#" stroke-dasharray="4 3""#
        } else {
            ""
        };
        let _ = writeln!(
            out,
            r#"<polyline points="{}" fill="none" stroke="{stroke}" stroke-width="1.5"{dash}/>"#,
            coords.join(" ")
        );
    }

    /// Shaded band between `lo` and `hi` over the given x values.
    fn band(&self, out: &mut String, points: &[(f64, f64, f64)], fill: &str) {
        if points.len() < 2 {
            return;
        }
        let mut coords: Vec<String> = points
            .iter()
            .map(|&(x, _, hi)| format!("{:.2},{:.2}", self.tx(x), self.ty(hi)))
            .collect();
        coords.extend(
            points
                .iter()
                .rev()
                .map(|&(x, lo, _)| format!("{:.2},{:.2}", self.tx(x), self.ty(lo))),
        );
        let _ = writeln!(
            out,
            r#"<polygon points="{}" fill="{fill}" fill-opacity="0.2" stroke="none"/>"#,
            coords.join(" ")
        );
    }

    fn error_bar(&self, out: &mut String, x: f64, y: f64, lo: f64, hi: f64, stroke: &str) {
        let (px, py) = (self.tx(x), self.ty(y));
        let _ = writeln!(
            out,
            r#"<line x1="{px:.2}" y1="{:.2}" x2="{px:.2}" y2="{:.2}" stroke="{stroke}"/><circle cx="{px:.2}" cy="{py:.2}" r="3" fill="{stroke}"/>"#,
            self.ty(lo),
            self.ty(hi)
        );
    }

    fn legend(&self, out: &mut String, entries: &[Estimator]) {
        for (i, &e) in entries.iter().enumerate() {
            let x = self.x0 + MARGIN_LEFT + 10.0;
            let y = self.y0 + MARGIN_TOP + 14.0 + 14.0 * i as f64;
            let _ = writeln!(
                out,
                r#"<rect x="{x:.2}" y="{:.2}" width="10" height="10" fill="{}"/><text x="{:.2}" y="{y:.2}" font-size="11">{}</text>"#,
                y - 9.0,
                color(e),
                x + 14.0,
                e.display_name()
            );
        }
    }
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
}

fn document(width: f64, height: f64, body: &str) -> String {
    format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{width}\" height=\"{height}\" viewBox=\"0 0 {width} {height}\">\n<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n{body}</svg>\n"
    )
}

/// Reliability diagram for one scenario: observed and weighted bin prevalence
/// with replicate intervals against the diagonal.
pub fn calibration_panel(result: &ScenarioResult) -> String {
    let panel = Panel {
        x0: 0.0,
        y0: 0.0,
        x_range: (0.0, 1.0),
        y_range: (0.0, 1.0),
        x_log: false,
    };
    let mut body = String::new();
    panel.frame(
        &mut body,
        &format!("Calibration: {}", result.spec.scenario.name()),
        "Predicted probability",
        "Observed prevalence",
        &[0.0, 0.2, 0.4, 0.6, 0.8, 1.0],
    );
    panel.polyline(&mut body, &[(0.0, 0.0), (1.0, 1.0)], "#888", true);
    let shown = [Estimator::Observed, Estimator::Weighted];
    for e in shown {
        let Some(cal) = result.calibration_for(e) else {
            continue;
        };
        let mut line = Vec::new();
        for b in &cal.bins {
            if let (Some(x), Some(i)) = (b.mean_pred, b.prevalence.interval) {
                panel.error_bar(&mut body, x, i.mean, i.lo, i.hi, color(e));
                line.push((x, i.mean));
            }
        }
        panel.polyline(&mut body, &line, color(e), false);
    }
    panel.legend(&mut body, &shown);
    document(WIDTH, HEIGHT, &body)
}

fn sweep_panel(
    body: &mut String,
    panel: &Panel,
    rows: &[SweepRow],
    title: &str,
    x_label: &str,
    ticks: &[f64],
) {
    panel.frame(body, title, x_label, "AUROC", ticks);
    for e in Estimator::ALL {
        let pts: Vec<(f64, f64, f64)> = rows
            .iter()
            .filter_map(|r| r.estimate(e).interval.map(|i| (r.param_value, i.lo, i.hi)))
            .collect();
        panel.band(body, &pts, color(e));
        let line: Vec<(f64, f64)> = rows
            .iter()
            .filter_map(|r| r.estimate(e).interval.map(|i| (r.param_value, i.mean)))
            .collect();
        if line.len() == 1 {
            let r = &rows[0];
            if let Some(i) = r.estimate(e).interval {
                panel.error_bar(body, r.param_value, i.mean, i.lo, i.hi, color(e));
            }
        }
        panel.polyline(body, &line, color(e), false);
    }
    panel.legend(body, &Estimator::ALL);
}

fn y_range(rows: &[SweepRow]) -> (f64, f64) {
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for r in rows {
        for e in Estimator::ALL {
            if let Some(i) = r.estimate(e).interval {
                lo = lo.min(i.lo);
                hi = hi.max(i.hi);
            }
        }
    }
    if !lo.is_finite() {
        return (0.0, 1.0);
    }
    let lo = ((lo - 0.02) * 20.0).floor() / 20.0;
    let hi = ((hi + 0.02) * 20.0).ceil() / 20.0;
    (lo.max(0.0), hi.min(1.0).max(lo + 0.05))
}

fn x_range(rows: &[SweepRow], log: bool) -> (f64, f64) {
    let (mut a, mut b) = rows
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), r| {
            (a.min(r.param_value), b.max(r.param_value))
        });
    if !a.is_finite() || a == b {
        let v = if a.is_finite() { a } else { 0.5 };
        if log {
            (a, b) = (v / 2.0, (v * 2.0).min(1.0));
        } else {
            (a, b) = (v - 0.05, v + 0.05);
        }
    }
    // Plot high to low, matching the sweep direction.
    (b, a)
}

/// Two stacked panels: AUROC against the alert threshold, and against the
/// withholding probability (log axis), each with three estimator curves and
/// 95% bands.
pub fn sweep_figure(pt_rows: &[SweepRow], withhold_rows: &[SweepRow]) -> String {
    let mut body = String::new();
    let top = Panel {
        x0: 0.0,
        y0: 0.0,
        x_range: x_range(pt_rows, false),
        y_range: y_range(pt_rows),
        x_log: false,
    };
    sweep_panel(
        &mut body,
        &top,
        pt_rows,
        "AUROC vs alert threshold",
        "p_t",
        &[0.5, 0.6, 0.7, 0.8, 0.9, 1.0],
    );
    let bottom = Panel {
        x0: 0.0,
        y0: HEIGHT,
        x_range: x_range(withhold_rows, true),
        y_range: y_range(withhold_rows),
        x_log: true,
    };
    let (hi, lo) = bottom.x_range;
    let ticks: Vec<f64> = [0.001, 0.01, 0.1, 1.0]
        .into_iter()
        .filter(|&t| t >= lo - 1e-12 && t <= hi + 1e-12)
        .collect();
    sweep_panel(
        &mut body,
        &bottom,
        withhold_rows,
        "AUROC vs withholding probability",
        "p_withhold (log scale)",
        &ticks,
    );
    document(WIDTH, 2.0 * HEIGHT, &body)
}

#[cfg(test)]
mod tests {
    use super::*;
    use ipw_eval::deployment::SweptParam;
    use ipw_eval::summary::{EstimateSummary, PointInterval};

    fn row(param: SweptParam, v: f64, mean: f64) -> SweepRow {
        let s = EstimateSummary {
            interval: Some(PointInterval {
                mean,
                lo: mean - 0.01,
                hi: mean + 0.01,
            }),
            n_undefined: 0,
            n_reps: 10,
        };
        SweepRow {
            swept_param: param,
            param_value: v,
            p_t: 0.9,
            p_withhold: 0.05,
            actual: s,
            observed: s,
            weighted: s,
            mean_observed_fraction: 0.5,
        }
    }

    #[test]
    fn sweep_figure_is_wellformed_and_deterministic() {
        let pt = vec![row(SweptParam::PT, 0.9, 0.8), row(SweptParam::PT, 0.7, 0.7)];
        let pw = vec![
            row(SweptParam::PWithhold, 0.5, 0.8),
            row(SweptParam::PWithhold, 0.01, 0.7),
        ];
        let a = sweep_figure(&pt, &pw);
        assert!(a.starts_with("<svg") && a.trim_end().ends_with("</svg>"));
        assert_eq!(a.matches("<polygon").count(), 6);
        assert!(!a.contains("NaN") && !a.contains("inf"));
        assert_eq!(a, sweep_figure(&pt, &pw));
    }

    #[test]
    fn single_point_sweep_renders() {
        let pt = vec![row(SweptParam::PT, 0.9, 0.8)];
        let pw = vec![row(SweptParam::PWithhold, 1.0, 0.8)];
        let s = sweep_figure(&pt, &pw);
        assert!(!s.contains("NaN") && !s.contains("inf"));
        assert!(s.contains("<circle"));
    }
}
