//! SVG 1.1 figures with delimited-text data twins.
//!
//! Every figure `plots/<name>.svg` is accompanied by `plots/<name>.csv`
//! holding the plotted values together with the pixel coordinates they were
//! drawn at (two decimals, as printed in the SVG).

use std::fmt::Write as _;

use crate::error::Result;
use crate::hclust::{Dendrogram, NodeId, Partition};
use crate::ingest::IndicatorTable;
use crate::pca::{PcaModel, ScoreMatrix};
use crate::report::{csv_field, ArtifactWriter};

/// Heatmap color scale bound on z-scores.
pub const HEATMAP_CLIP: f64 = 3.0;

const PALETTE: [&str; 10] = [
    "#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b", "#e377c2", "#7f7f7f",
    "#bcbd22", "#17becf",
];

pub fn cluster_color(cluster: usize) -> &'static str {
    PALETTE[(cluster.max(1) - 1) % PALETTE.len()]
}

fn px(v: f64) -> String {
    let s = format!("{v:.2}");
    if s == "-0.00" {
        "0.00".into()
    } else {
        s
    }
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
        .replace('"', "&quot;")
}

/// Minimal SVG document builder.
struct Svg {
    width: f64,
    height: f64,
    body: String,
}

impl Svg {
    fn new(width: f64, height: f64, title: &str) -> Self {
        let mut svg = Svg {
            width,
            height,
            body: String::new(),
        };
        svg.rect(0.0, 0.0, width, height, "#ffffff");
        svg.text(width / 2.0, 20.0, title, "middle", 14.0);
        svg
    }

    fn line(&mut self, x1: f64, y1: f64, x2: f64, y2: f64, stroke: &str, width: f64) {
        let _ = writeln!(
            self.body,
            r#"<line x1="{}" y1="{}" x2="{}" y2="{}" stroke="{stroke}" stroke-width="{width}"/>"#,
            px(x1),
            px(y1),
            px(x2),
            px(y2)
        );
    }

    fn dashed(&mut self, x1: f64, y1: f64, x2: f64, y2: f64, stroke: &str) {
        let _ = writeln!(
            self.body,
            r#"<line x1="{}" y1="{}" x2="{}" y2="{}" stroke="{stroke}" stroke-width="1" stroke-dasharray="4,3"/>"#,
            px(x1),
            px(y1),
            px(x2),
            px(y2)
        );
    }

    fn circle(&mut self, cx: f64, cy: f64, r: f64, fill: &str) {
        let _ = writeln!(
            self.body,
            r#"<circle cx="{}" cy="{}" r="{r}" fill="{fill}"/>"#,
            px(cx),
            px(cy)
        );
    }

    fn ring(&mut self, cx: f64, cy: f64, r: f64, stroke: &str) {
        let _ = writeln!(
            self.body,
            r#"<circle cx="{}" cy="{}" r="{}" fill="none" stroke="{stroke}" stroke-width="1"/>"#,
            px(cx),
            px(cy),
            px(r)
        );
    }

    fn rect(&mut self, x: f64, y: f64, w: f64, h: f64, fill: &str) {
        let _ = writeln!(
            self.body,
            r#"<rect x="{}" y="{}" width="{}" height="{}" fill="{fill}"/>"#,
            px(x),
            px(y),
            px(w),
            px(h)
        );
    }

    fn polyline(&mut self, points: &[(f64, f64)], stroke: &str) {
        let pts: Vec<String> = points
            .iter()
            .map(|&(x, y)| format!("{},{}", px(x), px(y)))
            .collect();
        let _ = writeln!(
            self.body,
            r#"<polyline points="{}" fill="none" stroke="{stroke}" stroke-width="1" stroke-opacity="0.7"/>"#,
            pts.join(" ")
        );
    }

    fn text(&mut self, x: f64, y: f64, s: &str, anchor: &str, size: f64) {
        let _ = writeln!(
            self.body,
            r#"<text x="{}" y="{}" font-family="sans-serif" font-size="{size}" text-anchor="{anchor}">{}</text>"#,
            px(x),
            px(y),
            escape(s)
        );
    }

    fn rotated_text(&mut self, x: f64, y: f64, s: &str, size: f64) {
        let _ = writeln!(
            self.body,
            r#"<text x="{0}" y="{1}" font-family="sans-serif" font-size="{size}" text-anchor="end" transform="rotate(-60 {0} {1})">{2}</text>"#,
            px(x),
            px(y),
            escape(s)
        );
    }

    fn finish(self) -> String {
        format!(
            concat!(
                "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n",
                "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"{w}\" height=\"{h}\" viewBox=\"0 0 {w} {h}\">\n",
                "{body}</svg>\n"
            ),
            w = self.width,
            h = self.height,
            body = self.body
        )
    }
}

/// Linear map from a data interval onto a pixel interval.
#[derive(Debug, Clone, Copy)]
struct Axis {
    lo: f64,
    hi: f64,
    px_lo: f64,
    px_hi: f64,
}

impl Axis {
    fn new(lo: f64, hi: f64, px_lo: f64, px_hi: f64) -> Self {
        let (lo, hi) = if hi > lo {
            (lo, hi)
        } else {
            (lo - 1.0, lo + 1.0)
        };
        Axis {
            lo,
            hi,
            px_lo,
            px_hi,
        }
    }

    fn map(&self, v: f64) -> f64 {
        self.px_lo + (v - self.lo) / (self.hi - self.lo) * (self.px_hi - self.px_lo)
    }
}

fn extent(values: impl Iterator<Item = f64>) -> (f64, f64) {
    values.fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| {
        (lo.min(v), hi.max(v))
    })
}

/// A figure and its data twin.
pub struct Figure {
    pub svg: String,
    pub data: String,
}

/// Eigenvalue against component index, with the eigenvalue-1 reference line.
pub fn scree(model: &PcaModel) -> Figure {
    let ev = model.eigenvalues();
    let p = ev.len();
    let (w, h) = (640.0, 420.0);
    let mut svg = Svg::new(w, h, "Scree plot");
    let x = Axis::new(1.0, p as f64, 60.0, w - 30.0);
    let y = Axis::new(0.0, ev[0].max(1.0) * 1.05, h - 50.0, 40.0);
    svg.line(60.0, h - 50.0, w - 30.0, h - 50.0, "#000000", 1.0);
    svg.line(60.0, h - 50.0, 60.0, 40.0, "#000000", 1.0);
    svg.dashed(60.0, y.map(1.0), w - 30.0, y.map(1.0), "#d62728");
    svg.text(w / 2.0, h - 12.0, "Dimension", "middle", 12.0);
    svg.text(16.0, h / 2.0, "Eigenvalue", "start", 12.0);

    let mut data = String::from("dimension,eigenvalue,x,y\n");
    let points: Vec<(f64, f64)> = ev
        .iter()
        .enumerate()
        .map(|(i, &l)| (x.map((i + 1) as f64), y.map(l)))
        .collect();
    svg.polyline(&points, "#1f77b4");
    for (i, (&l, &(cx, cy))) in ev.iter().zip(&points).enumerate() {
        svg.circle(cx, cy, 3.5, "#1f77b4");
        svg.text(cx, h - 35.0, &(i + 1).to_string(), "middle", 10.0);
        let _ = writeln!(data, "Dim.{},{l},{},{}", i + 1, px(cx), px(cy));
    }
    Figure {
        svg: svg.finish(),
        data,
    }
}

/// One polyline per region across the standardized indicators, colored by
/// cluster; regions drawn in `order`.
pub fn parallel_coordinates(
    z: &IndicatorTable,
    part: &Partition,
    order: &[usize],
) -> Result<Figure> {
    let p = z.n_indicators();
    let rows = z.dense_rows()?;
    let (w, h) = (60.0 * p as f64 + 120.0, 460.0);
    let mut svg = Svg::new(w, h, "Parallel coordinates");
    let (lo, hi) = extent(rows.iter().flatten().copied());
    let x = Axis::new(0.0, (p - 1).max(1) as f64, 60.0, w - 60.0);
    let y = Axis::new(lo, hi, h - 110.0, 40.0);
    for j in 0..p {
        let xj = x.map(j as f64);
        svg.line(xj, 40.0, xj, h - 110.0, "#999999", 1.0);
        svg.rotated_text(xj, h - 100.0, &z.indicator_labels()[j], 10.0);
    }
    let mut data = String::from("region,cluster,indicator,z,x,y\n");
    for &i in order {
        let c = part.assignment()[i];
        let pts: Vec<(f64, f64)> = (0..p)
            .map(|j| (x.map(j as f64), y.map(rows[i][j])))
            .collect();
        svg.polyline(&pts, cluster_color(c));
        for (j, &(px_x, px_y)) in pts.iter().enumerate() {
            let _ = writeln!(
                data,
                "{},{c},{},{},{},{}",
                csv_field(&z.region_labels()[i]),
                csv_field(&z.indicator_labels()[j]),
                rows[i][j],
                px(px_x),
                px(px_y)
            );
        }
    }
    Ok(Figure {
        svg: svg.finish(),
        data,
    })
}

/// Diverging blue–white–red color for a z-score clipped to ±[`HEATMAP_CLIP`].
pub fn heat_color(z: f64) -> String {
    let t = z.clamp(-HEATMAP_CLIP, HEATMAP_CLIP) / HEATMAP_CLIP;
    let fade = |full: f64| (255.0 - (255.0 - full) * t.abs()).round() as u8;
    let (r, g, b) = if t < 0.0 {
        (fade(33.0), fade(102.0), fade(172.0))
    } else {
        (fade(178.0), fade(24.0), fade(43.0))
    };
    format!("#{r:02x}{g:02x}{b:02x}")
}

/// Regions × indicators grid of z-scores, rows in `order`.
pub fn heatmap(z: &IndicatorTable, order: &[usize]) -> Result<Figure> {
    let (n, p) = (z.n_regions(), z.n_indicators());
    let rows = z.dense_rows()?;
    let cell_w = 28.0;
    let cell_h = 10.0;
    let (left, top) = (110.0, 40.0);
    let (w, h) = (
        left + cell_w * p as f64 + 20.0,
        top + cell_h * n as f64 + 120.0,
    );
    let mut svg = Svg::new(w, h, "Heatmap (z-scores)");
    let mut data = String::from("row,region,indicator,z,clipped,color,x,y\n");
    for (r, &i) in order.iter().enumerate() {
        let y = top + r as f64 * cell_h;
        svg.text(
            left - 4.0,
            y + cell_h - 1.5,
            &z.region_labels()[i],
            "end",
            8.0,
        );
        for (j, &v) in rows[i].iter().enumerate() {
            let x = left + j as f64 * cell_w;
            let color = heat_color(v);
            svg.rect(x, y, cell_w, cell_h, &color);
            let _ = writeln!(
                data,
                "{},{},{},{v},{},{color},{},{}",
                r + 1,
                csv_field(&z.region_labels()[i]),
                csv_field(&z.indicator_labels()[j]),
                v.clamp(-HEATMAP_CLIP, HEATMAP_CLIP),
                px(x),
                px(y)
            );
        }
    }
    for j in 0..p {
        let x = left + (j as f64 + 0.5) * cell_w;
        svg.rotated_text(
            x,
            top + cell_h * n as f64 + 10.0,
            &z.indicator_labels()[j],
            9.0,
        );
    }
    Ok(Figure {
        svg: svg.finish(),
        data,
    })
}

/// Correlation loadings on the first two components, inside the unit circle.
pub fn loadings_plot(model: &PcaModel) -> Figure {
    let l = model.loadings_for(2);
    let size = 520.0;
    let mut svg = Svg::new(size, size, "Factor loadings (f1, f2)");
    let ax = Axis::new(-1.1, 1.1, 40.0, size - 40.0);
    let ay = Axis::new(-1.1, 1.1, size - 40.0, 40.0);
    let (cx, cy) = (ax.map(0.0), ay.map(0.0));
    svg.ring(cx, cy, ax.map(1.0) - cx, "#999999");
    svg.line(40.0, cy, size - 40.0, cy, "#999999", 1.0);
    svg.line(cx, 40.0, cx, size - 40.0, "#999999", 1.0);
    let mut data = String::from("indicator,f1,f2,x,y\n");
    for (i, label) in l.row_labels.iter().enumerate() {
        let (f1, f2) = (l.entries[(i, 0)], l.entries[(i, 1)]);
        let (x, y) = (ax.map(f1), ay.map(f2));
        svg.line(cx, cy, x, y, "#1f77b4", 1.0);
        svg.circle(x, y, 3.0, "#1f77b4");
        svg.text(x + 4.0, y - 4.0, label, "start", 9.0);
        let _ = writeln!(data, "{},{f1},{f2},{},{}", csv_field(label), px(x), px(y));
    }
    Figure {
        svg: svg.finish(),
        data,
    }
}

/// A loading arrow in score coordinates.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Arrow {
    pub loading: (f64, f64),
    pub tip: (f64, f64),
    /// Direction atan2(f2, f1) of the loading; uniform scaling preserves it.
    pub angle: f64,
}

/// Scales loading arrows by max |score| over both axes divided by max |loading|.
pub fn biplot_arrows(loadings: &[(f64, f64)], scores: &[(f64, f64)]) -> Vec<Arrow> {
    let max_score = scores
        .iter()
        .flat_map(|&(a, b)| [a.abs(), b.abs()])
        .fold(0.0, f64::max);
    let max_loading = loadings
        .iter()
        .flat_map(|&(a, b)| [a.abs(), b.abs()])
        .fold(0.0, f64::max);
    let scale = if max_loading > 0.0 && max_score > 0.0 {
        max_score / max_loading
    } else {
        1.0
    };
    loadings
        .iter()
        .map(|&(a, b)| Arrow {
            loading: (a, b),
            tip: (a * scale, b * scale),
            angle: b.atan2(a),
        })
        .collect()
}

/// Score points with loading arrows overlaid on the first two components.
pub fn biplot(model: &PcaModel, scores: &ScoreMatrix, part: &Partition) -> Figure {
    let l = model.loadings_for(2);
    let pts: Vec<(f64, f64)> = (0..scores.entries.rows())
        .map(|i| (scores.entries[(i, 0)], scores.entries[(i, 1)]))
        .collect();
    let loads: Vec<(f64, f64)> = (0..l.entries.rows())
        .map(|i| (l.entries[(i, 0)], l.entries[(i, 1)]))
        .collect();
    let arrows = biplot_arrows(&loads, &pts);
    let bound = pts
        .iter()
        .chain(arrows.iter().map(|a| &a.tip))
        .flat_map(|&(a, b)| [a.abs(), b.abs()])
        .fold(0.0, f64::max)
        .max(1e-12)
        * 1.1;
    let size = 620.0;
    let mut svg = Svg::new(size, size, "Biplot (f1, f2)");
    let ax = Axis::new(-bound, bound, 40.0, size - 40.0);
    let ay = Axis::new(-bound, bound, size - 40.0, 40.0);
    let (cx, cy) = (ax.map(0.0), ay.map(0.0));
    svg.line(40.0, cy, size - 40.0, cy, "#999999", 1.0);
    svg.line(cx, 40.0, cx, size - 40.0, "#999999", 1.0);

    let mut data = String::from("kind,label,f1,f2,plot_f1,plot_f2,angle,x,y\n");
    for (i, &(a, b)) in pts.iter().enumerate() {
        let (x, y) = (ax.map(a), ay.map(b));
        svg.circle(x, y, 3.0, cluster_color(part.assignment()[i]));
        let _ = writeln!(
            data,
            "score,{},{a},{b},{a},{b},,{},{}",
            csv_field(&scores.row_labels[i]),
            px(x),
            px(y)
        );
    }
    for (arrow, label) in arrows.iter().zip(&l.row_labels) {
        let (x, y) = (ax.map(arrow.tip.0), ay.map(arrow.tip.1));
        svg.line(cx, cy, x, y, "#d62728", 1.2);
        svg.text(x, y, label, "start", 8.0);
        let _ = writeln!(
            data,
            "loading,{},{},{},{},{},{},{},{}",
            csv_field(label),
            arrow.loading.0,
            arrow.loading.1,
            arrow.tip.0,
            arrow.tip.1,
            arrow.angle,
            px(x),
            px(y)
        );
    }
    Figure {
        svg: svg.finish(),
        data,
    }
}

/// Dendrogram with leaves in drawing order and a dashed line at the `k` cut.
pub fn dendrogram_plot(dend: &Dendrogram, title: &str, k: usize) -> Figure {
    let n = dend.n_leaves();
    let order = dend.leaf_order();
    let mut leaf_pos = vec![0.0; n];
    let (w, h) = ((14.0 * n as f64).max(300.0) + 80.0, 460.0);
    let x = Axis::new(0.0, (n - 1).max(1) as f64, 60.0, w - 20.0);
    for (pos, &leaf) in order.iter().enumerate() {
        leaf_pos[leaf] = x.map(pos as f64);
    }
    let top = dend.merges().last().map_or(1.0, |m| m.height);
    let y = Axis::new(0.0, if top > 0.0 { top } else { 1.0 }, h - 110.0, 40.0);
    let mut svg = Svg::new(w, h, title);
    svg.line(50.0, h - 110.0, 50.0, 40.0, "#000000", 1.0);

    let mut node_x = Vec::with_capacity(dend.merges().len());
    let mut node_y = Vec::with_capacity(dend.merges().len());
    let coord = |id: NodeId, nx: &[f64], ny: &[f64]| match id {
        NodeId::Leaf(i) => (leaf_pos[i], y.map(0.0)),
        NodeId::Merge(s) => (nx[s], ny[s]),
    };
    let mut data = String::from("step,left,right,height,size,x_left,x_right,y\n");
    for (s, m) in dend.merges().iter().enumerate() {
        let (xl, yl) = coord(m.left, &node_x, &node_y);
        let (xr, yr) = coord(m.right, &node_x, &node_y);
        let ym = y.map(m.height);
        svg.polyline(&[(xl, yl), (xl, ym), (xr, ym), (xr, yr)], "#333333");
        node_x.push((xl + xr) / 2.0);
        node_y.push(ym);
        let _ = writeln!(
            data,
            "{},{},{},{},{},{},{},{}",
            s + 1,
            m.left,
            m.right,
            m.height,
            m.size,
            px(xl),
            px(xr),
            px(ym)
        );
    }
    let merges = dend.merges();
    if k >= 2 && k <= n && merges.len() >= k - 1 {
        let upper = merges[merges.len() - (k - 1)].height;
        let lower = if merges.len() >= k {
            merges[merges.len() - k].height
        } else {
            0.0
        };
        let yc = y.map((upper + lower) / 2.0);
        svg.dashed(55.0, yc, w - 15.0, yc, "#d62728");
    }
    for (pos, &leaf) in order.iter().enumerate() {
        svg.rotated_text(x.map(pos as f64), h - 100.0, &dend.labels()[leaf], 8.0);
    }
    Figure {
        svg: svg.finish(),
        data,
    }
}

/// Everything needed to draw the full figure set.
pub struct PlotInputs<'a> {
    pub model: &'a PcaModel,
    pub standardized: &'a IndicatorTable,
    /// First two score columns.
    pub scores: &'a ScoreMatrix,
    pub partition: &'a Partition,
    /// Dendrogram whose leaf order sets region order in the heatmap and
    /// parallel coordinates.
    pub region_order: &'a Dendrogram,
    /// (file stem, title, dendrogram, cut k).
    pub dendrograms: Vec<(&'a str, &'a str, &'a Dendrogram, usize)>,
}

/// Writes `plots/<name>.svg` and `plots/<name>.csv` for every figure.
pub fn emit_plots(inputs: &PlotInputs<'_>, out: &mut ArtifactWriter) -> Result<Vec<String>> {
    let order = inputs.region_order.leaf_order();
    let mut figures = vec![
        ("scree", scree(inputs.model)),
        (
            "parallel_coordinates",
            parallel_coordinates(inputs.standardized, inputs.partition, &order)?,
        ),
        ("heatmap", heatmap(inputs.standardized, &order)?),
        ("loadings", loadings_plot(inputs.model)),
        (
            "biplot",
            biplot(inputs.model, inputs.scores, inputs.partition),
        ),
    ];
    for &(stem, title, dend, k) in &inputs.dendrograms {
        figures.push((stem, dendrogram_plot(dend, title, k)));
    }
    let mut names = Vec::with_capacity(figures.len());
    for (name, fig) in figures {
        out.write(&format!("plots/{name}.svg"), &fig.svg)?;
        out.write(&format!("plots/{name}.csv"), &fig.data)?;
        names.push(name.to_string());
    }
    Ok(names)
}
