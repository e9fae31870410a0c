//! Scene assembly and deterministic SVG emission.
//!
//! The scene is an ordered draw list in canvas coordinates. Ink is layered
//! so highlights are never occluded: all default-color polygons (connectors,
//! then bars) come first, then every highlight stratum grouped by color
//! index, then separator lines, then text.

use std::fmt::Write as _;

use thiserror::Error;

use crate::connectors::{stratify, Connector, ConnectorError};
use crate::dataset::Dataset;
use crate::layout::{AxisScale, LabelFormat, Layout, PlotSpec};

#[derive(Debug, Error)]
pub enum RenderError {
    #[error("cannot parse color '{0}'")]
    BadColor(String),
    #[error("annotation x = {x} outside the axis range [1, {k}]")]
    AnnotationXOutOfRange { x: f64, k: usize },
    #[error("annotation y = {y} outside [0, 100]")]
    AnnotationYOutOfRange { y: f64 },
    #[error(transparent)]
    Connector(#[from] ConnectorError),
}

/// RGBA color parsed from a spec string: a named color (including the
/// grayscale ramp gs0..gs16) or an "R G B" triple, with an optional "%NN"
/// opacity suffix.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Color {
    pub r: u8,
    pub g: u8,
    pub b: u8,
    pub alpha: f64,
}

impl Color {
    pub const fn opaque(r: u8, g: u8, b: u8) -> Color {
        Color { r, g, b, alpha: 1.0 }
    }

    pub fn parse(spec: &str) -> Result<Color, RenderError> {
        let bad = || RenderError::BadColor(spec.to_string());
        let spec_trim = spec.trim();
        let (body, alpha) = match spec_trim.rsplit_once('%') {
            Some((body, pct)) => {
                let pct: f64 = pct.trim().parse().map_err(|_| bad())?;
                if !(0.0..=100.0).contains(&pct) {
                    return Err(bad());
                }
                (body.trim(), pct / 100.0)
            }
            None => (spec_trim, 1.0),
        };
        let mut base = if body.contains(char::is_whitespace) {
            let parts: Vec<&str> = body.split_whitespace().collect();
            if parts.len() != 3 {
                return Err(bad());
            }
            let mut rgb = [0u8; 3];
            for (slot, part) in rgb.iter_mut().zip(&parts) {
                *slot = part.parse().map_err(|_| bad())?;
            }
            Color::opaque(rgb[0], rgb[1], rgb[2])
        } else {
            named_color(body).ok_or_else(bad)?
        };
        base.alpha = alpha;
        Ok(base)
    }

    pub fn hex(&self) -> String {
        format!("#{:02x}{:02x}{:02x}", self.r, self.g, self.b)
    }
}

fn named_color(name: &str) -> Option<Color> {
    if let Some(level) = name.strip_prefix("gs") {
        let level: u32 = level.parse().ok()?;
        if level > 16 {
            return None;
        }
        let v = ((level * 255 + 8) / 16).min(255) as u8;
        return Some(Color::opaque(v, v, v));
    }
    let rgb = match name {
        "black" => (0, 0, 0),
        "white" => (255, 255, 255),
        "red" => (255, 0, 0),
        "green" => (0, 128, 0),
        "blue" => (0, 0, 255),
        "yellow" => (255, 255, 0),
        "orange" => (255, 165, 0),
        "magenta" => (255, 0, 255),
        "cyan" => (0, 255, 255),
        "purple" => (128, 0, 128),
        "pink" => (255, 192, 203),
        "brown" => (150, 75, 0),
        "navy" => (0, 0, 128),
        "maroon" => (128, 0, 0),
        "olive" => (128, 128, 0),
        "teal" => (0, 128, 128),
        "lime" => (0, 255, 0),
        "gray" | "grey" => (128, 128, 128),
        "gold" => (255, 215, 0),
        "silver" => (192, 192, 192),
        _ => return None,
    };
    Some(Color::opaque(rgb.0, rgb.1, rgb.2))
}

/// Parse the colorlist: position 0 is the default ink, position i the color
/// of hival i.
pub fn resolve_colors(colorlist: &[String]) -> Result<Vec<Color>, RenderError> {
    colorlist.iter().map(|s| Color::parse(s)).collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Anchor {
    Start,
    Middle,
    End,
}

impl Anchor {
    fn svg(&self) -> &'static str {
        match self {
            Anchor::Start => "start",
            Anchor::Middle => "middle",
            Anchor::End => "end",
        }
    }
}

#[derive(Debug, Clone)]
pub enum Primitive {
    Polygon {
        points: Vec<(f64, f64)>,
        color: Color,
        class: String,
    },
    Line {
        from: (f64, f64),
        to: (f64, f64),
        color: Color,
        width: f64,
        dashed: bool,
        class: String,
    },
    Text {
        pos: (f64, f64),
        content: String,
        size: f64,
        anchor: Anchor,
        class: String,
    },
}

/// Ordered draw list in canvas coordinates.
#[derive(Debug, Clone)]
pub struct Scene {
    pub width: f64,
    pub height: f64,
    pub primitives: Vec<Primitive>,
}

// canonical-space staging item: polygon plus the stratum color driving the
// global draw order
struct InkPolygon {
    color_index: usize,
    points: Vec<(f64, f64)>,
    class: String,
}

struct InkLine {
    color_index: usize,
    from: (f64, f64),
    to: (f64, f64),
    class: String,
}

/// Assemble the scene: connector polygons, univariate bars (unless
/// nounibar), ylines, axis labels (unless nolabel), and annotations, then
/// map everything from canonical space onto the canvas.
pub fn build_scene(
    ds: &Dataset,
    layout: &Layout,
    connectors: &[Connector],
    spec: &PlotSpec,
    colors: &[Color],
) -> Result<Scene, RenderError> {
    let k = layout.k();
    for ann in &spec.annotations {
        if !(1.0..=k as f64).contains(&ann.x) {
            return Err(RenderError::AnnotationXOutOfRange { x: ann.x, k });
        }
        if !(0.0..=100.0).contains(&ann.y) {
            return Err(RenderError::AnnotationYOutOfRange { y: ann.y });
        }
    }

    let mut conn_ink: Vec<InkPolygon> = Vec::new();
    for conn in connectors {
        for poly in &conn.polygons {
            conn_ink.push(InkPolygon {
                color_index: poly.color_index,
                points: poly.corners.to_vec(),
                class: format!("connector s{}", poly.color_index),
            });
        }
    }

    let mut bar_ink: Vec<InkPolygon> = Vec::new();
    let mut bar_lines: Vec<InkLine> = Vec::new();
    if !spec.nounibar {
        let hivar = match &spec.hivar {
            Some(name) => Some(ds.column(name).map_err(ConnectorError::from)?),
            None => None,
        };
        for (axis, xpos) in layout.axes.iter().zip(&layout.x_positions) {
            for band in axis.all_bands() {
                let strata = match hivar {
                    Some(col) => stratify(&band.rows, col, &spec.hivals)?,
                    None => vec![crate::connectors::Stratum {
                        color_index: 0,
                        count: band.count,
                    }],
                };
                let mut class_base = format!("bar a{}", axis.x_index);
                if band.key.is_missing() {
                    class_base.push_str(" missing");
                }
                let (mut y, _) = band.y_extent();
                for stratum in strata {
                    let h = band.bar_height * stratum.count as f64 / band.count as f64;
                    let class = format!("{class_base} s{}", stratum.color_index);
                    if xpos.half_width > 0.0 {
                        bar_ink.push(InkPolygon {
                            color_index: stratum.color_index,
                            points: vec![
                                (xpos.x_center - xpos.half_width, y),
                                (xpos.x_center + xpos.half_width, y),
                                (xpos.x_center + xpos.half_width, y + h),
                                (xpos.x_center - xpos.half_width, y + h),
                            ],
                            class,
                        });
                    } else {
                        bar_lines.push(InkLine {
                            color_index: stratum.color_index,
                            from: (xpos.x_center, y),
                            to: (xpos.x_center, y + h),
                            class,
                        });
                    }
                    y += h;
                }
            }
        }
    }

    let affine = layout.affine;
    let color_of = |idx: usize| colors.get(idx).copied().unwrap_or(Color::opaque(0, 0, 0));
    let mut primitives: Vec<Primitive> = Vec::new();
    let push_polys = |primitives: &mut Vec<Primitive>, want: usize, ink: &[InkPolygon]| {
        for poly in ink.iter().filter(|p| p.color_index == want) {
            primitives.push(Primitive::Polygon {
                points: poly.points.iter().map(|(x, y)| affine.to_canvas(*x, *y)).collect(),
                color: color_of(poly.color_index),
                class: poly.class.clone(),
            });
        }
    };
    let push_lines = |primitives: &mut Vec<Primitive>, want: usize, ink: &[InkLine]| {
        for line in ink.iter().filter(|l| l.color_index == want) {
            primitives.push(Primitive::Line {
                from: affine.to_canvas(line.from.0, line.from.1),
                to: affine.to_canvas(line.to.0, line.to.1),
                color: color_of(line.color_index),
                width: 1.0,
                dashed: false,
                class: line.class.clone(),
            });
        }
    };

    // default ink first, then each highlight color on top
    for color_index in 0..colors.len().max(1) {
        push_polys(&mut primitives, color_index, &conn_ink);
        push_polys(&mut primitives, color_index, &bar_ink);
        push_lines(&mut primitives, color_index, &bar_lines);
    }

    for &y in &spec.ylines {
        primitives.push(Primitive::Line {
            from: affine.to_canvas(0.5, y),
            to: affine.to_canvas(k as f64 + 0.5, y),
            color: Color::opaque(0, 0, 0),
            width: 1.0,
            dashed: true,
            class: "yline".to_string(),
        });
    }

    if !spec.nolabel {
        let fmt = LabelFormat::parse(&spec.label_format).expect("validated");
        for (axis, xpos) in layout.axes.iter().zip(&layout.x_positions) {
            let col = ds.column(&axis.var).map_err(ConnectorError::from)?;
            primitives.push(Primitive::Text {
                pos: affine.to_canvas(xpos.x_center, -6.0),
                content: col.label.clone(),
                size: spec.label_size,
                anchor: Anchor::Middle,
                class: "varlabel".to_string(),
            });
            let label_x = xpos.x_center - xpos.half_width - 0.05;
            match &axis.scale {
                AxisScale::Numeric { min, max, y_lo, y_hi } => {
                    if min == max {
                        primitives.push(Primitive::Text {
                            pos: affine.to_canvas(label_x, (y_lo + y_hi) / 2.0),
                            content: fmt.format(*min),
                            size: spec.label_size,
                            anchor: Anchor::End,
                            class: "ticklabel".to_string(),
                        });
                    } else {
                        for (v, y) in [(min, y_lo), (max, y_hi)] {
                            primitives.push(Primitive::Text {
                                pos: affine.to_canvas(label_x, *y),
                                content: fmt.format(*v),
                                size: spec.label_size,
                                anchor: Anchor::End,
                                class: "ticklabel".to_string(),
                            });
                        }
                    }
                }
                AxisScale::Categorical { .. } => {
                    for band in &axis.bands {
                        primitives.push(Primitive::Text {
                            pos: affine.to_canvas(xpos.x_center, band.y_center),
                            content: col.key_label(&band.key),
                            size: spec.label_size,
                            anchor: Anchor::Middle,
                            class: "catlabel".to_string(),
                        });
                    }
                }
            }
        }
    }

    for ann in &spec.annotations {
        primitives.push(Primitive::Text {
            pos: affine.to_canvas(ann.x, ann.y),
            content: ann.text.clone(),
            size: spec.label_size,
            anchor: Anchor::Middle,
            class: "annotation".to_string(),
        });
    }

    Ok(Scene {
        width: spec.canvas.width,
        height: spec.canvas.height,
        primitives,
    })
}

fn fmt3(v: f64) -> String {
    // normalize -0.000 so output never depends on the sign of zero
    let s = format!("{v:.3}");
    if s == "-0.000" {
        "0.000".to_string()
    } else {
        s
    }
}

fn escape_xml(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

fn opacity_attr(kind: &str, alpha: f64) -> String {
    if alpha < 1.0 {
        format!(" {kind}-opacity=\"{}\"", fmt3(alpha))
    } else {
        String::new()
    }
}

/// Serialize the scene as SVG 1.1. Element order equals scene order, all
/// coordinates are printed with fixed 3-decimal formatting, and identical
/// scenes produce byte-identical output.
pub fn emit_svg(scene: &Scene) -> Vec<u8> {
    let mut out = String::new();
    let w = fmt3(scene.width);
    let h = fmt3(scene.height);
    out.push_str("<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n");
    let _ = writeln!(
        out,
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{w}\" height=\"{h}\" viewBox=\"0 0 {w} {h}\">"
    );
    let _ = writeln!(
        out,
        "<rect class=\"background\" x=\"0.000\" y=\"0.000\" width=\"{w}\" height=\"{h}\" fill=\"#ffffff\"/>"
    );
    for prim in &scene.primitives {
        match prim {
            Primitive::Polygon { points, color, class } => {
                let pts: Vec<String> = points
                    .iter()
                    .map(|(x, y)| format!("{},{}", fmt3(*x), fmt3(*y)))
                    .collect();
                let _ = writeln!(
                    out,
                    "<polygon class=\"{class}\" points=\"{}\" fill=\"{}\"{}/>",
                    pts.join(" "),
                    color.hex(),
                    opacity_attr("fill", color.alpha),
                );
            }
            Primitive::Line {
                from,
                to,
                color,
                width,
                dashed,
                class,
            } => {
                let dash = if *dashed { " stroke-dasharray=\"6 4\"" } else { "" };
                let _ = writeln!(
                    out,
                    "<line class=\"{class}\" x1=\"{}\" y1=\"{}\" x2=\"{}\" y2=\"{}\" stroke=\"{}\" stroke-width=\"{}\"{}{}/>",
                    fmt3(from.0),
                    fmt3(from.1),
                    fmt3(to.0),
                    fmt3(to.1),
                    color.hex(),
                    fmt3(*width),
                    opacity_attr("stroke", color.alpha),
                    dash,
                );
            }
            Primitive::Text {
                pos,
                content,
                size,
                anchor,
                class,
            } => {
                let _ = writeln!(
                    out,
                    "<text class=\"{class}\" x=\"{}\" y=\"{}\" font-size=\"{}\" font-family=\"sans-serif\" text-anchor=\"{}\" dominant-baseline=\"central\">{}</text>",
                    fmt3(pos.0),
                    fmt3(pos.1),
                    fmt3(*size),
                    anchor.svg(),
                    escape_xml(content),
                );
            }
        }
    }
    out.push_str("</svg>\n");
    out.into_bytes()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::connectors::build_connectors;
    use crate::dataset::{self, Dataset, Predicate};
    use crate::layout::{compute_layout, Annotation, PlotSpec};
    use std::collections::BTreeMap;

    fn fixture(name: &str) -> std::path::PathBuf {
        std::path::Path::new(env!("CARGO_MANIFEST_DIR"))
            .join("fixtures")
            .join(name)
    }

    fn load(name: &str) -> Dataset {
        dataset::load_csv(
            &fixture(name),
            &BTreeMap::new(),
            &dataset::default_missing_tokens(),
        )
        .unwrap()
    }

    fn stages_spec() -> PlotSpec {
        PlotSpec {
            varlist: vec!["s16".into(), "s17".into(), "s18".into()],
            missing: true,
            hivar: Some("rider".into()),
            hivals: vec![Predicate::EqualsCode(0)],
            ylines: vec![10.0],
            ..PlotSpec::default()
        }
    }

    fn build(ds: &Dataset, spec: &PlotSpec) -> Scene {
        let layout = compute_layout(ds, spec).unwrap();
        let conns = build_connectors(ds, spec, &layout).unwrap();
        let colors = resolve_colors(&spec.colorlist).unwrap();
        build_scene(ds, &layout, &conns, spec, &colors).unwrap()
    }

    #[test]
    fn parses_grayscale_and_named_colorlists() {
        let list: Vec<String> = ["gs10", "red", "blue", "yellow"]
            .iter()
            .map(|s| s.to_string())
            .collect();
        let colors = resolve_colors(&list).unwrap();
        assert_eq!(colors.len(), 4);
        let gs10 = colors[0];
        assert_eq!((gs10.r, gs10.g, gs10.b), (159, 159, 159));
        assert_eq!(colors[1], Color::opaque(255, 0, 0));
    }

    #[test]
    fn parses_opacity_suffix() {
        let c = Color::parse("blue%30").unwrap();
        assert_eq!((c.r, c.g, c.b), (0, 0, 255));
        assert!((c.alpha - 0.30).abs() < 1e-12);
    }

    #[test]
    fn parses_rgb_triple() {
        let c = Color::parse("0 0 255").unwrap();
        assert_eq!(c, Color::opaque(0, 0, 255));
        let c = Color::parse("10 200 30%50").unwrap();
        assert_eq!((c.r, c.g, c.b), (10, 200, 30));
        assert!((c.alpha - 0.5).abs() < 1e-12);
    }

    #[test]
    fn grayscale_endpoints() {
        assert_eq!(Color::parse("gs0").unwrap(), Color::opaque(0, 0, 0));
        assert_eq!(Color::parse("gs16").unwrap(), Color::opaque(255, 255, 255));
    }

    #[test]
    fn unknown_color_is_error_not_black() {
        assert!(Color::parse("vermillion").is_err());
        assert!(Color::parse("gs17").is_err());
        assert!(Color::parse("1 2").is_err());
        assert!(Color::parse("blue%150").is_err());
    }

    #[test]
    fn empty_scene_is_valid_svg() {
        let scene = Scene {
            width: 200.0,
            height: 100.0,
            primitives: Vec::new(),
        };
        let svg = String::from_utf8(emit_svg(&scene)).unwrap();
        assert!(svg.starts_with("<?xml"));
        assert!(svg.contains("<svg xmlns"));
        assert!(svg.contains("class=\"background\""));
        assert!(svg.trim_end().ends_with("</svg>"));
    }

    #[test]
    fn emission_is_deterministic() {
        let ds = load("stages.csv");
        let spec = stages_spec();
        let a = emit_svg(&build(&ds, &spec));
        let b = emit_svg(&build(&ds, &spec));
        assert_eq!(a, b);
    }

    #[test]
    fn highlight_ink_drawn_after_default_ink() {
        let ds = load("stages.csv");
        let scene = build(&ds, &stages_spec());
        let mut last_default = None;
        let mut first_highlight = None;
        for (i, prim) in scene.primitives.iter().enumerate() {
            if let Primitive::Polygon { class, .. } = prim {
                match class.rsplit(' ').next() {
                    Some("s0") => last_default = Some(i),
                    Some(s) if s.starts_with('s') && first_highlight.is_none() => {
                        first_highlight = Some(i)
                    }
                    _ => {}
                }
            }
        }
        let (last_default, first_highlight) =
            (last_default.unwrap(), first_highlight.unwrap());
        assert!(
            first_highlight > last_default,
            "highlight polygon at {first_highlight} before last default at {last_default}"
        );
    }

    #[test]
    fn yline_sits_between_missing_and_data_regions() {
        let ds = load("stages.csv");
        let spec = stages_spec();
        let layout = compute_layout(&ds, &spec).unwrap();
        let scene = build(&ds, &spec);
        let yline = scene
            .primitives
            .iter()
            .find_map(|p| match p {
                Primitive::Line { from, dashed: true, class, .. } if class == "yline" => {
                    Some(from.1)
                }
                _ => None,
            })
            .expect("yline present");
        let (_, miss_top_px) = layout.affine.to_canvas(1.0, 8.0);
        let (_, data_bot_px) = layout.affine.to_canvas(1.0, 12.0);
        // canvas y is flipped: the line lies below the data region bottom and
        // above the missing region top
        assert!(yline > data_bot_px && yline < miss_top_px);
    }

    #[test]
    fn nounibar_nolabel_scene_has_only_connectors_and_ylines() {
        let ds = load("stages.csv");
        let spec = PlotSpec {
            nounibar: true,
            nolabel: true,
            hivar: None,
            hivals: Vec::new(),
            ..stages_spec()
        };
        let scene = build(&ds, &spec);
        for prim in &scene.primitives {
            match prim {
                Primitive::Polygon { class, .. } => assert!(class.starts_with("connector")),
                Primitive::Line { class, .. } => assert_eq!(class, "yline"),
                Primitive::Text { .. } => panic!("no text expected"),
            }
        }
    }

    #[test]
    fn space_one_scene_has_no_connector_polygons() {
        let ds = load("stages.csv");
        let spec = PlotSpec {
            space: 1.0,
            ylines: Vec::new(),
            ..stages_spec()
        };
        let scene = build(&ds, &spec);
        assert!(scene.primitives.iter().all(|p| match p {
            Primitive::Polygon { class, .. } => !class.starts_with("connector"),
            _ => true,
        }));
        // bars still appear, including highlighted strata on every axis
        for axis in 1..=3 {
            let has_highlight = scene.primitives.iter().any(|p| match p {
                Primitive::Polygon { class, .. } => {
                    class.starts_with(&format!("bar a{axis} "))
                        && class.rsplit(' ').next() == Some("s1")
                }
                _ => false,
            });
            assert!(has_highlight, "axis {axis} lost its highlight band");
        }
    }

    #[test]
    fn annotations_validated_and_rendered() {
        let ds = load("stages.csv");
        let mut spec = stages_spec();
        spec.annotations = vec![Annotation {
            y: 3.0,
            x: 1.0,
            text: "missing".into(),
        }];
        let scene = build(&ds, &spec);
        assert!(scene.primitives.iter().any(|p| matches!(
            p,
            Primitive::Text { class, content, .. } if class == "annotation" && content == "missing"
        )));

        spec.annotations[0].x = 9.0;
        let layout = compute_layout(&ds, &spec).unwrap();
        let conns = build_connectors(&ds, &spec, &layout).unwrap();
        let colors = resolve_colors(&spec.colorlist).unwrap();
        assert!(matches!(
            build_scene(&ds, &layout, &conns, &spec, &colors),
            Err(RenderError::AnnotationXOutOfRange { .. })
        ));
        spec.annotations[0].x = 1.0;
        spec.annotations[0].y = 101.0;
        assert!(matches!(
            build_scene(&ds, &layout, &conns, &spec, &colors),
            Err(RenderError::AnnotationYOutOfRange { .. })
        ));
    }

    #[test]
    fn coordinates_stay_inside_canvas() {
        let ds = load("stages.csv");
        let spec = stages_spec();
        let scene = build(&ds, &spec);
        let inside = |x: f64, y: f64| {
            x >= 0.0 && x <= scene.width && y >= 0.0 && y <= scene.height
        };
        for prim in &scene.primitives {
            match prim {
                Primitive::Polygon { points, .. } => {
                    assert!(points.iter().all(|(x, y)| inside(*x, *y)))
                }
                Primitive::Line { from, to, .. } => {
                    assert!(inside(from.0, from.1) && inside(to.0, to.1))
                }
                Primitive::Text { pos, .. } => assert!(inside(pos.0, pos.1)),
            }
        }
    }

    #[test]
    fn space_zero_draws_bars_as_vertical_lines() {
        let ds = load("stages.csv");
        let spec = PlotSpec {
            space: 0.0,
            ..stages_spec()
        };
        let scene = build(&ds, &spec);
        let bar_polys = scene.primitives.iter().any(
            |p| matches!(p, Primitive::Polygon { class, .. } if class.starts_with("bar")),
        );
        assert!(!bar_polys);
        let bar_lines = scene
            .primitives
            .iter()
            .filter(|p| matches!(p, Primitive::Line { class, .. } if class.starts_with("bar")))
            .count();
        assert!(bar_lines > 0);
        // the lines are exactly vertical
        for prim in &scene.primitives {
            if let Primitive::Line { from, to, class, .. } = prim {
                if class.starts_with("bar") {
                    assert_eq!(from.0, to.0);
                }
            }
        }
    }

    #[test]
    fn xml_escaping_in_labels() {
        let scene = Scene {
            width: 100.0,
            height: 100.0,
            primitives: vec![Primitive::Text {
                pos: (10.0, 10.0),
                content: "a<b & c>d".to_string(),
                size: 10.0,
                anchor: Anchor::Start,
                class: "annotation".to_string(),
            }],
        };
        let svg = String::from_utf8(emit_svg(&scene)).unwrap();
        assert!(svg.contains("a&lt;b &amp; c&gt;d"));
    }

    #[test]
    fn variable_labels_use_column_labels() {
        let ds = load("auto.csv");
        let labeled = dataset::apply_label_map(&ds, &fixture("auto_labels.json")).unwrap();
        let spec = PlotSpec {
            varlist: vec!["mpg".into(), "foreign".into()],
            ..PlotSpec::default()
        };
        let scene = build(&labeled, &spec);
        let texts: Vec<&str> = scene
            .primitives
            .iter()
            .filter_map(|p| match p {
                Primitive::Text { class, content, .. } if class == "varlabel" => {
                    Some(content.as_str())
                }
                _ => None,
            })
            .collect();
        assert_eq!(texts, vec!["mileage", "car origin"]);
        // categorical bands carry their value labels
        assert!(scene.primitives.iter().any(|p| matches!(
            p,
            Primitive::Text { class, content, .. } if class == "catlabel" && content == "domestic"
        )));
    }
}
