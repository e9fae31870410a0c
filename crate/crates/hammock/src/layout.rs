//! Per-variable axis layout: value -> y scales, the missing-value band, and
//! count-proportional univariate bars, all in a canonical coordinate space.
//!
//! Canonical space is [0,100] vertically and [1,k] horizontally (axis i sits
//! at x = i); the scene builder maps it affinely onto the canvas. The y
//! coordinates match the ones users pass to `--text` and `--yline`.

use std::collections::BTreeMap;

use thiserror::Error;

use crate::dataset::{CellValue, Column, ColumnKind, DataError, Dataset, Predicate};

/// Minimum rendered bar thickness in canonical units. Bands whose
/// proportional height falls below this are drawn as a hairline.
pub const MIN_BAR_THICKNESS: f64 = 0.15;

#[derive(Debug, Error)]
pub enum LayoutError {
    #[error("variable list is empty")]
    EmptyVarlist,
    #[error("need at least 2 variables to draw connectors (got {k}); use space=1 for a single axis")]
    TooFewAxes { k: usize },
    #[error("option {name} = {value} is out of range ({expected})")]
    OptionRange {
        name: &'static str,
        value: f64,
        expected: &'static str,
    },
    #[error("samescale variable '{0}' is not in the variable list")]
    SamescaleNotInVarlist(String),
    #[error("samescale variable '{0}' is not numeric")]
    SamescaleNotNumeric(String),
    #[error("colorlist has {got} colors but {needed} are needed (default + one per hival)")]
    ColorlistTooShort { needed: usize, got: usize },
    #[error("column '{0}' has no non-missing values to scale")]
    AllMissing(String),
    #[error("column '{0}' is not numeric")]
    NotNumeric(String),
    #[error("column '{0}' is not categorical")]
    NotCategorical(String),
    #[error("category order for '{col}' is not a permutation of its observed codes")]
    BadCategoryOrder { col: String },
    #[error("bad label format '{0}': expected %<width>.0g")]
    BadLabelFormat(String),
    #[error("canvas dimensions must be positive")]
    BadCanvas,
    #[error(transparent)]
    Data(#[from] DataError),
}

/// Connector shape between adjacent axes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Shape {
    /// Constant perpendicular thickness in display space; avoids the
    /// reverse line-width illusion on steep connectors.
    #[default]
    Rectangle,
    /// Constant vertical extent; thins out perceptually as slope grows.
    Parallelogram,
}

impl std::str::FromStr for Shape {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "rectangle" => Ok(Shape::Rectangle),
            "parallelogram" => Ok(Shape::Parallelogram),
            other => Err(format!("unknown shape '{other}' (rectangle|parallelogram)")),
        }
    }
}

/// Manual text annotation at canonical coordinates (y in [0,100], x in [1,k]).
#[derive(Debug, Clone, PartialEq)]
pub struct Annotation {
    pub y: f64,
    pub x: f64,
    pub text: String,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Canvas {
    pub width: f64,
    pub height: f64,
}

impl Default for Canvas {
    fn default() -> Self {
        Canvas {
            width: 1000.0,
            height: 600.0,
        }
    }
}

/// The full option set of a plot, validated against the dataset before
/// layout.
#[derive(Debug, Clone)]
pub struct PlotSpec {
    pub varlist: Vec<String>,
    pub missing: bool,
    pub hivar: Option<String>,
    pub hivals: Vec<Predicate>,
    pub colorlist: Vec<String>,
    pub barwidth: f64,
    pub minbarfreq: usize,
    pub uni_fraction: f64,
    pub space: f64,
    pub samescale: Vec<String>,
    pub shape: Shape,
    pub nolabel: bool,
    pub nounibar: bool,
    pub label_format: String,
    pub label_size: f64,
    pub annotations: Vec<Annotation>,
    pub ylines: Vec<f64>,
    pub category_order: BTreeMap<String, Vec<i64>>,
    pub canvas: Canvas,
}

/// Default palette: first entry is the default ink, the rest are used for
/// highlighting in hival order.
pub fn default_colorlist() -> Vec<String> {
    ["gs10", "orange", "green", "navy", "maroon", "teal", "purple"]
        .iter()
        .map(|s| s.to_string())
        .collect()
}

impl Default for PlotSpec {
    fn default() -> Self {
        PlotSpec {
            varlist: Vec::new(),
            missing: false,
            hivar: None,
            hivals: Vec::new(),
            colorlist: default_colorlist(),
            barwidth: 1.0,
            minbarfreq: 1,
            uni_fraction: 0.5,
            space: 0.2,
            samescale: Vec::new(),
            shape: Shape::Rectangle,
            nolabel: false,
            nounibar: false,
            label_format: "%8.0g".to_string(),
            label_size: 10.0,
            annotations: Vec::new(),
            ylines: Vec::new(),
            category_order: BTreeMap::new(),
            canvas: Canvas::default(),
        }
    }
}

impl PlotSpec {
    pub fn validate(&self, ds: &Dataset) -> Result<(), LayoutError> {
        if self.varlist.is_empty() {
            return Err(LayoutError::EmptyVarlist);
        }
        if self.varlist.len() < 2 && self.space < 1.0 {
            return Err(LayoutError::TooFewAxes {
                k: self.varlist.len(),
            });
        }
        for name in &self.varlist {
            ds.column(name)?;
        }
        if !(self.uni_fraction > 0.0 && self.uni_fraction <= 1.0) {
            return Err(LayoutError::OptionRange {
                name: "uni_fraction",
                value: self.uni_fraction,
                expected: "0 < uni_fraction <= 1",
            });
        }
        if !(0.0..=1.0).contains(&self.space) {
            return Err(LayoutError::OptionRange {
                name: "space",
                value: self.space,
                expected: "0 <= space <= 1",
            });
        }
        if !(self.barwidth > 0.0) {
            return Err(LayoutError::OptionRange {
                name: "barwidth",
                value: self.barwidth,
                expected: "barwidth > 0",
            });
        }
        if self.minbarfreq < 1 {
            return Err(LayoutError::OptionRange {
                name: "minbarfreq",
                value: self.minbarfreq as f64,
                expected: "minbarfreq >= 1",
            });
        }
        if !(self.canvas.width > 0.0 && self.canvas.height > 0.0) {
            return Err(LayoutError::BadCanvas);
        }
        for name in &self.samescale {
            if !self.varlist.contains(name) {
                return Err(LayoutError::SamescaleNotInVarlist(name.clone()));
            }
            if ds.column(name)?.kind != ColumnKind::Numeric {
                return Err(LayoutError::SamescaleNotNumeric(name.clone()));
            }
        }
        if self.colorlist.is_empty() {
            return Err(LayoutError::ColorlistTooShort { needed: 1, got: 0 });
        }
        if let Some(hivar) = &self.hivar {
            let col = ds.column(hivar)?;
            for pred in &self.hivals {
                pred.check_kind(col)?;
            }
            let needed = 1 + self.hivals.len();
            if self.colorlist.len() < needed {
                return Err(LayoutError::ColorlistTooShort {
                    needed,
                    got: self.colorlist.len(),
                });
            }
        }
        for col_name in self.category_order.keys() {
            let col = ds.column(col_name)?;
            if col.kind != ColumnKind::Categorical {
                return Err(LayoutError::NotCategorical(col_name.clone()));
            }
        }
        LabelFormat::parse(&self.label_format)?;
        Ok(())
    }
}

/// Vertical extents of the data region and, when `missing` is set, the
/// reserved missing-value region below it.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Regions {
    pub data: (f64, f64),
    pub missing: Option<(f64, f64)>,
}

impl Regions {
    pub fn data_height(&self) -> f64 {
        self.data.1 - self.data.0
    }
}

/// Without `missing` the data region spans the full canonical height.
/// With it, the bottom 8 units hold missing values and a 4-unit gap
/// separates them from the data region, leaving room for a separator line.
pub fn canonical_regions(spec: &PlotSpec) -> Regions {
    if spec.missing {
        Regions {
            data: (12.0, 100.0),
            missing: Some((0.0, 8.0)),
        }
    } else {
        Regions {
            data: (0.0, 100.0),
            missing: None,
        }
    }
}

/// Value -> y mapping for one axis.
#[derive(Debug, Clone, PartialEq)]
pub enum AxisScale {
    Numeric {
        min: f64,
        max: f64,
        y_lo: f64,
        y_hi: f64,
    },
    Categorical {
        positions: BTreeMap<i64, f64>,
    },
}

impl AxisScale {
    pub fn y_of(&self, cell: &CellValue) -> Option<f64> {
        match (self, cell) {
            (AxisScale::Numeric { min, max, y_lo, y_hi }, CellValue::Number(v)) => {
                if min == max {
                    Some((y_lo + y_hi) / 2.0)
                } else {
                    Some(y_lo + (v - min) / (max - min) * (y_hi - y_lo))
                }
            }
            (AxisScale::Categorical { positions }, CellValue::Code(c)) => positions.get(c).copied(),
            _ => None,
        }
    }
}

/// Linear scale for a numeric column: min -> bottom of the data region,
/// max -> top. When the column belongs to a samescale group, min/max are
/// taken over the union of the group's columns.
pub fn compute_scale(
    col: &Column,
    group: Option<&[&Column]>,
    data_region: (f64, f64),
) -> Result<AxisScale, LayoutError> {
    if col.kind != ColumnKind::Numeric {
        return Err(LayoutError::NotNumeric(col.name.clone()));
    }
    let mut min = f64::INFINITY;
    let mut max = f64::NEG_INFINITY;
    let mut scan = |c: &Column| {
        for cell in &c.cells {
            if let CellValue::Number(v) = cell {
                min = min.min(*v);
                max = max.max(*v);
            }
        }
    };
    match group {
        Some(cols) => cols.iter().for_each(|c| scan(c)),
        None => scan(col),
    }
    if min > max {
        return Err(LayoutError::AllMissing(col.name.clone()));
    }
    Ok(AxisScale::Numeric {
        min,
        max,
        y_lo: data_region.0,
        y_hi: data_region.1,
    })
}

/// Slot centers for the observed categories of a categorical column. The m
/// categories occupy m equal-height slots spanning the data region bottom to
/// top, in code order or in the given permutation (bottom first).
pub fn place_categories(
    col: &Column,
    order: Option<&[i64]>,
    data_region: (f64, f64),
) -> Result<AxisScale, LayoutError> {
    if col.kind != ColumnKind::Categorical {
        return Err(LayoutError::NotCategorical(col.name.clone()));
    }
    let observed = col.observed_codes();
    if observed.is_empty() {
        return Err(LayoutError::AllMissing(col.name.clone()));
    }
    let sequence: Vec<i64> = match order {
        None => observed.clone(),
        Some(perm) => {
            let mut sorted = perm.to_vec();
            sorted.sort_unstable();
            if sorted != observed {
                return Err(LayoutError::BadCategoryOrder {
                    col: col.name.clone(),
                });
            }
            perm.to_vec()
        }
    };
    let slot = (data_region.1 - data_region.0) / sequence.len() as f64;
    let positions = sequence
        .iter()
        .enumerate()
        .map(|(i, code)| (*code, data_region.0 + (i as f64 + 0.5) * slot))
        .collect();
    Ok(AxisScale::Categorical { positions })
}

/// One univariate bar: a distinct value (or the missing sentinel), its row
/// set, and its count-proportional height.
#[derive(Debug, Clone, PartialEq)]
pub struct ValueBand {
    pub key: CellValue,
    pub y_center: f64,
    pub count: usize,
    pub bar_height: f64,
    pub rows: Vec<usize>,
    /// Height was clamped (hairline floor or missing-region cap), so it is
    /// no longer proportional to count.
    pub clamped: bool,
}

impl ValueBand {
    pub fn y_extent(&self) -> (f64, f64) {
        (
            self.y_center - self.bar_height / 2.0,
            self.y_center + self.bar_height / 2.0,
        )
    }
}

/// Layout of one axis: its scale, its value bands, and the per-observation
/// thickness `unit` shared with the adjacent connectors.
#[derive(Debug, Clone)]
pub struct AxisLayout {
    pub var: String,
    pub x_index: usize,
    pub scale: AxisScale,
    pub bands: Vec<ValueBand>,
    pub missing_band: Option<ValueBand>,
    pub unit: f64,
}

impl AxisLayout {
    pub fn all_bands(&self) -> impl Iterator<Item = &ValueBand> {
        self.bands.iter().chain(self.missing_band.iter())
    }

    pub fn band(&self, key: &CellValue) -> Option<&ValueBand> {
        if key.is_missing() {
            self.missing_band.as_ref()
        } else {
            self.bands.iter().find(|b| &b.key == key)
        }
    }
}

/// Build the bands of one axis. Heights are count x unit where unit is
/// chosen so all band heights (including the missing band) sum to
/// uni_fraction x data-region height; bands thinner than
/// `MIN_BAR_THICKNESS` are drawn at that floor.
pub fn build_axis(
    col: &Column,
    spec: &PlotSpec,
    x_index: usize,
    scale: &AxisScale,
    regions: &Regions,
) -> AxisLayout {
    let mut groups: BTreeMap<CellValue, Vec<usize>> = BTreeMap::new();
    let mut missing_rows = Vec::new();
    for (row, cell) in col.cells.iter().enumerate() {
        if cell.is_missing() {
            missing_rows.push(row);
        } else {
            groups.entry(*cell).or_default().push(row);
        }
    }

    let include_missing = spec.missing && !missing_rows.is_empty();
    let total = col.cells.len() - if include_missing { 0 } else { missing_rows.len() };
    let unit = if total > 0 {
        spec.uni_fraction * regions.data_height() / total as f64
    } else {
        0.0
    };

    let bands = groups
        .into_iter()
        .map(|(key, rows)| {
            let count = rows.len();
            let raw = count as f64 * unit;
            let bar_height = raw.max(MIN_BAR_THICKNESS);
            ValueBand {
                key,
                y_center: scale.y_of(&key).expect("band key is on this scale"),
                count,
                bar_height,
                rows,
                clamped: bar_height != raw,
            }
        })
        .collect();

    let missing_band = include_missing.then(|| {
        let (lo, hi) = regions.missing.expect("missing region exists");
        let count = missing_rows.len();
        let raw = count as f64 * unit;
        let bar_height = raw.max(MIN_BAR_THICKNESS).min(hi - lo);
        ValueBand {
            key: CellValue::Missing,
            y_center: (lo + hi) / 2.0,
            count,
            bar_height,
            rows: missing_rows,
            clamped: bar_height != raw,
        }
    });

    AxisLayout {
        var: col.name.clone(),
        x_index,
        scale: scale.clone(),
        bands,
        missing_band,
        unit,
    }
}

/// Horizontal geometry of one axis in canonical units (inter-axis gap = 1).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AxisX {
    pub x_center: f64,
    /// Half-width of the univariate region: space x gap / 2.
    pub half_width: f64,
    /// Width of the connector span to the next axis: gap - 2 x half_width.
    pub connector_span: f64,
}

/// Axis centers sit at canonical x = 1..k. space = 1 empties the connector
/// spans (parallel univariate plots); space = 0 collapses the univariate
/// regions to vertical lines.
pub fn axis_x_positions(k: usize, space: f64) -> Result<Vec<AxisX>, LayoutError> {
    if k == 0 || (k < 2 && space < 1.0) {
        return Err(LayoutError::TooFewAxes { k });
    }
    let half_width = space / 2.0;
    let connector_span = 1.0 - space;
    Ok((1..=k)
        .map(|i| AxisX {
            x_center: i as f64,
            half_width,
            connector_span,
        })
        .collect())
}

/// Affine map from canonical coordinates onto the canvas. Fixed margins
/// leave room for variable labels below the axes and tick labels at the
/// sides; SVG y grows downward, so y is flipped.
#[derive(Debug, Clone, Copy)]
pub struct Affine {
    pub sx: f64,
    pub sy: f64,
    pub left: f64,
    pub top: f64,
    pub k: usize,
}

pub const MARGIN_LEFT: f64 = 70.0;
pub const MARGIN_RIGHT: f64 = 70.0;
pub const MARGIN_TOP: f64 = 45.0;
pub const MARGIN_BOTTOM: f64 = 65.0;

impl Affine {
    pub fn new(canvas: Canvas, k: usize) -> Affine {
        let plot_w = canvas.width - MARGIN_LEFT - MARGIN_RIGHT;
        let plot_h = canvas.height - MARGIN_TOP - MARGIN_BOTTOM;
        Affine {
            sx: plot_w / k as f64,
            sy: plot_h / 100.0,
            left: MARGIN_LEFT,
            top: MARGIN_TOP,
            k,
        }
    }

    pub fn to_canvas(&self, x: f64, y: f64) -> (f64, f64) {
        (
            self.left + (x - 0.5) * self.sx,
            self.top + (100.0 - y) * self.sy,
        )
    }

    /// Horizontal-to-vertical unit ratio. Perpendicularity of rectangle
    /// connectors is a display-space property, so their normals are
    /// computed after this correction.
    pub fn aspect(&self) -> f64 {
        self.sx / self.sy
    }
}

/// The complete per-plot layout shared by connectors and rendering.
#[derive(Debug, Clone)]
pub struct Layout {
    pub regions: Regions,
    pub axes: Vec<AxisLayout>,
    pub x_positions: Vec<AxisX>,
    pub affine: Affine,
}

impl Layout {
    pub fn k(&self) -> usize {
        self.axes.len()
    }
}

/// Validate the spec and lay out every axis of the varlist.
pub fn compute_layout(ds: &Dataset, spec: &PlotSpec) -> Result<Layout, LayoutError> {
    spec.validate(ds)?;
    let regions = canonical_regions(spec);
    let k = spec.varlist.len();
    let x_positions = axis_x_positions(k, spec.space)?;

    let group_cols: Vec<&Column> = spec
        .samescale
        .iter()
        .map(|name| ds.column(name).expect("validated"))
        .collect();

    let mut axes = Vec::with_capacity(k);
    for (i, name) in spec.varlist.iter().enumerate() {
        let col = ds.column(name)?;
        let scale = match col.kind {
            ColumnKind::Numeric => {
                let group = spec
                    .samescale
                    .contains(name)
                    .then_some(group_cols.as_slice());
                compute_scale(col, group, regions.data)?
            }
            ColumnKind::Categorical => place_categories(
                col,
                spec.category_order.get(name).map(|v| v.as_slice()),
                regions.data,
            )?,
        };
        axes.push(build_axis(col, spec, i + 1, &scale, &regions));
    }

    Ok(Layout {
        regions,
        axes,
        x_positions,
        affine: Affine::new(spec.canvas, k),
    })
}

/// General significant-digit number format with a width budget, parsed from
/// a `%<width>.0g` string. Plain decimal notation is preferred; scientific
/// is used when it preserves more significant digits within the width.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LabelFormat {
    pub width: usize,
}

impl LabelFormat {
    pub fn parse(s: &str) -> Result<LabelFormat, LayoutError> {
        let bad = || LayoutError::BadLabelFormat(s.to_string());
        let body = s.strip_prefix('%').ok_or_else(bad)?;
        let body = body.strip_suffix('g').ok_or_else(bad)?;
        let (width, _frac) = body.split_once('.').ok_or_else(bad)?;
        let width: usize = width.parse().map_err(|_| bad())?;
        if width == 0 {
            return Err(bad());
        }
        Ok(LabelFormat { width })
    }

    pub fn format(&self, v: f64) -> String {
        if v == 0.0 {
            return "0".to_string();
        }
        for sig in (1..=17).rev() {
            let (digits, exp, neg) = round_to_significant(v, sig);
            let plain = render_plain(&digits, exp, neg);
            if plain.chars().count() <= self.width {
                return plain;
            }
            let sci = render_scientific(&digits, exp, neg);
            if sci.chars().count() <= self.width {
                return sci;
            }
        }
        let (digits, exp, neg) = round_to_significant(v, 1);
        render_scientific(&digits, exp, neg)
    }
}

/// Decompose v rounded to `sig` significant digits as (digit string,
/// decimal exponent of the leading digit, sign).
fn round_to_significant(v: f64, sig: usize) -> (String, i32, bool) {
    let s = format!("{:.*e}", sig - 1, v.abs());
    let (mantissa, exp) = s.split_once('e').expect("exponential format");
    let digits: String = mantissa.chars().filter(|c| c.is_ascii_digit()).collect();
    let mut exp: i32 = exp.parse().expect("exponent");
    // rounding can carry over, e.g. 9.99 -> "10.0e0"; renormalize
    let digits = if digits.len() > sig {
        exp += (digits.len() - sig) as i32;
        digits[..sig].to_string()
    } else {
        digits
    };
    (digits, exp, v < 0.0)
}

fn trim_fraction(mut s: String) -> String {
    if s.contains('.') {
        while s.ends_with('0') {
            s.pop();
        }
        if s.ends_with('.') {
            s.pop();
        }
    }
    s
}

fn render_plain(digits: &str, exp: i32, neg: bool) -> String {
    let n = digits.len() as i32;
    let body = if exp >= n - 1 {
        format!("{digits}{}", "0".repeat((exp - n + 1) as usize))
    } else if exp >= 0 {
        let split = (exp + 1) as usize;
        trim_fraction(format!("{}.{}", &digits[..split], &digits[split..]))
    } else {
        trim_fraction(format!("0.{}{digits}", "0".repeat((-exp - 1) as usize)))
    };
    if neg {
        format!("-{body}")
    } else {
        body
    }
}

fn render_scientific(digits: &str, exp: i32, neg: bool) -> String {
    let mantissa = if digits.len() > 1 {
        trim_fraction(format!("{}.{}", &digits[..1], &digits[1..]))
    } else {
        digits.to_string()
    };
    let sign = if neg { "-" } else { "" };
    if exp < 0 {
        format!("{sign}{mantissa}e-{}", -exp)
    } else {
        format!("{sign}{mantissa}e+{exp}")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dataset;

    fn spec_for(vars: &[&str]) -> PlotSpec {
        PlotSpec {
            varlist: vars.iter().map(|s| s.to_string()).collect(),
            ..PlotSpec::default()
        }
    }

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

    #[test]
    fn regions_without_missing() {
        let spec = spec_for(&["a", "b"]);
        let r = canonical_regions(&spec);
        assert_eq!(r.data, (0.0, 100.0));
        assert!(r.missing.is_none());
    }

    #[test]
    fn regions_with_missing() {
        let spec = PlotSpec {
            missing: true,
            ..spec_for(&["a", "b"])
        };
        let r = canonical_regions(&spec);
        assert_eq!(r.data, (12.0, 100.0));
        assert_eq!(r.missing, Some((0.0, 8.0)));
        // annotation at y=3 (like a hand-written "missing" note) falls inside
        let (lo, hi) = r.missing.unwrap();
        assert!(lo <= 3.0 && 3.0 <= hi);
        // the customary separator line at y=10 falls in the gap
        assert!(hi < 10.0 && 10.0 < r.data.0);
    }

    #[test]
    fn identity_scale() {
        let col = Column::numeric("v", (0..=100).map(|i| Some(i as f64)).collect());
        let scale = compute_scale(&col, None, (0.0, 100.0)).unwrap();
        for v in [0.0, 13.0, 57.0, 100.0] {
            let y = scale.y_of(&CellValue::Number(v)).unwrap();
            assert!((y - v).abs() < 1e-12);
        }
    }

    #[test]
    fn constant_column_maps_to_midpoint() {
        let col = Column::numeric("v", vec![Some(5.0); 4]);
        let scale = compute_scale(&col, None, (12.0, 100.0)).unwrap();
        assert_eq!(scale.y_of(&CellValue::Number(5.0)), Some(56.0));
    }

    #[test]
    fn samescale_group_shares_bounds() {
        let a = Column::numeric("a", vec![Some(0.0), Some(10.0)]);
        let b = Column::numeric("b", vec![Some(5.0), Some(40.0)]);
        let cols = [&a, &b];
        let sa = compute_scale(&a, Some(&cols), (0.0, 100.0)).unwrap();
        let sb = compute_scale(&b, Some(&cols), (0.0, 100.0)).unwrap();
        for v in [0.0, 5.0, 17.5, 40.0] {
            let ya = sa.y_of(&CellValue::Number(v)).unwrap();
            let yb = sb.y_of(&CellValue::Number(v)).unwrap();
            assert_eq!(ya, yb);
        }
    }

    #[test]
    fn all_missing_column_errors() {
        let col = Column::numeric("v", vec![None, None]);
        assert!(matches!(
            compute_scale(&col, None, (0.0, 100.0)),
            Err(LayoutError::AllMissing(_))
        ));
    }

    #[test]
    fn two_categories_centered_at_quartiles() {
        let col = Column::from_tokens("g", vec![Some("x"), Some("y")]);
        let scale = place_categories(&col, None, (0.0, 100.0)).unwrap();
        assert_eq!(scale.y_of(&CellValue::Code(0)), Some(25.0));
        assert_eq!(scale.y_of(&CellValue::Code(1)), Some(75.0));
    }

    #[test]
    fn five_categories_in_shrunk_region() {
        let col = Column::from_tokens("g", vec![Some("a"), Some("b"), Some("c"), Some("d"), Some("e")]);
        let scale = place_categories(&col, None, (12.0, 100.0)).unwrap();
        // oracle: slot height (100-12)/5 = 17.6, centers lo + (i+0.5)*17.6
        let expected = [20.8, 38.4, 56.0, 73.6, 91.2];
        for (code, want) in expected.iter().enumerate() {
            let y = scale.y_of(&CellValue::Code(code as i64)).unwrap();
            assert!((y - want).abs() < 1e-9, "code {code}: {y} vs {want}");
        }
    }

    #[test]
    fn permutation_swaps_centers() {
        let col = Column::from_tokens("g", vec![Some("x"), Some("y")]);
        let swapped = place_categories(&col, Some(&[1, 0]), (0.0, 100.0)).unwrap();
        assert_eq!(swapped.y_of(&CellValue::Code(1)), Some(25.0));
        assert_eq!(swapped.y_of(&CellValue::Code(0)), Some(75.0));
    }

    #[test]
    fn bad_permutation_rejected() {
        let col = Column::from_tokens("g", vec![Some("x"), Some("y")]);
        assert!(matches!(
            place_categories(&col, Some(&[0, 0]), (0.0, 100.0)),
            Err(LayoutError::BadCategoryOrder { .. })
        ));
        assert!(matches!(
            place_categories(&col, Some(&[0, 1, 2]), (0.0, 100.0)),
            Err(LayoutError::BadCategoryOrder { .. })
        ));
    }

    #[test]
    fn heights_proportional_to_counts() {
        // counts [10,30,60] over region height 100 at uni_fraction 0.5
        let mut cells = Vec::new();
        cells.extend(std::iter::repeat(Some(1.0)).take(10));
        cells.extend(std::iter::repeat(Some(2.0)).take(30));
        cells.extend(std::iter::repeat(Some(3.0)).take(60));
        let col = Column::numeric("v", cells);
        let spec = spec_for(&["v", "w"]);
        let scale = compute_scale(&col, None, (0.0, 100.0)).unwrap();
        let regions = Regions {
            data: (0.0, 100.0),
            missing: None,
        };
        let axis = build_axis(&col, &spec, 1, &scale, &regions);
        let heights: Vec<f64> = axis.bands.iter().map(|b| b.bar_height).collect();
        assert_eq!(heights, vec![5.0, 15.0, 30.0]);
        assert_eq!(heights.iter().sum::<f64>(), 50.0);
    }

    #[test]
    fn hairline_floor_applies() {
        // 1000 rows: a lone value's height 0.5*100/1000 = 0.05 floors to 0.15
        let mut cells = vec![Some(1.0); 999];
        cells.push(Some(2.0));
        let col = Column::numeric("v", cells);
        let spec = spec_for(&["v", "w"]);
        let scale = compute_scale(&col, None, (0.0, 100.0)).unwrap();
        let regions = Regions {
            data: (0.0, 100.0),
            missing: None,
        };
        let axis = build_axis(&col, &spec, 1, &scale, &regions);
        let lone = axis.band(&CellValue::Number(2.0)).unwrap();
        assert_eq!(lone.bar_height, MIN_BAR_THICKNESS);
        assert!(lone.clamped);
        let big = axis.band(&CellValue::Number(1.0)).unwrap();
        assert!(!big.clamped);
    }

    #[test]
    fn rep78_axis_has_missing_band() {
        let ds = load("auto.csv");
        let spec = PlotSpec {
            missing: true,
            ..spec_for(&["mpg", "rep78"])
        };
        let layout = compute_layout(&ds, &spec).unwrap();
        let rep = &layout.axes[1];
        assert_eq!(rep.bands.len(), 5);
        let mb = rep.missing_band.as_ref().unwrap();
        assert_eq!(mb.count, 5);
        // sum rule with missing set: all bands cover every row
        let total: usize = rep.all_bands().map(|b| b.count).sum();
        assert_eq!(total, ds.n_rows());
        // without the flag, missing rows are dropped from the axis
        let spec2 = spec_for(&["mpg", "rep78"]);
        let layout2 = compute_layout(&ds, &spec2).unwrap();
        let rep2 = &layout2.axes[1];
        assert!(rep2.missing_band.is_none());
        let total2: usize = rep2.all_bands().map(|b| b.count).sum();
        assert_eq!(total2, ds.n_rows() - 5);
    }

    #[test]
    fn numeric_band_order_is_monotone() {
        let ds = load("auto.csv");
        let layout = compute_layout(&ds, &spec_for(&["mpg", "weight"])).unwrap();
        for axis in &layout.axes {
            let centers: Vec<f64> = axis.bands.iter().map(|b| b.y_center).collect();
            assert!(centers.windows(2).all(|w| w[0] < w[1]));
        }
    }

    #[test]
    fn x_positions_arithmetic() {
        let xs = axis_x_positions(3, 0.2).unwrap();
        assert_eq!(xs.len(), 3);
        assert_eq!(xs[0].x_center, 1.0);
        assert_eq!(xs[2].x_center, 3.0);
        assert!((xs[0].half_width - 0.1).abs() < 1e-12);
        assert!((xs[0].connector_span - 0.8).abs() < 1e-12);
    }

    #[test]
    fn space_one_empties_connector_span() {
        let xs = axis_x_positions(2, 1.0).unwrap();
        assert_eq!(xs[0].connector_span, 0.0);
        // a single axis is fine when space = 1
        assert!(axis_x_positions(1, 1.0).is_ok());
        assert!(axis_x_positions(1, 0.5).is_err());
        assert!(axis_x_positions(0, 1.0).is_err());
    }

    #[test]
    fn annotation_x_lands_on_first_axis_center() {
        let affine = Affine::new(Canvas::default(), 6);
        let (x1, _) = affine.to_canvas(1.0, 50.0);
        let expected = MARGIN_LEFT + 0.5 * (1000.0 - MARGIN_LEFT - MARGIN_RIGHT) / 6.0;
        assert!((x1 - expected).abs() < 1e-12);
    }

    #[test]
    fn colorlist_length_enforced() {
        let ds = load("auto.csv");
        let spec = PlotSpec {
            hivar: Some("mpg".to_string()),
            hivals: vec![Predicate::GreaterThan(27.0)],
            colorlist: vec!["red".to_string()],
            ..spec_for(&["mpg", "weight"])
        };
        assert!(matches!(
            spec.validate(&ds),
            Err(LayoutError::ColorlistTooShort { needed: 2, got: 1 })
        ));
    }

    #[test]
    fn samescale_must_be_numeric_subset() {
        let ds = load("stages.csv");
        let spec = PlotSpec {
            samescale: vec!["rider".to_string()],
            ..spec_for(&["rider", "s16"])
        };
        assert!(matches!(
            spec.validate(&ds),
            Err(LayoutError::SamescaleNotInVarlist(_)) | Err(LayoutError::SamescaleNotNumeric(_))
        ));
    }

    #[test]
    fn label_format_general() {
        let f = LabelFormat::parse("%8.0g").unwrap();
        assert_eq!(f.width, 8);
        assert_eq!(f.format(0.0), "0");
        assert_eq!(f.format(15906.0), "15906");
        assert_eq!(f.format(21.0), "21");
        assert_eq!(f.format(0.5), "0.5");
        assert_eq!(f.format(-0.8072), "-0.8072");
        assert_eq!(f.format(2.5), "2.5");
        // too many integer digits for the width: scientific kicks in
        assert_eq!(f.format(123456789.0), "1.235e+8");
        assert_eq!(f.format(4.5e12), "4.5e+12");
        // small magnitudes prefer whichever notation keeps more digits
        assert_eq!(f.format(0.000001234), "1.234e-6");
        let wide = LabelFormat::parse("%12.0g").unwrap();
        assert_eq!(wide.format(123456789.0), "123456789");
    }

    #[test]
    fn label_format_rejects_garbage() {
        for bad in ["8.0g", "%g", "%0.0g", "%8.2f", "%8"] {
            assert!(LabelFormat::parse(bad).is_err(), "{bad} should fail");
        }
    }

    #[test]
    fn missing_band_stays_in_missing_region() {
        let ds = load("stages.csv");
        let spec = PlotSpec {
            missing: true,
            ..spec_for(&["s16", "s17", "s18"])
        };
        let layout = compute_layout(&ds, &spec).unwrap();
        let (mlo, mhi) = layout.regions.missing.unwrap();
        for axis in &layout.axes {
            if let Some(mb) = &axis.missing_band {
                let (lo, hi) = mb.y_extent();
                assert!(lo >= mlo - 1e-12 && hi <= mhi + 1e-12);
                assert!(mhi < layout.regions.data.0);
            }
        }
    }

    #[test]
    fn unknown_variable_rejected() {
        let ds = load("auto.csv");
        let spec = spec_for(&["mpg", "zzz"]);
        assert!(matches!(
            compute_layout(&ds, &spec),
            Err(LayoutError::Data(dataset::DataError::NoSuchColumn(name))) if name == "zzz"
        ));
    }
}
