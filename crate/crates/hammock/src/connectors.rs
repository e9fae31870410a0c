//! The bivariate layer: contingency-table cells between adjacent axes,
//! highlight stratification, width flooring, and polygon geometry.

use std::collections::BTreeMap;

use thiserror::Error;

use crate::dataset::{CellValue, Column, DataError, Dataset, Predicate};
use crate::layout::{Layout, PlotSpec, Shape};

#[derive(Debug, Error)]
pub enum ConnectorError {
    #[error("columns '{left}' and '{right}' differ in length ({nl} vs {nr})")]
    LengthMismatch {
        left: String,
        right: String,
        nl: usize,
        nr: usize,
    },
    #[error(transparent)]
    Data(#[from] DataError),
}

/// The share of one connector (or bar) drawn in one color. Index 0 is the
/// default color; index i >= 1 is the i-th hival.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Stratum {
    pub color_index: usize,
    pub count: usize,
}

/// Four-corner polygon in canonical coordinates, wound bottom-left,
/// bottom-right, top-right, top-left.
pub type Quad = [(f64, f64); 4];

#[derive(Debug, Clone)]
pub struct StratumPolygon {
    pub color_index: usize,
    pub corners: Quad,
}

/// One cell of the contingency table of two adjacent axes, with its
/// highlight strata and geometry.
#[derive(Debug, Clone)]
pub struct Connector {
    /// x_index of the left axis (1-based).
    pub left_axis: usize,
    pub left_key: CellValue,
    pub right_key: CellValue,
    pub rows: Vec<usize>,
    pub count: usize,
    /// max(count, minbarfreq): the count the width behaves as.
    pub effective_count: usize,
    pub width: f64,
    /// Centerline endpoints at the univariate-region edges.
    pub left_anchor: (f64, f64),
    pub right_anchor: (f64, f64),
    pub strata: Vec<Stratum>,
    /// One polygon per stratum, stacked along the connector normal,
    /// default stratum first (bottom).
    pub polygons: Vec<StratumPolygon>,
}

impl Connector {
    pub fn outline(&self, shape: Shape, aspect: f64) -> Quad {
        offset_quad(
            self.left_anchor,
            self.right_anchor,
            -self.width / 2.0,
            self.width / 2.0,
            shape,
            aspect,
        )
    }
}

/// Cross-tabulate two columns of equal length. With `include_missing`,
/// Missing is an ordinary key and every row lands in exactly one cell;
/// otherwise rows missing on either side are dropped.
pub fn crosstab(
    a: &Column,
    b: &Column,
    include_missing: bool,
) -> Result<BTreeMap<(CellValue, CellValue), Vec<usize>>, ConnectorError> {
    if a.cells.len() != b.cells.len() {
        return Err(ConnectorError::LengthMismatch {
            left: a.name.clone(),
            right: b.name.clone(),
            nl: a.cells.len(),
            nr: b.cells.len(),
        });
    }
    let mut cells: BTreeMap<(CellValue, CellValue), Vec<usize>> = BTreeMap::new();
    for (row, (ca, cb)) in a.cells.iter().zip(&b.cells).enumerate() {
        if !include_missing && (ca.is_missing() || cb.is_missing()) {
            continue;
        }
        cells.entry((*ca, *cb)).or_default().push(row);
    }
    Ok(cells)
}

/// Split a cell's rows by highlight predicate. Each row goes to the first
/// matching hival (color_index = position + 1) or to the default stratum;
/// strata come out default first, then hivals in declaration order, empty
/// ones omitted.
pub fn stratify(
    cell_rows: &[usize],
    hivar: &Column,
    hivals: &[Predicate],
) -> Result<Vec<Stratum>, ConnectorError> {
    for pred in hivals {
        pred.check_kind(hivar)?;
    }
    let mut counts = vec![0usize; hivals.len() + 1];
    for &row in cell_rows {
        let cell = &hivar.cells[row];
        let color = hivals
            .iter()
            .position(|p| p.matches(cell))
            .map_or(0, |i| i + 1);
        counts[color] += 1;
    }
    Ok(counts
        .into_iter()
        .enumerate()
        .filter(|(_, n)| *n > 0)
        .map(|(color_index, count)| Stratum { color_index, count })
        .collect())
}

/// Width of a connector representing `count` rows: max(count, minbarfreq)
/// x unit x barwidth, where unit is the per-observation thickness shared
/// with the adjacent univariate bars.
pub fn connector_width(count: usize, spec: &PlotSpec, unit: f64) -> f64 {
    count.max(spec.minbarfreq) as f64 * unit * spec.barwidth
}

/// Quad between the two faces at signed normal offsets `lo` and `hi` from
/// the centerline. Parallelograms offset vertically; rectangles offset
/// along the unit normal computed in aspect-corrected display space, where
/// `aspect` is the horizontal-to-vertical unit ratio.
pub fn offset_quad(
    left: (f64, f64),
    right: (f64, f64),
    lo: f64,
    hi: f64,
    shape: Shape,
    aspect: f64,
) -> Quad {
    let (xl, yl) = left;
    let (xr, yr) = right;
    match shape {
        Shape::Parallelogram => [(xl, yl + lo), (xr, yr + lo), (xr, yr + hi), (xl, yl + hi)],
        Shape::Rectangle => {
            let dx = (xr - xl) * aspect;
            let dy = yr - yl;
            let len = dx.hypot(dy);
            let (nx, ny) = (-dy / len, dx / len);
            let corner = |x: f64, y: f64, off: f64| (x + nx * off / aspect, y + ny * off);
            [
                corner(xl, yl, lo),
                corner(xr, yr, lo),
                corner(xr, yr, hi),
                corner(xl, yl, hi),
            ]
        }
    }
}

/// Full connector polygon of the given width centered on the segment.
/// `None` when the span is degenerate (space = 1).
pub fn connector_geometry(
    left: (f64, f64),
    right: (f64, f64),
    width: f64,
    shape: Shape,
    aspect: f64,
) -> Option<Quad> {
    if right.0 <= left.0 {
        return None;
    }
    Some(offset_quad(left, right, -width / 2.0, width / 2.0, shape, aspect))
}

struct PendingCell {
    left_key: CellValue,
    right_key: CellValue,
    rows: Vec<usize>,
    width: f64,
    left_y: f64,
    right_y: f64,
}

/// Build every connector between adjacent axes of the layout. Returns an
/// empty list when space = 1 (parallel univariate plots).
pub fn build_connectors(
    ds: &Dataset,
    spec: &PlotSpec,
    layout: &Layout,
) -> Result<Vec<Connector>, ConnectorError> {
    let k = layout.k();
    if k < 2 || layout.x_positions[0].connector_span <= 0.0 {
        return Ok(Vec::new());
    }
    let hivar = match &spec.hivar {
        Some(name) => Some(ds.column(name)?),
        None => None,
    };
    let aspect = layout.affine.aspect();

    let mut connectors = Vec::new();
    for i in 0..k - 1 {
        let (lax, rax) = (&layout.axes[i], &layout.axes[i + 1]);
        let left_col = ds.column(&lax.var)?;
        let right_col = ds.column(&rax.var)?;
        let cells = crosstab(left_col, right_col, spec.missing)?;
        let unit = (lax.unit * rax.unit).sqrt();

        // widths and band centers first, anchors after stacking
        let mut pending: Vec<PendingCell> = cells
            .into_iter()
            .filter_map(|((lk, rk), rows)| {
                let left_band = lax.band(&lk)?;
                let right_band = rax.band(&rk)?;
                Some(PendingCell {
                    left_key: lk,
                    right_key: rk,
                    width: connector_width(rows.len(), spec, unit),
                    left_y: left_band.y_center,
                    right_y: right_band.y_center,
                    rows,
                })
            })
            .collect();

        // Anchors: connectors sharing a band stack inside its vertical
        // extent, ordered by the opposite band's center so bundles fan out
        // without crossing at the attachment point.
        let left_anchor_y = stack_anchors(
            &pending,
            |c| c.left_key,
            |c| (c.right_y, c.right_key),
            |key| lax.band(&key).expect("band exists").y_center,
        );
        let right_anchor_y = stack_anchors(
            &pending,
            |c| c.right_key,
            |c| (c.left_y, c.left_key),
            |key| rax.band(&key).expect("band exists").y_center,
        );

        let x_left = layout.x_positions[i].x_center + layout.x_positions[i].half_width;
        let x_right = layout.x_positions[i + 1].x_center - layout.x_positions[i + 1].half_width;

        for (idx, cell) in pending.drain(..).enumerate() {
            let count = cell.rows.len();
            let effective_count = count.max(spec.minbarfreq);
            let left_anchor = (x_left, left_anchor_y[idx]);
            let right_anchor = (x_right, right_anchor_y[idx]);

            let strata = match hivar {
                Some(col) => stratify(&cell.rows, col, &spec.hivals)?,
                None => vec![Stratum {
                    color_index: 0,
                    count,
                }],
            };
            // stratum widths by the same flooring formula, rescaled to
            // partition the connector width exactly
            let raw: Vec<f64> = strata
                .iter()
                .map(|s| connector_width(s.count, spec, unit))
                .collect();
            let raw_total: f64 = raw.iter().sum();
            let scale = cell.width / raw_total;
            let mut polygons = Vec::with_capacity(strata.len());
            let mut offset = -cell.width / 2.0;
            for (stratum, raw_w) in strata.iter().zip(&raw) {
                let w = raw_w * scale;
                polygons.push(StratumPolygon {
                    color_index: stratum.color_index,
                    corners: offset_quad(
                        left_anchor,
                        right_anchor,
                        offset,
                        offset + w,
                        spec.shape,
                        aspect,
                    ),
                });
                offset += w;
            }

            connectors.push(Connector {
                left_axis: lax.x_index,
                left_key: cell.left_key,
                right_key: cell.right_key,
                rows: cell.rows,
                count,
                effective_count,
                width: cell.width,
                left_anchor,
                right_anchor,
                strata,
                polygons,
            });
        }
    }
    Ok(connectors)
}

/// Anchor y per pending cell: cells grouped by their band on one side are
/// stacked contiguously, centered on the band center, sorted by the
/// opposite band's (y, key).
fn stack_anchors(
    pending: &[PendingCell],
    band_key: impl Fn(&PendingCell) -> CellValue,
    opposite: impl Fn(&PendingCell) -> (f64, CellValue),
    band_center: impl Fn(CellValue) -> f64,
) -> Vec<f64> {
    let mut groups: BTreeMap<CellValue, Vec<usize>> = BTreeMap::new();
    for (idx, cell) in pending.iter().enumerate() {
        groups.entry(band_key(cell)).or_default().push(idx);
    }
    let mut anchors = vec![0.0; pending.len()];
    for (key, mut members) in groups {
        members.sort_by(|&a, &b| {
            let (ya, ka) = opposite(&pending[a]);
            let (yb, kb) = opposite(&pending[b]);
            ya.partial_cmp(&yb).unwrap().then(ka.cmp(&kb))
        });
        let total: f64 = members.iter().map(|&m| pending[m].width).sum();
        let mut cursor = band_center(key) - total / 2.0;
        for &m in &members {
            anchors[m] = cursor + pending[m].width / 2.0;
            cursor += pending[m].width;
        }
    }
    anchors
}
