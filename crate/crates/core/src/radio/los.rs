//! Deterministic obstacle blockage on the pixel grid.

use crate::geometry::Point;
use crate::scenario::PixelGrid;

/// Grid cells visited by Bresenham's line between two cells, both ends
/// included, in walk order.
pub fn bresenham_cells(from: (i64, i64), to: (i64, i64)) -> Vec<(i64, i64)> {
    let mut cells = Vec::new();
    walk(from, to, |c| {
        cells.push(c);
        true
    });
    cells
}

/// Walks the line, stopping early when `visit` returns false. Returns whether
/// the walk reached the end.
fn walk(from: (i64, i64), to: (i64, i64), mut visit: impl FnMut((i64, i64)) -> bool) -> bool {
    let (mut x, mut y) = from;
    let dx = (to.0 - x).abs();
    let dy = -(to.1 - y).abs();
    let sx = if x < to.0 { 1 } else { -1 };
    let sy = if y < to.1 { 1 } else { -1 };
    let mut err = dx + dy;
    loop {
        if !visit((x, y)) {
            return false;
        }
        if x == to.0 && y == to.1 {
            return true;
        }
        let e2 = 2 * err;
        if e2 >= dy {
            err += dy;
            x += sx;
        }
        if e2 <= dx {
            err += dx;
            y += sy;
        }
    }
}

/// True when the rasterized segment `p1→p2` touches no obstacle cell.
///
/// Bresenham's walk depends on direction on ties, so both walks must be
/// clear; this keeps the test symmetric and means neither trace can cross an
/// obstacle. Two points in the same cell always see each other.
pub fn line_of_sight(p1: &Point, p2: &Point, grid: &PixelGrid) -> bool {
    let a = grid.cell_of(p1);
    let b = grid.cell_of(p2);
    if a == b {
        return true;
    }
    let clear = |(ix, iy)| !grid.is_obstacle(ix, iy);
    walk(a, b, clear) && walk(b, a, clear)
}
