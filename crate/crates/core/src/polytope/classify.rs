//! Reflexive polygons up to GL2(Z).

use alloc::vec::Vec;
use core::cmp::Ordering;

use num_integer::Integer;

use super::{LatticePolytope, Result};

/// Half-width of the vertex box `[-r, r]^2` searched by default.
pub const REFLEXIVE_SEARCH_RADIUS: i64 = 4;

type V2 = [i64; 2];

fn det(a: V2, b: V2) -> i64 {
    a[0] * b[1] - a[1] * b[0]
}

/// Compares polar angles in `[0, 2 pi)`.
fn angle_cmp(a: V2, b: V2) -> Ordering {
    let half = |v: V2| if v[1] > 0 || (v[1] == 0 && v[0] > 0) { 0 } else { 1 };
    half(a).cmp(&half(b)).then_with(|| 0.cmp(&det(a, b)))
}

/// An edge `v -> w` (counter-clockwise) lies on a line at lattice distance
/// one from the origin.
fn is_unit_edge(v: V2, w: V2) -> bool {
    let d = det(v, w);
    d > 0 && d == (w[0] - v[0]).gcd(&(w[1] - v[1]))
}

fn convex_turn(a: V2, b: V2, c: V2) -> bool {
    det([b[0] - a[0], b[1] - a[1]], [c[0] - b[0], c[1] - b[1]]) > 0
}

/// GL2(Z) normal form of a polygon with the origin in its interior:
/// over every vertex and orientation, send the vertex to `(1, 0)` and its
/// neighbour to `(x, y)` with `0 <= x < y`; keep the lexicographically
/// smallest sorted vertex list.
pub fn canonical_form_2d(vertices: &[Vec<i64>]) -> Vec<Vec<i64>> {
    let mut ring: Vec<V2> = vertices.iter().map(|v| [v[0], v[1]]).collect();
    ring.sort_by(|a, b| angle_cmp(*a, *b));
    let n = ring.len();
    let mut best: Option<Vec<V2>> = None;
    for i in 0..n {
        for orientation in [1isize, -1] {
            let v = ring[i];
            let w = ring[(i as isize + orientation).rem_euclid(n as isize) as usize];
            let g = v[0].gcd(&v[1]);
            let (p, q) = (v[0] / g, v[1] / g);
            let e = p.extended_gcd(&q);
            // [[a, b], [-q, p]] sends (p, q) to (1, 0).
            let mut m = [[e.x, e.y], [-q, p]];
            let apply = |m: &[[i64; 2]; 2], x: V2| [m[0][0] * x[0] + m[0][1] * x[1], m[1][0] * x[0] + m[1][1] * x[1]];
            let mut w2 = apply(&m, w);
            if w2[1] < 0 {
                m[1] = [-m[1][0], -m[1][1]];
                w2 = apply(&m, w);
            }
            let y = w2[1];
            if y == 0 {
                continue;
            }
            let t = -Integer::div_floor(&w2[0], &y);
            m[0] = [m[0][0] + t * m[1][0], m[0][1] + t * m[1][1]];
            let mut img: Vec<V2> = ring.iter().map(|&x| apply(&m, x)).collect();
            img.sort_unstable();
            if best.as_ref().is_none_or(|b| img < *b) {
                best = Some(img);
            }
        }
    }
    best.unwrap_or_default().into_iter().map(|v| v.to_vec()).collect()
}

/// All reflexive polygons with vertices in `[-radius, radius]^2`, up to
/// GL2(Z), as canonical forms sorted lexicographically.
///
/// A convex lattice polygon is reflexive iff its vertices, taken
/// counter-clockwise, are joined by edges at lattice distance one from the
/// origin; the search walks such cycles in increasing angle.
pub fn classify_reflexive_2d(radius: i64) -> Result<Vec<LatticePolytope>> {
    let mut pts: Vec<V2> = Vec::new();
    for x in -radius..=radius {
        for y in -radius..=radius {
            if (x, y) != (0, 0) && x.gcd(&y) == 1 {
                pts.push([x, y]);
            }
        }
    }
    pts.sort_by(|a, b| angle_cmp(*a, *b));
    let succ: Vec<Vec<usize>> = (0..pts.len())
        .map(|i| (0..pts.len()).filter(|&j| is_unit_edge(pts[i], pts[j])).collect())
        .collect();

    let mut classes: Vec<Vec<Vec<i64>>> = Vec::new();
    let mut path: Vec<usize> = Vec::new();
    for start in 0..pts.len() {
        path.clear();
        path.push(start);
        extend(&pts, &succ, &mut path, &mut classes);
    }
    classes.sort();
    classes.dedup();
    classes
        .into_iter()
        .map(|c| LatticePolytope::from_points(2, &c))
        .collect()
}

fn extend(pts: &[V2], succ: &[Vec<usize>], path: &mut Vec<usize>, out: &mut Vec<Vec<Vec<i64>>>) {
    let start = path[0];
    let last = *path.last().unwrap();
    for &next in &succ[last] {
        if next == start {
            if path.len() >= 3 {
                let n = path.len();
                let closes = convex_turn(pts[path[n - 2]], pts[last], pts[start])
                    && convex_turn(pts[last], pts[start], pts[path[1]]);
                if closes {
                    let vs: Vec<Vec<i64>> = path.iter().map(|&i| pts[i].to_vec()).collect();
                    let c = canonical_form_2d(&vs);
                    if !out.contains(&c) {
                        out.push(c);
                    }
                }
            }
            continue;
        }
        // The start vertex has the smallest angle; angles increase along the path.
        if next <= last {
            continue;
        }
        if path.len() >= 2 && !convex_turn(pts[path[path.len() - 2]], pts[last], pts[next]) {
            continue;
        }
        path.push(next);
        extend(pts, succ, path, out);
        path.pop();
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    #[test]
    fn canonical_form_is_invariant() {
        let tri = vec![vec![1, 0], vec![0, 1], vec![-1, -1]];
        let g = |v: &Vec<i64>| vec![2 * v[0] + v[1], v[0] + v[1]];
        let moved: Vec<Vec<i64>> = tri.iter().map(g).collect();
        assert_eq!(canonical_form_2d(&tri), canonical_form_2d(&moved));
        let flipped: Vec<Vec<i64>> = tri.iter().map(|v| vec![v[1], v[0]]).collect();
        assert_eq!(canonical_form_2d(&tri), canonical_form_2d(&flipped));
    }

    #[test]
    fn square_and_triangle_differ() {
        let sq = vec![vec![1, 0], vec![0, 1], vec![-1, 0], vec![0, -1]];
        let tri = vec![vec![1, 0], vec![0, 1], vec![-1, -1]];
        assert_ne!(canonical_form_2d(&sq), canonical_form_2d(&tri));
    }

    #[test]
    fn unit_edges() {
        assert!(is_unit_edge([1, 0], [0, 1]));
        assert!(is_unit_edge([2, -1], [-1, 2]));
        assert!(!is_unit_edge([2, 0], [0, 2]));
        assert!(!is_unit_edge([0, 1], [1, 0]));
    }
}
