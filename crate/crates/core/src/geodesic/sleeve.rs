//! Geodesics inside a simple polygon: ear-clipping triangulation, the dual
//! tree's sleeve between the two query triangles, and string pulling over the
//! crossed diagonals. All turning decisions use the exact orientation sign.

use crate::error::{Error, Result};
use crate::geom::{orient, signed_area2, Point};

/// Provenance of a path or polygon vertex: an index into the original
/// polygon, or a derived point (clip corners, tangencies, query endpoints).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum VTag {
    Poly(usize),
    Aux,
}

/// Ear-clipping triangulation of a counterclockwise simple polygon.
/// Zero-area ears are clipped but not reported. O(n^2).
pub fn triangulate(pts: &[Point]) -> Result<Vec<[usize; 3]>> {
    let n = pts.len();
    if n < 3 {
        return Err(Error::InvalidInput("triangulating a degenerate polygon".into()));
    }
    debug_assert!(signed_area2(pts) > 0.0, "polygon must be counterclockwise");
    let mut next: Vec<usize> = (0..n).map(|i| (i + 1) % n).collect();
    let mut prev: Vec<usize> = (0..n).map(|i| (i + n - 1) % n).collect();
    let mut alive = n;
    let mut tris = Vec::with_capacity(n.saturating_sub(2));
    let mut v = 0usize;
    let mut since_progress = 0usize;
    while alive > 3 {
        let (p, q) = (prev[v], next[v]);
        if is_ear(pts, &next, p, v, q, alive) {
            if orient(pts[p], pts[v], pts[q]) > 0 {
                tris.push([p, v, q]);
            }
            next[p] = q;
            prev[q] = p;
            alive -= 1;
            v = q;
            since_progress = 0;
        } else {
            v = q;
            since_progress += 1;
            if since_progress > alive + 1 {
                return Err(Error::Internal(
                    "ear clipping stalled; polygon is likely not simple".into(),
                ));
            }
        }
    }
    let (p, q) = (prev[v], next[v]);
    if orient(pts[p], pts[v], pts[q]) > 0 {
        tris.push([p, v, q]);
    }
    Ok(tris)
}

fn is_ear(pts: &[Point], next: &[usize], p: usize, v: usize, q: usize, alive: usize) -> bool {
    let o = orient(pts[p], pts[v], pts[q]);
    if o < 0 {
        return false;
    }
    if o == 0 {
        // collinear spike or straight-through vertex clips away freely
        return pts[p].sub(pts[v]).dot(pts[q].sub(pts[v])) <= 0.0;
    }
    // no other vertex may lie inside the candidate ear
    let mut w = next[q];
    for _ in 0..alive {
        if w == p {
            break;
        }
        if w != p && w != v && w != q && point_in_tri_closed(pts[p], pts[v], pts[q], pts[w]) {
            return false;
        }
        w = next[w];
    }
    true
}

fn point_in_tri_closed(a: Point, b: Point, c: Point, p: Point) -> bool {
    orient(a, b, p) >= 0 && orient(b, c, p) >= 0 && orient(c, a, p) >= 0
}

/// Triangle of the triangulation containing `p` (closed triangles).
fn locate_triangle(pts: &[Point], tris: &[[usize; 3]], p: Point) -> Option<usize> {
    tris.iter()
        .position(|t| point_in_tri_closed(pts[t[0]], pts[t[1]], pts[t[2]], p))
}

/// Geodesic between two interior points of a simple ccw polygon, via the
/// sleeve of the triangulation dual and string pulling. Returns the turning
/// vertices with their provenance tags, endpoints included.
pub fn geodesic_in_polygon(
    pts: &[Point],
    tags: &[VTag],
    a: Point,
    b: Point,
) -> Result<Vec<(Point, VTag)>> {
    debug_assert_eq!(pts.len(), tags.len());
    if a == b {
        return Ok(vec![(a, VTag::Aux)]);
    }
    let tris = triangulate(pts)?;
    let ta = locate_triangle(pts, &tris, a)
        .ok_or_else(|| Error::DegenerateQuery("path source outside polygon".into()))?;
    let tb = locate_triangle(pts, &tris, b)
        .ok_or_else(|| Error::DegenerateQuery("path target outside polygon".into()))?;

    // sleeve: tree path in the dual
    let sleeve = dual_path(&tris, ta, tb)?;

    // portals (left, right) oriented so the next triangle lies left of l->r
    let mut portals: Vec<(usize, usize)> = Vec::new();
    for w in sleeve.windows(2) {
        let (t0, t1) = (tris[w[0]], tris[w[1]]);
        let shared = shared_edge(&t0, &t1)
            .ok_or_else(|| Error::Internal("sleeve triangles share no edge".into()))?;
        // orient by t1's ccw boundary: interior of t1 left of (u, v)
        let (u, v) = orient_edge_in(&t1, shared);
        portals.push((u, v)); // facing travel: left = u, right = v
    }

    Ok(string_pull(pts, tags, a, b, &portals))
}

fn dual_path(tris: &[[usize; 3]], from: usize, to: usize) -> Result<Vec<usize>> {
    if from == to {
        return Ok(vec![from]);
    }
    let m = tris.len();
    let mut parent = vec![usize::MAX; m];
    let mut queue = std::collections::VecDeque::new();
    parent[from] = from;
    queue.push_back(from);
    'bfs: while let Some(t) = queue.pop_front() {
        for (s, other) in tris.iter().enumerate() {
            if parent[s] != usize::MAX || shared_edge(&tris[t], other).is_none() {
                continue;
            }
            parent[s] = t;
            if s == to {
                break 'bfs;
            }
            queue.push_back(s);
        }
    }
    if parent[to] == usize::MAX {
        return Err(Error::Internal("triangulation dual is disconnected".into()));
    }
    let mut path = vec![to];
    let mut cur = to;
    while cur != from {
        cur = parent[cur];
        path.push(cur);
    }
    path.reverse();
    Ok(path)
}

fn shared_edge(a: &[usize; 3], b: &[usize; 3]) -> Option<(usize, usize)> {
    let mut common = [0usize; 3];
    let mut k = 0;
    for &x in a {
        if b.contains(&x) {
            if k == 3 {
                return None;
            }
            common[k] = x;
            k += 1;
        }
    }
    (k == 2).then_some((common[0], common[1]))
}

fn orient_edge_in(t: &[usize; 3], e: (usize, usize)) -> (usize, usize) {
    for i in 0..3 {
        let (u, v) = (t[i], t[(i + 1) % 3]);
        if (u == e.0 && v == e.1) || (u == e.1 && v == e.0) {
            return (u, v);
        }
    }
    e
}

/// Classic funnel over the portal sequence, with exact orientation tests.
fn string_pull(
    pts: &[Point],
    tags: &[VTag],
    a: Point,
    b: Point,
    portals: &[(usize, usize)],
) -> Vec<(Point, VTag)> {
    #[derive(Clone, Copy, PartialEq)]
    struct PV {
        p: Point,
        tag: VTag,
    }
    let pv = |i: usize| PV {
        p: pts[i],
        tag: tags[i],
    };
    let apex0 = PV { p: a, tag: VTag::Aux };
    let end = PV { p: b, tag: VTag::Aux };
    // portal list with the degenerate final portal at b
    let mut ports: Vec<(PV, PV)> = portals.iter().map(|&(l, r)| (pv(l), pv(r))).collect();
    ports.push((end, end));

    let mut path = vec![apex0];
    let mut apex = apex0;
    let mut left = apex0;
    let mut right = apex0;
    let mut li = 0usize;
    let mut ri = 0usize;
    let mut i = 0usize;
    while i < ports.len() {
        let (nl, nr) = ports[i];
        // tighten the right leg: nr left of (or on) the current right leg
        if orient(apex.p, right.p, nr.p) >= 0 {
            if apex.p == right.p || orient(apex.p, left.p, nr.p) < 0 {
                right = nr;
                ri = i;
            } else {
                // right leg crossed the left: turn at the left vertex
                if left.p != apex.p {
                    path.push(left);
                }
                apex = left;
                right = apex;
                i = li + 1;
                li = i;
                ri = i;
                left = apex;
                continue;
            }
        }
        // tighten the left leg: nl right of (or on) the current left leg
        if orient(apex.p, left.p, nl.p) <= 0 {
            if apex.p == left.p || orient(apex.p, right.p, nl.p) > 0 {
                left = nl;
                li = i;
            } else {
                if right.p != apex.p {
                    path.push(right);
                }
                apex = right;
                left = apex;
                i = ri + 1;
                ri = i;
                li = i;
                right = apex;
                continue;
            }
        }
        i += 1;
    }
    if path.last().map(|v| v.p) != Some(b) {
        path.push(end);
    }
    path.into_iter().map(|v| (v.p, v.tag)).collect()
}

pub fn path_length(path: &[(Point, VTag)]) -> f64 {
    path.windows(2).map(|w| w[0].0.dist(w[1].0)).sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geom::pt;

    fn tags_of(n: usize) -> Vec<VTag> {
        (0..n).map(VTag::Poly).collect()
    }

    #[test]
    fn triangulate_square_and_reflex() {
        let sq = vec![pt(0.0, 0.0), pt(1.0, 0.0), pt(1.0, 1.0), pt(0.0, 1.0)];
        assert_eq!(triangulate(&sq).unwrap().len(), 2);
        let lshape = vec![
            pt(0.0, 0.0),
            pt(4.0, 0.0),
            pt(4.0, 4.0),
            pt(3.0, 4.0),
            pt(3.0, 1.0),
            pt(0.0, 1.0),
        ];
        let tris = triangulate(&lshape).unwrap();
        assert_eq!(tris.len(), 4);
        // area preserved
        let area: f64 = tris
            .iter()
            .map(|t| {
                signed_area2(&[lshape[t[0]], lshape[t[1]], lshape[t[2]]]) / 2.0
            })
            .sum();
        assert!((area - 7.0).abs() < 1e-12);
    }

    #[test]
    fn straight_shot_in_convex() {
        let sq = vec![pt(0.0, 0.0), pt(1.0, 0.0), pt(1.0, 1.0), pt(0.0, 1.0)];
        let path =
            geodesic_in_polygon(&sq, &tags_of(4), pt(0.2, 0.2), pt(0.8, 0.8)).unwrap();
        assert_eq!(path.len(), 2);
        assert!((path_length(&path) - 0.6 * 2f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn lshape_bends_at_reflex_vertex() {
        let lshape = vec![
            pt(0.0, 0.0),
            pt(4.0, 0.0),
            pt(4.0, 4.0),
            pt(3.0, 4.0),
            pt(3.0, 1.0),
            pt(0.0, 1.0),
        ];
        let path = geodesic_in_polygon(
            &lshape,
            &tags_of(6),
            pt(0.5, 0.5),
            pt(3.5, 3.5),
        )
        .unwrap();
        assert_eq!(path.len(), 3);
        assert_eq!(path[1].1, VTag::Poly(4));
        assert!(path[1].0.dist(pt(3.0, 1.0)) < 1e-12);
        let expect = pt(0.5, 0.5).dist(pt(3.0, 1.0)) + pt(3.0, 1.0).dist(pt(3.5, 3.5));
        assert!((path_length(&path) - expect).abs() < 1e-12);
    }

    #[test]
    fn spiral_multiple_turns() {
        // a staircase corridor forcing two turns
        let poly = vec![
            pt(0.0, 0.0),
            pt(5.0, 0.0),
            pt(5.0, 5.0),
            pt(2.0, 5.0),
            pt(2.0, 3.0),
            pt(3.0, 3.0),
            pt(3.0, 4.0),
            pt(4.0, 4.0),
            pt(4.0, 1.0),
            pt(0.0, 1.0),
        ];
        assert!(signed_area2(&poly) > 0.0);
        let path = geodesic_in_polygon(
            &poly,
            &tags_of(10),
            pt(0.5, 0.5),
            pt(2.5, 4.5),
        )
        .unwrap();
        assert!(path.len() >= 3, "{path:?}");
        // the path must bend around (4,1) and (3,4) or equivalent corners
        let len = path_length(&path);
        assert!(len > pt(0.5, 0.5).dist(pt(2.5, 4.5)));
    }
}
