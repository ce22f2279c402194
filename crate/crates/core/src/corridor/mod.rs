//! Corridor decomposition of the polygon's curve set and the violator-space
//! instance that locates the corridor containing a query point.
//!
//! The boundary is broken into curves of `s` edges. A subset of curves plus a
//! surrounding frame induces a medial-axis decomposition into corridors, each
//! bounded by a floor curve, a ceiling curve, and up to two gates (an active
//! medial-axis vertex with spokes to its tangency points and an empty disk).
//! Corridors are reconstructed on demand from O(s) words; nothing global is
//! stored.

mod medial;

pub use medial::{corridor_of, explore_debug, validate_corridor, SiteSet};

use crate::error::{Error, Result};
use crate::geom::{point_in_polyline, segment_meets_disk, Containment, Point, PolygonHandle};
use crate::vsolve::ViolatorInstance;
use crate::workspace::Workspace;

/// Curve label within a site set; the frame participates in defining sets but
/// is never a solver constraint.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum CurveRef {
    Curve(usize),
    Frame,
}

impl CurveRef {
    pub fn id(&self) -> Option<usize> {
        match self {
            CurveRef::Curve(i) => Some(*i),
            CurveRef::Frame => None,
        }
    }
}

/// O(1)-space description of the breakup of an n-vertex polygon into curves
/// of s edges; curve i is reconstructible from (i, s, n) alone.
#[derive(Debug, Clone, Copy)]
pub struct CurveLayout {
    pub n: usize,
    pub s: usize,
    pub na: usize,
}

/// nA = floor((n - 1) / s) + 1 curves; the last curve wraps back to vertex 1.
pub fn break_polygon(n: usize, s: usize) -> CurveLayout {
    assert!(n >= 3 && s >= 1, "need n >= 3, s >= 1");
    let s = s.min(n);
    CurveLayout {
        n,
        s,
        na: (n - 1) / s + 1,
    }
}

impl CurveLayout {
    /// Vertices of curve i (0-based), including both shared endpoints.
    pub fn vertex_count(&self, i: usize) -> usize {
        if i + 1 < self.na {
            self.s + 1
        } else {
            self.n - (self.na - 1) * self.s + 1
        }
    }
    pub fn edge_count(&self, i: usize) -> usize {
        self.vertex_count(i) - 1
    }
    /// Global 0-based polygon index of the j-th vertex of curve i.
    pub fn global_vertex(&self, i: usize, j: usize) -> usize {
        (i * self.s + j) % self.n
    }
    /// Curve owning edge (v, v+1) of the polygon.
    pub fn curve_of_edge(&self, v: usize) -> usize {
        (v / self.s).min(self.na - 1)
    }
}

/// Gate: active medial-axis vertex, its two spokes' tangency points on the
/// corridor sides, the empty disk, and the curve behind the door.
#[derive(Debug, Clone)]
pub struct Gate {
    pub active_vertex: Point,
    pub radius: f64,
    /// tangency points, (floor side, ceiling side)
    pub tangency: (Point, Point),
    pub outer: CurveRef,
}

#[derive(Debug, Clone)]
pub struct Corridor {
    pub floor: CurveRef,
    pub ceiling: CurveRef,
    pub gates: Vec<Gate>,
    /// sorted curve ids of the defining set, frame excluded
    pub defining: Vec<usize>,
    /// closed boundary walk (parity-correct; simple for interior corridors)
    pub boundary: Vec<Point>,
    /// coordinate scale used for tolerances
    pub scale: f64,
}

impl Corridor {
    pub fn words(&self) -> usize {
        2 * self.boundary.len() + 8 * self.gates.len() + self.defining.len() + 8
    }

    pub fn contains(&self, p: Point) -> bool {
        point_in_polyline(&self.boundary, p) != Containment::Outside
    }
}

/// Violation test: one curve vertex inside the corridor, or any curve segment
/// meeting a gate disk's open interior. Curves of one simple polygon cannot
/// cross each other or the floor/ceiling chains, and the gate walls lie
/// inside their disks, so the disks guard the only way in. O(s) time.
pub fn violates_corridor(
    poly: &PolygonHandle,
    layout: &CurveLayout,
    curve: usize,
    c: &Corridor,
) -> bool {
    let tol = 1e-9 * c.scale;
    let v0 = poly.vertex(layout.global_vertex(curve, 0));
    if point_in_polyline(&c.boundary, v0) == Containment::Inside {
        return true;
    }
    let m = layout.edge_count(curve);
    for j in 0..m {
        let a = poly.vertex(layout.global_vertex(curve, j));
        let b = poly.vertex(layout.global_vertex(curve, j + 1));
        for g in &c.gates {
            if g.radius > tol && segment_meets_disk(a, b, g.active_vertex, g.radius - tol) {
                return true;
            }
        }
    }
    false
}

/// Point-location instance over the curve set: constraints are curves,
/// combinatorial dimension 4, the frame is implicit and always present.
pub struct CorridorInstance<'a> {
    pub poly: &'a PolygonHandle<'a>,
    pub layout: CurveLayout,
    pub query: Point,
}

impl<'a> CorridorInstance<'a> {
    pub fn new(poly: &'a PolygonHandle<'a>, layout: CurveLayout, query: Point) -> Self {
        CorridorInstance {
            poly,
            layout,
            query,
        }
    }
}

impl<'a> ViolatorInstance for CorridorInstance<'a> {
    type Cell = Corridor;

    fn constraint_count(&self) -> usize {
        self.layout.na
    }
    fn dim(&self) -> usize {
        4
    }
    fn basis_of(&self, ids: &[usize], ws: &mut Workspace) -> Result<(Vec<usize>, Self::Cell)> {
        let sites = SiteSet::from_polygon_subset(self.poly, &self.layout, ids)?;
        let corridor = corridor_of(&sites, self.query, ws)?;
        if !corridor.defining.iter().all(|d| ids.contains(d)) {
            return Err(Error::Internal(format!(
                "defining set {:?} escapes subset {:?}",
                corridor.defining, ids
            )));
        }
        Ok((corridor.defining.clone(), corridor))
    }
    fn violates(&self, c: usize, cell: &Self::Cell) -> bool {
        violates_corridor(self.poly, &self.layout, c, cell)
    }
    fn cell_words(&self, cell: &Self::Cell) -> usize {
        cell.words()
    }
    fn violation_cost(&self, c: usize) -> u64 {
        self.layout.edge_count(c) as u64 + 1
    }
    fn basis_cost(&self, ids: &[usize]) -> u64 {
        let t: usize = ids.iter().map(|&i| self.layout.edge_count(i)).sum::<usize>() + 4;
        let lg = (usize::BITS - t.leading_zeros()) as u64;
        t as u64 * (lg + 1)
    }
}

/// Locate the corridor of the full curve set containing p, using the
/// low-space solver. O(s) workspace.
pub fn locate_corridor(
    poly: &PolygonHandle,
    s: usize,
    p: Point,
    seed: u64,
    opts: &crate::vsolve::PrgOptions,
    ws: &mut Workspace,
) -> Result<(Corridor, crate::vsolve::SolveStats)> {
    if crate::geom::point_in_polygon(poly, p) == Containment::Outside {
        return Err(Error::InvalidInput("query point outside polygon".into()));
    }
    let layout = break_polygon(poly.len(), s);
    let inst = CorridorInstance::new(poly, layout, p);
    let (_, cell, stats) = crate::vsolve::solve_prg(&inst, seed, opts, ws)?;
    if !cell.contains(p) {
        return Err(Error::Internal(
            "located corridor does not contain the query point".into(),
        ));
    }
    Ok((cell, stats))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geom::pt;
    use crate::vsolve::PrgOptions;
    use medial::validate_corridor;

    fn square4() -> Vec<Point> {
        vec![pt(0.0, 0.0), pt(4.0, 0.0), pt(4.0, 4.0), pt(0.0, 4.0)]
    }

    // an uneven octagon so nothing is symmetric-degenerate
    fn octagon() -> Vec<Point> {
        vec![
            pt(0.0, 0.0),
            pt(2.1, -0.2),
            pt(4.0, 0.1),
            pt(4.3, 2.0),
            pt(3.9, 4.1),
            pt(2.0, 4.4),
            pt(-0.1, 3.9),
            pt(-0.4, 1.8),
        ]
    }

    #[test]
    fn single_curve_interior_is_whole_polygon() {
        let pts = square4();
        let poly = PolygonHandle::new(&pts).unwrap();
        let layout = break_polygon(4, 8);
        assert_eq!(layout.na, 1);
        let sites = SiteSet::from_polygon_subset(&poly, &layout, &[0]).unwrap();
        let mut ws = Workspace::new();
        let c = corridor_of(&sites, pt(1.0, 2.2), &mut ws).unwrap();
        validate_corridor(&sites, &c, pt(1.0, 2.2)).unwrap();
        assert_eq!(c.defining, vec![0]);
        assert!(c.gates.is_empty(), "gates: {:?}", c.gates);
        // boundary is the polygon itself
        assert_eq!(c.boundary.len(), 4);
        assert!(c.contains(pt(3.9, 3.9)));
        assert!(!c.contains(pt(4.2, 2.0)));
    }

    #[test]
    fn single_curve_annulus_has_closure_gate() {
        // generic quadrilateral (an axis-aligned square puts the closure
        // gate's wall exactly collinear with an edge, which is the kind of
        // degeneracy the construction refuses rather than resolves)
        let pts = vec![pt(0.0, 0.0), pt(4.1, 0.3), pt(3.8, 4.2), pt(-0.3, 3.9)];
        let poly = PolygonHandle::new(&pts).unwrap();
        let layout = break_polygon(4, 8);
        let sites = SiteSet::from_polygon_subset(&poly, &layout, &[0]).unwrap();
        let mut ws = Workspace::new();
        // query between the curve and the frame
        let q = pt(2.0, -0.4);
        let c = corridor_of(&sites, q, &mut ws).unwrap();
        validate_corridor(&sites, &c, q).unwrap();
        assert_eq!(c.defining, vec![0]);
        assert!(
            !c.gates.is_empty(),
            "annulus corridor needs the closure-junction gate"
        );
        // closure gates pass through the closure vertex
        for g in &c.gates {
            assert!((g.active_vertex.dist(pt(0.0, 0.0)) - g.radius).abs() < 1e-6);
        }
        // corridor covers the far side of the annulus too
        assert!(c.contains(pt(2.0, 4.35)));
        assert!(!c.contains(pt(2.0, 2.0)), "interior is a different cell");
    }

    #[test]
    fn octagon_two_curves_interior_seals_at_junctions() {
        // two curves meeting at both junctions: only two distinct curves, so
        // no active vertex exists inside and the interior is one corridor
        let pts = octagon();
        let poly = PolygonHandle::new(&pts).unwrap();
        let layout = break_polygon(8, 4);
        assert_eq!(layout.na, 2);
        let sites = SiteSet::from_polygon_subset(&poly, &layout, &[0, 1]).unwrap();
        let mut ws = Workspace::new();
        let q = pt(2.0, 0.8);
        let c = corridor_of(&sites, q, &mut ws).unwrap();
        validate_corridor(&sites, &c, q).unwrap();
        assert_eq!(c.defining, vec![0, 1]);
        assert!(c.gates.is_empty(), "{:?}", c.gates);
        assert_eq!(c.boundary.len(), 8);
    }

    #[test]
    fn octagon_four_curves_interior_cell() {
        let pts = octagon();
        let poly = PolygonHandle::new(&pts).unwrap();
        let layout = break_polygon(8, 2);
        assert_eq!(layout.na, 4);
        let sites =
            SiteSet::from_polygon_subset(&poly, &layout, &[0, 1, 2, 3]).unwrap();
        let mut ws = Workspace::new();
        let q = pt(2.0, 0.6);
        let c = corridor_of(&sites, q, &mut ws).unwrap();
        validate_corridor(&sites, &c, q).unwrap();
        assert!(c.defining.len() <= 4);
        assert!(c.contains(q));
        // every other curve stays clear of this corridor
        for cu in 0..4 {
            if !c.defining.contains(&cu) {
                assert!(!violates_corridor(&poly, &layout, cu, &c));
            }
        }
    }

    #[test]
    fn isolated_curve_slit_corridor() {
        let pts = octagon();
        let poly = PolygonHandle::new(&pts).unwrap();
        let layout = break_polygon(8, 2);
        let sites = SiteSet::from_polygon_subset(&poly, &layout, &[1]).unwrap();
        let mut ws = Workspace::new();
        // query far from the lone curve: cell is everything around it
        let q = pt(-0.2, 0.3);
        let c = corridor_of(&sites, q, &mut ws).unwrap();
        assert_eq!(c.defining, vec![1]);
        assert!(c.contains(q));
        // points hugging the curve from both sides are in the same cell
        assert!(c.contains(pt(4.0, 0.5)));
        assert!(c.contains(pt(3.6, 1.1)));
    }

    #[test]
    fn empty_subset_cell_is_frame() {
        let pts = square4();
        let poly = PolygonHandle::new(&pts).unwrap();
        let layout = break_polygon(4, 8);
        let sites = SiteSet::from_polygon_subset(&poly, &layout, &[]).unwrap();
        let mut ws = Workspace::new();
        let c = corridor_of(&sites, pt(1.0, 1.0), &mut ws).unwrap();
        assert!(c.defining.is_empty());
        assert!(c.gates.is_empty());
        assert_eq!(c.boundary.len(), 4);
    }

    #[test]
    fn two_parallel_segments_gates_against_frame() {
        // two horizontal segment-curves, query between them
        let a = vec![pt(0.0, 0.0), pt(2.0, 0.0), pt(4.0, 0.0)];
        let b = vec![pt(0.0, 2.0), pt(2.0, 2.0), pt(4.0, 2.0)];
        let frame_pts = vec![pt(0.0, 0.0), pt(4.0, 0.0), pt(4.0, 2.0), pt(0.0, 2.0)];
        let sites = SiteSet::from_polylines(&[a, b], &frame_pts);
        let mut ws = Workspace::new();
        let q = pt(2.0, 1.1);
        let c = corridor_of(&sites, q, &mut ws).unwrap();
        validate_corridor(&sites, &c, q).unwrap();
        assert_eq!(c.defining, vec![0, 1]);
        assert_eq!(c.gates.len(), 2);
        // analytic: frame inflates by 10% of its diagonal (sqrt(20)), so the
        // side walls sit at -0.4472 and 4.4472; disks tangent to both
        // segments have r = 1, centers on y = 1 one radius in from the frame
        let d = 0.1 * 20f64.sqrt();
        for g in &c.gates {
            assert!((g.active_vertex.y - 1.0).abs() < 1e-6, "{:?}", g);
            assert!(g.outer == CurveRef::Frame);
            assert!((g.radius - 1.0).abs() < 1e-6);
            let x = g.active_vertex.x;
            let expect_l = -d + 1.0;
            let expect_r = 4.0 + d - 1.0;
            assert!(
                (x - expect_l).abs() < 1e-6 || (x - expect_r).abs() < 1e-6,
                "gate at x={x}"
            );
        }
    }

    #[test]
    fn locate_corridor_on_octagon() {
        let pts = octagon();
        let poly = PolygonHandle::new(&pts).unwrap();
        let q = pt(2.0, 0.6);
        let mut ws = Workspace::new();
        let (c, stats) = locate_corridor(&poly, 2, q, 7, &PrgOptions::default(), &mut ws).unwrap();
        assert!(c.contains(q));
        assert!(stats.max_recursion_depth <= 4);
        // solver postcondition: no curve violates the located corridor
        let layout = break_polygon(8, 2);
        for cu in 0..layout.na {
            assert!(!violates_corridor(&poly, &layout, cu, &c), "curve {cu}");
        }
    }

    #[test]
    fn breakup_ten_by_three() {
        let l = break_polygon(10, 3);
        assert_eq!(l.na, 4);
        let ranges: Vec<Vec<usize>> = (0..4)
            .map(|i| (0..l.vertex_count(i)).map(|j| l.global_vertex(i, j)).collect())
            .collect();
        // 1-based these are [1..4], [4..7], [7..10], [10,1]
        assert_eq!(ranges[0], vec![0, 1, 2, 3]);
        assert_eq!(ranges[1], vec![3, 4, 5, 6]);
        assert_eq!(ranges[2], vec![6, 7, 8, 9]);
        assert_eq!(ranges[3], vec![9, 0]);
    }

    #[test]
    fn breakup_single_curve() {
        let l = break_polygon(5, 8);
        assert_eq!(l.na, 1);
        let r: Vec<usize> = (0..l.vertex_count(0)).map(|j| l.global_vertex(0, j)).collect();
        assert_eq!(r, vec![0, 1, 2, 3, 4, 0]);
    }

    #[test]
    fn breakup_covers_every_edge_once() {
        for (n, s) in [(10usize, 3usize), (17, 4), (23, 1), (9, 9), (12, 5)] {
            let l = break_polygon(n, s);
            let mut seen = vec![0; n];
            for i in 0..l.na {
                for j in 0..l.edge_count(i) {
                    seen[l.global_vertex(i, j)] += 1;
                }
            }
            assert!(seen.iter().all(|&c| c == 1), "n={n} s={s}: {seen:?}");
        }
    }

    #[test]
    fn curve_of_edge_matches_layout() {
        let l = break_polygon(10, 3);
        for i in 0..l.na {
            for j in 0..l.edge_count(i) {
                assert_eq!(l.curve_of_edge(l.global_vertex(i, j)), i);
            }
        }
    }

    #[test]
    fn corridor_membership_uses_parity() {
        let c = Corridor {
            floor: CurveRef::Curve(0),
            ceiling: CurveRef::Frame,
            gates: vec![],
            defining: vec![0],
            boundary: vec![pt(0.0, 0.0), pt(4.0, 0.0), pt(4.0, 4.0), pt(0.0, 4.0)],
            scale: 5.65,
        };
        assert!(c.contains(pt(2.0, 2.0)));
        assert!(!c.contains(pt(5.0, 2.0)));
        assert!(c.contains(pt(0.0, 2.0))); // boundary counts inside
    }
}
