//! Planar primitives with exact orientation tests.
//!
//! Combinatorial decisions on input vertices go through [`orient`], which is
//! evaluated adaptively and returns the exact sign. Derived points (ray hits,
//! tangency points) are plain f64 with a small tolerance.

use crate::error::{Error, Result};

pub const EPS: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Point {
    pub x: f64,
    pub y: f64,
}

pub const fn pt(x: f64, y: f64) -> Point {
    Point { x, y }
}

impl Point {
    pub fn is_finite(&self) -> bool {
        self.x.is_finite() && self.y.is_finite()
    }
    pub fn sub(&self, o: Point) -> Point {
        pt(self.x - o.x, self.y - o.y)
    }
    pub fn add(&self, o: Point) -> Point {
        pt(self.x + o.x, self.y + o.y)
    }
    pub fn scale(&self, k: f64) -> Point {
        pt(self.x * k, self.y * k)
    }
    pub fn dot(&self, o: Point) -> f64 {
        self.x * o.x + self.y * o.y
    }
    pub fn cross(&self, o: Point) -> f64 {
        self.x * o.y - self.y * o.x
    }
    pub fn norm(&self) -> f64 {
        self.x.hypot(self.y)
    }
    pub fn dist(&self, o: Point) -> f64 {
        (self.x - o.x).hypot(self.y - o.y)
    }
    pub fn normalized(&self) -> Point {
        let n = self.norm();
        pt(self.x / n, self.y / n)
    }
    /// Rotate 90 degrees counterclockwise.
    pub fn perp(&self) -> Point {
        pt(-self.y, self.x)
    }
    pub fn lerp(&self, o: Point, t: f64) -> Point {
        pt(self.x + (o.x - self.x) * t, self.y + (o.y - self.y) * t)
    }
}

#[derive(Debug, Clone, Copy)]
pub struct Segment {
    pub a: Point,
    pub b: Point,
}

impl Segment {
    pub fn new(a: Point, b: Point) -> Segment {
        debug_assert!(a != b, "degenerate segment");
        Segment { a, b }
    }
    pub fn len(&self) -> f64 {
        self.a.dist(self.b)
    }
    pub fn midpoint(&self) -> Point {
        self.a.lerp(self.b, 0.5)
    }
}

#[derive(Debug, Clone, Copy)]
pub struct Ray {
    pub origin: Point,
    pub direction: Point,
}

impl Ray {
    pub fn new(origin: Point, direction: Point) -> Ray {
        debug_assert!(direction.x != 0.0 || direction.y != 0.0, "zero ray direction");
        Ray { origin, direction }
    }
    pub fn at(&self, t: f64) -> Point {
        self.origin.add(self.direction.scale(t))
    }
}

// ---------------------------------------------------------------------------
// Exact orientation predicate (filter + adaptive stages).
//
// This is the standard adaptive evaluation of the 2x2 determinant
// |ax-cx ay-cy; bx-cx by-cy| using error-free float transforms; the returned
// sign is exact for all finite inputs.
// ---------------------------------------------------------------------------

const SPLITTER: f64 = 134_217_729f64; // 2^27 + 1
const EPSILON: f64 = 1.110_223_024_625_156_5e-16; // 2^-53
const RESULTERRBOUND: f64 = (3.0 + 8.0 * EPSILON) * EPSILON;
const CCWERRBOUND_A: f64 = (3.0 + 16.0 * EPSILON) * EPSILON;
const CCWERRBOUND_B: f64 = (2.0 + 12.0 * EPSILON) * EPSILON;
const CCWERRBOUND_C: f64 = (9.0 + 64.0 * EPSILON) * EPSILON * EPSILON;

#[inline]
fn two_sum(a: f64, b: f64) -> (f64, f64) {
    let x = a + b;
    let bvirt = x - a;
    let avirt = x - bvirt;
    let bround = b - bvirt;
    let around = a - avirt;
    (x, around + bround)
}

#[inline]
fn two_diff(a: f64, b: f64) -> (f64, f64) {
    let x = a - b;
    (x, two_diff_tail(a, b, x))
}

#[inline]
fn two_diff_tail(a: f64, b: f64, x: f64) -> f64 {
    let bvirt = a - x;
    let avirt = x + bvirt;
    let bround = bvirt - b;
    let around = a - avirt;
    around + bround
}

#[inline]
fn split(a: f64) -> (f64, f64) {
    let c = SPLITTER * a;
    let abig = c - a;
    let ahi = c - abig;
    (ahi, a - ahi)
}

#[inline]
fn two_product(a: f64, b: f64) -> (f64, f64) {
    let x = a * b;
    let (ahi, alo) = split(a);
    let (bhi, blo) = split(b);
    let err1 = x - ahi * bhi;
    let err2 = err1 - alo * bhi;
    let err3 = err2 - ahi * blo;
    (x, alo * blo - err3)
}

/// (a1,a0) - (b1,b0) -> four-component expansion, increasing magnitude.
#[inline]
fn two_two_diff(a1: f64, a0: f64, b1: f64, b0: f64) -> [f64; 4] {
    let (i, x0) = two_diff(a0, b0);
    let (j, r0) = two_sum(a1, i);
    let (k, x1) = two_diff(r0, b1);
    let (x3, x2) = two_sum(j, k);
    [x0, x1, x2, x3]
}

fn fast_expansion_sum_zeroelim(e: &[f64], f: &[f64], out: &mut Vec<f64>) {
    out.clear();
    let mut enow = 0;
    let mut fnow = 0;
    let mut q;
    // merged traversal, smallest magnitude first
    let next = |enow: usize, fnow: usize| -> bool {
        // true -> take from e
        if enow >= e.len() {
            false
        } else if fnow >= f.len() {
            true
        } else {
            e[enow].abs() <= f[fnow].abs()
        }
    };
    if next(enow, fnow) {
        q = e[enow];
        enow += 1;
    } else {
        q = f[fnow];
        fnow += 1;
    }
    let mut hh;
    while enow < e.len() || fnow < f.len() {
        let cur = if next(enow, fnow) {
            let v = e[enow];
            enow += 1;
            v
        } else {
            let v = f[fnow];
            fnow += 1;
            v
        };
        let (qn, h) = two_sum(q, cur);
        q = qn;
        hh = h;
        if hh != 0.0 {
            out.push(hh);
        }
    }
    if q != 0.0 || out.is_empty() {
        out.push(q);
    }
}

fn estimate(e: &[f64]) -> f64 {
    e.iter().sum()
}

fn orient2d_adapt(pa: Point, pb: Point, pc: Point, detsum: f64) -> f64 {
    let acx = pa.x - pc.x;
    let bcx = pb.x - pc.x;
    let acy = pa.y - pc.y;
    let bcy = pb.y - pc.y;

    let (detleft, detlefttail) = two_product(acx, bcy);
    let (detright, detrighttail) = two_product(acy, bcx);
    let b = two_two_diff(detleft, detlefttail, detright, detrighttail);

    let mut det = estimate(&b);
    let errbound = CCWERRBOUND_B * detsum;
    if det >= errbound || -det >= errbound {
        return det;
    }

    let acxtail = two_diff_tail(pa.x, pc.x, acx);
    let bcxtail = two_diff_tail(pb.x, pc.x, bcx);
    let acytail = two_diff_tail(pa.y, pc.y, acy);
    let bcytail = two_diff_tail(pb.y, pc.y, bcy);
    if acxtail == 0.0 && acytail == 0.0 && bcxtail == 0.0 && bcytail == 0.0 {
        return det;
    }

    let errbound = CCWERRBOUND_C * detsum + RESULTERRBOUND * det.abs();
    det += (acx * bcytail + bcy * acxtail) - (acy * bcxtail + bcx * acytail);
    if det >= errbound || -det >= errbound {
        return det;
    }

    let mut c1 = Vec::with_capacity(8);
    let mut c2 = Vec::with_capacity(12);
    let mut d = Vec::with_capacity(16);

    let (s1, s0) = two_product(acxtail, bcy);
    let (t1, t0) = two_product(acytail, bcx);
    let u = two_two_diff(s1, s0, t1, t0);
    fast_expansion_sum_zeroelim(&b, &u, &mut c1);

    let (s1, s0) = two_product(acx, bcytail);
    let (t1, t0) = two_product(acy, bcxtail);
    let u = two_two_diff(s1, s0, t1, t0);
    fast_expansion_sum_zeroelim(&c1, &u, &mut c2);

    let (s1, s0) = two_product(acxtail, bcytail);
    let (t1, t0) = two_product(acytail, bcxtail);
    let u = two_two_diff(s1, s0, t1, t0);
    fast_expansion_sum_zeroelim(&c2, &u, &mut d);

    *d.last().unwrap()
}

/// Exact sign of the signed area of triangle `pqr`: +1 counterclockwise,
/// -1 clockwise, 0 collinear.
pub fn orient(p: Point, q: Point, r: Point) -> i32 {
    let detleft = (p.x - r.x) * (q.y - r.y);
    let detright = (p.y - r.y) * (q.x - r.x);
    let det = detleft - detright;
    let detsum = if detleft > 0.0 {
        if detright <= 0.0 {
            return sign(det);
        }
        detleft + detright
    } else if detleft < 0.0 {
        if detright >= 0.0 {
            return sign(det);
        }
        -detleft - detright
    } else {
        return sign(det);
    };
    let errbound = CCWERRBOUND_A * detsum;
    if det >= errbound || -det >= errbound {
        return sign(det);
    }
    sign(orient2d_adapt(p, q, r, detsum))
}

fn sign(v: f64) -> i32 {
    if v > 0.0 {
        1
    } else if v < 0.0 {
        -1
    } else {
        0
    }
}

// ---------------------------------------------------------------------------
// Polygon handle
// ---------------------------------------------------------------------------

/// Read-only counterclockwise vertex array. The only O(n) storage in a run;
/// workspace accounting never charges it.
#[derive(Debug, Clone)]
pub struct PolygonHandle<'a> {
    pts: &'a [Point],
}

impl<'a> PolygonHandle<'a> {
    pub fn new(pts: &'a [Point]) -> Result<Self> {
        if pts.len() < 3 {
            return Err(Error::InvalidInput(format!(
                "polygon needs >= 3 vertices, got {}",
                pts.len()
            )));
        }
        if !pts.iter().all(|p| p.is_finite()) {
            return Err(Error::InvalidInput("non-finite vertex coordinate".into()));
        }
        let h = PolygonHandle { pts };
        if h.signed_area2() <= 0.0 {
            return Err(Error::InvalidInput(
                "polygon must be counterclockwise".into(),
            ));
        }
        Ok(h)
    }

    pub fn len(&self) -> usize {
        self.pts.len()
    }
    pub fn is_empty(&self) -> bool {
        false
    }
    /// 0-based vertex access (callers emit 1-based indices on output).
    pub fn vertex(&self, i: usize) -> Point {
        self.pts[i % self.pts.len()]
    }
    pub fn edge(&self, i: usize) -> Segment {
        Segment::new(self.vertex(i), self.vertex(i + 1))
    }
    pub fn points(&self) -> &'a [Point] {
        self.pts
    }

    pub fn signed_area2(&self) -> f64 {
        signed_area2(self.pts)
    }

    pub fn bbox(&self) -> (Point, Point) {
        bbox(self.pts)
    }

    /// O(n^2) pairwise edge check; used on load and by the generator.
    pub fn is_simple(&self) -> bool {
        polyline_is_simple_closed(self.pts)
    }
}

pub fn signed_area2(pts: &[Point]) -> f64 {
    let n = pts.len();
    let mut s = 0.0;
    for i in 0..n {
        let a = pts[i];
        let b = pts[(i + 1) % n];
        s += a.x * b.y - b.x * a.y;
    }
    s
}

pub fn bbox(pts: &[Point]) -> (Point, Point) {
    let mut lo = pt(f64::INFINITY, f64::INFINITY);
    let mut hi = pt(f64::NEG_INFINITY, f64::NEG_INFINITY);
    for p in pts {
        lo.x = lo.x.min(p.x);
        lo.y = lo.y.min(p.y);
        hi.x = hi.x.max(p.x);
        hi.y = hi.y.max(p.y);
    }
    (lo, hi)
}

/// Do the closed segments `ab` and `cd` properly cross (interior point in common)?
pub fn proper_crossing(a: Point, b: Point, c: Point, d: Point) -> bool {
    let d1 = orient(a, b, c);
    let d2 = orient(a, b, d);
    let d3 = orient(c, d, a);
    let d4 = orient(c, d, b);
    d1 * d2 < 0 && d3 * d4 < 0
}

/// Closed-segment intersection test including endpoint touches and collinear overlap.
pub fn segments_intersect(a: Point, b: Point, c: Point, d: Point) -> bool {
    let d1 = orient(a, b, c);
    let d2 = orient(a, b, d);
    let d3 = orient(c, d, a);
    let d4 = orient(c, d, b);
    if d1 * d2 < 0 && d3 * d4 < 0 {
        return true;
    }
    let on = |p: Point, q: Point, r: Point, s: i32| -> bool {
        s == 0
            && r.x <= p.x.max(q.x)
            && r.x >= p.x.min(q.x)
            && r.y <= p.y.max(q.y)
            && r.y >= p.y.min(q.y)
    };
    on(a, b, c, d1) || on(a, b, d, d2) || on(c, d, a, d3) || on(c, d, b, d4)
}

pub fn polyline_is_simple_closed(pts: &[Point]) -> bool {
    let n = pts.len();
    for i in 0..n {
        let (a, b) = (pts[i], pts[(i + 1) % n]);
        if a == b {
            return false;
        }
        for j in (i + 1)..n {
            let (c, d) = (pts[j], pts[(j + 1) % n]);
            let adjacent = j == i + 1 || (i == 0 && j == n - 1);
            if adjacent {
                // adjacent edges may only share the single common endpoint
                if i != j && orient(a, b, if j == i + 1 { d } else { c }) == 0 {
                    let other = if j == i + 1 { d } else { c };
                    let shared = if j == i + 1 { b } else { a };
                    // collinear spike
                    if (other.sub(shared)).dot(if j == i + 1 { a.sub(shared) } else { b.sub(shared) }) > 0.0 {
                        return false;
                    }
                }
                continue;
            }
            if segments_intersect(a, b, c, d) {
                return false;
            }
        }
    }
    true
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Containment {
    Inside,
    Outside,
    Boundary,
}

/// Crossing-parity membership with a downward vertical ray, half-open edge
/// rule (lower x endpoint in, upper out). Boundary is reported separately.
pub fn point_in_polyline(pts: &[Point], p: Point) -> Containment {
    let n = pts.len();
    let mut inside = false;
    for i in 0..n {
        let a = pts[i];
        let b = pts[(i + 1) % n];
        match edge_crossing_state(a, b, p) {
            EdgeCross::On => return Containment::Boundary,
            EdgeCross::Below => inside = !inside,
            EdgeCross::No => {}
        }
    }
    if inside {
        Containment::Inside
    } else {
        Containment::Outside
    }
}

pub fn point_in_polygon(poly: &PolygonHandle, p: Point) -> Containment {
    point_in_polyline(poly.points(), p)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EdgeCross {
    /// p lies on the closed edge
    On,
    /// the edge crosses the downward vertical ray strictly below p
    Below,
    No,
}

/// Crossing state of one edge against the downward vertical ray from `p`.
pub fn edge_crossing_state(a: Point, b: Point, p: Point) -> EdgeCross {
    // on-edge first (closed semantics)
    if p.x >= a.x.min(b.x)
        && p.x <= a.x.max(b.x)
        && p.y >= a.y.min(b.y)
        && p.y <= a.y.max(b.y)
        && orient(a, b, p) == 0
    {
        return EdgeCross::On;
    }
    if a.x == b.x {
        return EdgeCross::No; // vertical edge never crosses a vertical ray transversally
    }
    // half-open x-interval
    let (lo, hi) = if a.x < b.x { (a, b) } else { (b, a) };
    if p.x < lo.x || p.x >= hi.x {
        return EdgeCross::No;
    }
    // the edge crosses the vertical line at p.x; below p iff p is strictly
    // above the support line (orientation with the left-to-right edge)
    if orient(lo, hi, p) > 0 {
        EdgeCross::Below
    } else {
        EdgeCross::No
    }
}

// ---------------------------------------------------------------------------
// Ray shooting
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Copy)]
pub struct RayHit {
    pub edge: usize,
    pub point: Point,
    /// parameter along the ray (in units of |direction|)
    pub t: f64,
}

/// First boundary hit of `ray` over the closed polyline, with `t > tmin` and
/// edges in `skip` ignored. Returns the hit of smallest parameter.
pub fn ray_first_hit_polyline(
    pts: &[Point],
    ray: Ray,
    tmin: f64,
    skip: &[usize],
) -> Option<RayHit> {
    let n = pts.len();
    let o = ray.origin;
    let d = ray.direction;
    let far = o.add(d); // second point on the ray line
    let mut best: Option<RayHit> = None;
    for i in 0..n {
        if skip.contains(&i) {
            continue;
        }
        let a = pts[i];
        let b = pts[(i + 1) % n];
        let sa = orient(o, far, a);
        let sb = orient(o, far, b);
        if sa == sb && sa != 0 {
            continue; // both endpoints strictly on one side
        }
        if sa == 0 && sb == 0 {
            // collinear edge: candidate hits at both endpoints
            for q in [a, b] {
                let t = q.sub(o).dot(d) / d.dot(d);
                if t > tmin {
                    consider(&mut best, RayHit { edge: i, point: q, t });
                }
            }
            continue;
        }
        // proper or endpoint crossing of the support line; compute parameter
        let denom = d.cross(b.sub(a));
        if denom == 0.0 {
            continue;
        }
        let t = a.sub(o).cross(b.sub(a)) / denom;
        if t <= tmin {
            continue;
        }
        let q = ray.at(t);
        // require q within the edge's bounding box (tolerant)
        let tol = EPS * (1.0 + a.dist(b));
        if q.x < a.x.min(b.x) - tol
            || q.x > a.x.max(b.x) + tol
            || q.y < a.y.min(b.y) - tol
            || q.y > a.y.max(b.y) + tol
        {
            continue;
        }
        consider(&mut best, RayHit { edge: i, point: q, t });
    }
    best
}

fn consider(best: &mut Option<RayHit>, cand: RayHit) {
    match best {
        Some(b) if b.t <= cand.t => {}
        _ => *best = Some(cand),
    }
}

/// First boundary hit from a strictly interior origin. O(n) time, O(1) space.
pub fn ray_first_hit(poly: &PolygonHandle, ray: Ray) -> Result<RayHit> {
    ray_first_hit_polyline(poly.points(), ray, 1e-12, &[]).ok_or(Error::NoRayHit)
}

// ---------------------------------------------------------------------------
// Clipped polygons
// ---------------------------------------------------------------------------

/// Virtual boundary of ClipPoly(P, sigma, sigma'): the chord along `sigma` to
/// its first hit, the counterclockwise boundary arc to the first hit of
/// `sigma'`, and the chord back to the shared origin.
#[derive(Debug, Clone, Copy)]
pub struct ClipFrame {
    pub apex: Point,
    pub entry: RayHit,
    pub exit: RayHit,
}

pub fn clip_frame(pts: &[Point], sigma: Ray, sigma2: Ray) -> Result<ClipFrame> {
    if sigma.direction.cross(sigma2.direction) == 0.0
        && sigma.direction.dot(sigma2.direction) > 0.0
    {
        return Err(Error::EmptyClip);
    }
    let entry = ray_first_hit_polyline(pts, sigma, 1e-12, &[]).ok_or(Error::NoRayHit)?;
    let exit = ray_first_hit_polyline(pts, sigma2, 1e-12, &[]).ok_or(Error::NoRayHit)?;
    Ok(ClipFrame {
        apex: sigma.origin,
        entry,
        exit,
    })
}

fn edge_param(pts: &[Point], hit: &RayHit) -> f64 {
    let a = pts[hit.edge];
    let b = pts[(hit.edge + 1) % pts.len()];
    let ab = b.sub(a);
    hit.point.sub(a).dot(ab) / ab.dot(ab)
}

/// Iterate the virtual clip boundary, feeding each edge to `f`.
/// Edges are oriented along the traversal apex -> entry hit -> ccw arc -> exit hit -> apex.
fn for_each_clip_edge<F: FnMut(Point, Point)>(pts: &[Point], frame: &ClipFrame, mut f: F) {
    let n = pts.len();
    f(frame.apex, frame.entry.point);
    let t1 = edge_param(pts, &frame.entry);
    let t2 = edge_param(pts, &frame.exit);
    if frame.entry.edge == frame.exit.edge && t2 >= t1 {
        f(frame.entry.point, frame.exit.point);
    } else {
        f(frame.entry.point, pts[(frame.entry.edge + 1) % n]);
        let mut e = (frame.entry.edge + 1) % n;
        while e != frame.exit.edge {
            f(pts[e], pts[(e + 1) % n]);
            e = (e + 1) % n;
        }
        f(pts[frame.exit.edge], frame.exit.point);
    }
    f(frame.exit.point, frame.apex);
}

/// Membership in ClipPoly(P, sigma, sigma') without materializing it.
/// Boundary points count as inside. O(n) time, O(1) workspace.
pub fn is_in_subpoly(poly: &PolygonHandle, p: Point, sigma: Ray, sigma2: Ray) -> Result<bool> {
    let frame = clip_frame(poly.points(), sigma, sigma2)?;
    Ok(point_in_clip(poly.points(), &frame, p) != Containment::Outside)
}

pub fn point_in_clip(pts: &[Point], frame: &ClipFrame, p: Point) -> Containment {
    let mut inside = false;
    let mut on = false;
    for_each_clip_edge(pts, frame, |a, b| {
        if a == b {
            return;
        }
        match edge_crossing_state(a, b, p) {
            EdgeCross::On => on = true,
            EdgeCross::Below => inside = !inside,
            EdgeCross::No => {}
        }
    });
    if on {
        Containment::Boundary
    } else if inside {
        Containment::Inside
    } else {
        Containment::Outside
    }
}

/// Provenance of a clipped-polygon vertex.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ClipSrc {
    Apex,
    RayHit,
    Orig(usize),
}

/// Clipped polygon with an explicit vertex list, counterclockwise, apex first.
#[derive(Debug, Clone)]
pub struct ClippedPolygon {
    pub apex: Point,
    pub entry_hit: (usize, Point),
    pub exit_hit: (usize, Point),
    pub boundary: Vec<Point>,
    /// where each boundary vertex came from
    pub sources: Vec<ClipSrc>,
}

/// Materialize ClipPoly(boundary, sigma, sigma'). Only corridor-local
/// boundaries are ever materialized, so `cap` bounds the output size.
pub fn clip_polygon(pts: &[Point], sigma: Ray, sigma2: Ray, cap: usize) -> Result<ClippedPolygon> {
    let frame = clip_frame(pts, sigma, sigma2)?;
    let n = pts.len();
    let mut out: Vec<(Point, ClipSrc)> = Vec::new();
    let push = |p: Point, s: ClipSrc, out: &mut Vec<(Point, ClipSrc)>| {
        if out.last().map_or(true, |q| q.0.dist(p) > 1e-12) {
            out.push((p, s));
        }
    };
    let mut too_big = false;
    let mut first = true;
    for_each_clip_edge(pts, &frame, |a, _b| {
        if out.len() > cap {
            too_big = true;
            return;
        }
        let src = if first {
            ClipSrc::Apex
        } else {
            // a is either a ray hit or an original vertex
            match pts.iter().position(|q| *q == a) {
                Some(i) if i < n => ClipSrc::Orig(i),
                _ => ClipSrc::RayHit,
            }
        };
        first = false;
        push(a, src, &mut out);
    });
    if too_big || out.len() > cap {
        return Err(Error::ClipTooLarge {
            got: out.len(),
            cap,
        });
    }
    while out.len() > 1 && out.last().unwrap().0.dist(out[0].0) <= 1e-12 {
        out.pop();
    }
    if out.len() < 3 {
        return Err(Error::EmptyClip);
    }
    let (boundary, sources): (Vec<_>, Vec<_>) = out.into_iter().unzip();
    Ok(ClippedPolygon {
        apex: frame.apex,
        entry_hit: (frame.entry.edge, frame.entry.point),
        exit_hit: (frame.exit.edge, frame.exit.point),
        boundary,
        sources,
    })
}

// ---------------------------------------------------------------------------
// Distances
// ---------------------------------------------------------------------------

/// Closest point on closed segment `ab` to `p`.
pub fn closest_on_segment(a: Point, b: Point, p: Point) -> Point {
    let ab = b.sub(a);
    let t = (p.sub(a).dot(ab) / ab.dot(ab)).clamp(0.0, 1.0);
    a.lerp(b, t)
}

pub fn dist_point_segment(a: Point, b: Point, p: Point) -> f64 {
    closest_on_segment(a, b, p).dist(p)
}

/// Does closed segment `ab` come strictly within `r` of `c`?
pub fn segment_meets_disk(a: Point, b: Point, c: Point, r: f64) -> bool {
    dist_point_segment(a, b, c) < r
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn orient_basic() {
        assert_eq!(orient(pt(0.0, 0.0), pt(1.0, 0.0), pt(0.0, 1.0)), 1);
        assert_eq!(orient(pt(0.0, 0.0), pt(1.0, 1.0), pt(2.0, 2.0)), 0);
        assert_eq!(orient(pt(0.0, 0.0), pt(0.0, 1.0), pt(1.0, 0.0)), -1);
    }

    #[test]
    fn orient_near_degenerate_is_exact() {
        // points on a line with tiny perturbations representable in f64
        let a = pt(0.1, 0.1);
        let b = pt(0.2, 0.2);
        for k in 0..32 {
            let y = 0.3 + (k as f64) * f64::EPSILON * 0.3;
            let c = pt(0.3, y);
            let s = orient(a, b, c);
            let exact = if y == 0.3 { 0 } else { 1 };
            assert_eq!(s, exact, "k={k}");
        }
    }

    fn unit_square() -> Vec<Point> {
        vec![pt(0.0, 0.0), pt(1.0, 0.0), pt(1.0, 1.0), pt(0.0, 1.0)]
    }

    #[test]
    fn point_in_polygon_square() {
        let sq = unit_square();
        let poly = PolygonHandle::new(&sq).unwrap();
        assert_eq!(point_in_polygon(&poly, pt(0.5, 0.5)), Containment::Inside);
        assert_eq!(point_in_polygon(&poly, pt(2.0, 0.5)), Containment::Outside);
        assert_eq!(point_in_polygon(&poly, pt(1.0, 0.5)), Containment::Boundary);
        assert_eq!(point_in_polygon(&poly, pt(0.0, 0.0)), Containment::Boundary);
    }

    #[test]
    fn ray_hits_square() {
        let sq = unit_square();
        let poly = PolygonHandle::new(&sq).unwrap();
        let h = ray_first_hit(&poly, Ray::new(pt(0.5, 0.5), pt(1.0, 0.0))).unwrap();
        assert!(h.point.dist(pt(1.0, 0.5)) < 1e-12);
        let h = ray_first_hit(&poly, Ray::new(pt(0.5, 0.5), pt(0.0, -1.0))).unwrap();
        assert!(h.point.dist(pt(0.5, 0.0)) < 1e-12);
    }

    #[test]
    fn clip_square_quadrant() {
        let sq = unit_square();
        let c = clip_polygon(
            &sq,
            Ray::new(pt(0.5, 0.5), pt(1.0, 0.0)),
            Ray::new(pt(0.5, 0.5), pt(0.0, 1.0)),
            16,
        )
        .unwrap();
        // quadrilateral (0.5,0.5),(1,0.5),(1,1),(0.5,1)
        assert_eq!(c.boundary.len(), 4);
        assert!(c.boundary[0].dist(pt(0.5, 0.5)) < 1e-12);
        assert!(c.boundary[1].dist(pt(1.0, 0.5)) < 1e-12);
        assert!(c.boundary[2].dist(pt(1.0, 1.0)) < 1e-12);
        assert!(c.boundary[3].dist(pt(0.5, 1.0)) < 1e-12);
        assert!(signed_area2(&c.boundary) > 0.0);
    }

    #[test]
    fn clip_same_edge_triangle() {
        let sq = unit_square();
        // both rays hit the top edge; region lies ccw of the first ray
        let c = clip_polygon(
            &sq,
            Ray::new(pt(0.5, 0.5), pt(0.2, 1.0)),
            Ray::new(pt(0.5, 0.5), pt(-0.2, 1.0)),
            16,
        )
        .unwrap();
        assert_eq!(c.boundary.len(), 3);
        assert!(signed_area2(&c.boundary) > 0.0);
    }

    #[test]
    fn subpoly_membership_matches_materialized() {
        let sq = unit_square();
        let poly = PolygonHandle::new(&sq).unwrap();
        let s1 = Ray::new(pt(0.5, 0.5), pt(0.0, 1.0));
        let s2 = Ray::new(pt(0.5, 0.5), pt(1.0, 0.0));
        // region: from up-ray ccw around to right-ray = the big three-quarter part
        assert!(is_in_subpoly(&poly, pt(0.1, 0.1), s1, s2).unwrap());
        assert!(!is_in_subpoly(&poly, pt(0.9, 0.9), s1, s2).unwrap());
        // swapped rays give the complementary quadrant
        assert!(is_in_subpoly(&poly, pt(0.9, 0.9), s2, s1).unwrap());
        assert!(!is_in_subpoly(&poly, pt(0.1, 0.1), s2, s1).unwrap());
        // apex treated inside
        assert!(is_in_subpoly(&poly, pt(0.5, 0.5), s2, s1).unwrap());
    }
}
