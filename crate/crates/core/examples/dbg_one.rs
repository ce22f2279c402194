use polywalk::corridor::*;
use polywalk::geom::*;
fn main() {
    let l = vec![
        pt(0.0, 0.0), pt(4.0, 0.0), pt(4.0, 4.0),
        pt(3.0, 4.0), pt(3.0, 1.0), pt(0.0, 1.0),
    ];
    let poly = PolygonHandle::new(&l).unwrap();
    let layout = break_polygon(6, 2);
    let sites = SiteSet::from_polygon_subset(&poly, &layout, &[1, 2]).unwrap();
    let mut ws = polywalk::Workspace::new();
    match corridor_of(&sites, pt(0.5, 0.5), &mut ws) {
        Ok(c) => eprintln!("OK def {:?} gates {} blen {}", c.defining, c.gates.len(), c.boundary.len()),
        Err(e) => eprintln!("ERR {e}"),
    }
}
