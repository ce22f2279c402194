use polywalk::corridor::*;
use polywalk::geodesic::*;
use polywalk::geom::*;
use polywalk::vsolve::PrgOptions;
use polywalk::Workspace;

fn main() {
    let l = vec![
        pt(0.0, 0.0), pt(4.0, 0.0), pt(4.0, 4.0),
        pt(3.0, 4.0), pt(3.0, 1.0), pt(0.0, 1.0),
    ];
    let poly = PolygonHandle::new(&l).unwrap();
    let s = pt(0.5, 0.5);
    let t = pt(3.5, 3.5);
    let space = 2;
    match start_quadrant(&poly, s, t).unwrap() {
        QuadrantChoice::Rays(r0, r1) => {
            println!("rays {:?} {:?}", r0.direction, r1.direction);
            let mut ws = Workspace::new();
            let (c, _) = locate_corridor(&poly, space, s, 0xdead, &PrgOptions::default(), &mut ws).unwrap();
            println!("corridor defining {:?} gates {}", c.defining, c.gates.len());
            for g in &c.gates {
                println!("  gate w=({:.4},{:.4}) r={:.4} t0=({:.4},{:.4}) t1=({:.4},{:.4})",
                    g.active_vertex.x, g.active_vertex.y, g.radius,
                    g.tangency.0.x, g.tangency.0.y, g.tangency.1.x, g.tangency.1.y);
            }
            println!("boundary:");
            for b in &c.boundary { println!("  {:.6} {:.6}", b.x, b.y); }
            let cap = c.boundary.len() + 8;
            match clip_polygon(&c.boundary, r0, r1, cap) {
                Ok(cl) => {
                    println!("clipped (area2 {:.6}):", signed_area2(&cl.boundary));
                    for (b, s) in cl.boundary.iter().zip(&cl.sources) { println!("  {:.6} {:.6} {:?}", b.x, b.y, s); }
                }
                Err(e) => println!("clip err: {e}"),
            }
        }
        _ => println!("direct"),
    }
}
