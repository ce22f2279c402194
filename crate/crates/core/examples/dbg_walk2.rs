use polywalk::corridor::*;
use polywalk::geom::*;

fn main() {
    let l = vec![
        pt(0.0, 0.0), pt(4.0, 0.0), pt(4.0, 4.0),
        pt(3.0, 4.0), pt(3.0, 1.0), pt(0.0, 1.0),
    ];
    let poly = PolygonHandle::new(&l).unwrap();
    for space in [2usize] {
        let layout = break_polygon(6, space);
        println!("na = {}", layout.na);
        let ids: Vec<usize> = (0..layout.na).collect();
        for mask in 0u32..(1 << layout.na) {
            let sub: Vec<usize> = ids.iter().copied().filter(|i| mask >> i & 1 == 1).collect();
            let sites = SiteSet::from_polygon_subset(&poly, &layout, &sub).unwrap();
            print!("subset {sub:?}: ");
            let mut ws = polywalk::Workspace::new();
            match corridor_of(&sites, pt(0.5, 0.5), &mut ws) {
                Ok(c) => println!("def {:?} gates {}", c.defining, c.gates.len()),
                Err(e) => {
                    println!("ERR {e}");
                    println!("{}", explore_debug(&sites, pt(0.5, 0.5)));
                }
            }
        }
    }
}
