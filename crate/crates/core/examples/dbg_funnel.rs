use polywalk::geodesic::{geodesic_in_polygon, VTag};
use polywalk::geom::pt;
fn main() {
    let lshape = vec![
        pt(0.0, 0.0), pt(4.0, 0.0), pt(4.0, 4.0),
        pt(3.0, 4.0), pt(3.0, 1.0), pt(0.0, 1.0),
    ];
    let tags: Vec<VTag> = (0..6).map(VTag::Poly).collect();
    let path = geodesic_in_polygon(&lshape, &tags, pt(0.5, 0.5), pt(3.5, 3.5)).unwrap();
    for (p, t) in &path { println!("{:?} {:?}", p, t); }
}
