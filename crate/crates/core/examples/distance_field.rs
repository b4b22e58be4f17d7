//! Distance field and segment traversability on the office map.

use explora::grid::MapSnapshot;
use explora::scenarios::{by_name, BUNDLED_RESOLUTION};
use explora::Point;

fn main() -> explora::Result<()> {
    let sc = by_name("office", BUNDLED_RESOLUTION)?;
    let map = MapSnapshot::new(sc.truth);
    let r_robot = 0.24;

    let probes = [
        sc.start.position,
        Point::new(12.0, 10.8),
        Point::new(16.35, 9.5),
    ];
    for p in probes {
        println!("clearance at {p}: {:.3} m", map.min_dist(p));
    }
    let (a, b) = (sc.start.position, Point::new(2.0, 3.5));
    println!(
        "{a} -> {b} traversable with r_robot {r_robot}: {}",
        map.traversable(a, b, r_robot)
    );
    let c = Point::new(2.0, 11.0);
    println!(
        "{a} -> {c} traversable with r_robot {r_robot}: {}",
        map.traversable(a, c, r_robot)
    );
    Ok(())
}
