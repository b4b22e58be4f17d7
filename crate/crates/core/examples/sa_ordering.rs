//! Orders a set of waypoints for a return tour with simulated annealing.

use explora::controller::{sa_order, sa_order_waypoints, LegCosts, SaSchedule};
use explora::grid::MapSnapshot;
use explora::scenarios::{by_name, BUNDLED_RESOLUTION};
use explora::Point;

fn main() -> explora::Result<()> {
    let sc = by_name("loop-rooms", BUNDLED_RESOLUTION)?;
    let map = MapSnapshot::new(sc.truth);
    let home = sc.start.position;
    let waypoints = [
        Point::new(12.5, 12.5),
        Point::new(3.0, 12.0),
        Point::new(12.0, 3.5),
        Point::new(8.0, 8.0),
        Point::new(13.0, 8.0),
    ];

    let euclid = LegCosts::euclidean(&waypoints, home, home);
    let identity: Vec<usize> = (0..waypoints.len()).collect();
    let order = sa_order(&euclid, &SaSchedule::for_costs(&euclid, 5))?;
    println!(
        "straight-line tour: insertion order {:.2} m, annealed {:.2} m",
        euclid.tour(&identity),
        euclid.tour(&order)
    );

    let tour = sa_order_waypoints(&waypoints, home, home, &map, 0.24, 5)?;
    let stops: Vec<String> = tour.iter().map(|p| p.to_string()).collect();
    println!("grid-path tour from {home}: {}", stops.join(" -> "));
    Ok(())
}
