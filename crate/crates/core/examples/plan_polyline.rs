//! Plans the same query with both polyline backends and compares them.

use std::time::Instant;

use explora::grid::MapSnapshot;
use explora::polyline::{plan_polyline, Backend, PolylineParams};
use explora::scenarios::{by_name, BUNDLED_RESOLUTION};
use explora::Point;

fn main() -> explora::Result<()> {
    let sc = by_name("office", BUNDLED_RESOLUTION)?;
    let map = MapSnapshot::new(sc.truth);
    let (start, goal) = (sc.start.position, Point::new(12.0, 10.8));

    for backend in [Backend::Bi, Backend::Dp] {
        let params = PolylineParams {
            backend,
            ..PolylineParams::default()
        };
        let t0 = Instant::now();
        let Some(path) = plan_polyline(start, goal, &map, &params, 0.24)? else {
            println!("{backend}: no path");
            continue;
        };
        let ms = t0.elapsed().as_secs_f64() * 1e3;
        println!(
            "{backend}: {} segments, length {:.2} m, score {:.3}, segment std {:.3} m, rotation {:.3} rad, {ms:.2} ms",
            path.segment_count(),
            path.length(),
            path.total_score(&params),
            path.length_std(),
            path.cumulative_rotation()
        );
        let junctions: Vec<String> = path.junctions.iter().map(|p| p.to_string()).collect();
        println!("  {}", junctions.join(" -> "));
    }
    Ok(())
}
