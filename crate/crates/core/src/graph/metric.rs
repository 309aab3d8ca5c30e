//! Distance functions backing the metric selector.

use super::GeoPoint;

/// Mean Earth radius in meters.
pub const EARTH_RADIUS_M: f64 = 6_371_000.0;

/// Great-circle distance in meters between two points given in decimal
/// degrees:
///
/// d = 2r * arcsin( sqrt( sin^2(dphi/2) + cos(phi1) cos(phi2) sin^2(dlambda/2) ) )
pub fn haversine_m(a: GeoPoint, b: GeoPoint) -> f64 {
    let phi1 = a.lat.to_radians();
    let phi2 = b.lat.to_radians();
    let dphi = (b.lat - a.lat).to_radians();
    let dlambda = (b.lon - a.lon).to_radians();

    let s = (dphi / 2.0).sin().powi(2)
        + phi1.cos() * phi2.cos() * (dlambda / 2.0).sin().powi(2);
    // Rounding can push s a hair past 1 for antipodal points.
    2.0 * EARTH_RADIUS_M * s.sqrt().min(1.0).asin()
}

/// Straight-line distance for planar networks, in the coordinates' own units.
pub fn planar_m(a: GeoPoint, b: GeoPoint) -> f64 {
    let dy = b.lat - a.lat;
    let dx = b.lon - a.lon;
    (dx * dx + dy * dy).sqrt()
}
