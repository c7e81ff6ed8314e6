use crate::error::{Error, Result};

pub const EARTH_RADIUS_M: f64 = 6_371_000.0;

/// Great-circle distance in metres between two `(lat°, lon°)` points.
pub fn haversine(p: (f64, f64), q: (f64, f64)) -> Result<f64> {
    for (lat, lon) in [p, q] {
        if !((-90.0..=90.0).contains(&lat) && (-180.0..=180.0).contains(&lon)) {
            return Err(Error::InvalidParameter(format!(
                "coordinate ({lat}, {lon}) out of range"
            )));
        }
    }
    Ok(unchecked(p.0, p.1, q.0, q.1))
}

pub(crate) fn unchecked(lat1: f64, lon1: f64, lat2: f64, lon2: f64) -> f64 {
    let (phi1, phi2) = (lat1.to_radians(), lat2.to_radians());
    let dphi = (lat2 - lat1).to_radians();
    let dlambda = (lon2 - lon1).to_radians();
    let h = (dphi / 2.0).sin().powi(2) + phi1.cos() * phi2.cos() * (dlambda / 2.0).sin().powi(2);
    2.0 * EARTH_RADIUS_M * h.sqrt().min(1.0).asin()
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn one_degree() {
        let deg = std::f64::consts::PI / 180.0 * EARTH_RADIUS_M;
        assert_relative_eq!(haversine((0.0, 0.0), (1.0, 0.0)).unwrap(), deg, max_relative = 1e-12);
        assert_relative_eq!(haversine((0.0, 0.0), (0.0, 1.0)).unwrap(), deg, max_relative = 1e-12);
        assert!((deg - 111_195.0).abs() < 1.0);
    }

    #[test]
    fn identical_and_antipodal() {
        assert_eq!(haversine((12.5, -70.1), (12.5, -70.1)).unwrap(), 0.0);
        let half = haversine((0.0, 0.0), (0.0, 180.0)).unwrap();
        assert_relative_eq!(half, std::f64::consts::PI * EARTH_RADIUS_M, max_relative = 1e-12);
    }

    #[test]
    fn rejects_out_of_range() {
        assert!(haversine((91.0, 0.0), (0.0, 0.0)).is_err());
        assert!(haversine((0.0, 0.0), (0.0, -180.5)).is_err());
    }
}
