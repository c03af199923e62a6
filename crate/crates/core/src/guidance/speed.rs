use crate::error::GeometryError;
use crate::geometry::ScreenVec;

/// Normalized cosine between the label's screen motion and the gaze motion,
/// mapped to `[0, 1]`.
pub fn normalized_alignment(vec_l: ScreenVec, vec_g: ScreenVec) -> Result<f64, GeometryError> {
    let a = vec_l.try_normalize().ok_or(GeometryError::DegenerateVector)?;
    let b = vec_g.try_normalize().ok_or(GeometryError::DegenerateVector)?;
    Ok(((a.dot(b) + 1.0) / 2.0).clamp(0.0, 1.0))
}

/// Speeds a flight up in proportion to the remaining headroom `1 - s`, the
/// alignment `alpha` and the label's closeness to the gaze.
pub fn update_speed(s: f64, alpha: f64, dis_lg: f64) -> f64 {
    (s + (1.0 - s) * alpha * (1.0 - dis_lg)).clamp(s, 1.0)
}
