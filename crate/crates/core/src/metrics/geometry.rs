use crate::layout::BoundingBox;

fn overlap(a0: f64, a1: f64, b0: f64, b1: f64) -> f64 {
    (a1.min(b1) - a0.max(b0)).max(0.0)
}

pub fn intersection_area(a: &BoundingBox, b: &BoundingBox) -> f64 {
    overlap(a.x, a.right(), b.x, b.right()) * overlap(a.y, a.bottom(), b.y, b.bottom())
}

/// Intersection over union of two boxes with positive area.
pub fn iou(a: &BoundingBox, b: &BoundingBox) -> f64 {
    let inter = intersection_area(a, b);
    let union = a.area() + b.area() - inter;
    if union <= 0.0 {
        return 0.0;
    }
    (inter / union).clamp(0.0, 1.0)
}

/// Generalized IoU: IoU minus the fraction of the enclosing box not covered
/// by the union. Lies in [-1, 1].
pub fn giou(a: &BoundingBox, b: &BoundingBox) -> f64 {
    let inter = intersection_area(a, b);
    let union = a.area() + b.area() - inter;
    let hull = (a.right().max(b.right()) - a.x.min(b.x)) * (a.bottom().max(b.bottom()) - a.y.min(b.y));
    if union <= 0.0 || hull <= 0.0 {
        return -1.0;
    }
    (inter / union - (hull - union) / hull).clamp(-1.0, 1.0)
}
