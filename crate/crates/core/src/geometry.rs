//! Scalar-generic numeric kernels: data-space points and polygons, axis
//! windows for zoom and pan, and "nice" equal-width binning.
//!
//! Everything here is generic over [`num_traits::Float`]; the crate root
//! re-exports `f64` aliases used by the rest of the engine.

use num_traits::Float;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Point2<T> {
    pub x: T,
    pub y: T,
}

impl<T: Float> Point2<T> {
    pub fn new(x: T, y: T) -> Self {
        Point2 { x, y }
    }

    pub fn distance(&self, other: &Self) -> T {
        (self.x - other.x).hypot(self.y - other.y)
    }
}

/// Closed polygon; the last vertex connects back to the first.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Polygon<T> {
    pub vertices: Vec<Point2<T>>,
}

impl<T: Float> Polygon<T> {
    pub fn new(vertices: Vec<Point2<T>>) -> Self {
        Polygon { vertices }
    }

    pub fn is_degenerate(&self) -> bool {
        self.vertices.len() < 3
    }

    /// Even-odd rule containment. Degenerate polygons contain nothing.
    pub fn contains(&self, p: Point2<T>) -> bool {
        if self.is_degenerate() {
            return false;
        }
        let n = self.vertices.len();
        let mut inside = false;
        let mut j = n - 1;
        for i in 0..n {
            let a = self.vertices[i];
            let b = self.vertices[j];
            if (a.y > p.y) != (b.y > p.y) {
                let x_cross = (b.x - a.x) * (p.y - a.y) / (b.y - a.y) + a.x;
                if p.x < x_cross {
                    inside = !inside;
                }
            }
            j = i;
        }
        inside
    }
}

/// A visible range on one continuous axis.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Window<T> {
    pub lo: T,
    pub hi: T,
}

impl<T: Float> Window<T> {
    pub fn new(lo: T, hi: T) -> Self {
        if lo <= hi {
            Window { lo, hi }
        } else {
            Window { lo: hi, hi: lo }
        }
    }

    pub fn span(&self) -> T {
        self.hi - self.lo
    }

    pub fn midpoint(&self) -> T {
        (self.lo + self.hi) / (T::one() + T::one())
    }

    pub fn contains(&self, v: T) -> bool {
        v >= self.lo && v <= self.hi
    }

    /// Scale about `center`; `scale > 1` zooms in.
    pub fn zoomed(&self, scale: T, center: T) -> Self {
        Window {
            lo: center + (self.lo - center) / scale,
            hi: center + (self.hi - center) / scale,
        }
    }

    pub fn panned(&self, delta: T) -> Self {
        Window {
            lo: self.lo + delta,
            hi: self.hi + delta,
        }
    }

    /// Fit inside `extent`: shift back in when possible, shrink to the
    /// extent when wider.
    pub fn clamped(&self, extent: &Self) -> Self {
        if self.span() >= extent.span() {
            return *extent;
        }
        if self.lo < extent.lo {
            let d = extent.lo - self.lo;
            return self.panned(d);
        }
        if self.hi > extent.hi {
            let d = extent.hi - self.hi;
            return self.panned(d);
        }
        *self
    }
}

/// Smallest step of the form {1, 2, 5} x 10^k that is at least `raw`.
pub fn nice_step<T: Float>(raw: T) -> T {
    if raw.is_nan() || raw <= T::zero() || !raw.is_finite() {
        return T::one();
    }
    let ten = T::from(10.0).unwrap();
    let exp = raw.log10().floor();
    let base = ten.powf(exp);
    for m in [1.0, 2.0, 5.0, 10.0] {
        let step = base * T::from(m).unwrap();
        // tolerate representation error in `base`
        if step >= raw * T::from(1.0 - 1e-12).unwrap() {
            return step;
        }
    }
    base * ten
}

/// One histogram bin `[lo, hi)`; the last bin is closed on the right.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Bin<T> {
    pub lo: T,
    pub hi: T,
    pub count: usize,
    pub members: Vec<usize>,
}

/// Bin edges for `values` aiming at `target` equal-width bins on nice
/// boundaries. Returns `None` when there is no finite value.
pub fn bin_edges<T: Float>(values: &[Option<T>], target: usize) -> Option<Vec<T>> {
    let target = target.max(1);
    let mut finite = values.iter().flatten().copied().filter(|v| v.is_finite());
    let first = finite.next()?;
    let (min, max) = finite.fold((first, first), |(lo, hi), v| (lo.min(v), hi.max(v)));
    if min == max {
        return Some(vec![min, max]);
    }
    let step = nice_step((max - min) / T::from(target).unwrap());
    let lo = (min / step).floor() * step;
    let mut n = ((max - lo) / step).ceil().to_usize().unwrap_or(1).max(1);
    while lo + step * T::from(n).unwrap() < max {
        n += 1;
    }
    Some((0..=n).map(|i| lo + step * T::from(i).unwrap()).collect())
}

/// Equal-width nice binning. Null and non-finite entries are not counted;
/// indices in `members` refer to positions in `values`.
pub fn bin<T: Float>(values: &[Option<T>], target: usize) -> Vec<Bin<T>> {
    let Some(edges) = bin_edges(values, target) else {
        return Vec::new();
    };
    let mut bins: Vec<Bin<T>> = edges
        .windows(2)
        .map(|w| Bin {
            lo: w[0],
            hi: w[1],
            count: 0,
            members: Vec::new(),
        })
        .collect();
    let last = bins.len() - 1;
    for (i, v) in values.iter().enumerate() {
        let Some(v) = v.filter(|v| v.is_finite()) else {
            continue;
        };
        // number of interior edges <= v
        let idx = edges[1..edges.len() - 1].partition_point(|e| *e <= v).min(last);
        bins[idx].count += 1;
        bins[idx].members.push(i);
    }
    bins
}

/// Evenly spaced nice tick values covering `[lo, hi]`.
pub fn ticks<T: Float>(lo: T, hi: T, target: usize) -> Vec<T> {
    if lo.is_nan() || hi.is_nan() || hi <= lo {
        return vec![lo];
    }
    let step = nice_step((hi - lo) / T::from(target.max(1)).unwrap());
    let start = (lo / step).ceil();
    let end = (hi / step).floor();
    let n = (end - start).to_i64().unwrap_or(0).max(0);
    (0..=n)
        .map(|i| (start + T::from(i).unwrap()) * step)
        .collect()
}
