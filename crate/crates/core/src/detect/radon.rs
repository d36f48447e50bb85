//! Discrete Radon transform with four-way sub-pixel splitting.
//!
//! Pixel `(col, row)` sits at `x = col − ⌊(w−1)/2⌋`, `y = row − ⌊(h−1)/2⌋`
//! (y grows down the rows). Each pixel is split into four sub-pixels at
//! offsets `(±¼, ±¼)` carrying a quarter of its value; a sub-pixel lands in
//! the unit bin `⌊x·cosθ + y·sinθ + ½⌋`. With integer centres every column
//! falls in one bin at θ = 0 and every row at θ = 90.

use crate::field::Field;

pub const NUM_ANGLES: usize = 180;

const SUB_OFFSETS: [(f64, f64); 4] = [(-0.25, -0.25), (0.25, -0.25), (-0.25, 0.25), (0.25, 0.25)];

/// One projection `ρθ`; `values[i]` is bin `i − origin` along the rotated axis.
#[derive(Clone, Debug, PartialEq)]
pub struct Projection {
    pub angle: u32,
    pub origin: usize,
    pub values: Vec<f64>,
}

impl Projection {
    pub fn total(&self) -> f64 {
        self.values.iter().sum()
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Sinogram {
    pub projections: Vec<Projection>,
}

impl Sinogram {
    pub fn angles(&self) -> impl Iterator<Item = u32> + '_ {
        self.projections.iter().map(|p| p.angle)
    }
}

#[inline]
fn bin_of(t: f64) -> i64 {
    (t + 0.5).floor() as i64
}

fn trig(angle_deg: u32) -> (f64, f64) {
    // Exact values on the axes keep θ = 0/90 projections aligned with columns/rows.
    match angle_deg % 360 {
        0 => (1.0, 0.0),
        90 => (0.0, 1.0),
        180 => (-1.0, 0.0),
        270 => (0.0, -1.0),
        a => {
            let r = f64::from(a).to_radians();
            (r.cos(), r.sin())
        }
    }
}

/// Projects `field` at a single angle in degrees.
pub fn project(field: &Field, angle_deg: u32) -> Projection {
    let (c, s) = trig(angle_deg);
    let cx = ((field.width - 1) / 2) as f64;
    let cy = ((field.height - 1) / 2) as f64;

    let xs = [-cx - 0.25, (field.width - 1) as f64 - cx + 0.25];
    let ys = [-cy - 0.25, (field.height - 1) as f64 - cy + 0.25];
    let mut lo = i64::MAX;
    let mut hi = i64::MIN;
    for &x in &xs {
        for &y in &ys {
            let b = bin_of(x * c + y * s);
            lo = lo.min(b);
            hi = hi.max(b);
        }
    }

    let mut values = vec![0.0; (hi - lo + 1) as usize];
    for row in 0..field.height {
        let y = row as f64 - cy;
        for col in 0..field.width {
            let v = field.get(col, row);
            if v == 0.0 {
                continue;
            }
            let quarter = 0.25 * v;
            let x = col as f64 - cx;
            for &(dx, dy) in &SUB_OFFSETS {
                let b = bin_of((x + dx) * c + (y + dy) * s);
                values[(b - lo) as usize] += quarter;
            }
        }
    }
    Projection {
        angle: angle_deg,
        origin: (-lo) as usize,
        values,
    }
}

/// Projections at every angle in `angles`.
pub fn radon_transform(field: &Field, angles: impl IntoIterator<Item = u32>) -> Sinogram {
    Sinogram {
        projections: angles.into_iter().map(|a| project(field, a)).collect(),
    }
}

/// Projections at 0..=179 degrees in one-degree steps.
pub fn radon_180(field: &Field) -> Sinogram {
    radon_transform(field, 0..NUM_ANGLES as u32)
}
