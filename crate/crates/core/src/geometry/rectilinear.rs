use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::quad::Rect;
use crate::seqs::GrowthSequence;
use crate::{Error, Result};

/// `ε_n = -log(1 - 2^-n)`, so that `e^{-2ε_n} = (1 - 2^-n)²`.
pub fn eps4(n: u32) -> f64 {
    -(-(-f64::from(n)).exp2()).ln_1p()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum RectTag {
    /// `B_{0,m}`.
    Base { m: u32 },
    /// `B_{k,2n}`, `0 < k < l_n`.
    Tower { k: u64, n: u32 },
    /// `P_{k,n}`, joining `B_{k-1,2n}` and `B_{k,2n}`.
    Pipe { k: u64, n: u32 },
}

/// A rectangle of `F` stored relative to the sheet `2π·sheet`: its global
/// position is `rect + 2π·sheet·i`. Tower boxes at height `2kπ` are only
/// `2^{1-2n}π` tall, which global coordinates cannot resolve for large `n`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TaggedRect {
    pub tag: RectTag,
    pub sheet: i64,
    pub rect: Rect,
}

impl TaggedRect {
    /// The rectangle in global coordinates (lossy for thin tower boxes).
    pub fn global(&self) -> Rect {
        let s = 2.0 * PI * self.sheet as f64;
        Rect::new(self.rect.x0, self.rect.x1, self.rect.y0 + s, self.rect.y1 + s)
    }

    /// Closed membership of `x + i(y + 2π·sheet)`.
    pub fn contains_local(&self, x: f64, y: f64, sheet: i64) -> bool {
        let dy = 2.0 * PI * (sheet - self.sheet) as f64;
        self.rect.contains(x, y + dy)
    }
}

/// Truncation of the union `F` of base boxes, towers and pipes in the right
/// half-plane, down to depth `n_max`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RectilinearDomain {
    n_max: u32,
    /// `l_1, …, l_{n_max}`.
    heights: Vec<u64>,
    rects: Vec<TaggedRect>,
}

impl RectilinearDomain {
    /// Builds `F` from `M` with `l_n = min(n, M_n²)`.
    pub fn build(growth: &GrowthSequence, n_max: u32) -> Result<Self> {
        growth.validate()?;
        let heights: Vec<u64> = (1..=u64::from(n_max))
            .map(|n| growth.tower_height(n))
            .collect();
        Self::from_heights(heights)
    }

    /// Builds `F` from explicit tower heights `l_1, …, l_{n_max}`.
    pub fn from_heights(heights: Vec<u64>) -> Result<Self> {
        if heights.is_empty() {
            return Err(Error::validation("n_max must be at least 1"));
        }
        if heights.contains(&0) || heights.windows(2).any(|w| w[1] < w[0]) {
            return Err(Error::validation(
                "tower heights must be positive and non-decreasing",
            ));
        }
        let n_max = u32::try_from(heights.len())
            .ok()
            .filter(|&n| n <= 500)
            .ok_or_else(|| Error::validation("n_max is limited to 500"))?;
        let mut rects = Vec::new();
        for m in 2..=2 * n_max + 1 {
            rects.push(TaggedRect {
                tag: RectTag::Base { m },
                sheet: 0,
                rect: base_box(m),
            });
        }
        for n in 1..=n_max {
            let l = heights[n as usize - 1];
            let base = base_box(2 * n);
            for k in 1..l {
                rects.push(TaggedRect {
                    tag: RectTag::Tower { k, n },
                    sheet: k as i64,
                    rect: base,
                });
            }
            let width = (-4.0 * f64::from(n)).exp2();
            let mid = 0.5 * (base.x0 + base.x1);
            let gap = (-2.0 * f64::from(n)).exp2() * PI;
            for k in 1..l {
                rects.push(TaggedRect {
                    tag: RectTag::Pipe { k, n },
                    sheet: k as i64 - 1,
                    rect: Rect::new(mid - 0.5 * width, mid + 0.5 * width, gap, 2.0 * PI - gap),
                });
            }
        }
        Ok(Self {
            n_max,
            heights,
            rects,
        })
    }

    pub fn n_max(&self) -> u32 {
        self.n_max
    }

    /// `l_n`, `1 ≤ n ≤ n_max`.
    pub fn height(&self, n: u32) -> u64 {
        self.heights[n as usize - 1]
    }

    pub fn heights(&self) -> &[u64] {
        &self.heights
    }

    pub fn rects(&self) -> &[TaggedRect] {
        &self.rects
    }

    /// Membership in the closed union of rectangles.
    pub fn contains(&self, u: Complex64) -> bool {
        let sheet = (u.im / (2.0 * PI)).round() as i64;
        let y = u.im - 2.0 * PI * sheet as f64;
        self.contains_lift(u.re, y, sheet)
    }

    /// Membership of `x + i(y + 2π·sheet)`.
    pub fn contains_lift(&self, x: f64, y: f64, sheet: i64) -> bool {
        self.rects.iter().any(|r| r.contains_local(x, y, sheet))
    }

    /// `#{k : 0 ≤ k ≤ l_{n_max}, -Log w + 2kπi ∈ F}` for `0 < |w| < 1`.
    pub fn count_preimages(&self, w: Complex64) -> Result<u64> {
        let r = w.norm();
        if !(r > 0.0 && r < 1.0) {
            return Err(Error::validation(format!(
                "count_preimages needs 0 < |w| < 1, got |w| = {r}"
            )));
        }
        Ok(self.count_lifts(Complex64::new(-r.ln(), -w.arg())))
    }

    /// Number of lifts `u + 2kπi ∈ F`, `0 ≤ k ≤ l_{n_max}`, of a point `u`
    /// given in logarithmic coordinates with `Im u ∈ [-π, π)`.
    pub fn count_lifts(&self, u: Complex64) -> u64 {
        let k_max = *self.heights.last().unwrap() as i64;
        (0..=k_max)
            .filter(|&k| self.contains_lift(u.re, u.im, k))
            .count() as u64
    }

    /// Normalized area `Σ |R| / π` of the rectangles (interiors are disjoint).
    pub fn area(&self) -> f64 {
        self.rects
            .iter()
            .map(|r| r.rect.width() * r.rect.height())
            .sum::<f64>()
            / PI
    }

    /// `Σ_{n > n_max} n·16^-n`, which bounds `Σ_{n > n_max} l_n 16^-n`
    /// since `l_n ≤ n`.
    pub fn tail_bound(&self) -> f64 {
        let x: f64 = 1.0 / 16.0;
        let n = f64::from(self.n_max);
        x.powf(n + 1.0) * ((n + 1.0) - n * x) / ((1.0 - x) * (1.0 - x))
    }

    /// Pairs of rectangles whose interiors intersect.
    pub fn overlapping_pairs(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for i in 0..self.rects.len() {
            for j in i + 1..self.rects.len() {
                // Work in the lower sheet's frame, where box-pipe contacts
                // are computed by the same expression on both sides.
                let (mut a, mut b) = (&self.rects[i], &self.rects[j]);
                if a.sheet > b.sheet {
                    std::mem::swap(&mut a, &mut b);
                }
                let dy = 2.0 * PI * (b.sheet - a.sheet) as f64;
                let b_local = Rect::new(b.rect.x0, b.rect.x1, b.rect.y0 + dy, b.rect.y1 + dy);
                if a.rect.intersect(&b_local).is_some() {
                    out.push((i, j));
                }
            }
        }
        out
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("domain serializes")
    }
}

/// `B_{0,m} = [ε_{m+1}, ε_m] × [-2^-m π, 2^-m π]`.
fn base_box(m: u32) -> Rect {
    let half = (-f64::from(m)).exp2() * PI;
    Rect::new(eps4(m + 1), eps4(m), -half, half)
}
