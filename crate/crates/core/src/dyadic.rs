//! Exact dyadic geometry on the real line.
//!
//! Generation `n >= 0` intervals are the usual `[k 2^-n, (k+1) 2^-n)`. Coarse
//! generations `n < 0` are shifted left by `t_n = (4^m - 1) / 3` with `m`
//! given by `n = -2m + 1` or `n = -2m`; with that shift every bounded interval
//! sits inside some dyadic interval. A [`Filtration`] translates the whole
//! family by `-alpha`.
//!
//! Everything here is exact: endpoints are [`Exact`] rationals and
//! intervals are addressed by `(generation, offset)`.

use std::cmp::Ordering;

use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::scalar::{exact_pow2, floor_exact, Exact};

/// `t_n` for generation `n`.
pub fn translation(generation: i32) -> Exact {
    if generation >= 0 {
        return Exact::zero();
    }
    let m = (1 - generation) / 2;
    let four_m: i128 = 1i128 << (2 * m);
    Exact::from_integer((four_m - 1) / 3)
}

/// Length `2^-n` of a generation-`n` interval.
pub fn generation_length(generation: i32) -> Exact {
    exact_pow2(-generation)
}

/// Half-open interval `[left, right)` with exact endpoints.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct RealInterval {
    left: Exact,
    right: Exact,
}

impl RealInterval {
    pub fn new(left: Exact, right: Exact) -> Result<Self> {
        if left >= right {
            return Err(Error::EmptyInterval {
                left: left.to_string(),
                right: right.to_string(),
            });
        }
        Ok(Self { left, right })
    }

    /// Convenience constructor from `(numerator, denominator)` pairs.
    pub fn from_ratios(left: (i128, i128), right: (i128, i128)) -> Result<Self> {
        Self::new(Exact::new(left.0, left.1), Exact::new(right.0, right.1))
    }

    pub fn left(&self) -> Exact {
        self.left
    }

    pub fn right(&self) -> Exact {
        self.right
    }

    pub fn length(&self) -> Exact {
        self.right - self.left
    }

    pub fn midpoint(&self) -> Exact {
        (self.left + self.right) / Exact::from_integer(2)
    }

    pub fn contains_point(&self, x: Exact) -> bool {
        self.left <= x && x < self.right
    }

    pub fn contains(&self, other: &RealInterval) -> bool {
        self.left <= other.left && other.right <= self.right
    }

    pub fn shift(&self, by: Exact) -> RealInterval {
        RealInterval {
            left: self.left + by,
            right: self.right + by,
        }
    }

    /// The adjacent interval of the same length on the left, `I - |I|`.
    pub fn adjacent_left(&self) -> RealInterval {
        self.shift(-self.length())
    }

    pub fn hull(&self, other: &RealInterval) -> RealInterval {
        RealInterval {
            left: self.left.min(other.left),
            right: self.right.max(other.right),
        }
    }
}

/// Address `(generation, offset)` of a dyadic interval. The real endpoints
/// depend on the filtration it is read in; parent/child relations do not.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct DyadicInterval {
    pub generation: i32,
    pub offset: i64,
}

impl DyadicInterval {
    pub const UNIT: DyadicInterval = DyadicInterval {
        generation: 0,
        offset: 0,
    };

    pub fn new(generation: i32, offset: i64) -> Self {
        Self { generation, offset }
    }

    pub fn length(&self) -> Exact {
        generation_length(self.generation)
    }

    /// Endpoints in the standard filtration.
    pub fn interval(&self) -> RealInterval {
        interval_of(self.generation, self.offset)
    }

    pub fn left(&self) -> Exact {
        Exact::from_integer(self.offset as i128) * self.length() - translation(self.generation)
    }

    /// The unique interval of generation `n - 1` containing this one.
    pub fn predecessor(&self) -> DyadicInterval {
        DyadicInterval {
            generation: self.generation - 1,
            offset: offset_containing(self.left(), self.generation - 1),
        }
    }

    /// Ancestor at a coarser (or equal) generation.
    pub fn ancestor(&self, generation: i32) -> DyadicInterval {
        assert!(generation <= self.generation, "ancestor must be coarser");
        DyadicInterval {
            generation,
            offset: offset_containing(self.left(), generation),
        }
    }

    /// The two children, left first.
    pub fn children(&self) -> [DyadicInterval; 2] {
        let first = offset_containing(self.left(), self.generation + 1);
        [
            DyadicInterval::new(self.generation + 1, first),
            DyadicInterval::new(self.generation + 1, first + 1),
        ]
    }

    pub fn contains(&self, other: &DyadicInterval) -> bool {
        other.generation >= self.generation && other.ancestor(self.generation) == *self
    }

    /// Smallest interval of the same filtration containing both.
    pub fn common_predecessor(&self, other: &DyadicInterval) -> DyadicInterval {
        let generation = self.generation.min(other.generation);
        let mut a = self.ancestor(generation);
        let mut b = other.ancestor(generation);
        while a != b {
            a = a.predecessor();
            b = b.predecessor();
        }
        a
    }

    /// `log2(|P| / |I1|) + log2(|P| / |I2|)` with `P` the minimal common
    /// predecessor.
    pub fn distance(&self, other: &DyadicInterval) -> u32 {
        let p = self.common_predecessor(other);
        ((self.generation - p.generation) + (other.generation - p.generation)) as u32
    }
}

/// `[k 2^-n - t_n, (k+1) 2^-n - t_n)`.
pub fn interval_of(generation: i32, offset: i64) -> RealInterval {
    let len = generation_length(generation);
    let left = Exact::from_integer(offset as i128) * len - translation(generation);
    RealInterval {
        left,
        right: left + len,
    }
}

fn offset_containing(x: Exact, generation: i32) -> i64 {
    let scaled = (x + translation(generation)) / generation_length(generation);
    floor_exact(scaled) as i64
}

/// `D^alpha = D - alpha`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct Filtration {
    pub shift: Exact,
}

impl Filtration {
    pub fn standard() -> Self {
        Self::default()
    }

    pub fn shifted(shift: Exact) -> Self {
        Self { shift }
    }

    pub fn inverse(&self) -> Self {
        Self { shift: -self.shift }
    }

    pub fn compose(&self, other: &Filtration) -> Self {
        Self {
            shift: self.shift + other.shift,
        }
    }

    pub fn interval(&self, address: DyadicInterval) -> RealInterval {
        address.interval().shift(-self.shift)
    }

    pub fn containing_point(&self, x: Exact, generation: i32) -> DyadicInterval {
        DyadicInterval::new(generation, offset_containing(x + self.shift, generation))
    }

    pub fn is_member(&self, interval: &RealInterval) -> Option<DyadicInterval> {
        let shifted = interval.shift(self.shift);
        let len = shifted.length();
        let generation = exact_log2(len)?;
        let address = DyadicInterval::new(generation, offset_containing(shifted.left, generation));
        (address.interval() == shifted).then_some(address)
    }

    /// A minimal-length member of the filtration containing `interval`.
    pub fn containing_dyadic(&self, interval: &RealInterval) -> DyadicInterval {
        let shifted = interval.shift(self.shift);
        // Start at the finest generation whose intervals are at least as long.
        let mut generation = finest_generation_at_least(shifted.length());
        loop {
            let candidate =
                DyadicInterval::new(generation, offset_containing(shifted.left, generation));
            if candidate.interval().right >= shifted.right {
                return candidate;
            }
            generation -= 1;
        }
    }

    pub fn common_predecessor(&self, a: &RealInterval, b: &RealInterval) -> DyadicInterval {
        self.containing_dyadic(&a.hull(b))
    }

    /// Maximal members of the filtration inside `interval`, no finer than
    /// `finest_generation`, sorted by decreasing length then left to right.
    pub fn covering(&self, interval: &RealInterval, finest_generation: i32) -> Covering {
        let shifted = interval.shift(self.shift);
        let step = generation_length(finest_generation);
        let t = translation(finest_generation);
        // Lattice points of the finest generation: k * step - t.
        let first = ceil_exact((shifted.left + t) / step);
        let last = floor_exact((shifted.right + t) / step);
        let mut intervals = Vec::new();
        if first >= last {
            return Covering {
                intervals,
                residual: interval.length(),
            };
        }
        let start = Exact::from_integer(first) * step - t;
        let end = Exact::from_integer(last) * step - t;
        let mut x = start;
        while x < end {
            let mut best = DyadicInterval::new(finest_generation, offset_containing(x, finest_generation));
            let mut generation = finest_generation - 1;
            loop {
                let candidate = DyadicInterval::new(generation, offset_containing(x, generation));
                let iv = candidate.interval();
                if iv.left != x || iv.right > end {
                    break;
                }
                best = candidate;
                generation -= 1;
            }
            x = best.interval().right;
            intervals.push(best);
        }
        sort_covering(&mut intervals);
        Covering {
            intervals,
            residual: (start - shifted.left) + (shifted.right - end),
        }
    }

    /// Matched-length coverings of `I` and of `I - |I|`.
    pub fn paired_coverings(
        &self,
        interval: &RealInterval,
        finest_generation: i32,
    ) -> Result<PairedCoverings> {
        let adjacent = interval.adjacent_left();
        let left = self.covering(interval, finest_generation);
        let right = self.covering(&adjacent, finest_generation);
        let (first, second) = match_lengths(&left.intervals, &right.intervals)?;
        Ok(PairedCoverings {
            interval: first,
            adjacent: second,
            residual: left.residual + right.residual,
        })
    }
}

fn ceil_exact(value: Exact) -> i128 {
    value.ceil().to_integer()
}

/// `Some(n)` when `len == 2^-n`.
fn exact_log2(len: Exact) -> Option<i32> {
    let (num, den) = (*len.numer(), *len.denom());
    if num == 1 && den.count_ones() == 1 {
        Some(den.trailing_zeros() as i32)
    } else if den == 1 && num.count_ones() == 1 {
        Some(-(num.trailing_zeros() as i32))
    } else {
        None
    }
}

fn finest_generation_at_least(len: Exact) -> i32 {
    // Largest n with 2^-n >= len.
    let mut n = 0i32;
    if len > Exact::one() {
        while generation_length(n) < len {
            n -= 1;
        }
    } else {
        while generation_length(n + 1) >= len {
            n += 1;
        }
    }
    n
}

fn sort_covering(intervals: &mut [DyadicInterval]) {
    intervals.sort_by(|a, b| match a.generation.cmp(&b.generation) {
        Ordering::Equal => a.left().cmp(&b.left()),
        other => other,
    });
}

/// Output of [`Filtration::covering`].
#[derive(Debug, Clone, PartialEq)]
pub struct Covering {
    pub intervals: Vec<DyadicInterval>,
    /// Length of `I` not reached at the truncation generation.
    pub residual: Exact,
}

/// Output of [`Filtration::paired_coverings`]: position-by-position equal lengths.
#[derive(Debug, Clone, PartialEq)]
pub struct PairedCoverings {
    pub interval: Vec<DyadicInterval>,
    pub adjacent: Vec<DyadicInterval>,
    pub residual: Exact,
}

/// Splitting step: whenever the heads differ, the longer head is cut into
/// dyadic pieces matching the run of shorter intervals on the other side.
fn match_lengths(
    a: &[DyadicInterval],
    b: &[DyadicInterval],
) -> Result<(Vec<DyadicInterval>, Vec<DyadicInterval>)> {
    let mut out_a = Vec::new();
    let mut out_b = Vec::new();
    let (mut i, mut j) = (0usize, 0usize);
    while i < a.len() && j < b.len() {
        match a[i].generation.cmp(&b[j].generation) {
            Ordering::Equal => {
                out_a.push(a[i]);
                out_b.push(b[j]);
                i += 1;
                j += 1;
            }
            Ordering::Less => {
                let consumed = split_against(a[i], &b[j..])?;
                out_b.extend_from_slice(&b[j..j + consumed.len()]);
                out_a.extend(consumed.iter().copied());
                j += consumed.len();
                i += 1;
            }
            Ordering::Greater => {
                let consumed = split_against(b[j], &a[i..])?;
                out_a.extend_from_slice(&a[i..i + consumed.len()]);
                out_b.extend(consumed.iter().copied());
                i += consumed.len();
                j += 1;
            }
        }
    }
    Ok((out_a, out_b))
}

/// Cut `big` left to right into pieces whose lengths follow `run` until the
/// lengths add up to `|big|`.
fn split_against(big: DyadicInterval, run: &[DyadicInterval]) -> Result<Vec<DyadicInterval>> {
    let target = big.length();
    let mut acc = Exact::zero();
    let mut pieces = Vec::new();
    let base = big.left();
    for piece in run {
        let left = base + acc;
        let generation = piece.generation;
        pieces.push(DyadicInterval::new(generation, offset_containing(left, generation)));
        acc += piece.length();
        match acc.cmp(&target) {
            Ordering::Equal => return Ok(pieces),
            Ordering::Greater => break,
            Ordering::Less => {}
        }
    }
    Err(Error::Invariant(format!(
        "covering lengths do not add up to a dyadic interval of generation {}",
        big.generation
    )))
}

/// `{(t, h) : |x - t| < h < h_max}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConeRegion {
    pub apex: Exact,
    pub height_cap: Exact,
}

impl ConeRegion {
    pub fn new(apex: Exact) -> Self {
        Self {
            apex,
            height_cap: Exact::one(),
        }
    }

    pub fn contains(&self, t: Exact, h: Exact) -> bool {
        (self.apex - t).abs() < h && h < self.height_cap
    }
}

/// `I x (0, |I|]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CarlesonBox {
    pub base: RealInterval,
}

impl CarlesonBox {
    pub fn new(base: RealInterval) -> Self {
        Self { base }
    }

    pub fn contains(&self, x: Exact, h: Exact) -> bool {
        self.base.contains_point(x) && h > Exact::zero() && h <= self.base.length()
    }

    pub fn contains_box(&self, other: &CarlesonBox) -> bool {
        self.base.contains(&other.base)
    }
}

/// One sample of the box quadrature: evaluate at `(x, h)`, multiply by
/// `width * ln 2`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LatticeCell {
    pub x: Exact,
    pub h: Exact,
    pub width: Exact,
    pub layer: u32,
}

/// Quadrature lattice for `int_I int_0^{|I|} g(x, h) dh dx / h`.
///
/// Layer `n` covers `h in [2^-(n+1)|I|, 2^-n |I|)`, is sampled at the bottom
/// height `h_n = 2^-(n+1)|I|` and at `x = left + j h_n`; each cell carries
/// width `h_n`, so the layer integrates `dh / h` to exactly `ln 2`.
pub fn box_lattice(interval: &RealInterval, depth: u32) -> Result<Vec<LatticeCell>> {
    if depth < 1 {
        return Err(Error::param("depth", "box lattice needs depth >= 1"));
    }
    let len = interval.length();
    let mut cells = Vec::with_capacity((1usize << (depth + 1)).saturating_sub(2));
    for layer in 0..depth {
        let h = len * exact_pow2(-(layer as i32) - 1);
        let count = 1i128 << (layer + 1);
        for j in 0..count {
            cells.push(LatticeCell {
                x: interval.left + Exact::from_integer(j) * h,
                h,
                width: h,
                layer,
            });
        }
    }
    Ok(cells)
}
