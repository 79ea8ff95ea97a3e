//! Points and the three metric spaces the library works over: Euclidean
//! space, finite-depth Bernoulli words, and max-metric products of the two.

use std::fmt;

use rand::Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{Result, ShadowError};

/// Largest supported Bernoulli depth; words are packed into a `u64`.
pub const MAX_WORD_DEPTH: u32 = 63;

/// Default depth for Bernoulli words.
pub const DEFAULT_WORD_DEPTH: u32 = 32;

/// A finite prefix `x_1 x_2 ... x_D` of a point of the full two-symbol shift.
///
/// Symbol `x_i` (1-based) lives in bit `i - 1` of `bits`, so prepending a
/// symbol is a left shift and dropping the first symbol is a right shift.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Word {
    bits: u64,
    depth: u32,
}

impl Word {
    pub fn new(bits: u64, depth: u32) -> Result<Self> {
        if depth == 0 || depth > MAX_WORD_DEPTH {
            return Err(ShadowError::Input(format!(
                "word depth must be in 1..={MAX_WORD_DEPTH}, got {depth}"
            )));
        }
        Ok(Word { bits: bits & mask(depth), depth })
    }

    /// Builds a word from symbols `x_1, x_2, ...`; each must be 0 or 1.
    pub fn from_symbols(symbols: &[u8]) -> Result<Self> {
        let depth = symbols.len() as u32;
        let mut bits = 0u64;
        for (i, &s) in symbols.iter().enumerate() {
            if s > 1 {
                return Err(ShadowError::Input(format!("symbol {s} is not in {{0,1}}")));
            }
            bits |= (s as u64) << i;
        }
        Word::new(bits, depth)
    }

    /// Constant word `(s s s ...)`.
    pub fn constant(symbol: u8, depth: u32) -> Result<Self> {
        Word::from_symbols(&vec![symbol; depth as usize])
    }

    pub fn bits(&self) -> u64 {
        self.bits
    }

    pub fn depth(&self) -> u32 {
        self.depth
    }

    /// Symbol at 1-based position `i`.
    pub fn symbol(&self, i: u32) -> u8 {
        debug_assert!(i >= 1 && i <= self.depth);
        ((self.bits >> (i - 1)) & 1) as u8
    }

    pub fn symbols(&self) -> Vec<u8> {
        (1..=self.depth).map(|i| self.symbol(i)).collect()
    }

    /// `(s x_1 x_2 ... x_{D-1})`: the last symbol falls off the window.
    pub fn prepend(&self, symbol: u8) -> Word {
        Word {
            bits: ((self.bits << 1) | (symbol as u64 & 1)) & mask(self.depth),
            depth: self.depth,
        }
    }

    /// `(x_2 x_3 ... x_D 0)`: drops the first symbol, pads with 0.
    pub fn drop_first(&self) -> Word {
        Word { bits: self.bits >> 1, depth: self.depth }
    }

    /// Flips the symbol at 1-based position `i`.
    pub fn flip(&self, i: u32) -> Word {
        debug_assert!(i >= 1 && i <= self.depth);
        Word { bits: self.bits ^ (1u64 << (i - 1)), depth: self.depth }
    }

    /// First 1-based index where the words differ, `None` when equal.
    pub fn first_mismatch(&self, other: &Word) -> Option<u32> {
        let diff = (self.bits ^ other.bits) & mask(self.depth.min(other.depth));
        (diff != 0).then(|| diff.trailing_zeros() + 1)
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for s in self.symbols() {
            write!(f, "{s}")?;
        }
        Ok(())
    }
}

fn mask(depth: u32) -> u64 {
    if depth >= 64 {
        u64::MAX
    } else {
        (1u64 << depth) - 1
    }
}

/// A point of one of the supported spaces.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Point {
    Vector(Vec<f64>),
    Word(Word),
    Pair(Box<Point>, Box<Point>),
}

impl Point {
    pub fn scalar(x: f64) -> Point {
        Point::Vector(vec![x])
    }

    pub fn pair(a: Point, b: Point) -> Point {
        Point::Pair(Box::new(a), Box::new(b))
    }

    pub fn as_vector(&self) -> Option<&[f64]> {
        match self {
            Point::Vector(v) => Some(v),
            _ => None,
        }
    }

    pub fn as_word(&self) -> Option<&Word> {
        match self {
            Point::Word(w) => Some(w),
            _ => None,
        }
    }

    pub fn as_pair(&self) -> Option<(&Point, &Point)> {
        match self {
            Point::Pair(a, b) => Some((a, b)),
            _ => None,
        }
    }

    /// Splits a pair into owned components.
    pub fn into_pair(self) -> Option<(Point, Point)> {
        match self {
            Point::Pair(a, b) => Some((*a, *b)),
            _ => None,
        }
    }

    /// Compact textual form used by the CSV writers: coordinates separated
    /// by spaces, words as symbol strings, pairs as `(a | b)`.
    pub fn render(&self) -> String {
        match self {
            Point::Vector(v) => v.iter().map(|x| format!("{x:e}")).collect::<Vec<_>>().join(" "),
            Point::Word(w) => w.to_string(),
            Point::Pair(a, b) => format!("({} | {})", a.render(), b.render()),
        }
    }
}

/// Metric space kinds.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MetricSpace {
    /// `R^dim` with the Euclidean norm.
    Euclidean { dim: usize },
    /// Product with `d((a,b),(a',b')) = max(d_1(a,a'), d_2(b,b'))`.
    MaxProduct(Box<MetricSpace>, Box<MetricSpace>),
    /// Two-symbol words of fixed depth with `d = 2^{-N}`, `N` the first
    /// mismatch index.
    Bernoulli { depth: u32 },
}

impl fmt::Display for MetricSpace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            MetricSpace::Euclidean { dim } => write!(f, "R^{dim}"),
            MetricSpace::MaxProduct(a, b) => write!(f, "({a} x {b})_max"),
            MetricSpace::Bernoulli { depth } => write!(f, "Sigma_2[depth {depth}]"),
        }
    }
}

impl MetricSpace {
    pub fn euclidean(dim: usize) -> Self {
        MetricSpace::Euclidean { dim }
    }

    pub fn bernoulli(depth: u32) -> Self {
        MetricSpace::Bernoulli { depth }
    }

    pub fn product(a: MetricSpace, b: MetricSpace) -> Self {
        MetricSpace::MaxProduct(Box::new(a), Box::new(b))
    }

    /// Components of a product space.
    pub fn factors(&self) -> Option<(&MetricSpace, &MetricSpace)> {
        match self {
            MetricSpace::MaxProduct(a, b) => Some((a, b)),
            _ => None,
        }
    }

    /// Checks that `p` is a well-formed point of this space.
    pub fn contains(&self, p: &Point) -> Result<()> {
        let mismatch = |detail: String| ShadowError::SpaceMismatch { space: self.to_string(), detail };
        match (self, p) {
            (MetricSpace::Euclidean { dim }, Point::Vector(v)) => {
                if v.len() != *dim {
                    return Err(mismatch(format!("expected {dim} coordinates, got {}", v.len())));
                }
                if v.iter().any(|x| !x.is_finite()) {
                    return Err(mismatch("non-finite coordinate".into()));
                }
                Ok(())
            }
            (MetricSpace::Bernoulli { depth }, Point::Word(w)) => {
                if w.depth() != *depth {
                    return Err(mismatch(format!("expected depth {depth}, got {}", w.depth())));
                }
                Ok(())
            }
            (MetricSpace::MaxProduct(sa, sb), Point::Pair(a, b)) => {
                sa.contains(a)?;
                sb.contains(b)
            }
            _ => Err(mismatch(format!("wrong point kind {}", p.render()))),
        }
    }

    /// Checked distance.
    pub fn distance(&self, a: &Point, b: &Point) -> Result<f64> {
        self.contains(a)?;
        self.contains(b)?;
        Ok(self.dist(a, b))
    }

    /// Distance without membership checks. Panics on mismatched point
    /// kinds; callers validate inputs at the API boundary.
    pub fn dist(&self, a: &Point, b: &Point) -> f64 {
        match (self, a, b) {
            (MetricSpace::Euclidean { .. }, Point::Vector(x), Point::Vector(y)) => {
                euclidean_distance(x, y)
            }
            (MetricSpace::Bernoulli { .. }, Point::Word(x), Point::Word(y)) => {
                match x.first_mismatch(y) {
                    Some(n) => (-(n as f64)).exp2(),
                    None => 0.0,
                }
            }
            (MetricSpace::MaxProduct(sa, sb), Point::Pair(a1, b1), Point::Pair(a2, b2)) => {
                sa.dist(a1, a2).max(sb.dist(b1, b2))
            }
            _ => panic!("distance between {} and {} in {self}", a.render(), b.render()),
        }
    }

    /// Moves `p` by `magnitude` in a uniformly random direction.
    ///
    /// Euclidean: exact magnitude up to rounding. Bernoulli: flips the
    /// symbol at `ceil(-log2 m)`, realising distance `2^{-j} <= m`, or
    /// nothing when that index exceeds the depth. Products perturb both
    /// components by `magnitude`, so the max-metric displacement equals it.
    pub fn perturb<R: Rng + ?Sized>(&self, p: &Point, magnitude: f64, rng: &mut R) -> Point {
        match (self, p) {
            (MetricSpace::Euclidean { dim }, Point::Vector(v)) => {
                if magnitude <= 0.0 {
                    return p.clone();
                }
                let dir = random_unit(*dim, rng);
                Point::Vector(v.iter().zip(&dir).map(|(x, u)| x + magnitude * u).collect())
            }
            (MetricSpace::Bernoulli { depth }, Point::Word(w)) => {
                if magnitude <= 0.0 {
                    return p.clone();
                }
                let j = (-magnitude.log2()).ceil().max(1.0);
                if j > *depth as f64 {
                    p.clone()
                } else {
                    Point::Word(w.flip(j as u32))
                }
            }
            (MetricSpace::MaxProduct(sa, sb), Point::Pair(a, b)) => {
                Point::pair(sa.perturb(a, magnitude, rng), sb.perturb(b, magnitude, rng))
            }
            _ => panic!("cannot perturb {} in {self}", p.render()),
        }
    }

    /// Random point: uniform in `[-scale, scale]^dim` for Euclidean
    /// factors, uniform symbols for Bernoulli factors.
    pub fn sample<R: Rng + ?Sized>(&self, scale: f64, rng: &mut R) -> Point {
        match self {
            MetricSpace::Euclidean { dim } => {
                Point::Vector((0..*dim).map(|_| rng.random_range(-scale..=scale)).collect())
            }
            MetricSpace::Bernoulli { depth } => {
                Point::Word(Word::new(rng.random::<u64>(), *depth).expect("valid depth"))
            }
            MetricSpace::MaxProduct(a, b) => Point::pair(a.sample(scale, rng), b.sample(scale, rng)),
        }
    }
}

/// Scaled two-norm of `x - y`; avoids underflow on tiny differences.
pub(crate) fn euclidean_distance(x: &[f64], y: &[f64]) -> f64 {
    if x.len() == 1 {
        return (x[0] - y[0]).abs();
    }
    let scale = x.iter().zip(y).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
    if scale == 0.0 || !scale.is_finite() {
        return scale;
    }
    let sum: f64 = x.iter().zip(y).map(|(a, b)| ((a - b) / scale).powi(2)).sum();
    scale * sum.sqrt()
}

fn random_unit<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> Vec<f64> {
    if dim == 1 {
        return vec![if rng.random::<bool>() { 1.0 } else { -1.0 }];
    }
    loop {
        let g: Vec<f64> = (0..dim).map(|_| StandardNormal.sample(rng)).collect();
        let norm = g.iter().map(|x| x * x).sum::<f64>().sqrt();
        if norm > 1e-12 {
            return g.into_iter().map(|x| x / norm).collect();
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn w(s: &str) -> Word {
        Word::from_symbols(&s.bytes().map(|b| b - b'0').collect::<Vec<_>>()).unwrap()
    }

    #[test]
    fn bernoulli_distance_is_two_to_minus_first_mismatch() {
        let sp = MetricSpace::bernoulli(6);
        let d = sp.distance(&Point::Word(w("101100")), &Point::Word(w("100100"))).unwrap();
        assert_eq!(d, 0.125);
        assert_eq!(sp.dist(&Point::Word(w("101100")), &Point::Word(w("101100"))), 0.0);
        assert_eq!(sp.dist(&Point::Word(w("001100")), &Point::Word(w("101100"))), 0.5);
    }

    #[test]
    fn prepend_and_drop_first() {
        let x = w("1111");
        assert_eq!(x.prepend(0), w("0111"));
        assert_eq!(x.prepend(0).drop_first(), w("1110"));
        assert_eq!(w("0110").to_string(), "0110");
    }

    #[test]
    fn product_distance_is_max() {
        let sp = MetricSpace::product(MetricSpace::euclidean(1), MetricSpace::bernoulli(4));
        let a = Point::pair(Point::scalar(0.0), Point::Word(w("0000")));
        let b = Point::pair(Point::scalar(0.1), Point::Word(w("0100")));
        assert_eq!(sp.distance(&a, &b).unwrap(), 0.25);
    }

    #[test]
    fn mismatched_points_are_rejected() {
        let sp = MetricSpace::euclidean(2);
        assert!(matches!(
            sp.distance(&Point::scalar(1.0), &Point::scalar(2.0)),
            Err(ShadowError::SpaceMismatch { .. })
        ));
        assert!(sp.contains(&Point::Word(w("01"))).is_err());
        assert!(Word::from_symbols(&[0, 2]).is_err());
        assert!(Word::new(0, 64).is_err());
    }

    #[test]
    fn perturb_realises_requested_magnitude() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let sp = MetricSpace::euclidean(3);
        let p = Point::Vector(vec![1.0, -2.0, 0.5]);
        for m in [0.0, 1e-6, 0.3, 2.0] {
            let q = sp.perturb(&p, m, &mut rng);
            assert!((sp.dist(&p, &q) - m).abs() <= 1e-12);
        }
        let bern = MetricSpace::bernoulli(12);
        let x = Point::Word(w("000000000000"));
        for m in [0.6, 0.25, 0.1, 1e-3, 1e-6] {
            let y = bern.perturb(&x, m, &mut rng);
            let d = bern.dist(&x, &y);
            assert!(d <= m, "{d} > {m}");
        }
        assert_eq!(bern.dist(&x, &bern.perturb(&x, 0.1, &mut rng)), 0.0625);
    }

    #[test]
    fn tiny_euclidean_distances_do_not_underflow() {
        let d = euclidean_distance(&[1e-200, 0.0], &[0.0, 1e-200]);
        assert!((d / 1e-200 - 2f64.sqrt()).abs() < 1e-12);
    }
}
