//! Sparse subsets `S = {s_1 < s_2 < ...}` of the positive integers.
//!
//! Rule kinds are enumerated exactly: monomials and rational powers through
//! integer roots, `⌊n ln n⌋` through a double-double logarithm whenever the
//! plain `f64` value sits near an integer boundary.

use std::collections::VecDeque;
use std::fmt;
use std::path::Path;

use num_bigint::BigUint;

use crate::error::{Error, Result};
use crate::words::Interval;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SparseSetSpec {
    /// Sorted positive integers. When `complete` is false the list is a
    /// prefix of a longer sequence and queries past its end are rejected.
    Explicit {
        elements: Vec<u64>,
        complete: bool,
        label: String,
    },
    /// `s_n = n^degree`.
    Monomial { degree: u32 },
    /// `s_n = ⌊n^(num/den)⌋` with `num > den`.
    Power { num: u32, den: u32 },
    /// `s_n = ⌊n ln n⌋` for `n >= 2`.
    NLogN,
    /// `s_n = 2n`, a positive-density set.
    Evens,
}

impl SparseSetSpec {
    pub fn squares() -> Self {
        SparseSetSpec::Monomial { degree: 2 }
    }

    /// A finite set given in full.
    pub fn finite(mut elements: Vec<u64>) -> Result<Self> {
        elements.sort_unstable();
        elements.dedup();
        if elements.first() == Some(&0) {
            return Err(Error::InvalidParameter(
                "S must be a subset of ℕ = {1, 2, ...}".into(),
            ));
        }
        let label = format!(
            "list:{}",
            elements
                .iter()
                .map(u64::to_string)
                .collect::<Vec<_>>()
                .join(",")
        );
        Ok(SparseSetSpec::Explicit {
            elements,
            complete: true,
            label,
        })
    }

    /// A strictly increasing prefix of an infinite set, one integer per line,
    /// `#` starting a comment.
    pub fn prefix_from_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        let mut elements: Vec<u64> = Vec::new();
        for (lineno, line) in text.lines().enumerate() {
            let line = line.split('#').next().unwrap().trim();
            if line.is_empty() {
                continue;
            }
            let v: u64 = line.parse().map_err(|_| {
                Error::Parse(format!(
                    "{}:{}: not an integer: {line:?}",
                    path.display(),
                    lineno + 1
                ))
            })?;
            if v == 0 || elements.last().is_some_and(|&last| last >= v) {
                return Err(Error::Parse(format!(
                    "{}:{}: elements must be positive and strictly increasing",
                    path.display(),
                    lineno + 1
                )));
            }
            elements.push(v);
        }
        Ok(SparseSetSpec::Explicit {
            elements,
            complete: false,
            label: format!("file:{}", path.display()),
        })
    }

    /// Parses `squares`, `monomial:D`, `power:P/Q`, `nlogn`, `evens`,
    /// `list:a,b,...` or `file:PATH`.
    pub fn parse(desc: &str) -> Result<Self> {
        let bad = || Error::Parse(format!("unknown sparse set {desc:?}"));
        match desc.split_once(':') {
            None => match desc {
                "squares" => Ok(Self::squares()),
                "nlogn" => Ok(SparseSetSpec::NLogN),
                "evens" => Ok(SparseSetSpec::Evens),
                _ => Err(bad()),
            },
            Some(("monomial", d)) => {
                let degree: u32 = d.parse().map_err(|_| bad())?;
                if degree == 0 {
                    return Err(Error::InvalidParameter(
                        "monomial degree must be >= 1".into(),
                    ));
                }
                Ok(SparseSetSpec::Monomial { degree })
            }
            Some(("power", g)) => {
                let (p, q) = g.split_once('/').ok_or_else(bad)?;
                let num: u32 = p.parse().map_err(|_| bad())?;
                let den: u32 = q.parse().map_err(|_| bad())?;
                if den == 0 || num <= den {
                    return Err(Error::InvalidParameter(format!(
                        "power exponent {num}/{den} must exceed 1"
                    )));
                }
                Ok(SparseSetSpec::Power { num, den })
            }
            Some(("list", items)) => {
                let elements = items
                    .split(',')
                    .filter(|s| !s.trim().is_empty())
                    .map(|s| s.trim().parse::<u64>().map_err(|_| bad()))
                    .collect::<Result<Vec<_>>>()?;
                Self::finite(elements)
            }
            Some(("file", path)) => Self::prefix_from_file(Path::new(path)),
            Some(_) => Err(bad()),
        }
    }

    pub fn descriptor(&self) -> String {
        match self {
            SparseSetSpec::Explicit { label, .. } => label.clone(),
            SparseSetSpec::Monomial { degree: 2 } => "squares".into(),
            SparseSetSpec::Monomial { degree } => format!("monomial:{degree}"),
            SparseSetSpec::Power { num, den } => format!("power:{num}/{den}"),
            SparseSetSpec::NLogN => "nlogn".into(),
            SparseSetSpec::Evens => "evens".into(),
        }
    }

    /// Index of the first element (`s_2` for `nlogn`, otherwise `s_1`).
    pub fn first_index(&self) -> u64 {
        match self {
            SparseSetSpec::NLogN => 2,
            _ => 1,
        }
    }

    /// `s_n`, or `None` past the end of an explicit list or on overflow.
    pub fn nth(&self, n: u64) -> Option<u64> {
        if n < self.first_index() {
            return None;
        }
        match self {
            SparseSetSpec::Explicit { elements, .. } => elements.get(n as usize - 1).copied(),
            SparseSetSpec::Monomial { degree } => {
                n.checked_pow(*degree).filter(|&v| v <= i64::MAX as u64)
            }
            SparseSetSpec::Power { num, den } => {
                let root = BigUint::from(n).pow(*num).nth_root(*den);
                u64::try_from(root).ok().filter(|&v| v <= i64::MAX as u64)
            }
            SparseSetSpec::NLogN => floor_n_ln_n(n),
            SparseSetSpec::Evens => n.checked_mul(2).filter(|&v| v <= i64::MAX as u64),
        }
    }

    /// Smallest index `n` with `s_n >= lo`, if any.
    fn first_index_at_least(&self, lo: u64) -> Option<u64> {
        if let SparseSetSpec::Explicit { elements, .. } = self {
            let pos = elements.partition_point(|&e| e < lo);
            return (pos < elements.len()).then_some(pos as u64 + 1);
        }
        // s_n >= n - 1 for every rule kind, so the answer is at most lo + 2
        let mut a = self.first_index();
        let mut b = lo.saturating_add(2).max(a);
        if self.nth(b).map_or(true, |v| v < lo) {
            return None;
        }
        while a < b {
            let mid = a + (b - a) / 2;
            match self.nth(mid) {
                Some(v) if v >= lo => b = mid,
                _ => a = mid + 1,
            }
        }
        Some(a)
    }

    /// Ascending `(n, s_n)` pairs with `s_n >= lo`; yields an incomplete-data
    /// error if a prefix list runs out before `hi`.
    pub(crate) fn walk(&self, lo: i64, hi: i64) -> ElementWalk<'_> {
        let start = lo.max(1) as u64;
        let next = if hi < 1 {
            None
        } else {
            self.first_index_at_least(start)
        };
        ElementWalk {
            set: self,
            next,
            hi,
            done: hi < 1,
        }
    }

    /// `(n, s_n)` for every element in `iv`.
    pub fn elements_in(&self, iv: Interval) -> Result<Vec<(u64, u64)>> {
        self.walk(iv.lo, iv.hi).collect()
    }

    /// Whether any element lies in `iv`.
    pub fn meets(&self, iv: Interval) -> Result<bool> {
        self.walk(iv.lo, iv.hi)
            .next()
            .transpose()
            .map(|x| x.is_some())
    }
}

impl fmt::Display for SparseSetSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.descriptor())
    }
}

pub(crate) struct ElementWalk<'a> {
    set: &'a SparseSetSpec,
    next: Option<u64>,
    hi: i64,
    done: bool,
}

impl Iterator for ElementWalk<'_> {
    type Item = Result<(u64, u64)>;

    fn next(&mut self) -> Option<Self::Item> {
        if self.done {
            return None;
        }
        let n = match self.next {
            Some(n) => n,
            None => {
                self.done = true;
                return self.exhausted();
            }
        };
        match self.set.nth(n) {
            Some(s) if s as i64 <= self.hi => {
                self.next = Some(n + 1);
                Some(Ok((n, s)))
            }
            Some(_) => {
                self.done = true;
                None
            }
            None => {
                self.done = true;
                self.exhausted()
            }
        }
    }
}

impl ElementWalk<'_> {
    fn exhausted(&self) -> Option<Result<(u64, u64)>> {
        match self.set {
            SparseSetSpec::Explicit {
                complete: false,
                elements,
                ..
            } if elements.last().map_or(true, |&e| (e as i64) < self.hi) => {
                Some(Err(Error::IncompleteData(format!(
                    "element list ends at {} before the queried bound {}; supply a longer list",
                    elements.last().copied().unwrap_or(0),
                    self.hi
                ))))
            }
            SparseSetSpec::Explicit { .. } => None,
            _ => Some(Err(Error::InvalidParameter(format!(
                "S elements near {} overflow 63-bit coordinates",
                self.hi
            )))),
        }
    }
}

/// Densest length-`len` window of `range`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct WindowCount {
    pub count: u64,
    pub witness: Interval,
}

/// Streaming sliding-window maximum of `|S ∩ I|` over length-`len`
/// subintervals `I` of `range`, stopping early once the count reaches
/// `stop_at`.
pub(crate) fn densest_window(
    set: &SparseSetSpec,
    len: u64,
    range: Interval,
    stop_at: Option<u64>,
) -> Result<WindowCount> {
    if len == 0 {
        return Err(Error::InvalidParameter(
            "window length must be positive".into(),
        ));
    }
    if range.len() < len {
        return Err(Error::InvalidParameter(format!(
            "range {range} is shorter than the window length {len}"
        )));
    }
    let len_i = len as i64;
    let first_hi = range.lo + len_i - 1;
    let reached = |c: u64| stop_at.is_some_and(|t| c >= t);

    // Every optimal window can be slid left until its right end is an
    // element of S or its left end is range.lo.
    let mut window: VecDeque<i64> = VecDeque::new();
    let mut best = WindowCount {
        count: 0,
        witness: Interval {
            lo: range.lo,
            hi: first_hi,
        },
    };
    for item in set.walk(range.lo, range.hi) {
        let (_, s) = item?;
        let s = s as i64;
        window.push_back(s);
        if s <= first_hi {
            best.count = window.len() as u64;
        } else {
            while let Some(&front) = window.front() {
                if front <= s - len_i {
                    window.pop_front();
                } else {
                    break;
                }
            }
            if window.len() as u64 > best.count {
                best = WindowCount {
                    count: window.len() as u64,
                    witness: Interval {
                        lo: s - len_i + 1,
                        hi: s,
                    },
                };
            }
        }
        if reached(best.count) {
            break;
        }
    }
    Ok(best)
}

/// Largest number of elements of `S` in a length-`len` subinterval of `range`.
pub fn max_window_count(set: &SparseSetSpec, len: u64, range: Interval) -> Result<u64> {
    densest_window(set, len, range, None).map(|w| w.count)
}

/// As [`max_window_count`], with an interval attaining the maximum.
pub fn max_window(set: &SparseSetSpec, len: u64, range: Interval) -> Result<WindowCount> {
    densest_window(set, len, range, None)
}

/// Outcome of a sparsity test `max |S ∩ I| < len / (3 m_k)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SparsityCheck {
    pub ok: bool,
    pub threshold: u64,
    /// Exact maximum when `ok`; otherwise a count `>= threshold` reached by `witness`.
    pub count: u64,
    pub witness: Interval,
}

pub fn sparsity_check(
    set: &SparseSetSpec,
    len: u64,
    m_k: u64,
    range: Interval,
) -> Result<SparsityCheck> {
    if m_k == 0 || len % (3 * m_k) != 0 {
        return Err(Error::InvalidParameter(format!(
            "window length {len} is not a multiple of 3·{m_k}"
        )));
    }
    let threshold = len / (3 * m_k);
    let w = densest_window(set, len, range, Some(threshold))?;
    Ok(SparsityCheck {
        ok: w.count < threshold,
        threshold,
        count: w.count,
        witness: w.witness,
    })
}

/// Whether every length-`len` window of `range` holds fewer than `len / (3 m_k)` elements.
pub fn sparsity_ok(set: &SparseSetSpec, len: u64, m_k: u64, range: Interval) -> Result<bool> {
    sparsity_check(set, len, m_k, range).map(|c| c.ok)
}

/// `max_window_count / len`, the Banach-density quotient at window size `len`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DensityEstimate {
    pub count: u64,
    pub len: u64,
    pub witness: Interval,
}

impl DensityEstimate {
    pub fn value(&self) -> f64 {
        self.count as f64 / self.len as f64
    }
}

pub fn density_estimate(set: &SparseSetSpec, len: u64, range: Interval) -> Result<DensityEstimate> {
    let w = densest_window(set, len, range, None)?;
    Ok(DensityEstimate {
        count: w.count,
        len,
        witness: w.witness,
    })
}

// ---------------------------------------------------------------------------
// ⌊n ln n⌋

const GUARD: f64 = 1e-9;

fn floor_n_ln_n(n: u64) -> Option<u64> {
    if n < 2 || n > (1u64 << 52) {
        return None;
    }
    let x = n as f64;
    let v = x * x.ln();
    // f64 error of x·ln x is a few ulps of v
    let band = GUARD.max(v * 8.0 * f64::EPSILON);
    let nearest = v.round();
    let floor = if (v - nearest).abs() < band {
        let (hi, lo) = dd_mul_f64(dd_ln_u64(n), x);
        let f = hi.floor();
        // hi + lo < f is possible only when hi is an integer and lo < 0
        if hi == f && lo < 0.0 {
            f - 1.0
        } else {
            f
        }
    } else {
        v.floor()
    };
    let floor = floor as u64;
    (floor <= i64::MAX as u64).then_some(floor)
}

// Double-double arithmetic: a value is hi + lo with |lo| <= ulp(hi)/2.

type Dd = (f64, f64);

fn two_sum(a: f64, b: f64) -> Dd {
    let s = a + b;
    let bb = s - a;
    (s, (a - (s - bb)) + (b - bb))
}

fn two_prod(a: f64, b: f64) -> Dd {
    let p = a * b;
    (p, a.mul_add(b, -p))
}

fn dd_add(a: Dd, b: Dd) -> Dd {
    let (s, e) = two_sum(a.0, b.0);
    let e = e + a.1 + b.1;
    two_sum(s, e)
}

fn dd_mul(a: Dd, b: Dd) -> Dd {
    let (p, e) = two_prod(a.0, b.0);
    let e = e + (a.0 * b.1 + a.1 * b.0);
    two_sum(p, e)
}

fn dd_mul_f64(a: Dd, b: f64) -> Dd {
    dd_mul(a, (b, 0.0))
}

fn dd_div(a: Dd, b: Dd) -> Dd {
    let q1 = a.0 / b.0;
    let r = dd_add(a, dd_mul((-q1, 0.0), b));
    let q2 = r.0 / b.0;
    let r = dd_add(r, dd_mul((-q2, 0.0), b));
    let q3 = r.0 / b.0;
    dd_add(two_sum(q1, q2), (q3, 0.0))
}

const LN2_DD: Dd = (std::f64::consts::LN_2, 2.319_046_813_846_299_6e-17);

/// `ln n` to roughly 100 bits: `n = 2^e · m`, `ln m = 2 atanh((m-1)/(m+1))`.
fn dd_ln_u64(n: u64) -> Dd {
    let e = 63 - n.leading_zeros() as i32;
    // m = n / 2^e in [1, 2), held exactly as a double-double
    let scale = (-e as f64).exp2();
    let hi = ((n >> 11) << 11) as f64;
    let lo = (n & 0x7ff) as f64;
    let m = two_sum(hi * scale, lo * scale);
    let t = dd_div(dd_add(m, (-1.0, 0.0)), dd_add(m, (1.0, 0.0)));
    let t2 = dd_mul(t, t);
    let mut term = t;
    let mut sum = (0.0, 0.0);
    let mut k = 1.0;
    // t <= 1/3, so t^(2j) drops below 2^-106 after 34 terms
    for _ in 0..40 {
        sum = dd_add(sum, dd_div(term, (k, 0.0)));
        term = dd_mul(term, t2);
        k += 2.0;
    }
    let ln_m = dd_mul(sum, (2.0, 0.0));
    dd_add(dd_mul(LN2_DD, (e as f64, 0.0)), ln_m)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn iv(lo: i64, hi: i64) -> Interval {
        Interval::new(lo, hi).unwrap()
    }

    fn brute_count(set: &SparseSetSpec, len: u64, range: Interval) -> u64 {
        let elems: Vec<i64> = set
            .elements_in(range)
            .unwrap()
            .into_iter()
            .map(|(_, s)| s as i64)
            .collect();
        (range.lo..=range.hi - len as i64 + 1)
            .map(|a| {
                elems
                    .iter()
                    .filter(|&&e| a <= e && e < a + len as i64)
                    .count() as u64
            })
            .max()
            .unwrap()
    }

    #[test]
    fn elements_in_examples() {
        let sq = SparseSetSpec::squares();
        assert_eq!(
            sq.elements_in(iv(1, 15)).unwrap(),
            vec![(1, 1), (2, 4), (3, 9)]
        );
        assert!(sq.elements_in(iv(-7, 0)).unwrap().is_empty());
        assert_eq!(
            SparseSetSpec::NLogN.elements_in(iv(1, 10)).unwrap(),
            vec![(2, 1), (3, 3), (4, 5), (5, 8), (6, 10)]
        );
    }

    #[test]
    fn prefix_list_exhaustion_is_incomplete_data() {
        let prefix = SparseSetSpec::Explicit {
            elements: vec![3, 7],
            complete: false,
            label: "file:x".into(),
        };
        assert_eq!(prefix.elements_in(iv(1, 7)).unwrap(), vec![(1, 3), (2, 7)]);
        assert!(matches!(
            prefix.elements_in(iv(1, 8)),
            Err(Error::IncompleteData(_))
        ));
        let finite = SparseSetSpec::finite(vec![3, 7]).unwrap();
        assert_eq!(finite.elements_in(iv(1, 100)).unwrap().len(), 2);
    }

    #[test]
    fn max_window_count_examples() {
        let sq = SparseSetSpec::squares();
        assert_eq!(max_window_count(&sq, 15, iv(1, 1_000_000)).unwrap(), 3);
        assert_eq!(
            max_window_count(&SparseSetSpec::Evens, 15, iv(1, 1000)).unwrap(),
            8
        );
        let five = SparseSetSpec::finite(vec![5]).unwrap();
        assert_eq!(max_window_count(&five, 3, iv(1, 10)).unwrap(), 1);
        assert!(matches!(
            max_window_count(&sq, 15, iv(1, 10)),
            Err(Error::InvalidParameter(_))
        ));
    }

    #[test]
    fn sparsity_examples() {
        let sq = SparseSetSpec::squares();
        assert!(sparsity_ok(&sq, 15, 1, iv(1, 1_000_000)).unwrap());
        assert!(!sparsity_ok(&SparseSetSpec::Evens, 15, 1, iv(1, 1000)).unwrap());
        let c = sparsity_check(&sq, 1_387_215, 15, iv(1, 2_000_000)).unwrap();
        assert!(c.ok);
        assert_eq!(c.threshold, 30_827);
        // densest window starts at 1: ⌊√1387215⌋ = 1177 squares
        assert_eq!(c.count, 1177);
        assert!(sparsity_check(&sq, 16, 1, iv(1, 100)).is_err());
    }

    #[test]
    fn density_examples() {
        let e = density_estimate(&SparseSetSpec::Evens, 1000, iv(1, 100_000)).unwrap();
        assert_eq!(e.value(), 0.5);
        let e = density_estimate(&SparseSetSpec::squares(), 10_000, iv(1, 1_000_000)).unwrap();
        assert_eq!(e.count, 100);
        let one = SparseSetSpec::finite(vec![1]).unwrap();
        assert_eq!(density_estimate(&one, 10, iv(1, 100)).unwrap().value(), 0.1);
    }

    #[test]
    fn sliding_scan_matches_brute_force() {
        let sets = [
            SparseSetSpec::squares(),
            SparseSetSpec::Evens,
            SparseSetSpec::NLogN,
            SparseSetSpec::Power { num: 3, den: 2 },
            SparseSetSpec::finite(vec![2, 3, 5, 7, 11, 13, 17, 19, 23]).unwrap(),
        ];
        for set in &sets {
            for len in [1u64, 2, 3, 7, 15] {
                for range in [iv(-10, 40), iv(1, 200), iv(17, 90)] {
                    assert_eq!(
                        max_window_count(set, len, range).unwrap(),
                        brute_count(set, len, range),
                        "{set} len={len} range={range}"
                    );
                }
            }
        }
    }

    #[test]
    fn power_kind_is_exact() {
        let p = SparseSetSpec::Power { num: 3, den: 2 };
        // ⌊n^1.5⌋ for n = 1..=6: 1, 2, 5, 8, 11, 14
        let got: Vec<u64> = (1..=6).map(|n| p.nth(n).unwrap()).collect();
        assert_eq!(got, vec![1, 2, 5, 8, 11, 14]);
        // perfect powers land exactly on the boundary
        assert_eq!(p.nth(10_000).unwrap(), 1_000_000);
        assert_eq!(p.nth(9_999).unwrap(), 999_850);
    }

    #[test]
    fn n_ln_n_double_double_agrees_with_f64_far_from_boundaries() {
        for n in 2..5000u64 {
            let x = n as f64;
            let v = x * x.ln();
            let (hi, lo) = dd_mul_f64(dd_ln_u64(n), x);
            assert!((hi - v).abs() <= v * 4.0 * f64::EPSILON, "n={n}");
            assert!(lo.abs() <= hi.abs() * f64::EPSILON);
            if (v - v.round()).abs() > 1e-6 {
                assert_eq!(floor_n_ln_n(n).unwrap(), v.floor() as u64);
            }
        }
    }

    #[test]
    fn dd_ln_known_values() {
        // ln 10 = 2.302585092994045684017991454684...
        let (hi, lo) = dd_ln_u64(10);
        assert_eq!(hi, std::f64::consts::LN_10);
        // the f64 nearest ln 10 is 2.302585092994045901..., so the tail is
        // ln 10 - hi = -2.1707562233822e-16
        assert!((lo + 2.170_756_223_382_2e-16).abs() < 1e-28);
        let (hi, _) = dd_ln_u64(1);
        assert_eq!(hi, 0.0);
    }

    #[test]
    fn descriptors_round_trip() {
        for d in [
            "squares",
            "monomial:3",
            "power:5/2",
            "nlogn",
            "evens",
            "list:1,4,9",
        ] {
            assert_eq!(SparseSetSpec::parse(d).unwrap().descriptor(), d);
        }
        assert!(SparseSetSpec::parse("power:1/2").is_err());
        assert!(SparseSetSpec::parse("primes").is_err());
        assert!(SparseSetSpec::parse("list:0,1").is_err());
    }

    #[test]
    fn file_loader() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("s.txt");
        std::fs::write(&path, "# squares\n1\n4\n9 # third\n\n16\n").unwrap();
        let s = SparseSetSpec::prefix_from_file(&path).unwrap();
        assert_eq!(s.nth(4), Some(16));
        assert!(matches!(
            s.elements_in(iv(1, 20)),
            Err(Error::IncompleteData(_))
        ));
        std::fs::write(&path, "4\n1\n").unwrap();
        assert!(SparseSetSpec::prefix_from_file(&path).is_err());
    }
}
