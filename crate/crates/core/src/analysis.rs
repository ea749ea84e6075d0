//! Complexity profiles, the entropy bound chain and minimality witnesses.

use std::collections::HashSet;

use num_bigint::BigUint;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::sam::SuffixAutomaton;
use crate::schedule::{round_up, Schedule};
use crate::words::{aligned_blocks, scan_occurrences, PartialWindow, STAR};

/// Largest window accepted by [`complexity_profile`]; the automaton needs
/// about `2 (σ + 2) · 4` bytes per cell.
pub const MAX_COMPLEXITY_WINDOW: usize = 1 << 25;

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct AlignedCensus {
    pub k: usize,
    pub m: u64,
    /// Aligned level-`k` blocks in the window.
    pub blocks: u64,
    /// Distinct words among them.
    pub distinct: u64,
    /// How many of the distinct words belong to the enumerated `A_k`.
    pub members: Option<u64>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ComplexityReport {
    pub source: String,
    pub window_len: u64,
    /// `(n, number of distinct length-n subwords of the window)`; a lower
    /// bound on `|L_n(X)|`.
    pub counts: Vec<(u64, u64)>,
    pub aligned: Vec<AlignedCensus>,
}

impl ComplexityReport {
    pub fn count(&self, n: u64) -> Option<u64> {
        self.counts.iter().find(|&&(m, _)| m == n).map(|&(_, c)| c)
    }
}

/// Distinct subword counts for `n = 1..=n_max`.
pub fn complexity_profile(x: &PartialWindow, n_max: u64) -> Result<ComplexityReport> {
    if x.cells().contains(&STAR) {
        return Err(Error::InvalidInput("window has undefined cells".into()));
    }
    if x.len() > MAX_COMPLEXITY_WINDOW {
        return Err(Error::InvalidInput(format!(
            "window of {} cells exceeds the {MAX_COMPLEXITY_WINDOW}-cell complexity limit",
            x.len()
        )));
    }
    let sigma = x.cells().iter().max().map_or(1, |&c| c as usize + 1);
    let sam = SuffixAutomaton::new(x.cells(), sigma);
    let n_max = n_max.min(x.len() as u64 + 1);
    let counts = sam.distinct_by_length(n_max as usize);
    Ok(ComplexityReport {
        source: format!("window {}", x.interval()),
        window_len: x.len() as u64,
        counts: (1..=n_max).map(|n| (n, counts[n as usize])).collect(),
        aligned: Vec::new(),
    })
}

/// Distinct aligned level-`k` blocks of `x`, checked against `A_k` when it
/// was enumerated.
pub fn aligned_census(x: &PartialWindow, schedule: &Schedule, k: usize) -> Result<AlignedCensus> {
    let m = schedule.m(k);
    let (first, last) = aligned_blocks(x.interval(), m)?;
    let distinct: HashSet<&[u8]> = x.cells().chunks_exact(m as usize).collect();
    let members = schedule.level_words(k).map(|words| {
        distinct
            .iter()
            .filter(|w| words.position(w).is_some())
            .count() as u64
    });
    Ok(AlignedCensus {
        k,
        m,
        blocks: (last - first + 1) as u64,
        distinct: distinct.len() as u64,
        members,
    })
}

/// [`complexity_profile`] plus the aligned census for every level the
/// window is aligned to.
pub fn complexity_report(
    x: &PartialWindow,
    n_max: u64,
    schedule: &Schedule,
) -> Result<ComplexityReport> {
    let mut report = complexity_profile(x, n_max)?;
    for k in 0..=schedule.depth() {
        if aligned_blocks(x.interval(), schedule.m(k)).is_err() {
            break;
        }
        report.aligned.push(aligned_census(x, schedule, k)?);
    }
    Ok(report)
}

/// `C = max(1, (4/3) b_1)`, the constant for which `b_k ≤ C (3/4)^k`
/// follows from the level recurrence.
pub fn decay_constant(schedule: &Schedule) -> f64 {
    if schedule.depth() == 0 {
        return 1.0;
    }
    (4.0 / 3.0 * b_upper(schedule, 1)).max(1.0)
}

fn b_upper(schedule: &Schedule, k: usize) -> f64 {
    round_up(schedule.levels[k].card.ln_upper() / schedule.m(k) as f64)
}

/// `(k, (ln m_k)/m_k + 2 C (3/4)^k)` for `k = 1..=k_max`; beyond the built
/// depth `D`, `(ln m_D)/m_D` stands in for `(ln m_k)/m_k`.
pub fn entropy_bound_series(schedule: &Schedule, k_max: usize) -> Vec<(usize, f64)> {
    let c = decay_constant(schedule);
    let d = schedule.depth();
    (1..=k_max)
        .map(|k| {
            let m = schedule.m(k.min(d)) as f64;
            (k, m.ln() / m + 2.0 * c * 0.75f64.powi(k as i32))
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LevelEntropy {
    pub k: usize,
    pub m: u64,
    /// Upper bound on `ln |A_k| / m_k`.
    pub b: f64,
    /// `ln |A| (3/4)^k`, the decay bound with constant `ln |A|`.
    pub printed_bound: f64,
    pub printed_holds: bool,
    /// `C (3/4)^k` with [`decay_constant`].
    pub corrected_bound: f64,
    pub corrected_holds: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RecurrenceCheck {
    pub k: usize,
    /// `ln |A_{k+1}|_upper / m_{k+1}`.
    pub lhs: f64,
    /// `ln 2 / m_k + (2/3) b_k`.
    pub rhs: f64,
    pub holds: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EntropyChain {
    pub c: f64,
    pub levels: Vec<LevelEntropy>,
    pub recurrence: Vec<RecurrenceCheck>,
}

pub fn entropy_chain(schedule: &Schedule) -> EntropyChain {
    let c = decay_constant(schedule);
    let ln_a = (schedule.alphabet.len() as f64).ln();
    let levels = (1..=schedule.depth())
        .map(|k| {
            let b = b_upper(schedule, k);
            let decay = 0.75f64.powi(k as i32);
            LevelEntropy {
                k,
                m: schedule.m(k),
                b,
                printed_bound: ln_a * decay,
                printed_holds: b <= ln_a * decay,
                corrected_bound: c * decay,
                corrected_holds: b <= c * decay,
            }
        })
        .collect();
    let recurrence = (1..schedule.depth())
        .map(|k| {
            let lhs = b_upper(schedule, k + 1);
            let rhs = round_up(
                std::f64::consts::LN_2 / schedule.m(k) as f64 + 2.0 / 3.0 * b_upper(schedule, k),
            );
            RecurrenceCheck {
                k,
                lhs,
                rhs,
                holds: lhs <= round_up(rhs),
            }
        })
        .collect();
    EntropyChain {
        c,
        levels,
        recurrence,
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ContainmentCheck {
    pub k: usize,
    /// Aligned level-`(k+1)` blocks examined.
    pub blocks: u64,
    /// Blocks with no occurrence of `w_k` inside them.
    pub violations: u64,
    pub first_violation: Option<i64>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct GapCheck {
    pub k: usize,
    pub occurrences: u64,
    pub max_gap: Option<u64>,
    /// `2 m_{k+1}`.
    pub bound: u64,
}

impl GapCheck {
    pub fn passed(&self) -> bool {
        self.max_gap.map_or(true, |g| g <= self.bound)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "status", content = "detail", rename_all = "kebab-case")]
pub enum Coverage {
    Passed,
    Failed(String),
    NotApplicable(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CoverageCheck {
    pub k: usize,
    pub coverage: Coverage,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct MinimalityReport {
    pub depth: usize,
    pub containment: Vec<ContainmentCheck>,
    pub gaps: Vec<GapCheck>,
    pub coverage: Vec<CoverageCheck>,
}

impl MinimalityReport {
    pub fn passed(&self) -> bool {
        self.containment.iter().all(|c| c.violations == 0)
            && self.gaps.iter().all(GapCheck::passed)
            && !self
                .coverage
                .iter()
                .any(|c| matches!(c.coverage, Coverage::Failed(_)))
    }
}

/// Finite-window evidence for minimality up to depth `depth`: every aligned
/// level-`(k+1)` block contains `w_k`, consecutive `w_k` are at most
/// `2 m_{k+1}` apart, and (for `k ≤ 1`, faithful profile) `w_{k+1}` contains
/// every word of `A_k` as an aligned block.
pub fn minimality_witnesses(
    x: &PartialWindow,
    schedule: &Schedule,
    depth: usize,
) -> Result<MinimalityReport> {
    if depth > schedule.depth() {
        return Err(Error::InvalidParameter(format!(
            "depth {depth} exceeds the schedule depth {}",
            schedule.depth()
        )));
    }
    if x.cells().contains(&STAR) {
        return Err(Error::InvalidInput("window has undefined cells".into()));
    }
    aligned_blocks(x.interval(), schedule.m(depth))?;
    let mut report = MinimalityReport {
        depth,
        containment: Vec::new(),
        gaps: Vec::new(),
        coverage: Vec::new(),
    };
    for k in 0..depth {
        let m_next = schedule.m(k + 1) as usize;
        let m_k = schedule.m(k) as usize;
        let blocks = x.len() / m_next;
        let mut found = vec![false; blocks];
        let mut occurrences = 0u64;
        let mut prev: Option<usize> = None;
        let mut max_gap: Option<u64> = None;
        scan_occurrences(schedule.pillar(k).as_slice(), x.cells(), |i| {
            occurrences += 1;
            if let Some(p) = prev {
                let g = (i - p) as u64;
                max_gap = Some(max_gap.map_or(g, |mg| mg.max(g)));
            }
            prev = Some(i);
            let b = i / m_next;
            if i + m_k <= (b + 1) * m_next {
                found[b] = true;
            }
        });
        let first_block = (x.offset() + (m_next as i64 - 1) / 2) / m_next as i64;
        let missing: Vec<usize> = found
            .iter()
            .enumerate()
            .filter(|(_, &f)| !f)
            .map(|(b, _)| b)
            .collect();
        report.containment.push(ContainmentCheck {
            k,
            blocks: blocks as u64,
            violations: missing.len() as u64,
            first_violation: missing.first().map(|&b| first_block + b as i64),
        });
        report.gaps.push(GapCheck {
            k,
            occurrences,
            max_gap,
            bound: 2 * m_next as u64,
        });
        if k <= 1 {
            report.coverage.push(CoverageCheck {
                k,
                coverage: pillar_coverage(schedule, k),
            });
        }
    }
    Ok(report)
}

/// Whether every word of `A_k` is an aligned block of `w_{k+1}`.
pub fn pillar_coverage(schedule: &Schedule, k: usize) -> Coverage {
    if k + 1 > schedule.depth() {
        return Coverage::NotApplicable(format!("w_{} not built", k + 1));
    }
    let Some(words) = schedule.level_words(k) else {
        return Coverage::NotApplicable(format!(
            "A_{k} is not enumerated in the {} profile",
            schedule.profile
        ));
    };
    let mut seen = vec![false; words.len()];
    for block in schedule
        .pillar(k + 1)
        .as_slice()
        .chunks_exact(schedule.m(k) as usize)
    {
        match words.position(block) {
            Some(i) => seen[i] = true,
            None => return Coverage::Failed(format!("w_{} has a block outside A_{k}", k + 1)),
        }
    }
    match seen.iter().position(|&s| !s) {
        None => Coverage::Passed,
        Some(i) => Coverage::Failed(format!(
            "word {} of A_{k} is missing from w_{}",
            schedule.alphabet.render(words.get(i)),
            k + 1
        )),
    }
}

/// `α ln(a) / 2`, the entropy any subshift realizing every sequence along
/// a set of upper density `α` must have.
pub fn positive_density_bound(alpha: f64, alphabet_size: u64) -> Result<f64> {
    if !(alpha > 0.0 && alpha <= 1.0) && alpha != 0.0 {
        return Err(Error::InvalidParameter(format!(
            "density {alpha} outside [0, 1]"
        )));
    }
    if alphabet_size < 2 {
        return Err(Error::InvalidParameter(
            "alphabet size must be at least 2".into(),
        ));
    }
    Ok(alpha * (alphabet_size as f64).ln() / 2.0)
}

/// `a^{s_count}`, the number of distinct length-`len` words forced in a
/// window holding `s_count` elements of `S`.
pub fn realization_forced_count(len: u64, s_count: u64, alphabet_size: u64) -> Result<BigUint> {
    if s_count > len {
        return Err(Error::InvalidParameter(format!(
            "{s_count} elements cannot fit in a window of length {len}"
        )));
    }
    let exp =
        u32::try_from(s_count).map_err(|_| Error::InvalidParameter("count too large".into()))?;
    Ok(BigUint::from(alphabet_size).pow(exp))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::schedule::{build_schedule, Profile};
    use crate::sparse::SparseSetSpec;
    use crate::words::{Alphabet, Interval};

    fn binary(depth: usize) -> Schedule {
        build_schedule(
            &Alphabet::binary(),
            &SparseSetSpec::squares(),
            depth,
            Interval::new(0, 0).unwrap(),
            Profile::Faithful,
        )
        .unwrap()
    }

    fn window(text: &str, offset: i64) -> PartialWindow {
        PartialWindow::new(offset, Alphabet::binary().parse_cells(text).unwrap()).unwrap()
    }

    #[test]
    fn complexity_examples() {
        let r = complexity_profile(&window("0101", 0), 2).unwrap();
        assert_eq!(r.counts, vec![(1, 2), (2, 2)]);
        let r = complexity_profile(&window("000000000000001", -7), 2).unwrap();
        assert_eq!(r.count(2), Some(2));
        let mut x = window("01", 0);
        x.set(0, STAR).unwrap();
        assert!(matches!(
            complexity_profile(&x, 1),
            Err(Error::InvalidInput(_))
        ));
    }

    #[test]
    fn bound_series_values() {
        let s = binary(2);
        assert_eq!(decay_constant(&s), 1.0);
        let series = entropy_bound_series(&s, 20);
        assert!((series[0].1 - 1.680537).abs() < 1e-5);
        assert!((series[1].1 - 1.125010).abs() < 1e-5);
        assert!(series[19].1 < 0.01);
        assert!((series[19].1 - 0.0063526).abs() < 1e-6);
        for w in series[1..].windows(2) {
            assert!(w[1].1 < w[0].1);
        }
    }

    #[test]
    fn chain_reports_both_constants() {
        let chain = entropy_chain(&binary(2));
        let l1 = &chain.levels[0];
        assert!((l1.b - 0.689074).abs() < 1e-5);
        assert!(!l1.printed_holds);
        assert!(l1.corrected_holds);
        let rec = &chain.recurrence[0];
        assert!(rec.holds);
        assert!((rec.rhs - 0.505593).abs() < 1e-5);
    }

    #[test]
    fn witnesses_on_depth_one() {
        let s = binary(1);
        let r = minimality_witnesses(&window("000000101100101", -7), &s, 1).unwrap();
        assert!(r.passed());
        assert_eq!(r.coverage[0].coverage, Coverage::Passed);

        let ones = window(&"1".repeat(45), -22);
        let r = minimality_witnesses(&ones, &s, 1).unwrap();
        assert_eq!(r.containment[0].violations, 3);
        assert_eq!(r.containment[0].first_violation, Some(-1));
        assert!(!r.passed());
    }

    #[test]
    fn coverage_of_w2() {
        assert_eq!(pillar_coverage(&binary(2), 1), Coverage::Passed);
        assert!(matches!(
            pillar_coverage(&binary(1), 1),
            Coverage::NotApplicable(_)
        ));
    }

    #[test]
    fn positive_density() {
        assert!((positive_density_bound(0.5, 2).unwrap() - 0.17329).abs() < 1e-5);
        assert_eq!(positive_density_bound(0.0, 5).unwrap(), 0.0);
        assert!(positive_density_bound(1.5, 2).is_err());
        assert!(positive_density_bound(0.5, 1).is_err());
        assert_eq!(
            realization_forced_count(15, 7, 2).unwrap(),
            BigUint::from(128u32)
        );
        assert!(128.0 > 2f64.powf(15.0 * 0.5 / 2.0));
        assert!(realization_forced_count(3, 4, 2).is_err());
    }

    #[test]
    fn census_on_depth_one() {
        let s = binary(2);
        let x = window("000000101100101", -7);
        let c = aligned_census(&x, &s, 1).unwrap();
        assert_eq!((c.blocks, c.distinct, c.members), (1, 1, Some(1)));
        assert_eq!(aligned_census(&x, &binary(1), 1).unwrap().members, None);
        let r = complexity_report(&x, 3, &s).unwrap();
        assert_eq!(r.aligned.len(), 2);
    }
}
