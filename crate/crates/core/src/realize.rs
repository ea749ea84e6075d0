//! Star-filling: from the target written on `S` to a fully defined window.
//!
//! `x^(0)` carries `u(n)` at `s_n` and STAR elsewhere. Level `k + 1` takes
//! every level-`(k+1)` block meeting `S`, writes the pillar `w_k` into its
//! first `r / 3` all-STAR level-`k` cells (left to right) and fills the
//! remaining STAR cells by cycling through the level-`k` word source,
//! restarting the cycle in each block. Cells already defined are never
//! touched, so deeper windows extend shallower ones.

use std::path::Path;

use serde::Serialize;

use crate::arith::mobius_sieve;
use crate::error::{Error, Result};
use crate::schedule::Schedule;
use crate::sparse::SparseSetSpec;
use crate::words::{
    aligned_blocks, block_hull, block_interval, Alphabet, Interval, PartialWindow, STAR,
};

/// The sequence `u` realized along `S`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum TargetSequence {
    /// `u(1), u(2), ...` as symbol indices.
    Explicit { symbols: Vec<u8>, label: String },
    /// Symbol 1 where `μ(n) = 1`, symbol 0 otherwise.
    MuIndicator,
    /// `sgn μ(n)`: symbol 0 for 0, symbol 1 for +1, symbol 2 for -1.
    MuSign,
}

impl TargetSequence {
    /// Parses `mu-indicator`, `mu-sign`, `list:SYMBOLS` or `file:PATH`; list
    /// and file payloads are alphabet characters, whitespace ignored and
    /// `#` starting a comment.
    pub fn parse(desc: &str, alphabet: &Alphabet) -> Result<Self> {
        let from_text = |text: &str, label: String| -> Result<Self> {
            let mut symbols = Vec::new();
            for line in text.lines() {
                let line = line.split('#').next().unwrap();
                for b in line.bytes().filter(|b| !b.is_ascii_whitespace()) {
                    symbols.push(alphabet.index_of(b).ok_or_else(|| {
                        Error::InvalidInput(format!(
                            "target symbol {:?} is not in the alphabet {:?}",
                            b as char,
                            alphabet.as_str()
                        ))
                    })?);
                }
            }
            Ok(TargetSequence::Explicit { symbols, label })
        };
        match desc {
            "mu-indicator" => Ok(TargetSequence::MuIndicator),
            "mu-sign" => {
                if alphabet.len() < 3 {
                    return Err(Error::InvalidParameter(
                        "mu-sign needs an alphabet with at least 3 symbols".into(),
                    ));
                }
                Ok(TargetSequence::MuSign)
            }
            _ => match desc.split_once(':') {
                Some(("list", text)) => from_text(text, desc.to_string()),
                Some(("file", path)) => {
                    let text = std::fs::read_to_string(Path::new(path))?;
                    from_text(&text, desc.to_string())
                }
                _ => Err(Error::Parse(format!("unknown target sequence {desc:?}"))),
            },
        }
    }

    pub fn descriptor(&self) -> String {
        match self {
            TargetSequence::Explicit { label, .. } => label.clone(),
            TargetSequence::MuIndicator => "mu-indicator".into(),
            TargetSequence::MuSign => "mu-sign".into(),
        }
    }

    /// `u(1..=n_max)` as symbol indices (`result[n - 1] = u(n)`).
    pub fn resolve(&self, n_max: u64, alphabet: &Alphabet) -> Result<Vec<u8>> {
        let out = match self {
            TargetSequence::Explicit { symbols, .. } => {
                if (symbols.len() as u64) < n_max {
                    return Err(Error::IncompleteData(format!(
                        "target defines u(1..={}) but u({n_max}) is needed",
                        symbols.len()
                    )));
                }
                symbols[..n_max as usize].to_vec()
            }
            TargetSequence::MuIndicator | TargetSequence::MuSign => {
                if n_max == 0 {
                    return Ok(Vec::new());
                }
                let table = mobius_sieve(n_max)?;
                let sign = matches!(self, TargetSequence::MuSign);
                if sign && alphabet.len() < 3 {
                    return Err(Error::InvalidParameter(
                        "mu-sign needs an alphabet with at least 3 symbols".into(),
                    ));
                }
                (1..=n_max)
                    .map(|n| match (table.mu(n), sign) {
                        (1, _) => 1,
                        (-1, true) => 2,
                        _ => 0,
                    })
                    .collect()
            }
        };
        if let Some(&bad) = out.iter().find(|&&c| c as usize >= alphabet.len()) {
            return Err(Error::InvalidInput(format!(
                "target symbol index {bad} outside alphabet"
            )));
        }
        Ok(out)
    }
}

/// `x^(0)` on `window`: `u(n)` at each `s_n`, STAR elsewhere.
pub fn init_partial(
    u: &TargetSequence,
    sparse: &SparseSetSpec,
    window: Interval,
    alphabet: &Alphabet,
) -> Result<PartialWindow> {
    let elements = sparse.elements_in(window)?;
    let mut x = PartialWindow::all_star(window);
    let n_max = elements.last().map_or(0, |&(n, _)| n);
    let values = u.resolve(n_max, alphabet)?;
    for (n, s) in elements {
        x.set(s as i64, values[n as usize - 1])?;
    }
    Ok(x)
}

/// Returns `x^(level)` from `x^(level - 1)`.
pub fn fill_level(x: &PartialWindow, level: usize, schedule: &Schedule) -> Result<PartialWindow> {
    let mut out = x.clone();
    fill_level_in_place(&mut out, level, schedule)?;
    Ok(out)
}

pub fn fill_level_in_place(x: &mut PartialWindow, level: usize, schedule: &Schedule) -> Result<()> {
    if level == 0 || level > schedule.depth() {
        return Err(Error::InvalidParameter(format!(
            "fill level {level} outside 1..={}",
            schedule.depth()
        )));
    }
    let k = level - 1;
    let m = schedule.m(level) as usize;
    let m_k = schedule.m(k) as usize;
    let r = m / m_k;
    let third = r / 3;
    let (first, last) = aligned_blocks(x.interval(), m as u64)?;
    let elements: Vec<i64> = schedule
        .sparse
        .elements_in(x.interval())?
        .into_iter()
        .map(|(_, s)| s as i64)
        .collect();
    let source = schedule.fill_source(k)?;
    let start = schedule.config.cycle_start % source.len();
    let pillar = schedule.pillar(k).as_slice();

    let mut next_elem = 0;
    let cells = x.cells_mut();
    for (b, i) in (first..=last).enumerate() {
        let iv = block_interval(i, m as u64)?;
        while next_elem < elements.len() && elements[next_elem] < iv.lo {
            next_elem += 1;
        }
        let meets_s = next_elem < elements.len() && elements[next_elem] <= iv.hi;
        let block = &mut cells[b * m..(b + 1) * m];

        let mut filled = 0usize;
        for (j, sub) in block.chunks_exact(m_k).enumerate() {
            let stars = sub.iter().filter(|&&c| c == STAR).count();
            if stars == 0 {
                filled += 1;
            } else if stars != m_k {
                return Err(Error::ConstructionInvariant {
                    level,
                    block: i,
                    reason: format!("level-{k} cell {j} is partially defined"),
                });
            }
        }
        if !meets_s {
            if filled > 0 {
                return Err(Error::ConstructionInvariant {
                    level,
                    block: i,
                    reason: "block disjoint from S holds defined cells".into(),
                });
            }
            continue;
        }
        if filled >= third {
            return Err(Error::DensityViolation {
                level: k,
                witness: iv,
                count: filled as u64,
                threshold: third as u64,
            });
        }

        let mut pillars_left = third;
        let mut cursor = start;
        for sub in block.chunks_exact_mut(m_k) {
            if sub[0] != STAR {
                continue;
            }
            if pillars_left > 0 {
                sub.copy_from_slice(pillar);
                pillars_left -= 1;
            } else {
                sub.copy_from_slice(source.get(cursor % source.len()));
                cursor += 1;
            }
        }
    }
    Ok(())
}

/// Level-`depth` blocks the realization covers: the block hull of the
/// schedule's window hint and the central block.
pub fn realization_window(schedule: &Schedule, depth: usize) -> Result<Interval> {
    let m = schedule.m(depth);
    block_hull(schedule.config.window_hint.hull(&block_interval(0, m)?), m)
}

/// Fully defined `x^(depth)` on [`realization_window`].
pub fn realize(u: &TargetSequence, schedule: &Schedule, depth: usize) -> Result<PartialWindow> {
    if depth == 0 || depth > schedule.depth() {
        return Err(Error::InvalidParameter(format!(
            "depth {depth} outside 1..={}",
            schedule.depth()
        )));
    }
    let m = schedule.m(depth);
    let window = realization_window(schedule, depth)?;
    let (first, last) = aligned_blocks(window, m)?;
    // the central block first so that an empty core is reported as such
    let order = std::iter::once(0).chain((first..=last).filter(|&i| i != 0));
    for i in order {
        if !schedule.sparse.meets(block_interval(i, m)?)? {
            return Err(Error::EmptyCore {
                level: depth,
                block: i,
            });
        }
    }
    let mut x = init_partial(u, &schedule.sparse, window, &schedule.alphabet)?;
    for level in 1..=depth {
        fill_level_in_place(&mut x, level, schedule)?;
    }
    if !x.is_complete() {
        return Err(Error::ConstructionInvariant {
            level: depth,
            block: 0,
            reason: format!("{} cells left undefined", x.star_count()),
        });
    }
    Ok(x)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Mismatch {
    pub n: u64,
    pub position: i64,
    pub expected: char,
    pub found: char,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RealizationReport {
    /// Number of `s_n` inside the window.
    pub checked: u64,
    pub first_mismatch: Option<Mismatch>,
}

impl RealizationReport {
    pub fn passed(&self) -> bool {
        self.first_mismatch.is_none()
    }
}

/// Checks `x(s_n) = u(n)` for every `s_n` in the window.
pub fn verify_realization(
    x: &PartialWindow,
    u: &TargetSequence,
    sparse: &SparseSetSpec,
    alphabet: &Alphabet,
) -> Result<RealizationReport> {
    let elements = sparse.elements_in(x.interval())?;
    let n_max = elements.last().map_or(0, |&(n, _)| n);
    let values = u.resolve(n_max, alphabet)?;
    let mut report = RealizationReport {
        checked: elements.len() as u64,
        first_mismatch: None,
    };
    for (n, s) in elements {
        let found = x.get(s as i64).expect("element inside window");
        let expected = values[n as usize - 1];
        if found != expected {
            report.first_mismatch = Some(Mismatch {
                n,
                position: s as i64,
                expected: alphabet.symbol(expected),
                found: alphabet.symbol(found),
            });
            break;
        }
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::schedule::{build_schedule, is_admissible_block, Profile};

    fn binary_squares(depth: usize) -> Schedule {
        build_schedule(
            &Alphabet::binary(),
            &SparseSetSpec::squares(),
            depth,
            Interval { lo: 0, hi: 0 },
            Profile::Faithful,
        )
        .unwrap()
    }

    fn alternating() -> TargetSequence {
        TargetSequence::Explicit {
            symbols: (0..1000).map(|n| ((n + 1) % 2) as u8).collect(),
            label: "alternating".into(),
        }
    }

    #[test]
    fn init_partial_examples() {
        let a = Alphabet::binary();
        let sq = SparseSetSpec::squares();
        let x = init_partial(&alternating(), &sq, Interval { lo: -7, hi: 7 }, &a).unwrap();
        assert_eq!(a.render(x.cells()), "********1**0***");

        let x = init_partial(&alternating(), &sq, Interval { lo: -3, hi: 0 }, &a).unwrap();
        assert_eq!(x.star_count(), 4);

        let x = init_partial(
            &TargetSequence::MuIndicator,
            &sq,
            Interval { lo: 1, hi: 16 },
            &a,
        )
        .unwrap();
        assert_eq!(a.render(x.cells()), "1**0****0******0");
    }

    #[test]
    fn level_one_fill_example() {
        let s = binary_squares(1);
        let x0 = init_partial(
            &alternating(),
            &s.sparse,
            Interval { lo: -7, hi: 7 },
            &s.alphabet,
        )
        .unwrap();
        let x1 = fill_level(&x0, 1, &s).unwrap();
        assert_eq!(s.alphabet.render(x1.cells()), "000000101100101");
        assert!(is_admissible_block(x1.cells(), 1, &s)
            .unwrap()
            .is_admissible());
    }

    #[test]
    fn blocks_disjoint_from_s_stay_star() {
        let s = binary_squares(1);
        // [-22, -8] is block -1, disjoint from the squares
        let x0 = init_partial(
            &alternating(),
            &s.sparse,
            Interval { lo: -22, hi: 7 },
            &s.alphabet,
        )
        .unwrap();
        let x1 = fill_level(&x0, 1, &s).unwrap();
        assert!(x1.cells()[..15].iter().all(|&c| c == STAR));
        assert!(x1.cells()[15..].iter().all(|&c| c != STAR));
    }

    #[test]
    fn crowded_block_is_a_density_violation() {
        let s = binary_squares(1);
        let mut x = PartialWindow::all_star(Interval { lo: -7, hi: 7 });
        for c in 1..=5 {
            x.set(c, 1).unwrap();
        }
        assert!(matches!(
            fill_level(&x, 1, &s),
            Err(Error::DensityViolation { .. })
        ));
    }

    #[test]
    fn stray_symbols_outside_s_break_the_invariant() {
        let s = binary_squares(1);
        let mut x = PartialWindow::all_star(Interval { lo: -22, hi: 7 });
        x.set(-10, 0).unwrap();
        assert!(matches!(
            fill_level(&x, 1, &s),
            Err(Error::ConstructionInvariant { block: -1, .. })
        ));
    }

    #[test]
    fn depth_one_realization() {
        let s = binary_squares(1);
        let x = realize(&alternating(), &s, 1).unwrap();
        assert_eq!(s.alphabet.render(x.cells()), "000000101100101");
        let report = verify_realization(&x, &alternating(), &s.sparse, &s.alphabet).unwrap();
        assert!(report.passed());
        assert_eq!(report.checked, 2);
    }

    #[test]
    fn empty_core() {
        let s = build_schedule(
            &Alphabet::binary(),
            &SparseSetSpec::finite(vec![1_000_000_000]).unwrap(),
            1,
            Interval { lo: 0, hi: 0 },
            Profile::Faithful,
        )
        .unwrap();
        assert!(matches!(
            realize(&TargetSequence::MuIndicator, &s, 1),
            Err(Error::EmptyCore { level: 1, block: 0 })
        ));
    }

    #[test]
    fn verify_reports_first_mismatch() {
        let s = binary_squares(1);
        let mut x = realize(&TargetSequence::MuIndicator, &s, 1).unwrap();
        x.set(4, 1).unwrap();
        let report =
            verify_realization(&x, &TargetSequence::MuIndicator, &s.sparse, &s.alphabet).unwrap();
        let m = report.first_mismatch.unwrap();
        assert_eq!((m.n, m.position, m.expected, m.found), (2, 4, '0', '1'));

        let left = PartialWindow::new(-100, vec![0; 10]).unwrap();
        let report =
            verify_realization(&left, &TargetSequence::MuIndicator, &s.sparse, &s.alphabet)
                .unwrap();
        assert!(report.passed());
        assert_eq!(report.checked, 0);
    }

    #[test]
    fn target_parsing() {
        let a = Alphabet::binary();
        let u = TargetSequence::parse("list:10 1", &a).unwrap();
        assert_eq!(u.resolve(3, &a).unwrap(), vec![1, 0, 1]);
        assert!(matches!(u.resolve(4, &a), Err(Error::IncompleteData(_))));
        assert!(TargetSequence::parse("mu-sign", &a).is_err());
        assert!(TargetSequence::parse("list:012", &a).is_err());
        let t = Alphabet::new("0+-").unwrap();
        // μ(1..=6) = 1, -1, -1, 0, -1, 1
        assert_eq!(
            TargetSequence::MuSign.resolve(6, &t).unwrap(),
            vec![1, 2, 2, 0, 2, 1]
        );
    }
}
