//! Möbius tables, weight sequences and correlation averages along `S`.

use std::path::Path;

use serde::Serialize;

use crate::analysis::{minimality_witnesses, MinimalityReport};
use crate::error::{Error, Result};
use crate::realize::{realize, verify_realization, RealizationReport, TargetSequence};
use crate::schedule::{build_schedule, is_admissible_block, Profile, Schedule, Verdict};
use crate::sparse::SparseSetSpec;
use crate::words::{aligned_blocks, block_interval, Alphabet, Interval, PartialWindow, STAR};

/// `μ(1..=n_max)` from a linear sieve.
#[derive(Debug, Clone)]
pub struct MobiusTable {
    mu: Vec<i8>,
}

pub fn mobius_sieve(n_max: u64) -> Result<MobiusTable> {
    if n_max == 0 {
        return Err(Error::InvalidParameter("mobius sieve needs N >= 1".into()));
    }
    let n = usize::try_from(n_max)
        .map_err(|_| Error::InvalidParameter(format!("N = {n_max} too large")))?;
    let mut mu = vec![0i8; n + 1];
    let mut composite = vec![false; n + 1];
    let mut primes: Vec<usize> = Vec::new();
    mu[1] = 1;
    for i in 2..=n {
        if !composite[i] {
            primes.push(i);
            mu[i] = -1;
        }
        for &p in &primes {
            let Some(ip) = i.checked_mul(p).filter(|&v| v <= n) else {
                break;
            };
            composite[ip] = true;
            if i % p == 0 {
                mu[ip] = 0;
                break;
            }
            mu[ip] = -mu[i];
        }
    }
    Ok(MobiusTable { mu })
}

impl MobiusTable {
    pub fn n_max(&self) -> u64 {
        (self.mu.len() - 1) as u64
    }

    /// Panics if `n` is 0 or beyond the table.
    pub fn mu(&self, n: u64) -> i8 {
        assert!(n >= 1 && n <= self.n_max(), "μ({n}) outside table");
        self.mu[n as usize]
    }

    /// `M(n) = Σ_{k ≤ n} μ(k)`.
    pub fn mertens(&self, n: u64) -> i64 {
        self.mu[1..=n.min(self.n_max()) as usize]
            .iter()
            .map(|&v| v as i64)
            .sum()
    }

    /// `Q(n)`, the number of squarefree `k ≤ n`.
    pub fn squarefree_count(&self, n: u64) -> u64 {
        self.mu[1..=n.min(self.n_max()) as usize]
            .iter()
            .filter(|&&v| v != 0)
            .count() as u64
    }

    /// Number of `k ≤ n` with `μ(k) = 1`.
    pub fn mu_one_count(&self, n: u64) -> u64 {
        self.mu[1..=n.min(self.n_max()) as usize]
            .iter()
            .filter(|&&v| v == 1)
            .count() as u64
    }
}

/// A weight sequence `ρ(1), ρ(2), ...`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WeightTable {
    pub label: String,
    values: Vec<i64>,
}

impl WeightTable {
    pub fn mobius(n_max: u64) -> Result<Self> {
        let table = mobius_sieve(n_max)?;
        Ok(WeightTable {
            label: "mu".into(),
            values: table.mu[1..].iter().map(|&v| v as i64).collect(),
        })
    }

    pub fn zero(n_max: u64) -> Self {
        WeightTable {
            label: "zero".into(),
            values: vec![0; n_max as usize],
        }
    }

    pub fn from_values(label: &str, values: Vec<i64>) -> Self {
        WeightTable {
            label: label.into(),
            values,
        }
    }

    /// Reads lines `n,rho` with `n = 1, 2, ...` in order; a non-numeric first
    /// line is taken as a header.
    pub fn from_csv(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        let mut values = Vec::new();
        for (lineno, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let bad = || {
                Error::Parse(format!(
                    "{}:{}: expected `n,rho`",
                    path.display(),
                    lineno + 1
                ))
            };
            let (n, rho) = line.split_once(',').ok_or_else(bad)?;
            let Ok(n) = n.trim().parse::<u64>() else {
                if values.is_empty() && lineno == 0 {
                    continue;
                }
                return Err(bad());
            };
            let rho: i64 = rho.trim().parse().map_err(|_| bad())?;
            if n != values.len() as u64 + 1 {
                return Err(Error::Parse(format!(
                    "{}:{}: expected n = {}, found {n}",
                    path.display(),
                    lineno + 1,
                    values.len() + 1
                )));
            }
            values.push(rho);
        }
        Ok(WeightTable {
            label: format!("csv:{}", path.display()),
            values,
        })
    }

    pub fn len(&self) -> u64 {
        self.values.len() as u64
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn get(&self, n: u64) -> Option<i64> {
        n.checked_sub(1)
            .and_then(|i| self.values.get(i as usize))
            .copied()
    }
}

/// Numeric value of each symbol: digits are themselves, `+` is 1, `-` is
/// -1, anything else its index.
pub fn symbol_values(alphabet: &Alphabet) -> Vec<i64> {
    alphabet
        .as_str()
        .bytes()
        .enumerate()
        .map(|(i, b)| match b {
            b'0'..=b'9' => (b - b'0') as i64,
            b'+' => 1,
            b'-' => -1,
            _ => i as i64,
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CorrelationPoint {
    pub n: u64,
    /// `Σ_{k ≤ n} ρ(k) f(x(p(k)))`.
    pub numerator: i64,
    pub average: f64,
    /// The same sum with `u(k)` in place of `x(p(k))`.
    pub target_numerator: Option<i64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CorrelationReport {
    pub weight: String,
    pub sparse: String,
    pub n_max: u64,
    pub points: Vec<CorrelationPoint>,
    /// Whether every point equals the target sum, when a target is given.
    pub exact_identity: Option<bool>,
}

impl CorrelationReport {
    pub fn last(&self) -> &CorrelationPoint {
        self.points.last().expect("at least one point")
    }
}

/// `1, 2, 5, 10, 20, 50, ...` below `n_max`, then `n_max`.
pub fn log_ladder(n_max: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut decade = 1u64;
    'outer: loop {
        for step in [1, 2, 5] {
            let Some(v) = decade.checked_mul(step) else {
                break 'outer;
            };
            if v >= n_max {
                break 'outer;
            }
            out.push(v);
        }
        match decade.checked_mul(10) {
            Some(d) => decade = d,
            None => break,
        }
    }
    out.push(n_max);
    out
}

/// `A(N) = (1/N) Σ_{n=1}^{N} ρ(n) f(x(p(n)))` at each point of the log
/// ladder, with `f` given by [`symbol_values`]. Indices below the set's
/// first index contribute nothing. With a target `u`, also reports whether
/// the sums agree with `Σ ρ(n) f(u(n))` at every ladder point.
pub fn correlation_average(
    x: &PartialWindow,
    alphabet: &Alphabet,
    weights: &WeightTable,
    sparse: &SparseSetSpec,
    n_max: u64,
    target: Option<&TargetSequence>,
) -> Result<CorrelationReport> {
    if n_max == 0 {
        return Err(Error::InvalidParameter("N must be at least 1".into()));
    }
    if weights.len() < n_max {
        return Err(Error::IncompleteData(format!(
            "weights {} define ρ(1..={}) but N = {n_max}",
            weights.label,
            weights.len()
        )));
    }
    let f = symbol_values(alphabet);
    let u = target.map(|t| t.resolve(n_max, alphabet)).transpose()?;
    let ladder = log_ladder(n_max);
    let mut points = Vec::with_capacity(ladder.len());
    let mut next = 0;
    let (mut num, mut tnum) = (0i64, 0i64);
    for n in 1..=n_max {
        let rho = weights.get(n).unwrap();
        if n >= sparse.first_index() {
            let pos = sparse
                .nth(n)
                .and_then(|p| i64::try_from(p).ok())
                .ok_or_else(|| Error::IncompleteData(format!("p({n}) is not available")))?;
            let cell = x.get(pos).ok_or(Error::OutOfRange {
                n,
                position: pos,
                window: x.interval(),
            })?;
            if cell == STAR {
                return Err(Error::InvalidInput(format!("x({pos}) is undefined")));
            }
            num += rho * f[cell as usize];
            if let Some(u) = &u {
                tnum += rho * f[u[n as usize - 1] as usize];
            }
        }
        if n == ladder[next] {
            points.push(CorrelationPoint {
                n,
                numerator: num,
                average: num as f64 / n as f64,
                target_numerator: u.as_ref().map(|_| tnum),
            });
            next += 1;
        }
    }
    let exact_identity = u.as_ref().map(|_| {
        points
            .iter()
            .all(|p| p.target_numerator == Some(p.numerator))
    });
    Ok(CorrelationReport {
        weight: weights.label.clone(),
        sparse: sparse.descriptor(),
        n_max,
        points,
        exact_identity,
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct AdmissibilitySummary {
    pub level: usize,
    pub blocks: u64,
    pub admissible: u64,
    pub undetermined: u64,
    pub first_rejection: Option<(i64, String)>,
}

impl AdmissibilitySummary {
    pub fn passed(&self) -> bool {
        self.first_rejection.is_none()
    }
}

/// Verdicts for every aligned level-`level` block of `x`.
pub fn admissibility_summary(
    x: &PartialWindow,
    schedule: &Schedule,
    level: usize,
) -> Result<AdmissibilitySummary> {
    let m = schedule.m(level);
    let (first, last) = aligned_blocks(x.interval(), m)?;
    let mut s = AdmissibilitySummary {
        level,
        blocks: 0,
        admissible: 0,
        undetermined: 0,
        first_rejection: None,
    };
    for i in first..=last {
        s.blocks += 1;
        match is_admissible_block(x.slice(block_interval(i, m)?)?, level, schedule)? {
            Verdict::Admissible => s.admissible += 1,
            Verdict::Undetermined(_) => s.undetermined += 1,
            Verdict::Rejected(why) => {
                if s.first_rejection.is_none() {
                    s.first_rejection = Some((i, why));
                }
            }
        }
    }
    Ok(s)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MobiusSummary {
    pub n_max: u64,
    pub mertens: i64,
    pub squarefree: u64,
    pub mu_one: u64,
}

/// Everything the Sarnak demo reports besides the averages themselves.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct InvariantBundle {
    pub profile: String,
    pub alphabet: String,
    pub depth: usize,
    pub m: Vec<u64>,
    pub sparse: String,
    pub target: String,
    pub window: Interval,
    pub realization: RealizationReport,
    pub admissibility: AdmissibilitySummary,
    pub minimality: MinimalityReport,
    pub mobius: MobiusSummary,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SarnakDemo {
    pub correlation: CorrelationReport,
    pub invariants: InvariantBundle,
}

/// Builds a depth-`depth` window carrying `μ` information on the squares
/// and correlates it with `μ` along the squares. The faithful profile uses
/// the binary alphabet and `1_{μ=1}`; the fast profile uses `0+-` and
/// `sgn μ`, which turns the average into `Q(N) / N`.
pub fn sarnak_demo(profile: Profile, depth: usize, n_max: u64) -> Result<SarnakDemo> {
    let (alphabet, target) = match profile {
        Profile::Faithful => (Alphabet::binary(), TargetSequence::MuIndicator),
        Profile::Fast => (Alphabet::new("0+-")?, TargetSequence::MuSign),
    };
    let sparse = SparseSetSpec::squares();
    let reach = n_max
        .checked_mul(n_max)
        .and_then(|v| i64::try_from(v).ok())
        .ok_or_else(|| Error::InvalidParameter(format!("N = {n_max} too large")))?;
    let schedule = build_schedule(&alphabet, &sparse, depth, Interval::new(0, reach)?, profile)?;
    let x = realize(&target, &schedule, depth)?;
    let weights = WeightTable::mobius(n_max)?;
    let correlation = correlation_average(&x, &alphabet, &weights, &sparse, n_max, Some(&target))?;
    let table = mobius_sieve(n_max)?;
    let invariants = InvariantBundle {
        profile: profile.to_string(),
        alphabet: alphabet.as_str().to_string(),
        depth,
        m: schedule.m_list(),
        sparse: sparse.descriptor(),
        target: target.descriptor(),
        window: x.interval(),
        realization: verify_realization(&x, &target, &sparse, &alphabet)?,
        admissibility: admissibility_summary(&x, &schedule, depth)?,
        minimality: minimality_witnesses(&x, &schedule, depth)?,
        mobius: MobiusSummary {
            n_max,
            mertens: table.mertens(n_max),
            squarefree: table.squarefree_count(n_max),
            mu_one: table.mu_one_count(n_max),
        },
    };
    Ok(SarnakDemo {
        correlation,
        invariants,
    })
}
