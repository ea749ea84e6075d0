//! Level parameters of the block-concatenation construction.
//!
//! Level 0 is the alphabet itself (`m_0 = 1`, `w_0` the zero symbol). Level
//! `k + 1` words are concatenations of `r = m_{k+1} / m_k` level-`k` words in
//! which at least `r / 3` are the pillar `w_k` and, in the faithful profile,
//! every level-`k` word appears. Block lengths are chosen first-fit among odd
//! multiples of `3 m_k`.

use std::fmt;

use num_bigint::BigUint;
use num_traits::{One, ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::sparse::{sparsity_check, SparseSetSpec};
use crate::words::{block_hull, block_interval, Alphabet, Interval, Word};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Profile {
    /// Every constraint of the construction, including `m_{k+1} > 3 m_k |A_k|`
    /// and the every-word fill. Feasible to depth 2 for small alphabets.
    Faithful,
    /// Drops `m_{k+1} > 3 m_k |A_k|` and the every-word requirement; keeps the
    /// sparsity condition and the one-third pillar share.
    Fast,
}

impl Profile {
    pub fn as_str(&self) -> &'static str {
        match self {
            Profile::Faithful => "faithful",
            Profile::Fast => "fast",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "faithful" => Ok(Profile::Faithful),
            "fast" => Ok(Profile::Fast),
            _ => Err(Error::Parse(format!("unknown profile {s:?}"))),
        }
    }
}

impl fmt::Display for Profile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// `|A_k|`, exactly or as natural-log bounds.
#[derive(Debug, Clone, PartialEq)]
pub enum Cardinality {
    Exact(BigUint),
    Bounds { log_lower: f64, log_upper: f64 },
}

impl Cardinality {
    pub fn exact(&self) -> Option<&BigUint> {
        match self {
            Cardinality::Exact(n) => Some(n),
            Cardinality::Bounds { .. } => None,
        }
    }

    /// Upper bound on `ln |A_k|`, rounded up.
    pub fn ln_upper(&self) -> f64 {
        match self {
            Cardinality::Exact(n) => round_up(ln_big(n)),
            Cardinality::Bounds { log_upper, .. } => *log_upper,
        }
    }

    /// Lower bound on `ln |A_k|`, rounded down.
    pub fn ln_lower(&self) -> f64 {
        match self {
            Cardinality::Exact(n) => round_down(ln_big(n)),
            Cardinality::Bounds { log_lower, .. } => *log_lower,
        }
    }
}

impl fmt::Display for Cardinality {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Cardinality::Exact(n) => write!(f, "{n}"),
            Cardinality::Bounds {
                log_lower,
                log_upper,
            } => write!(f, "ln in [{log_lower:.6}, {log_upper:.6}]"),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LevelParams {
    pub k: usize,
    /// Block length `m_k`.
    pub m: u64,
    /// Pillar word `w_k`, of length `m_k`.
    pub pillar: Word,
    pub card: Cardinality,
}

/// Flat list of equal-length words.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WordList {
    width: usize,
    data: Vec<u8>,
    sorted: bool,
}

impl WordList {
    fn new(width: usize, sorted: bool) -> Self {
        WordList {
            width,
            data: Vec::new(),
            sorted,
        }
    }

    fn push(&mut self, w: &[u8]) {
        debug_assert_eq!(w.len(), self.width);
        self.data.extend_from_slice(w);
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn len(&self) -> usize {
        self.data.len() / self.width
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    pub fn get(&self, i: usize) -> &[u8] {
        &self.data[i * self.width..(i + 1) * self.width]
    }

    pub fn iter(&self) -> impl Iterator<Item = &[u8]> + '_ {
        self.data.chunks_exact(self.width)
    }

    /// Position of `w` in a lexicographically sorted list.
    pub fn position(&self, w: &[u8]) -> Option<usize> {
        if !self.sorted || w.len() != self.width {
            return self.iter().position(|x| x == w);
        }
        let (mut a, mut b) = (0, self.len());
        while a < b {
            let mid = (a + b) / 2;
            match self.get(mid).cmp(w) {
                std::cmp::Ordering::Less => a = mid + 1,
                std::cmp::Ordering::Greater => b = mid,
                std::cmp::Ordering::Equal => return Some(mid),
            }
        }
        None
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScheduleConfig {
    /// Interval the realization must cover besides the central block.
    pub window_hint: Interval,
    /// Largest block length considered.
    pub max_candidate: u64,
    /// Number of candidates tried per level before reporting a density violation.
    pub max_attempts: u64,
    /// Largest `|A_k|` that is enumerated explicitly.
    pub enumeration_cap: u64,
    /// Seed of the fast-profile word sampler.
    pub seed: u64,
    /// Number of sampled words per fast-profile fill pool.
    pub pool_size: usize,
    /// Offset of the first word in the per-block fill cycle.
    pub cycle_start: usize,
}

impl Default for ScheduleConfig {
    fn default() -> Self {
        ScheduleConfig {
            window_hint: Interval { lo: 0, hi: 0 },
            max_candidate: 1 << 40,
            max_attempts: 1 << 13,
            enumeration_cap: 1 << 21,
            seed: 0,
            pool_size: 8,
            cycle_start: 0,
        }
    }
}

#[derive(Debug, Clone)]
pub struct Schedule {
    pub alphabet: Alphabet,
    pub sparse: SparseSetSpec,
    pub profile: Profile,
    pub levels: Vec<LevelParams>,
    /// Range over which the sparsity inequality was certified for every level.
    pub verified_range: Interval,
    pub config: ScheduleConfig,
    /// Lexicographic `A_k` for faithful levels below the depth.
    words: Vec<Option<WordList>>,
    /// Fill pools per level below the depth (fast profile).
    pools: Vec<WordList>,
}

impl Schedule {
    pub fn depth(&self) -> usize {
        self.levels.len() - 1
    }

    pub fn level(&self, k: usize) -> Result<&LevelParams> {
        self.levels.get(k).ok_or_else(|| {
            Error::InvalidParameter(format!("level {k} beyond built depth {}", self.depth()))
        })
    }

    pub fn m(&self, k: usize) -> u64 {
        self.levels[k].m
    }

    pub fn pillar(&self, k: usize) -> &Word {
        &self.levels[k].pillar
    }

    /// Number of level-`k - 1` blocks in a level-`k` block.
    pub fn ratio(&self, k: usize) -> u64 {
        self.levels[k].m / self.levels[k - 1].m
    }

    pub fn m_list(&self) -> Vec<u64> {
        self.levels.iter().map(|l| l.m).collect()
    }

    /// Cached lexicographic list of `A_k`, when enumerated.
    pub fn level_words(&self, k: usize) -> Option<&WordList> {
        self.words.get(k).and_then(Option::as_ref)
    }

    pub(crate) fn pool(&self, k: usize) -> &WordList {
        &self.pools[k]
    }

    /// The word source cycled through by the fill at level `k + 1`.
    pub(crate) fn fill_source(&self, k: usize) -> Result<&WordList> {
        match self.profile {
            Profile::Faithful => self.level_words(k).ok_or_else(|| Error::InfeasibleDepth {
                level: k,
                reason: "level words are not enumerable".into(),
            }),
            Profile::Fast => Ok(self.pool(k)),
        }
    }

    pub fn with_cycle_start(mut self, start: usize) -> Self {
        self.config.cycle_start = start;
        self
    }

    /// `ln |A_k| / m_k`, from the exact count or the upper bound.
    pub fn log_density(&self, k: usize) -> f64 {
        self.levels[k].card.ln_upper() / self.levels[k].m as f64
    }
}

/// `12 ln 2 (4/3)^k`.
pub fn entropy_floor(k: usize) -> f64 {
    12.0 * std::f64::consts::LN_2 * (4.0f64 / 3.0).powi(k as i32)
}

/// Sparsity range for a candidate block length `m`: the level-`m` block hull
/// of the hint and the central block, plus the first length-`m` window of ℕ.
fn check_range(hint: Interval, m: u64) -> Result<Interval> {
    let central = block_interval(0, m)?;
    let hull = block_hull(hint.hull(&central), m)?;
    Ok(hull.hull(&Interval {
        lo: 1,
        hi: m as i64,
    }))
}

pub fn build_schedule(
    alphabet: &Alphabet,
    sparse: &SparseSetSpec,
    depth: usize,
    window_hint: Interval,
    profile: Profile,
) -> Result<Schedule> {
    let config = ScheduleConfig {
        window_hint,
        ..ScheduleConfig::default()
    };
    build_schedule_with(alphabet, sparse, depth, profile, config)
}

pub fn build_schedule_with(
    alphabet: &Alphabet,
    sparse: &SparseSetSpec,
    depth: usize,
    profile: Profile,
    config: ScheduleConfig,
) -> Result<Schedule> {
    if depth == 0 {
        return Err(Error::InvalidParameter("depth must be at least 1".into()));
    }
    let mut symbols = WordList::new(1, true);
    for i in 0..alphabet.len() {
        symbols.push(&[i as u8]);
    }
    let mut schedule = Schedule {
        alphabet: alphabet.clone(),
        sparse: sparse.clone(),
        profile,
        levels: vec![LevelParams {
            k: 0,
            m: 1,
            pillar: Word(vec![0]),
            card: Cardinality::Exact(BigUint::from(alphabet.len())),
        }],
        verified_range: config.window_hint,
        config,
        words: vec![Some(symbols.clone())],
        pools: Vec::new(),
    };

    for k in 0..depth {
        let m_k = schedule.levels[k].m;
        if profile == Profile::Fast {
            let pool = build_pool(&schedule, k);
            schedule.pools.push(pool);
        } else {
            schedule.pools.push(WordList::new(m_k as usize, false));
        }

        let m_next = next_block_length(&schedule, k)?;
        let r = m_next / m_k;
        let card = count_level(&schedule.levels[k].card, r, profile);
        let pillar = match profile {
            Profile::Faithful => {
                let words = schedule
                    .level_words(k)
                    .ok_or_else(|| Error::InfeasibleDepth {
                        level: k,
                        reason: "level words are not enumerable".into(),
                    })?;
                faithful_pillar(words, schedule.pillar(k), r)
            }
            Profile::Fast => pool_pillar(schedule.pool(k), schedule.pillar(k), r),
        };
        schedule.levels.push(LevelParams {
            k: k + 1,
            m: m_next,
            pillar,
            card,
        });
        if profile == Profile::Faithful && k + 1 < depth {
            let list = enumerate_level_words(k + 1, &schedule, schedule.config.enumeration_cap)?
                .collect_list();
            schedule.words.push(Some(list));
        }
    }

    // Levels were chosen against growing ranges; certify all of them over
    // the final one.
    let m_top = schedule.m(depth);
    let range = check_range(schedule.config.window_hint, m_top)?;
    for k in 0..depth {
        let check = sparsity_check(sparse, schedule.m(k + 1), schedule.m(k), range)?;
        if !check.ok {
            return Err(Error::DensityViolation {
                level: k,
                witness: check.witness,
                count: check.count,
                threshold: check.threshold,
            });
        }
    }
    schedule.verified_range = range;
    Ok(schedule)
}

fn next_block_length(schedule: &Schedule, k: usize) -> Result<u64> {
    let m_k = schedule.m(k);
    let step = 3 * m_k;
    let cap = schedule.config.max_candidate;
    let floor = entropy_floor(k + 1).floor() as u64;
    let mut min_value = floor + 1;
    if schedule.profile == Profile::Faithful {
        let a = schedule.levels[k]
            .card
            .exact()
            .ok_or_else(|| Error::InfeasibleDepth {
                level: k,
                reason: "|A_k| is only known through bounds".into(),
            })?;
        let product = BigUint::from(step) * a;
        match product.to_u64() {
            Some(p) if p < cap => min_value = min_value.max(p + 1),
            _ => {
                return Err(Error::InfeasibleDepth {
                    level: k,
                    reason: format!("3·m_k·|A_k| = 3·{m_k}·{a} exceeds the candidate cap {cap}"),
                })
            }
        }
    }
    let mut t = min_value.div_ceil(step);
    if t % 2 == 0 {
        t += 1;
    }
    // the smallest rejected candidate gives the most readable witness
    let mut first_rejection = None;
    for _ in 0..schedule.config.max_attempts {
        let Some(m) = t.checked_mul(step).filter(|&m| m <= cap) else {
            break;
        };
        let range = check_range(schedule.config.window_hint, m)?;
        let check = sparsity_check(&schedule.sparse, m, m_k, range)?;
        if check.ok {
            return Ok(m);
        }
        first_rejection.get_or_insert(check);
        t += 2;
    }
    match first_rejection {
        Some(check) => Err(Error::DensityViolation {
            level: k,
            witness: check.witness,
            count: check.count,
            threshold: check.threshold,
        }),
        None => Err(Error::InfeasibleDepth {
            level: k,
            reason: format!("no candidate block length below the cap {cap}"),
        }),
    }
}

// ---------------------------------------------------------------------------
// counting

/// Largest `|A_k|` and `r · |A_k|` for which closed-form counting is attempted.
const EXACT_SYMBOLS: u64 = 256;
const EXACT_WORK: u64 = 1 << 20;

fn binomial_row(r: u64) -> Vec<BigUint> {
    let mut row = vec![BigUint::one()];
    for i in 0..r {
        let next = row[i as usize].clone() * (r - i) / (i + 1);
        row.push(next);
    }
    row
}

/// Sequences of length `n` over `b` letters using every letter.
fn surjections(n: u64, b: u64, binom_b: &[BigUint]) -> BigUint {
    let mut pos = BigUint::zero();
    let mut neg = BigUint::zero();
    for j in 0..=b {
        let term = &binom_b[j as usize] * BigUint::from(b - j).pow(n as u32);
        if j % 2 == 0 {
            pos += term;
        } else {
            neg += term;
        }
    }
    pos - neg
}

/// `|A_{k+1}|` for `r` blocks over a level with `|A_k| = a`.
pub fn exact_level_count(a: u64, r: u64, profile: Profile) -> BigUint {
    let third = r / 3;
    let binom_r = binomial_row(r);
    let mut total = BigUint::zero();
    match profile {
        Profile::Faithful => {
            let binom_b = binomial_row(a - 1);
            for z in third..=r {
                let rest = surjections(r - z, a - 1, &binom_b);
                total += &binom_r[z as usize] * rest;
            }
        }
        Profile::Fast => {
            for z in third..=r {
                total += &binom_r[z as usize] * BigUint::from(a - 1).pow((r - z) as u32);
            }
        }
    }
    total
}

/// `ln C(r, k)`.
fn ln_binomial(r: u64, k: u64) -> f64 {
    let k = k.min(r - k);
    (1..=k).map(|i| ((r - k + i) as f64 / i as f64).ln()).sum()
}

fn count_level(prev: &Cardinality, r: u64, profile: Profile) -> Cardinality {
    if let Some(a) = prev.exact().and_then(|a| a.to_u64()) {
        if a <= EXACT_SYMBOLS && r.saturating_mul(a) <= EXACT_WORK {
            return Cardinality::Exact(exact_level_count(a, r, profile));
        }
    }
    let third = r / 3;
    let rf = r as f64;
    let log_upper = round_up(rf * std::f64::consts::LN_2 + (2.0 * rf / 3.0) * prev.ln_upper());
    let ln_a_minus_1 = match prev.exact().and_then(|a| a.to_u64()) {
        Some(a) => ((a - 1) as f64).ln(),
        // ln(a - 1) = ln a + ln(1 - 1/a) for a >= e^lower
        None => {
            let lo = prev.ln_lower();
            lo + (-(-lo).exp()).ln_1p()
        }
    };
    let log_lower = match (profile, prev.exact().and_then(|a| a.to_u64())) {
        (Profile::Faithful, Some(a)) if r - third >= a - 1 => {
            ln_binomial(r, third) + (r - third - (a - 1)) as f64 * ln_a_minus_1
        }
        (Profile::Faithful, _) => ln_binomial(r, third),
        (Profile::Fast, _) => ln_binomial(r, third) + (r - third) as f64 * ln_a_minus_1,
    };
    Cardinality::Bounds {
        log_lower: round_down(log_lower),
        log_upper,
    }
}

/// `|A_k|` for a built level.
pub fn level_count(k: usize, schedule: &Schedule) -> Result<Cardinality> {
    Ok(schedule.level(k)?.card.clone())
}

/// `ln` of a big integer, accurate to a few ulps.
pub fn ln_big(n: &BigUint) -> f64 {
    let bits = n.bits();
    if bits <= 64 {
        return (n.to_u64().unwrap() as f64).ln();
    }
    let shift = bits - 64;
    let top = (n >> shift).to_u64().unwrap() as f64;
    top.ln() + shift as f64 * std::f64::consts::LN_2
}

/// Relative slack covering accumulated rounding of a short f64 computation.
const SLACK: f64 = 16.0 * f64::EPSILON;

pub(crate) fn round_up(x: f64) -> f64 {
    (x + x.abs() * SLACK).next_up()
}

pub(crate) fn round_down(x: f64) -> f64 {
    (x - x.abs() * SLACK).next_down()
}

// ---------------------------------------------------------------------------
// enumeration

/// Lexicographic enumeration of `A_k` as an odometer over tuples of
/// level-`k - 1` words.
pub struct LevelWords<'a> {
    inner: LevelWordsInner<'a>,
}

enum LevelWordsInner<'a> {
    Symbols {
        next: usize,
        count: usize,
    },
    Tuples {
        prev: &'a WordList,
        pillar_index: usize,
        r: usize,
        digits: Vec<usize>,
        done: bool,
        every_word: bool,
        seen: Vec<u32>,
    },
}

impl Iterator for LevelWords<'_> {
    type Item = Word;

    fn next(&mut self) -> Option<Word> {
        match &mut self.inner {
            LevelWordsInner::Symbols { next, count } => (*next < *count).then(|| {
                *next += 1;
                Word(vec![(*next - 1) as u8])
            }),
            LevelWordsInner::Tuples {
                prev,
                pillar_index,
                r,
                digits,
                done,
                every_word,
                seen,
            } => {
                let a = prev.len();
                while !*done {
                    let pillars = digits.iter().filter(|&&d| d == *pillar_index).count();
                    let accept = 3 * pillars >= *r && {
                        if *every_word {
                            seen.iter_mut().for_each(|s| *s = 0);
                            digits.iter().for_each(|&d| seen[d] = 1);
                            seen.iter().all(|&s| s == 1)
                        } else {
                            true
                        }
                    };
                    let word = accept.then(|| {
                        let mut cells = Vec::with_capacity(*r * prev.width());
                        for &d in digits.iter() {
                            cells.extend_from_slice(prev.get(d));
                        }
                        Word(cells)
                    });
                    // advance the odometer, last digit fastest
                    let mut i = *r;
                    loop {
                        if i == 0 {
                            *done = true;
                            break;
                        }
                        i -= 1;
                        digits[i] += 1;
                        if digits[i] < a {
                            break;
                        }
                        digits[i] = 0;
                    }
                    if word.is_some() {
                        return word;
                    }
                }
                None
            }
        }
    }
}

impl LevelWords<'_> {
    fn collect_list(self) -> WordList {
        let mut list: Option<WordList> = None;
        for w in self {
            list.get_or_insert_with(|| WordList::new(w.len(), true))
                .push(w.as_slice());
        }
        list.expect("admissible word sets are nonempty")
    }
}

/// Every word of `A_k` once, in lexicographic order of symbol indices.
pub fn enumerate_level_words(k: usize, schedule: &Schedule, cap: u64) -> Result<LevelWords<'_>> {
    let level = schedule.level(k)?;
    let count = level.card.exact().and_then(|c| c.to_u64());
    match count {
        Some(c) if c <= cap => {}
        _ => {
            return Err(Error::InfeasibleDepth {
                level: k,
                reason: format!("|A_{k}| = {} exceeds the enumeration cap {cap}", level.card),
            })
        }
    }
    if k == 0 {
        return Ok(LevelWords {
            inner: LevelWordsInner::Symbols {
                next: 0,
                count: schedule.alphabet.len(),
            },
        });
    }
    let prev = schedule
        .level_words(k - 1)
        .ok_or_else(|| Error::InfeasibleDepth {
            level: k - 1,
            reason: "lower level words are not enumerable".into(),
        })?;
    let pillar_index = prev
        .position(schedule.pillar(k - 1).as_slice())
        .expect("pillar belongs to its level");
    let r = schedule.ratio(k) as usize;
    Ok(LevelWords {
        inner: LevelWordsInner::Tuples {
            prev,
            pillar_index,
            r,
            digits: vec![0; r],
            done: false,
            every_word: schedule.profile == Profile::Faithful,
            seen: vec![0; prev.len()],
        },
    })
}

// ---------------------------------------------------------------------------
// pillars and pools

/// `r - a + 1` copies of the pillar followed by the other words in order.
fn faithful_pillar(words: &WordList, pillar: &Word, r: u64) -> Word {
    let a = words.len() as u64;
    let copies = r - a + 1;
    let mut cells = Vec::with_capacity((r as usize) * words.width());
    for _ in 0..copies {
        cells.extend_from_slice(pillar.as_slice());
    }
    for w in words.iter().filter(|&w| w != pillar.as_slice()) {
        cells.extend_from_slice(w);
    }
    Word(cells)
}

/// `r / 3` copies of the pillar, then the pool cycled from its start.
fn pool_pillar(pool: &WordList, pillar: &Word, r: u64) -> Word {
    let third = (r / 3) as usize;
    let mut cells = Vec::with_capacity((r as usize) * pool.width());
    for _ in 0..third {
        cells.extend_from_slice(pillar.as_slice());
    }
    for j in 0..(r as usize - third) {
        cells.extend_from_slice(pool.get(j % pool.len()));
    }
    Word(cells)
}

/// The pillar `w_{k+1}` recomputed from level-`k` data.
pub fn canonical_pillar(k_plus_1: usize, schedule: &Schedule) -> Result<Word> {
    if k_plus_1 == 0 {
        return Ok(Word(vec![0]));
    }
    let k = k_plus_1 - 1;
    schedule.level(k_plus_1)?;
    let r = schedule.ratio(k_plus_1);
    match schedule.profile {
        Profile::Faithful => {
            let words = schedule
                .level_words(k)
                .ok_or_else(|| Error::InfeasibleDepth {
                    level: k,
                    reason: "level words are not enumerable".into(),
                })?;
            Ok(faithful_pillar(words, schedule.pillar(k), r))
        }
        Profile::Fast => Ok(pool_pillar(schedule.pool(k), schedule.pillar(k), r)),
    }
}

/// Fast-profile fill pool for level `k`: the alphabet at level 0, otherwise
/// the pillar followed by `pool_size` sampled level-`k` words.
fn build_pool(schedule: &Schedule, k: usize) -> WordList {
    let m = schedule.m(k) as usize;
    let mut pool = WordList::new(m, false);
    if k == 0 {
        for i in 0..schedule.alphabet.len() {
            pool.push(&[i as u8]);
        }
        return pool;
    }
    pool.push(schedule.pillar(k).as_slice());
    let mut rng = ChaCha8Rng::seed_from_u64(
        schedule.config.seed ^ (k as u64).wrapping_mul(0x9e37_79b9_7f4a_7c15),
    );
    let mut cells = Vec::with_capacity(m);
    for _ in 0..schedule.config.pool_size {
        cells.clear();
        sample_word(schedule, k, &mut rng, &mut cells);
        pool.push(&cells);
    }
    pool
}

/// Appends a random fast-admissible level-`k` word: at every level the first
/// third of the blocks are pillars and the rest are sampled recursively.
fn sample_word(schedule: &Schedule, k: usize, rng: &mut ChaCha8Rng, out: &mut Vec<u8>) {
    if k == 0 {
        out.push(rng.gen_range(0..schedule.alphabet.len()) as u8);
        return;
    }
    let r = schedule.ratio(k) as usize;
    for j in 0..r {
        if j < r / 3 {
            out.extend_from_slice(schedule.pillar(k - 1).as_slice());
        } else {
            sample_word(schedule, k - 1, rng, out);
        }
    }
}

// ---------------------------------------------------------------------------
// admissibility

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Verdict {
    Admissible,
    Rejected(String),
    /// Every decidable component passed; the every-word component could not
    /// be checked because the lower level is not enumerable.
    Undetermined(String),
}

impl Verdict {
    pub fn is_admissible(&self) -> bool {
        matches!(self, Verdict::Admissible)
    }

    pub fn is_rejected(&self) -> bool {
        matches!(self, Verdict::Rejected(_))
    }
}

/// Whether `w` belongs to `A_level` (three-valued where `A_{level-1}` is not enumerable).
pub fn is_admissible_block(w: &[u8], level: usize, schedule: &Schedule) -> Result<Verdict> {
    let params = schedule.level(level)?;
    if w.len() as u64 != params.m {
        return Err(Error::InvalidParameter(format!(
            "word of length {} tested at level {level} (m = {})",
            w.len(),
            params.m
        )));
    }
    Ok(admissible(w, level, schedule))
}

fn admissible(w: &[u8], level: usize, schedule: &Schedule) -> Verdict {
    if level == 0 {
        return if (w[0] as usize) < schedule.alphabet.len() {
            Verdict::Admissible
        } else {
            Verdict::Rejected("undefined cell".into())
        };
    }
    let k = level - 1;
    // Exact membership when A_level itself is enumerated.
    if let Some(list) = schedule.level_words(level) {
        return if list.position(w).is_some() {
            Verdict::Admissible
        } else {
            Verdict::Rejected(format!("not a member of the enumerated A_{level}"))
        };
    }
    let m_k = schedule.m(k) as usize;
    let r = w.len() / m_k;
    let pillar = schedule.pillar(k).as_slice();
    let lower = schedule.level_words(k);
    let track_every = schedule.profile == Profile::Faithful;
    let mut seen = match (track_every, lower) {
        (true, Some(list)) => vec![false; list.len()],
        _ => Vec::new(),
    };
    let mut pillars = 0usize;
    let mut undetermined = None;
    for (j, block) in w.chunks_exact(m_k).enumerate() {
        if block == pillar {
            pillars += 1;
        }
        match lower {
            Some(list) => match list.position(block) {
                Some(idx) => {
                    if !seen.is_empty() {
                        seen[idx] = true;
                    }
                }
                None => {
                    return Verdict::Rejected(format!(
                        "block {j} is not in A_{k}: {}",
                        schedule.alphabet.render(block)
                    ))
                }
            },
            None => match admissible(block, k, schedule) {
                Verdict::Admissible => {}
                Verdict::Rejected(why) => {
                    return Verdict::Rejected(format!("block {j} rejected at level {k}: {why}"))
                }
                Verdict::Undetermined(why) => {
                    undetermined.get_or_insert(format!("block {j}: {why}"));
                }
            },
        }
    }
    if 3 * pillars < r {
        return Verdict::Rejected(format!(
            "only {pillars} of {r} blocks equal w_{k} (need at least {})",
            r / 3
        ));
    }
    if track_every {
        match lower {
            Some(_) => {
                if let Some(missing) = seen.iter().position(|&s| !s) {
                    return Verdict::Rejected(format!(
                        "level-{k} word #{missing} of A_{k} does not occur"
                    ));
                }
            }
            None => {
                undetermined.get_or_insert(format!(
                    "A_{k} is not enumerable; every-word use unverifiable"
                ));
            }
        }
    }
    match undetermined {
        Some(why) => Verdict::Undetermined(why),
        None => Verdict::Admissible,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

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

    /// Brute force over all 2^15 binary strings: at least 5 zeros and at least one 1.
    fn brute_force_a1() -> Vec<Vec<u8>> {
        (0u32..1 << 15)
            .map(|mask| {
                (0..15)
                    .rev()
                    .map(|b| ((mask >> b) & 1) as u8)
                    .collect::<Vec<u8>>()
            })
            .filter(|w| w.iter().filter(|&&c| c == 0).count() >= 5 && w.contains(&1))
            .collect()
    }

    #[test]
    fn depth_one_binary_squares() {
        let s = binary_squares(1);
        assert_eq!(s.m_list(), vec![1, 15]);
        assert_eq!(
            s.levels[1].card,
            Cardinality::Exact(BigUint::from(30826u32))
        );
        assert_eq!(s.alphabet.render(s.pillar(1).as_slice()), "000000000000001");
        assert_eq!(s.alphabet.render(s.pillar(0).as_slice()), "0");
    }

    #[test]
    fn enumeration_matches_brute_force() {
        let s = binary_squares(1);
        let words: Vec<Vec<u8>> = enumerate_level_words(1, &s, 1 << 20)
            .unwrap()
            .map(|w| w.0)
            .collect();
        let oracle = brute_force_a1();
        assert_eq!(words.len(), 30826);
        assert_eq!(words, oracle);
        assert_eq!(s.alphabet.render(&words[0]), "000000000000001");
        let level0: Vec<Word> = enumerate_level_words(0, &s, 10).unwrap().collect();
        assert_eq!(level0, vec![Word(vec![0]), Word(vec![1])]);
        assert!(matches!(
            enumerate_level_words(1, &s, 100),
            Err(Error::InfeasibleDepth { .. })
        ));
    }

    #[test]
    fn admissibility_equals_enumeration_at_level_one() {
        let s = binary_squares(1);
        let oracle: std::collections::HashSet<Vec<u8>> = brute_force_a1().into_iter().collect();
        for mask in 0u32..1 << 15 {
            let w: Vec<u8> = (0..15).rev().map(|b| ((mask >> b) & 1) as u8).collect();
            let v = is_admissible_block(&w, 1, &s).unwrap();
            assert_eq!(v.is_admissible(), oracle.contains(&w), "{w:?}");
            assert!(!matches!(v, Verdict::Undetermined(_)));
        }
    }

    #[test]
    fn admissibility_examples() {
        let s = binary_squares(1);
        let a = &s.alphabet;
        let check = |text: &str| {
            is_admissible_block(a.parse_word(text).unwrap().as_slice(), 1, &s).unwrap()
        };
        assert!(check("000000000000001").is_admissible());
        assert!(check("111111111111111").is_rejected());
        assert!(check("000000101100101").is_admissible());
        assert!(check("000000000000000").is_rejected());
        assert!(is_admissible_block(&[0, 1], 1, &s).is_err());
    }

    #[test]
    fn closed_form_counts() {
        assert_eq!(
            exact_level_count(2, 15, Profile::Faithful),
            BigUint::from(30826u32)
        );
        // ternary: brute force over 3^9 strings of length 9 with >= 3 zeros and all symbols
        let brute = (0..3u32.pow(9))
            .filter(|&x| {
                let digits: Vec<u32> = (0..9).map(|i| x / 3u32.pow(i) % 3).collect();
                digits.iter().filter(|&&d| d == 0).count() >= 3
                    && digits.contains(&1)
                    && digits.contains(&2)
            })
            .count();
        assert_eq!(
            exact_level_count(3, 9, Profile::Faithful),
            BigUint::from(brute)
        );
        let brute_fast = (0..3u32.pow(9))
            .filter(|&x| (0..9).filter(|&i| x / 3u32.pow(i) % 3 == 0).count() >= 3)
            .count();
        assert_eq!(
            exact_level_count(3, 9, Profile::Fast),
            BigUint::from(brute_fast)
        );
    }

    #[test]
    fn word_count_upper_bound_at_level_one() {
        // |A_1| <= 2^r |A_0|^(2r/3) = 2^25
        let exact = exact_level_count(2, 15, Profile::Faithful);
        assert!(exact <= BigUint::from(1u64 << 25));
        let ln = ln_big(&exact);
        assert!((ln - 10.336_109).abs() < 1e-5);
        assert!(ln <= 25.0 * std::f64::consts::LN_2);
    }

    #[test]
    fn evens_violate_density_at_level_zero() {
        let err = build_schedule(
            &Alphabet::binary(),
            &SparseSetSpec::Evens,
            1,
            Interval { lo: 0, hi: 0 },
            Profile::Faithful,
        )
        .unwrap_err();
        match err {
            Error::DensityViolation {
                level,
                count,
                threshold,
                witness,
            } => {
                assert_eq!(level, 0);
                assert!(count >= threshold);
                let inside = SparseSetSpec::Evens.elements_in(witness).unwrap().len() as u64;
                assert_eq!(inside, count);
                assert_eq!(witness.len(), 15);
            }
            other => panic!("expected density violation, got {other:?}"),
        }
    }

    #[test]
    fn faithful_depth_three_is_infeasible() {
        let err = build_schedule(
            &Alphabet::binary(),
            &SparseSetSpec::squares(),
            3,
            Interval { lo: 0, hi: 0 },
            Profile::Faithful,
        )
        .unwrap_err();
        assert!(
            matches!(err, Error::InfeasibleDepth { level: 2, .. }),
            "{err:?}"
        );
    }

    #[test]
    fn ternary_faithful_depth_two_hits_enumeration_cap() {
        let err = build_schedule(
            &Alphabet::new("012").unwrap(),
            &SparseSetSpec::squares(),
            2,
            Interval { lo: 0, hi: 0 },
            Profile::Faithful,
        )
        .unwrap_err();
        assert!(
            matches!(err, Error::InfeasibleDepth { level: 1, .. }),
            "{err:?}"
        );
    }

    #[test]
    fn fast_ternary_schedule() {
        let s = build_schedule(
            &Alphabet::new("0+-").unwrap(),
            &SparseSetSpec::squares(),
            2,
            Interval { lo: 0, hi: 0 },
            Profile::Fast,
        )
        .unwrap();
        // m_2: smallest odd t with ⌊√(45 t)⌋ < t, i.e. t = 47
        assert_eq!(s.m_list(), vec![1, 15, 2115]);
        for k in 1..=2 {
            let v = is_admissible_block(s.pillar(k).as_slice(), k, &s).unwrap();
            assert!(v.is_admissible(), "level {k}: {v:?}");
        }
        for k in 1..2 {
            for w in s.pool(k).iter() {
                assert!(is_admissible_block(w, k, &s).unwrap().is_admissible());
            }
        }
    }

    #[test]
    fn entropy_floor_values() {
        assert!((entropy_floor(1) - 11.090_354_888_959_125).abs() < 1e-12);
        assert!(entropy_floor(2) > 14.787 && entropy_floor(2) < 14.788);
    }

    #[test]
    fn ln_binomial_small() {
        assert!((ln_binomial(15, 5) - 3003f64.ln()).abs() < 1e-12);
        assert_eq!(ln_binomial(7, 0), 0.0);
    }
}
