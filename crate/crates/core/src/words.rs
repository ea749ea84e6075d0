//! Alphabets, words, star-padded windows and centered block arithmetic.
//!
//! Coordinates are signed 64-bit integers. A level-`m` block with index `i`
//! is the `m` integers centered at `i * m`; for odd `m` these blocks tile
//! the integers, and blocks of an odd multiple of `m` are exact unions of
//! level-`m` blocks.

use std::fmt;

use serde::Serialize;

use crate::error::{Error, Result};

/// Cell value marking an undefined position.
pub const STAR: u8 = u8::MAX;

/// Closed integer interval `[lo, hi]`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub struct Interval {
    pub lo: i64,
    pub hi: i64,
}

impl Interval {
    pub fn new(lo: i64, hi: i64) -> Result<Self> {
        if lo > hi {
            return Err(Error::InvalidParameter(format!(
                "empty interval [{lo}, {hi}]"
            )));
        }
        Ok(Interval { lo, hi })
    }

    pub fn len(&self) -> u64 {
        (self.hi - self.lo) as u64 + 1
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn contains(&self, c: i64) -> bool {
        self.lo <= c && c <= self.hi
    }

    pub fn contains_interval(&self, other: &Interval) -> bool {
        self.lo <= other.lo && other.hi <= self.hi
    }

    /// Smallest interval containing both.
    pub fn hull(&self, other: &Interval) -> Interval {
        Interval {
            lo: self.lo.min(other.lo),
            hi: self.hi.max(other.hi),
        }
    }

    pub fn intersect(&self, other: &Interval) -> Option<Interval> {
        let lo = self.lo.max(other.lo);
        let hi = self.hi.min(other.hi);
        (lo <= hi).then_some(Interval { lo, hi })
    }

    /// Parses `lo:hi`.
    pub fn parse(text: &str) -> Result<Self> {
        let (lo, hi) = text
            .split_once(':')
            .ok_or_else(|| Error::Parse(format!("expected lo:hi, got {text:?}")))?;
        let lo = lo
            .trim()
            .parse()
            .map_err(|_| Error::Parse(format!("bad interval bound {lo:?}")))?;
        let hi = hi
            .trim()
            .parse()
            .map_err(|_| Error::Parse(format!("bad interval bound {hi:?}")))?;
        Interval::new(lo, hi)
    }
}

impl fmt::Display for Interval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}, {}]", self.lo, self.hi)
    }
}

/// Ordered set of printable ASCII symbols. Index 0 is the zero symbol.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Alphabet {
    symbols: Vec<u8>,
}

impl Alphabet {
    pub fn new(symbols: &str) -> Result<Self> {
        let bytes = symbols.as_bytes();
        if bytes.len() < 2 {
            return Err(Error::InvalidParameter(
                "alphabet needs at least 2 symbols".into(),
            ));
        }
        if bytes.len() >= STAR as usize {
            return Err(Error::InvalidParameter("alphabet too large".into()));
        }
        for (i, &b) in bytes.iter().enumerate() {
            if !b.is_ascii_graphic() || b == b'*' {
                return Err(Error::InvalidParameter(format!(
                    "symbol {:?} is not a printable non-star ASCII character",
                    b as char
                )));
            }
            if bytes[..i].contains(&b) {
                return Err(Error::InvalidParameter(format!(
                    "duplicate symbol {:?}",
                    b as char
                )));
            }
        }
        Ok(Alphabet {
            symbols: bytes.to_vec(),
        })
    }

    pub fn binary() -> Self {
        Alphabet::new("01").unwrap()
    }

    pub fn len(&self) -> usize {
        self.symbols.len()
    }

    pub fn is_empty(&self) -> bool {
        self.symbols.is_empty()
    }

    pub fn as_str(&self) -> &str {
        // constructed from a &str of ASCII bytes
        std::str::from_utf8(&self.symbols).unwrap()
    }

    pub fn symbol(&self, index: u8) -> char {
        if index == STAR {
            '*'
        } else {
            self.symbols[index as usize] as char
        }
    }

    pub fn index_of(&self, symbol: u8) -> Option<u8> {
        self.symbols
            .iter()
            .position(|&s| s == symbol)
            .map(|i| i as u8)
    }

    /// Renders cells, printing STAR as `*`.
    pub fn render(&self, cells: &[u8]) -> String {
        cells.iter().map(|&c| self.symbol(c)).collect()
    }

    pub fn parse_word(&self, text: &str) -> Result<Word> {
        text.bytes()
            .map(|b| {
                self.index_of(b).ok_or_else(|| {
                    Error::InvalidInput(format!("{:?} is not in the alphabet", b as char))
                })
            })
            .collect::<Result<Vec<_>>>()
            .map(Word)
    }

    /// Parses a window pattern where `*` denotes STAR.
    pub fn parse_cells(&self, text: &str) -> Result<Vec<u8>> {
        text.bytes()
            .map(|b| {
                if b == b'*' {
                    Ok(STAR)
                } else {
                    self.index_of(b).ok_or_else(|| {
                        Error::InvalidInput(format!("{:?} is not in the alphabet", b as char))
                    })
                }
            })
            .collect()
    }
}

/// Finite word of symbol indices.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Word(pub Vec<u8>);

impl Word {
    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn as_slice(&self) -> &[u8] {
        &self.0
    }
}

/// Window of a point of `(A ∪ {*})^Z`: coordinate `c` lives in `cells[c - offset]`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct PartialWindow {
    offset: i64,
    cells: Vec<u8>,
}

impl PartialWindow {
    pub fn new(offset: i64, cells: Vec<u8>) -> Result<Self> {
        if cells.is_empty() {
            return Err(Error::InvalidParameter("window must be nonempty".into()));
        }
        Ok(PartialWindow { offset, cells })
    }

    pub fn all_star(interval: Interval) -> Self {
        PartialWindow {
            offset: interval.lo,
            cells: vec![STAR; interval.len() as usize],
        }
    }

    pub fn offset(&self) -> i64 {
        self.offset
    }

    pub fn len(&self) -> usize {
        self.cells.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cells.is_empty()
    }

    pub fn interval(&self) -> Interval {
        Interval {
            lo: self.offset,
            hi: self.offset + self.cells.len() as i64 - 1,
        }
    }

    pub fn cells(&self) -> &[u8] {
        &self.cells
    }

    pub(crate) fn cells_mut(&mut self) -> &mut [u8] {
        &mut self.cells
    }

    pub fn into_cells(self) -> Vec<u8> {
        self.cells
    }

    pub fn get(&self, c: i64) -> Option<u8> {
        let idx = c.checked_sub(self.offset)?;
        usize::try_from(idx)
            .ok()
            .and_then(|i| self.cells.get(i))
            .copied()
    }

    pub fn set(&mut self, c: i64, value: u8) -> Result<()> {
        let window = self.interval();
        if !window.contains(c) {
            return Err(Error::InvalidParameter(format!(
                "coordinate {c} outside window {window}"
            )));
        }
        self.cells[(c - self.offset) as usize] = value;
        Ok(())
    }

    /// Cells of a sub-interval, which must lie inside the window.
    pub fn slice(&self, iv: Interval) -> Result<&[u8]> {
        let window = self.interval();
        if !window.contains_interval(&iv) {
            return Err(Error::InvalidParameter(format!(
                "{iv} is not inside window {window}"
            )));
        }
        let start = (iv.lo - self.offset) as usize;
        Ok(&self.cells[start..start + iv.len() as usize])
    }

    pub fn is_complete(&self) -> bool {
        !self.cells.contains(&STAR)
    }

    pub fn star_count(&self) -> usize {
        self.cells.iter().filter(|&&c| c == STAR).count()
    }
}

fn check_odd(m: u64) -> Result<()> {
    if m == 0 || m % 2 == 0 {
        return Err(Error::InvalidParameter(format!(
            "block length must be odd and positive, got {m}"
        )));
    }
    if m > i64::MAX as u64 / 4 {
        return Err(Error::InvalidParameter(format!(
            "block length {m} too large"
        )));
    }
    Ok(())
}

/// The `m` integers centered at `i * m`.
pub fn block_interval(i: i64, m: u64) -> Result<Interval> {
    check_odd(m)?;
    let half = ((m - 1) / 2) as i64;
    let center = i
        .checked_mul(m as i64)
        .ok_or_else(|| Error::InvalidParameter(format!("block {i} of length {m} overflows")))?;
    Ok(Interval {
        lo: center - half,
        hi: center + half,
    })
}

/// Index of the level-`m` block containing coordinate `c`.
pub fn block_of(c: i64, m: u64) -> Result<i64> {
    check_odd(m)?;
    let half = ((m - 1) / 2) as i64;
    Ok((c + half).div_euclid(m as i64))
}

/// Block indices `i_lo..=i_hi` whose union is exactly `iv`.
pub fn aligned_blocks(iv: Interval, m: u64) -> Result<(i64, i64)> {
    check_odd(m)?;
    let first = block_of(iv.lo, m)?;
    if block_interval(first, m)?.lo != iv.lo {
        return Err(Error::Alignment { m, boundary: iv.lo });
    }
    let last = block_of(iv.hi, m)?;
    if block_interval(last, m)?.hi != iv.hi {
        return Err(Error::Alignment { m, boundary: iv.hi });
    }
    Ok((first, last))
}

/// Smallest union of level-`m` blocks covering `iv`.
pub fn block_hull(iv: Interval, m: u64) -> Result<Interval> {
    let first = block_of(iv.lo, m)?;
    let last = block_of(iv.hi, m)?;
    Ok(block_interval(first, m)?.hull(&block_interval(last, m)?))
}

/// Splits an aligned window into its level-`m` blocks in ascending order.
pub fn decompose_blocks(w: &PartialWindow, m: u64) -> Result<Vec<(i64, PartialWindow)>> {
    let (first, last) = aligned_blocks(w.interval(), m)?;
    let m_len = m as usize;
    Ok((first..=last)
        .zip(w.cells().chunks_exact(m_len))
        .map(|(i, chunk)| {
            let lo = block_interval(i, m).unwrap().lo;
            (
                i,
                PartialWindow {
                    offset: lo,
                    cells: chunk.to_vec(),
                },
            )
        })
        .collect())
}

/// Knuth–Morris–Pratt search of a STAR-free pattern. Returns start indices.
pub fn find_all(pattern: &[u8], text: &[u8]) -> Vec<usize> {
    let mut hits = Vec::new();
    scan_occurrences(pattern, text, |i| hits.push(i));
    hits
}

/// Calls `hit` with each start index of `pattern` in `text`, in order.
pub fn scan_occurrences(pattern: &[u8], text: &[u8], mut hit: impl FnMut(usize)) {
    if pattern.is_empty() || pattern.len() > text.len() {
        return;
    }
    let mut fail = vec![0usize; pattern.len()];
    let mut k = 0;
    for i in 1..pattern.len() {
        while k > 0 && pattern[i] != pattern[k] {
            k = fail[k - 1];
        }
        if pattern[i] == pattern[k] {
            k += 1;
        }
        fail[i] = k;
    }
    let mut k = 0;
    for (i, &c) in text.iter().enumerate() {
        while k > 0 && c != pattern[k] {
            k = fail[k - 1];
        }
        // STAR never equals a pattern symbol, so it resets the match
        if c == pattern[k] {
            k += 1;
            if k == pattern.len() {
                hit(i + 1 - k);
                k = fail[k - 1];
            }
        }
    }
}

/// Coordinates where `pattern` occurs fully defined in `text`.
pub fn occurrences(pattern: &Word, text: &PartialWindow) -> Vec<i64> {
    find_all(pattern.as_slice(), text.cells())
        .into_iter()
        .map(|i| text.offset() + i as i64)
        .collect()
}
