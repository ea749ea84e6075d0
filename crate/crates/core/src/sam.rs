//! Suffix automaton over small alphabets, for exact factor complexity.

const NONE: u32 = u32::MAX;

pub struct SuffixAutomaton {
    sigma: usize,
    next: Vec<u32>,
    link: Vec<u32>,
    len: Vec<u32>,
    last: u32,
}

impl SuffixAutomaton {
    /// Builds the automaton of `text`, whose symbols must be below `sigma`.
    /// Panics otherwise, or if `text` has 2^31 symbols or more.
    pub fn new(text: &[u8], sigma: usize) -> Self {
        assert!(text.len() < (1 << 31), "text too long");
        let cap = 2 * text.len().max(1);
        let mut sam = SuffixAutomaton {
            sigma,
            next: Vec::with_capacity(cap * sigma),
            link: Vec::with_capacity(cap),
            len: Vec::with_capacity(cap),
            last: 0,
        };
        sam.push_state(0, NONE);
        for &c in text {
            assert!(
                (c as usize) < sigma,
                "symbol {c} outside alphabet of size {sigma}"
            );
            sam.extend(c as usize);
        }
        sam
    }

    fn push_state(&mut self, len: u32, link: u32) -> u32 {
        self.len.push(len);
        self.link.push(link);
        self.next.extend(std::iter::repeat(NONE).take(self.sigma));
        (self.len.len() - 1) as u32
    }

    fn edge(&self, v: u32, c: usize) -> u32 {
        self.next[v as usize * self.sigma + c]
    }

    fn set_edge(&mut self, v: u32, c: usize, to: u32) {
        self.next[v as usize * self.sigma + c] = to;
    }

    fn extend(&mut self, c: usize) {
        let cur = self.push_state(self.len[self.last as usize] + 1, NONE);
        let mut p = self.last;
        while p != NONE && self.edge(p, c) == NONE {
            self.set_edge(p, c, cur);
            p = self.link[p as usize];
        }
        if p == NONE {
            self.link[cur as usize] = 0;
        } else {
            let q = self.edge(p, c);
            if self.len[p as usize] + 1 == self.len[q as usize] {
                self.link[cur as usize] = q;
            } else {
                let clone = self.push_state(self.len[p as usize] + 1, self.link[q as usize]);
                let (src, dst) = (q as usize * self.sigma, clone as usize * self.sigma);
                self.next.copy_within(src..src + self.sigma, dst);
                while p != NONE && self.edge(p, c) == q {
                    self.set_edge(p, c, clone);
                    p = self.link[p as usize];
                }
                self.link[q as usize] = clone;
                self.link[cur as usize] = clone;
            }
        }
        self.last = cur;
    }

    pub fn state_count(&self) -> usize {
        self.len.len()
    }

    /// `counts[n]` is the number of distinct factors of length `n`, for
    /// `n = 0..=n_max`.
    pub fn distinct_by_length(&self, n_max: usize) -> Vec<u64> {
        let mut diff = vec![0i64; n_max + 2];
        for v in 1..self.state_count() {
            let lo = self.len[self.link[v] as usize] as usize + 1;
            let hi = (self.len[v] as usize).min(n_max);
            if lo <= hi {
                diff[lo] += 1;
                diff[hi + 1] -= 1;
            }
        }
        let mut counts = vec![0u64; n_max + 1];
        counts[0] = 1;
        let mut run = 0i64;
        for n in 1..=n_max {
            run += diff[n];
            counts[n] = run as u64;
        }
        counts
    }

    pub fn distinct_total(&self) -> u64 {
        (1..self.state_count())
            .map(|v| (self.len[v] - self.len[self.link[v] as usize]) as u64)
            .sum()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use std::collections::HashSet;

    fn naive(text: &[u8], n: usize) -> u64 {
        if n == 0 {
            return 1;
        }
        if n > text.len() {
            return 0;
        }
        text.windows(n).collect::<HashSet<_>>().len() as u64
    }

    #[test]
    fn small_examples() {
        let sam = SuffixAutomaton::new(&[0, 1, 0, 1, 1], 2);
        assert_eq!(sam.distinct_by_length(6), vec![1, 2, 3, 3, 2, 1, 0]);
        assert_eq!(sam.distinct_total(), 11);
        let empty = SuffixAutomaton::new(&[], 2);
        assert_eq!(empty.distinct_by_length(2), vec![1, 0, 0]);
    }

    proptest! {
        #[test]
        fn matches_naive(text in proptest::collection::vec(0u8..3, 0..200)) {
            let sam = SuffixAutomaton::new(&text, 3);
            let counts = sam.distinct_by_length(text.len() + 1);
            for n in 0..=text.len() + 1 {
                prop_assert_eq!(counts[n], naive(&text, n));
            }
            prop_assert!(sam.state_count() <= 2 * text.len().max(1));
        }
    }
}
