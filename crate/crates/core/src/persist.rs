//! The `BLOCKSHIFT/1` window file.
//!
//! ```text
//! BLOCKSHIFT/1
//! alphabet=01
//! profile=faithful
//! ...
//! depth=2
//!
//! 000000101100101...          (65536 cells per line)
//! checksum=fnv1a64:<16 hex digits>
//! ```
//!
//! The checksum is FNV-1a (64 bit) over the payload characters without
//! line breaks. Loading checks the version, then the checksum, then that the
//! header agrees with the payload.

use std::fmt::Write as _;
use std::path::Path;

use crate::error::{Error, Result};
use crate::realize::TargetSequence;
use crate::schedule::{build_schedule_with, Profile, Schedule, ScheduleConfig};
use crate::sparse::SparseSetSpec;
use crate::words::{Alphabet, Interval, PartialWindow};

pub const MAGIC: &str = "BLOCKSHIFT/1";
pub const LINE_CELLS: usize = 1 << 16;
pub const FILL_CONVENTION: &str = "pillar-first,left-to-right,lex-cycle-per-block";

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WindowHeader {
    pub alphabet: String,
    pub profile: Profile,
    pub schedule: Vec<u64>,
    pub sparse: String,
    pub target: String,
    pub fill: String,
    pub cycle_start: usize,
    pub seed: u64,
    pub pool: usize,
    pub hint: Interval,
    pub offset: i64,
    pub length: u64,
    pub depth: usize,
}

impl WindowHeader {
    /// Header describing `x` as a depth-`depth` realization of `target`.
    pub fn describe(
        schedule: &Schedule,
        target: &TargetSequence,
        depth: usize,
        x: &PartialWindow,
    ) -> Self {
        WindowHeader {
            alphabet: schedule.alphabet.as_str().to_string(),
            profile: schedule.profile,
            schedule: schedule.m_list()[..=depth].to_vec(),
            sparse: schedule.sparse.descriptor(),
            target: target.descriptor(),
            fill: FILL_CONVENTION.into(),
            cycle_start: schedule.config.cycle_start,
            seed: schedule.config.seed,
            pool: schedule.config.pool_size,
            hint: schedule.config.window_hint,
            offset: x.offset(),
            length: x.len() as u64,
            depth,
        }
    }

    /// Rebuilds the schedule the header was written from and checks that
    /// the block lengths agree.
    pub fn rebuild_schedule(&self) -> Result<Schedule> {
        let alphabet = Alphabet::new(&self.alphabet)?;
        let sparse = SparseSetSpec::parse(&self.sparse)?;
        let config = ScheduleConfig {
            window_hint: self.hint,
            seed: self.seed,
            pool_size: self.pool,
            cycle_start: self.cycle_start,
            ..ScheduleConfig::default()
        };
        let schedule = build_schedule_with(&alphabet, &sparse, self.depth, self.profile, config)?;
        if schedule.m_list() != self.schedule {
            return Err(Error::Inconsistent(format!(
                "header block lengths {:?} differ from the rebuilt {:?}",
                self.schedule,
                schedule.m_list()
            )));
        }
        Ok(schedule)
    }

    fn render(&self) -> String {
        let m: Vec<String> = self.schedule.iter().map(u64::to_string).collect();
        let mut out = String::new();
        let _ = writeln!(out, "{MAGIC}");
        let _ = writeln!(out, "alphabet={}", self.alphabet);
        let _ = writeln!(out, "profile={}", self.profile);
        let _ = writeln!(out, "schedule={}", m.join(","));
        let _ = writeln!(out, "sparse={}", self.sparse);
        let _ = writeln!(out, "target={}", self.target);
        let _ = writeln!(out, "fill={}", self.fill);
        let _ = writeln!(out, "cycle-start={}", self.cycle_start);
        let _ = writeln!(out, "seed={}", self.seed);
        let _ = writeln!(out, "pool={}", self.pool);
        let _ = writeln!(out, "hint={}:{}", self.hint.lo, self.hint.hi);
        let _ = writeln!(out, "offset={}", self.offset);
        let _ = writeln!(out, "length={}", self.length);
        let _ = writeln!(out, "depth={}", self.depth);
        out
    }

    fn parse(lines: &[&str]) -> Result<Self> {
        let get = |key: &str| -> Result<&str> {
            lines
                .iter()
                .find_map(|l| l.strip_prefix(key).and_then(|r| r.strip_prefix('=')))
                .ok_or_else(|| Error::Parse(format!("header lacks `{key}`")))
        };
        fn num<T: std::str::FromStr>(key: &str, v: &str) -> Result<T> {
            v.parse()
                .map_err(|_| Error::Parse(format!("bad `{key}` value {v:?}")))
        }
        for line in lines {
            if !line.contains('=') {
                return Err(Error::Parse(format!("malformed header line {line:?}")));
            }
        }
        let schedule = get("schedule")?
            .split(',')
            .map(|v| num::<u64>("schedule", v))
            .collect::<Result<Vec<_>>>()?;
        Ok(WindowHeader {
            alphabet: get("alphabet")?.to_string(),
            profile: Profile::parse(get("profile")?)?,
            schedule,
            sparse: get("sparse")?.to_string(),
            target: get("target")?.to_string(),
            fill: get("fill")?.to_string(),
            cycle_start: num("cycle-start", get("cycle-start")?)?,
            seed: num("seed", get("seed")?)?,
            pool: num("pool", get("pool")?)?,
            hint: Interval::parse(get("hint")?)?,
            offset: num("offset", get("offset")?)?,
            length: num("length", get("length")?)?,
            depth: num("depth", get("depth")?)?,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WindowFile {
    pub header: WindowHeader,
    pub window: PartialWindow,
}

/// FNV-1a, 64 bit.
pub fn fnv1a64(bytes: &[u8]) -> u64 {
    bytes.iter().fold(0xcbf2_9ce4_8422_2325, |h, &b| {
        (h ^ b as u64).wrapping_mul(0x0000_0100_0000_01b3)
    })
}

fn checksum_text(payload: &[u8]) -> String {
    format!("fnv1a64:{:016x}", fnv1a64(payload))
}

impl WindowFile {
    pub fn new(header: WindowHeader, window: PartialWindow) -> Self {
        WindowFile { header, window }
    }

    pub fn to_bytes(&self) -> Result<Vec<u8>> {
        let alphabet = Alphabet::new(&self.header.alphabet)?;
        let payload = alphabet.render(self.window.cells()).into_bytes();
        let mut out = self.header.render().into_bytes();
        out.push(b'\n');
        for line in payload.chunks(LINE_CELLS) {
            out.extend_from_slice(line);
            out.push(b'\n');
        }
        out.extend_from_slice(format!("checksum={}\n", checksum_text(&payload)).as_bytes());
        Ok(out)
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Self> {
        let text = std::str::from_utf8(bytes)
            .map_err(|_| Error::Parse("window file is not UTF-8".into()))?;
        let mut lines = text.lines();
        match lines.next() {
            Some(MAGIC) => {}
            Some(v) if v.starts_with("BLOCKSHIFT/") => return Err(Error::Version(v.to_string())),
            _ => return Err(Error::Parse("not a BLOCKSHIFT window file".into())),
        }
        let header_lines: Vec<&str> = lines.by_ref().take_while(|l| !l.is_empty()).collect();
        let header = WindowHeader::parse(&header_lines)?;

        let mut payload = Vec::with_capacity(header.length as usize);
        let mut expected = None;
        for line in lines {
            if let Some(sum) = line.strip_prefix("checksum=") {
                expected = Some(sum.to_string());
                break;
            }
            payload.extend_from_slice(line.as_bytes());
        }
        let expected = expected.ok_or_else(|| Error::Parse("missing checksum line".into()))?;
        let actual = checksum_text(&payload);
        if expected != actual {
            return Err(Error::Checksum { expected, actual });
        }

        if payload.len() as u64 != header.length {
            return Err(Error::Inconsistent(format!(
                "header length {} but payload has {} cells",
                header.length,
                payload.len()
            )));
        }
        if header.schedule.len() != header.depth + 1 {
            return Err(Error::Inconsistent(format!(
                "depth {} but {} block lengths",
                header.depth,
                header.schedule.len()
            )));
        }
        let alphabet = Alphabet::new(&header.alphabet)?;
        let cells = alphabet
            .parse_cells(std::str::from_utf8(&payload).expect("checked UTF-8"))
            .map_err(|e| Error::Inconsistent(e.to_string()))?;
        let window = PartialWindow::new(header.offset, cells)?;
        Ok(WindowFile { header, window })
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_bytes()?)?;
        Ok(())
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::from_bytes(&std::fs::read(path)?)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::realize::realize;
    use crate::schedule::build_schedule;

    fn sample() -> WindowFile {
        let s = build_schedule(
            &Alphabet::binary(),
            &SparseSetSpec::squares(),
            1,
            Interval { lo: 0, hi: 40 },
            Profile::Faithful,
        )
        .unwrap();
        let x = realize(&TargetSequence::MuIndicator, &s, 1).unwrap();
        WindowFile::new(
            WindowHeader::describe(&s, &TargetSequence::MuIndicator, 1, &x),
            x,
        )
    }

    #[test]
    fn fnv_reference_values() {
        assert_eq!(fnv1a64(b""), 0xcbf29ce484222325);
        assert_eq!(fnv1a64(b"a"), 0xaf63dc4c8601ec8c);
        assert_eq!(fnv1a64(b"foobar"), 0x85944171f73967e8);
    }

    #[test]
    fn round_trip_is_byte_exact() {
        let f = sample();
        let bytes = f.to_bytes().unwrap();
        let back = WindowFile::from_bytes(&bytes).unwrap();
        assert_eq!(back, f);
        assert_eq!(back.to_bytes().unwrap(), bytes);
        assert!(String::from_utf8(bytes)
            .unwrap()
            .starts_with("BLOCKSHIFT/1\nalphabet=01\n"));
        assert_eq!(
            back.header.rebuild_schedule().unwrap().m_list(),
            vec![1, 15]
        );
    }

    #[test]
    fn save_and_load() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("x.bsw");
        let f = sample();
        f.save(&path).unwrap();
        assert_eq!(WindowFile::load(&path).unwrap(), f);
    }

    #[test]
    fn long_payload_wraps() {
        let mut f = sample();
        f.window = PartialWindow::new(0, vec![1; LINE_CELLS + 3]).unwrap();
        f.header.offset = 0;
        f.header.length = LINE_CELLS as u64 + 3;
        let bytes = f.to_bytes().unwrap();
        let text = String::from_utf8(bytes.clone()).unwrap();
        assert!(text.contains(&format!("\n{}\n111\n", "1".repeat(LINE_CELLS))));
        assert_eq!(WindowFile::from_bytes(&bytes).unwrap(), f);
    }

    #[test]
    fn corruption_is_classified() {
        let bytes = sample().to_bytes().unwrap();
        let text = String::from_utf8(bytes).unwrap();

        let flipped = {
            let at = text.find("\n\n").unwrap() + 2;
            let mut b = text.clone().into_bytes();
            b[at] = if b[at] == b'0' { b'1' } else { b'0' };
            b
        };
        assert!(matches!(
            WindowFile::from_bytes(&flipped),
            Err(Error::Checksum { .. })
        ));

        let wrong_len = text.replace("length=60", "length=59");
        assert!(matches!(
            WindowFile::from_bytes(wrong_len.as_bytes()),
            Err(Error::Inconsistent(_))
        ));

        let v2 = text.replacen("BLOCKSHIFT/1", "BLOCKSHIFT/2", 1);
        assert!(matches!(
            WindowFile::from_bytes(v2.as_bytes()),
            Err(Error::Version(_))
        ));

        assert!(matches!(
            WindowFile::from_bytes(b"hello"),
            Err(Error::Parse(_))
        ));
    }
}
