//! Line-oriented text archive of named jets sharing one space.
//!
//! ```text
//! JETARCHIVE 1
//! vars x1 x2 y1 t
//! order 8
//! mode exact
//! jet phi
//! 0 0 2 0 2 0
//! end
//! sha256 <hex digest of every preceding byte>
//! ```
//!
//! Each record is the exponent tuple followed by the real and imaginary parts.

use std::io::Write;
use std::path::Path;
use std::sync::Arc;

use sha2::{Digest, Sha256};

use crate::error::ArchiveError;
use crate::jet::{Coeff, Jet, Space};

pub const ARCHIVE_MAGIC: &str = "JETARCHIVE 1";

#[derive(Clone, Debug)]
pub struct JetArchive<C: Coeff> {
    pub space: Arc<Space>,
    pub jets: Vec<(String, Jet<C>)>,
}

impl<C: Coeff> PartialEq for JetArchive<C> {
    fn eq(&self, other: &Self) -> bool {
        self.space.same_as(&other.space) && self.jets == other.jets
    }
}

impl<C: Coeff> JetArchive<C> {
    pub fn new(space: &Arc<Space>) -> Self {
        JetArchive {
            space: space.clone(),
            jets: Vec::new(),
        }
    }

    /// Add a jet; it must live in the archive's space.
    pub fn push(&mut self, name: &str, jet: &Jet<C>) {
        assert!(
            jet.space().same_as(&self.space),
            "jet `{name}` is not in the archive space"
        );
        assert!(
            !name.is_empty() && !name.contains(char::is_whitespace),
            "bad jet name `{name}`"
        );
        self.jets.push((name.to_string(), jet.clone()));
    }

    pub fn get(&self, name: &str) -> Option<&Jet<C>> {
        self.jets.iter().find(|(n, _)| n == name).map(|(_, j)| j)
    }

    pub fn to_text(&self) -> String {
        let mut body = String::new();
        body.push_str(ARCHIVE_MAGIC);
        body.push('\n');
        body.push_str(&format!("vars {}\n", self.space.vars().join(" ")));
        body.push_str(&format!("order {}\n", self.space.order()));
        body.push_str(&format!("mode {}\n", C::MODE));
        // Records are skipped only for the canonical zero, so `-0.0` survives.
        let zero = C::zero().to_text();
        for (name, jet) in &self.jets {
            body.push_str(&format!("jet {name}\n"));
            for (i, c) in jet.coeffs().iter().enumerate() {
                let (re, im) = c.to_text();
                if (&re, &im) == (&zero.0, &zero.1) {
                    continue;
                }
                let exp = self.space.exponent(i);
                let exps: Vec<String> = exp.iter().map(u8::to_string).collect();
                body.push_str(&format!("{} {re} {im}\n", exps.join(" ")));
            }
            body.push_str("end\n");
        }
        let digest = hex::encode(Sha256::digest(body.as_bytes()));
        body.push_str(&format!("sha256 {digest}\n"));
        body
    }

    /// Parse an archive, verifying the checksum before reading any record.
    pub fn from_text(text: &str) -> Result<Self, ArchiveError> {
        let trimmed = text.strip_suffix('\n').ok_or(ArchiveError::Checksum)?;
        let (body_len, digest) = match trimmed.rfind('\n') {
            Some(pos) => (pos + 1, &trimmed[pos + 1..]),
            None => return Err(ArchiveError::Checksum),
        };
        let body = &text[..body_len];
        let expected = digest
            .strip_prefix("sha256 ")
            .ok_or(ArchiveError::Checksum)?;
        if hex::encode(Sha256::digest(body.as_bytes())) != expected {
            return Err(ArchiveError::Checksum);
        }

        let mut lines = body.lines().enumerate().map(|(i, l)| (i + 1, l));
        let malformed = |line: usize, message: &str| ArchiveError::Malformed {
            line,
            message: message.to_string(),
        };
        let (_, magic) = lines.next().ok_or_else(|| malformed(1, "empty archive"))?;
        if magic != ARCHIVE_MAGIC {
            return Err(ArchiveError::Version {
                expected: ARCHIVE_MAGIC.into(),
                found: magic.into(),
            });
        }
        let mut header = |key: &str| -> Result<(usize, String), ArchiveError> {
            let (no, line) = lines
                .next()
                .ok_or_else(|| malformed(0, "truncated header"))?;
            line.strip_prefix(key)
                .and_then(|r| {
                    r.strip_prefix(' ')
                        .or(if r.is_empty() { Some("") } else { None })
                })
                .map(|r| (no, r.to_string()))
                .ok_or_else(|| malformed(no, &format!("expected `{key}`")))
        };
        let (_, vars) = header("vars")?;
        let (no, order) = header("order")?;
        let order: usize = order.parse().map_err(|_| malformed(no, "bad order"))?;
        let (_, mode) = header("mode")?;
        if mode != C::MODE.as_str() {
            return Err(ArchiveError::ModeMismatch {
                expected: C::MODE.to_string(),
                found: mode,
            });
        }
        let vars: Vec<&str> = vars.split_whitespace().collect();
        let space = Space::new(vars.iter().copied(), order);
        let mut archive = JetArchive::new(&space);
        let mut current: Option<(String, Jet<C>)> = None;
        for (no, line) in lines {
            match (&mut current, line) {
                (None, l) if l.starts_with("jet ") => {
                    current = Some((l[4..].to_string(), Jet::zero(&space)));
                }
                (Some(_), "end") => {
                    let (name, jet) = current.take().expect("open jet");
                    archive.jets.push((name, jet));
                }
                (Some((_, jet)), l) => {
                    let fields: Vec<&str> = l.split_whitespace().collect();
                    if fields.len() != space.nvars() + 2 {
                        return Err(malformed(no, "wrong number of fields"));
                    }
                    let exp: Vec<u8> = fields[..space.nvars()]
                        .iter()
                        .map(|f| f.parse::<u8>())
                        .collect::<Result<_, _>>()
                        .map_err(|_| malformed(no, "bad exponent"))?;
                    let c = C::from_text(fields[space.nvars()], fields[space.nvars() + 1])
                        .ok_or_else(|| malformed(no, "bad coefficient"))?;
                    jet.set_coeff(&exp, c)
                        .map_err(|e| malformed(no, &e.to_string()))?;
                }
                (None, _) => return Err(malformed(no, "expected `jet <name>`")),
            }
        }
        if current.is_some() {
            return Err(malformed(0, "unterminated jet section"));
        }
        Ok(archive)
    }

    pub fn save(&self, path: &Path) -> Result<(), ArchiveError> {
        write_atomic(path, self.to_text().as_bytes())
    }

    pub fn load(path: &Path) -> Result<Self, ArchiveError> {
        let text = std::fs::read_to_string(path).map_err(|source| io_error(path, source))?;
        Self::from_text(&text)
    }
}

fn io_error(path: &Path, source: std::io::Error) -> ArchiveError {
    ArchiveError::Io {
        path: path.display().to_string(),
        source,
    }
}

/// Write through a temporary file in the same directory and rename it into
/// place, so readers never see a partial file.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<(), ArchiveError> {
    let dir = match path.parent() {
        Some(d) if !d.as_os_str().is_empty() => d,
        _ => Path::new("."),
    };
    std::fs::create_dir_all(dir).map_err(|e| io_error(dir, e))?;
    let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(|e| io_error(dir, e))?;
    tmp.write_all(bytes).map_err(|e| io_error(path, e))?;
    tmp.as_file().sync_all().map_err(|e| io_error(path, e))?;
    tmp.persist(path).map_err(|e| io_error(path, e.error))?;
    Ok(())
}
