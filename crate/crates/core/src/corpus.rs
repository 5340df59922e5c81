//! Line-delimited JSON trajectory corpus.
//!
//! Line 1 is a header, every following non-blank line is one trajectory:
//!
//! ```text
//! {"format":"trajregions-corpus","version":1,"dim":2}
//! {"id":"t0","states":[[0.1,0.2],[0.15,0.22]],"reward":1.0}
//! {"id":"t1","states":[[0.9,0.4]],"actions":[{"dx":0.1}],"reward":0.0}
//! ```
//!
//! `actions` is optional and opaque. Readers reject any record whose state
//! dimension differs from the header's `dim`, reporting the 1-based line.

use std::io::{BufRead, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::trajectory::{Dataset, Trajectory};

pub const CORPUS_FORMAT: &str = "trajregions-corpus";
pub const CORPUS_VERSION: u32 = 1;

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct CorpusHeader {
    pub format: String,
    pub version: u32,
    pub dim: usize,
}

pub fn read_corpus<R: BufRead>(reader: R) -> Result<Dataset> {
    let mut header: Option<CorpusHeader> = None;
    let mut trajectories = Vec::new();
    for (i, line) in reader.lines().enumerate() {
        let lineno = i + 1;
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let schema = |message: String| Error::Schema {
            line: lineno,
            message,
        };
        match &header {
            None => {
                let h: CorpusHeader = serde_json::from_str(&line)
                    .map_err(|e| schema(format!("bad header record: {e}")))?;
                if h.format != CORPUS_FORMAT {
                    return Err(schema(format!("unknown format `{}`", h.format)));
                }
                if h.version != CORPUS_VERSION {
                    return Err(schema(format!("unsupported version {}", h.version)));
                }
                if h.dim == 0 {
                    return Err(schema("dim must be at least 1".into()));
                }
                header = Some(h);
            }
            Some(h) => {
                let t: Trajectory = serde_json::from_str(&line)
                    .map_err(|e| schema(format!("bad trajectory record: {e}")))?;
                if let Some(bad) = t.states.iter().find(|s| s.dim() != h.dim) {
                    return Err(schema(format!(
                        "trajectory `{}` has state dimension {}, header declares {}",
                        t.id,
                        bad.dim(),
                        h.dim
                    )));
                }
                trajectories.push(t);
            }
        }
    }
    let header = header.ok_or(Error::Schema {
        line: 1,
        message: "missing header record".into(),
    })?;
    Dataset::with_dim(trajectories, header.dim)
}

pub fn write_corpus<W: Write>(dataset: &Dataset, mut w: W) -> Result<()> {
    let header = CorpusHeader {
        format: CORPUS_FORMAT.into(),
        version: CORPUS_VERSION,
        dim: dataset.dim(),
    };
    serde_json::to_writer(&mut w, &header)?;
    writeln!(w)?;
    for t in dataset.trajectories() {
        serde_json::to_writer(&mut w, t)?;
        writeln!(w)?;
    }
    Ok(())
}

pub fn load_corpus(path: impl AsRef<Path>) -> Result<Dataset> {
    let f = std::fs::File::open(path)?;
    read_corpus(std::io::BufReader::new(f))
}

pub fn save_corpus(dataset: &Dataset, path: impl AsRef<Path>) -> Result<()> {
    let f = std::fs::File::create(path)?;
    let mut w = std::io::BufWriter::new(f);
    write_corpus(dataset, &mut w)?;
    w.flush()?;
    Ok(())
}
