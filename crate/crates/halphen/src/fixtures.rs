//! Bundled canonical data: the thirteen grading matrices, the thirteen
//! reference characteristic sequences, and the golden table texts. The
//! `HALPHEN_FIXTURES` environment variable points commands at an
//! alternative fixture directory with the same file names.

use crate::root_data::{GradingMatrix, Type13};
use crate::Error;
use serde::Deserialize;
use std::collections::BTreeMap;
use std::path::Path;
use std::sync::OnceLock;

const GRADINGS_JSON: &str = include_str!("../fixtures/gradings.json");
const SEQUENCES_JSON: &str = include_str!("../fixtures/sequences.json");
const GOLDEN_TABLE1: &str = include_str!("../fixtures/golden/table1.txt");
const GOLDEN_TABLE2: &str = include_str!("../fixtures/golden/table2.txt");
const GOLDEN_TABLE3: &str = include_str!("../fixtures/golden/table3.txt");

/// Environment variable naming an alternative fixture directory.
pub const FIXTURES_ENV: &str = "HALPHEN_FIXTURES";

#[derive(Debug, Clone, Deserialize)]
pub struct SequenceFixture {
    pub factors: Vec<i64>,
    pub points: Vec<Vec<i64>>,
}

#[derive(Debug, Clone)]
pub struct Fixtures {
    gradings: BTreeMap<String, GradingMatrix>,
    sequences: BTreeMap<String, SequenceFixture>,
    golden: [String; 3],
}

impl Fixtures {
    fn parse(
        gradings: &str,
        sequences: &str,
        golden: [String; 3],
    ) -> Result<Fixtures, Error> {
        let gradings: BTreeMap<String, GradingMatrix> = serde_json::from_str(gradings)
            .map_err(|e| Error::Fixture(format!("gradings.json: {e}")))?;
        let sequences: BTreeMap<String, SequenceFixture> = serde_json::from_str(sequences)
            .map_err(|e| Error::Fixture(format!("sequences.json: {e}")))?;
        for t in Type13::ALL {
            if !gradings.contains_key(t.name()) {
                return Err(Error::Fixture(format!("gradings.json misses {t}")));
            }
            if !sequences.contains_key(t.name()) {
                return Err(Error::Fixture(format!("sequences.json misses {t}")));
            }
        }
        Ok(Fixtures { gradings, sequences, golden })
    }

    /// The data compiled into the library.
    pub fn bundled() -> &'static Fixtures {
        static BUNDLED: OnceLock<Fixtures> = OnceLock::new();
        BUNDLED.get_or_init(|| {
            Fixtures::parse(
                GRADINGS_JSON,
                SEQUENCES_JSON,
                [GOLDEN_TABLE1.to_string(), GOLDEN_TABLE2.to_string(), GOLDEN_TABLE3.to_string()],
            )
            .expect("bundled fixtures must parse")
        })
    }

    /// Load from a directory laid out like the bundled `fixtures/` tree.
    pub fn from_dir(dir: &Path) -> Result<Fixtures, Error> {
        let read = |name: &str| {
            std::fs::read_to_string(dir.join(name))
                .map_err(|e| Error::Fixture(format!("{}: {e}", dir.join(name).display())))
        };
        let gradings = read("gradings.json")?;
        let sequences = read("sequences.json")?;
        let golden = [
            read("golden/table1.txt")?,
            read("golden/table2.txt")?,
            read("golden/table3.txt")?,
        ];
        Fixtures::parse(&gradings, &sequences, golden)
    }

    /// Bundled data, or the directory named by `HALPHEN_FIXTURES`.
    pub fn from_env() -> Result<Fixtures, Error> {
        match std::env::var_os(FIXTURES_ENV) {
            Some(dir) => Fixtures::from_dir(Path::new(&dir)),
            None => Ok(Fixtures::bundled().clone()),
        }
    }

    pub fn grading(&self, t: Type13) -> &GradingMatrix {
        &self.gradings[t.name()]
    }

    pub fn sequence(&self, t: Type13) -> &SequenceFixture {
        &self.sequences[t.name()]
    }

    /// Golden text of table 1, 2 or 3.
    pub fn golden_table(&self, which: usize) -> Result<&str, Error> {
        match which {
            1..=3 => Ok(&self.golden[which - 1]),
            _ => Err(Error::ShapeMismatch(format!("no table {which}"))),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bundled_parses_and_validates() {
        let fx = Fixtures::bundled();
        for t in Type13::ALL {
            let q = fx.grading(t);
            q.validate().unwrap();
            assert_eq!(q.cols(), t.configuration().column_count(), "{t}");
            assert_eq!(q.free_rank(), t.configuration().components.len(), "{t}");
            let seq = fx.sequence(t);
            assert_eq!(seq.points.len(), 9, "{t}");
            assert!(seq.points.iter().all(|p| p.len() == seq.factors.len()));
        }
    }

    #[test]
    fn block_marks_match_computed_marks() {
        let fx = Fixtures::bundled();
        for t in Type13::ALL {
            let q = fx.grading(t);
            let cfg = t.configuration();
            for (i, comp) in cfg.components.iter().enumerate() {
                let mut block = q.block_marks(i);
                block.sort_unstable();
                let mut mk = crate::root_data::marks(*comp).values;
                mk.sort_unstable();
                assert_eq!(block, mk, "{t} block {i}");
            }
        }
    }
}
