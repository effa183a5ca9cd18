//! Regeneration of the three bundled reference tables from first
//! principles, and diffing against the golden copies.

use crate::fixtures::Fixtures;
use crate::model::{counts_by_twist, reconstruct, reference_sequence, FiniteAbelianGroup};
use crate::root_data::Type13;
use crate::Error;

fn sequence_entry(point: &[i64]) -> String {
    point.iter().map(|r| r.to_string()).collect::<Vec<_>>().concat()
}

/// Rebuild table 1: type, recomputed quotient group, reference sequence.
/// The index of every sequence is recomputed and must be one.
pub fn table1_text(fixtures: &Fixtures) -> Result<String, Error> {
    let mut out = String::from("type | group | sequence\n");
    for t in Type13::ALL {
        let seq = reference_sequence(t, fixtures)?;
        let model = reconstruct(&seq)?;
        if model.index != 1 {
            return Err(Error::Postcondition(format!(
                "reference sequence for {t} has index {}",
                model.index
            )));
        }
        if model.type13 != t {
            return Err(Error::Postcondition(format!(
                "reference sequence for {t} reconstructs as {}",
                model.type13
            )));
        }
        let group = FiniteAbelianGroup {
            invariant_factors: model.class_group.invariant_factors(),
        };
        let entries: Vec<String> = seq.points.iter().map(|p| sequence_entry(p)).collect();
        out.push_str(&format!("{t} | {group} | [{}]\n", entries.join(",")));
    }
    Ok(out)
}

/// Rebuild table 2: realizable (-1)-curve counts at index two.
pub fn table2_text(fixtures: &Fixtures) -> Result<String, Error> {
    let mut out = String::from("type | counts\n");
    for t in Type13::ALL {
        let report = counts_by_twist(t, 2, None, fixtures)?;
        let counts: Vec<String> =
            report.realizable_counts.iter().map(|c| c.to_string()).collect();
        out.push_str(&format!("{t} | {}\n", counts.join(",")));
    }
    Ok(out)
}

/// Rebuild table 3: the canonical grading matrices, after cross-checking
/// each of them against the matrix recomputed from the reference
/// embedding.
pub fn table3_text(fixtures: &Fixtures) -> Result<String, Error> {
    let mut blocks = Vec::new();
    for t in Type13::ALL {
        let q = fixtures.grading(t);
        q.validate()
            .map_err(|e| Error::Fixture(format!("grading matrix {t}: {e}")))?;
        crate::verify::crosscheck_grading(t, q, fixtures)
            .map_err(|e| Error::Fixture(format!("grading matrix {t}: {e}")))?;
        let mut lines = vec![format!("{t} | {}", q.class_group())];
        for row in &q.free {
            let cells: Vec<String> = row.iter().map(|x| x.to_string()).collect();
            lines.push(format!("[{}]", cells.join(" ")));
        }
        for trow in &q.torsion {
            let cells: Vec<String> = trow.row.iter().map(|x| x.to_string()).collect();
            lines.push(format!("[{}] mod {}", cells.join(" "), trow.modulus));
        }
        blocks.push(lines.join("\n"));
    }
    Ok(blocks.join("\n\n") + "\n")
}

pub fn table_text(which: usize, fixtures: &Fixtures) -> Result<String, Error> {
    match which {
        1 => table1_text(fixtures),
        2 => table2_text(fixtures),
        3 => table3_text(fixtures),
        _ => Err(Error::ShapeMismatch(format!("no table {which}"))),
    }
}

/// Line diff; `None` when the texts agree.
pub fn diff(golden: &str, regenerated: &str) -> Option<String> {
    if golden == regenerated {
        return None;
    }
    let a: Vec<&str> = golden.lines().collect();
    let b: Vec<&str> = regenerated.lines().collect();
    let mut out = String::new();
    for i in 0..a.len().max(b.len()) {
        let ga = a.get(i).copied().unwrap_or("<missing>");
        let gb = b.get(i).copied().unwrap_or("<missing>");
        if ga != gb {
            out.push_str(&format!("line {}:\n  golden:      {}\n  regenerated: {}\n", i + 1, ga, gb));
        }
    }
    Some(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tables_match_golden() {
        let fx = Fixtures::bundled();
        for which in 1..=3 {
            let regenerated = table_text(which, fx).unwrap();
            let golden = fx.golden_table(which).unwrap();
            assert!(
                diff(golden, &regenerated).is_none(),
                "table {which} diff:\n{}",
                diff(golden, &regenerated).unwrap()
            );
        }
    }
}
