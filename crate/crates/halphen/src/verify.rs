//! Consistency suite: series coefficients against polytope counts,
//! projection independence of the distinguished degree, structural
//! postconditions of the reconstructed models, and agreement of the
//! canonical grading matrices with the ones recomputed from embeddings.

use crate::fixtures::Fixtures;
use crate::model::{delta_with_projection, reconstruct, reference_sequence};
use crate::picard::{intersect, DivisorClass};
use crate::root_data::{marks, torsion_elements, ClassGroupElement, GradingMatrix, Type13};
use crate::{hilbert, polytope};

#[derive(Debug, Clone)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

fn check(name: impl Into<String>, result: Result<(), String>) -> Check {
    match result {
        Ok(()) => Check { name: name.into(), passed: true, detail: String::new() },
        Err(detail) => Check { name: name.into(), passed: false, detail },
    }
}

/// All free parts bounded componentwise by `bound`.
fn free_box(rank: usize, bound: i64) -> Vec<Vec<i64>> {
    let mut out = vec![Vec::new()];
    for _ in 0..rank {
        let mut next = Vec::new();
        for p in &out {
            for c in 0..=bound {
                let mut v = p.clone();
                v.push(c);
                next.push(v);
            }
        }
        out = next;
    }
    out
}

/// Series coefficients equal polytope counts for every twist and every
/// free part in the box.
pub fn oracle_equivalence(t: Type13, q: &GradingMatrix, bound: i64) -> Result<(), String> {
    let group = q.class_group();
    for free in free_box(q.free_rank(), bound) {
        for twist in torsion_elements(&group) {
            let delta = ClassGroupElement::new(free.clone(), twist);
            let series = hilbert::coefficient(q, &delta).map_err(|e| e.to_string())?;
            let points = polytope::count(q, &delta).map_err(|e| e.to_string())?;
            if series != points {
                return Err(format!(
                    "{t}: series gives {series}, enumeration gives {points} at {delta:?}"
                ));
            }
        }
    }
    Ok(())
}

fn permutations(n: usize) -> Vec<Vec<usize>> {
    if n == 0 {
        return vec![vec![]];
    }
    let mut out = Vec::new();
    for rest in permutations(n - 1) {
        for pos in 0..n {
            let mut p = rest.clone();
            p.insert(pos, n - 1);
            out.push(p);
        }
    }
    out
}

/// Permutations of the block indices that only permute blocks of equal
/// type (equal marks in equal count).
fn block_symmetries(q: &GradingMatrix) -> Vec<Vec<usize>> {
    let r = q.blocks.len();
    let signature: Vec<Vec<i64>> = (0..r)
        .map(|i| {
            let mut mk = q.block_marks(i);
            mk.sort_unstable();
            mk
        })
        .collect();
    permutations(r)
        .into_iter()
        .filter(|p| (0..r).all(|i| signature[p[i]] == signature[i]))
        .collect()
}

/// Count functions of two gradings agree under some permutation of
/// equal-type blocks and some bijection of torsion twists.
pub fn counts_isomorphic(
    a: &GradingMatrix,
    b: &GradingMatrix,
    bound: i64,
) -> Result<(), String> {
    if a.free_rank() != b.free_rank() {
        return Err(format!(
            "free ranks differ: {} vs {}",
            a.free_rank(),
            b.free_rank()
        ));
    }
    let box_a = free_box(a.free_rank(), bound);
    let twists_a = torsion_elements(&a.class_group());
    let twists_b = torsion_elements(&b.class_group());
    if twists_a.len() != twists_b.len() {
        return Err(format!(
            "torsion orders differ: {} vs {}",
            twists_a.len(),
            twists_b.len()
        ));
    }
    let count_vec = |q: &GradingMatrix, twist: &[i64], frees: &[Vec<i64>]| -> Result<Vec<u64>, String> {
        frees
            .iter()
            .map(|f| {
                polytope::count(q, &ClassGroupElement::new(f.clone(), twist.to_vec()))
                    .map_err(|e| e.to_string())
            })
            .collect()
    };
    let vecs_a: Vec<Vec<u64>> = twists_a
        .iter()
        .map(|tw| count_vec(a, tw, &box_a))
        .collect::<Result<_, _>>()?;
    for perm in block_symmetries(b) {
        let permuted_box: Vec<Vec<i64>> = box_a
            .iter()
            .map(|f| perm.iter().map(|&i| f[i]).collect())
            .collect();
        let vecs_b: Vec<Vec<u64>> = twists_b
            .iter()
            .map(|tw| count_vec(b, tw, &permuted_box))
            .collect::<Result<_, _>>()?;
        let mut sa = vecs_a.clone();
        let mut sb = vecs_b;
        sa.sort();
        sb.sort();
        if sa == sb {
            return Ok(());
        }
    }
    Err("no block permutation matches the twist count functions".into())
}

/// The canonical grading of a type against the one recomputed from the
/// reference embedding: isomorphic class groups and matching counts.
pub fn crosscheck_grading(
    t: Type13,
    canonical: &GradingMatrix,
    fixtures: &Fixtures,
) -> Result<(), String> {
    let seq = reference_sequence(t, fixtures).map_err(|e| e.to_string())?;
    let model = reconstruct(&seq).map_err(|e| e.to_string())?;
    let canonical_group = canonical.class_group();
    if !model.class_group.is_isomorphic(&canonical_group) {
        return Err(format!(
            "{t}: recomputed class group {} differs from canonical {}",
            model.class_group, canonical_group
        ));
    }
    counts_isomorphic(&model.q_matrix, canonical, 3).map_err(|e| format!("{t}: {e}"))
}

/// Structural postconditions of one reference model.
pub fn model_postconditions(t: Type13, fixtures: &Fixtures) -> Result<(), String> {
    let seq = reference_sequence(t, fixtures).map_err(|e| e.to_string())?;
    let model = reconstruct(&seq).map_err(|e| e.to_string())?;
    if model.type13 != t {
        return Err(format!("{t}: reconstructed as {}", model.type13));
    }

    // Gram matrix equals the negated extended Cartan matrix, block-wise
    let mut offset = 0;
    for comp in &model.configuration.components {
        let n = comp.rank + 1;
        let ext = comp.extended_cartan_matrix();
        for i in 0..n {
            for j in 0..n {
                let got = intersect(model.neg2_curves[offset + i], model.neg2_curves[offset + j]);
                if got != -ext[(i, j)] {
                    return Err(format!(
                        "{t}: Gram entry ({i},{j}) of {comp} block is {got}, expected {}",
                        -ext[(i, j)]
                    ));
                }
            }
        }
        offset += n;
    }

    // marks-weighted sums and the index formula were checked during
    // reconstruction; re-verify the fiber sum here independently
    let mut offset = 0;
    for comp in &model.configuration.components {
        let mks = marks(*comp).values;
        let mut sum = DivisorClass::ZERO;
        for (pos, &mk) in mks.iter().enumerate() {
            sum = sum + model.neg2_curves[offset + pos].scale(mk);
        }
        offset += mks.len();
        if sum != DivisorClass::K.scale(-model.index) {
            return Err(format!("{t}: fiber sum {:?} is not -{}K", sum.0, model.index));
        }
    }

    // degree independent of the projection class
    let w_choices = [
        DivisorClass::exceptional(9),
        DivisorClass::exceptional(1),
        DivisorClass::line() - DivisorClass::exceptional(1) - DivisorClass::exceptional(2),
    ];
    let deltas: Vec<_> = w_choices
        .iter()
        .map(|&w| delta_with_projection(&model, w).map_err(|e| e.to_string()))
        .collect::<Result<Vec<_>, _>>()?;
    if deltas.iter().any(|d| *d != deltas[0]) {
        return Err(format!("{t}: degree depends on the projection class"));
    }

    // each column's free degree is its mark times a unit vector
    for (bi, block) in model.q_matrix.blocks.iter().enumerate() {
        for &j in block {
            let deg = model.q_matrix.column_free_degree(j);
            for (i, &v) in deg.iter().enumerate() {
                if (i == bi) != (v != 0) {
                    return Err(format!("{t}: column {j} free degree {deg:?} is not a unit multiple"));
                }
            }
        }
    }

    // enumeration agrees with the count
    let curves = crate::model::enumerate_minus_one_curves(&model).map_err(|e| e.to_string())?;
    let count = polytope::count(&model.q_matrix, &model.delta).map_err(|e| e.to_string())?;
    if curves.len() as u64 != count {
        return Err(format!("{t}: {} curves but count {count}", curves.len()));
    }
    Ok(())
}

/// Run the full suite; each entry prints one pass/fail line.
pub fn run_all(fixtures: &Fixtures, bound: i64) -> Vec<Check> {
    let mut checks = Vec::new();
    for t in Type13::ALL {
        let q = fixtures.grading(t).clone();
        checks.push(check(
            format!("fixture-valid {t}"),
            q.validate().map_err(|e| e.to_string()),
        ));
        checks.push(check(
            format!("oracle-equivalence {t}"),
            oracle_equivalence(t, &q, bound),
        ));
        checks.push(check(
            format!("grading-crosscheck {t}"),
            crosscheck_grading(t, &q, fixtures),
        ));
        checks.push(check(
            format!("model-postconditions {t}"),
            model_postconditions(t, fixtures),
        ));
    }
    checks
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn suite_passes_on_bundled_data() {
        let checks = run_all(Fixtures::bundled(), 2);
        for c in &checks {
            assert!(c.passed, "{}: {}", c.name, c.detail);
        }
        assert_eq!(checks.len(), 13 * 4);
    }

    #[test]
    fn corrupted_grading_detected_and_named() {
        let mut q = Fixtures::bundled().grading(Type13::D8).clone();
        q.torsion[0].row[2] = 0;
        let err = crosscheck_grading(Type13::D8, &q, Fixtures::bundled());
        assert!(err.is_err());
        assert!(err.unwrap_err().contains("D8"));
    }
}
