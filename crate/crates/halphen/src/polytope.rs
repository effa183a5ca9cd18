//! Integral points of the fiber polytope of a grading matrix: all
//! nonnegative integer vectors with a prescribed degree. Solved block by
//! block as a bounded knapsack over the marks, then filtered by the
//! torsion congruences.

use crate::root_data::{ClassGroupElement, GradingMatrix};
use crate::Error;

fn check_shape(q: &GradingMatrix, delta: &ClassGroupElement) -> Result<(), Error> {
    if delta.free.len() != q.free_rank() || delta.torsion.len() != q.torsion.len() {
        return Err(Error::ShapeMismatch(format!(
            "degree shape ({}, {}) does not match grading shape ({}, {})",
            delta.free.len(),
            delta.torsion.len(),
            q.free_rank(),
            q.torsion.len()
        )));
    }
    for (t, &r) in q.torsion.iter().zip(&delta.torsion) {
        if !(0..t.modulus).contains(&r) {
            return Err(Error::ShapeMismatch(format!(
                "torsion residue {r} not reduced modulo {}",
                t.modulus
            )));
        }
    }
    Ok(())
}

/// Nonnegative solutions of `sum marks[i] * x[i] = target`, in ascending
/// lexicographic order.
fn knapsack(marks: &[i64], target: i64) -> Vec<Vec<i64>> {
    let mut out = Vec::new();
    let mut current = vec![0i64; marks.len()];
    fn rec(marks: &[i64], pos: usize, remaining: i64, current: &mut Vec<i64>, out: &mut Vec<Vec<i64>>) {
        if pos == marks.len() {
            if remaining == 0 {
                out.push(current.clone());
            }
            return;
        }
        if pos + 1 == marks.len() {
            // last coordinate is forced
            if remaining % marks[pos] == 0 {
                current[pos] = remaining / marks[pos];
                out.push(current.clone());
                current[pos] = 0;
            }
            return;
        }
        let max = remaining / marks[pos];
        for v in 0..=max {
            current[pos] = v;
            rec(marks, pos + 1, remaining - v * marks[pos], current, out);
        }
        current[pos] = 0;
    }
    if target >= 0 {
        rec(marks, 0, target, &mut current, &mut out);
    }
    out
}

/// All integral points of the polytope `{e >= 0 : Q e = delta}`, in
/// lexicographic order on the full coordinate vector.
pub fn enumerate(q: &GradingMatrix, delta: &ClassGroupElement) -> Result<Vec<Vec<i64>>, Error> {
    check_shape(q, delta)?;
    let s = q.cols();
    let per_block: Vec<Vec<Vec<i64>>> = (0..q.blocks.len())
        .map(|i| knapsack(&q.block_marks(i), delta.free[i]))
        .collect();

    let mut out = Vec::new();
    let mut point = vec![0i64; s];
    fn product(
        q: &GradingMatrix,
        per_block: &[Vec<Vec<i64>>],
        delta: &ClassGroupElement,
        block: usize,
        point: &mut Vec<i64>,
        out: &mut Vec<Vec<i64>>,
    ) {
        if block == per_block.len() {
            let ok = q.torsion.iter().zip(&delta.torsion).all(|(t, &want)| {
                let got = t
                    .row
                    .iter()
                    .zip(point.iter())
                    .fold(0i64, |s, (&a, &b)| (s + a * b).rem_euclid(t.modulus));
                got == want
            });
            if ok {
                out.push(point.clone());
            }
            return;
        }
        for sol in &per_block[block] {
            for (&j, &v) in q.blocks[block].iter().zip(sol.iter()) {
                point[j] = v;
            }
            product(q, per_block, delta, block + 1, point, out);
        }
        for &j in &q.blocks[block] {
            point[j] = 0;
        }
    }
    product(q, &per_block, delta, 0, &mut point, &mut out);
    Ok(out)
}

/// Number of integral points with the given degree; tallied through the
/// torsion group without building the product of block solutions.
pub fn count(q: &GradingMatrix, delta: &ClassGroupElement) -> Result<u64, Error> {
    check_shape(q, delta)?;
    let moduli: Vec<i64> = q.torsion.iter().map(|t| t.modulus).collect();
    let order: usize = moduli.iter().product::<i64>() as usize;
    let index_of = |res: &[i64]| -> usize {
        res.iter().zip(&moduli).fold(0usize, |acc, (&r, &m)| acc * m as usize + r as usize)
    };

    // per block: tally of solutions by torsion contribution
    let mut acc = vec![0u64; order];
    acc[0] = 1;
    for (i, block) in q.blocks.iter().enumerate() {
        let sols = knapsack(&q.block_marks(i), delta.free[i]);
        let mut tally = vec![0u64; order];
        for sol in &sols {
            let res: Vec<i64> = q
                .torsion
                .iter()
                .map(|t| {
                    block
                        .iter()
                        .zip(sol.iter())
                        .fold(0i64, |s, (&j, &v)| (s + t.row[j] * v).rem_euclid(t.modulus))
                })
                .collect();
            tally[index_of(&res)] += 1;
        }
        // convolve over the product of cyclic groups
        let mut next = vec![0u64; order];
        for a in 0..order {
            if acc[a] == 0 {
                continue;
            }
            for b in 0..order {
                if tally[b] == 0 {
                    continue;
                }
                // componentwise sum of mixed-radix digits
                let mut x = a;
                let mut y = b;
                let mut sum = 0usize;
                let mut scale = 1usize;
                for &m in moduli.iter().rev() {
                    let m = m as usize;
                    let digit = (x % m + y % m) % m;
                    sum += digit * scale;
                    scale *= m;
                    x /= m;
                    y /= m;
                }
                next[sum] += acc[a] * tally[b];
            }
        }
        acc = next;
    }
    Ok(acc[index_of(&delta.torsion)])
}

/// Serialize enumerated points as CSV, one point per row, with columns
/// labeled by component type and node position, e.g. `A4[0]:2`.
pub fn points_to_csv(q: &GradingMatrix, labels: &[String], points: &[Vec<i64>]) -> String {
    assert_eq!(labels.len(), q.blocks.len());
    let mut header: Vec<String> = vec![String::new(); q.cols()];
    for (i, block) in q.blocks.iter().enumerate() {
        for (pos, &j) in block.iter().enumerate() {
            header[j] = format!("{}[{}]:{}", labels[i], i, pos);
        }
    }
    let mut out = header.join(",");
    out.push('\n');
    for p in points {
        let row: Vec<String> = p.iter().map(|x| x.to_string()).collect();
        out.push_str(&row.join(","));
        out.push('\n');
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::root_data::{canonical_grading, torsion_elements, Type13};

    fn delta(q: &GradingMatrix, free: Vec<i64>, torsion: Vec<i64>) -> ClassGroupElement {
        let _ = q;
        ClassGroupElement::new(free, torsion)
    }

    #[test]
    fn e8_degree_two_points() {
        let q = canonical_grading(Type13::E8);
        let pts = enumerate(&q, &delta(&q, vec![2], vec![])).unwrap();
        assert_eq!(
            pts,
            vec![
                vec![0, 0, 0, 0, 0, 0, 0, 0, 1],
                vec![0, 1, 0, 0, 0, 0, 0, 0, 0],
                vec![2, 0, 0, 0, 0, 0, 0, 0, 0],
            ]
        );
        assert_eq!(count(&q, &delta(&q, vec![2], vec![])).unwrap(), 3);
        assert_eq!(count(&q, &delta(&q, vec![1], vec![])).unwrap(), 1);
    }

    #[test]
    fn zero_degree_single_point() {
        for t in Type13::ALL {
            let q = canonical_grading(t);
            let d = ClassGroupElement::new(vec![0; q.free_rank()], vec![0; q.torsion.len()]);
            assert_eq!(enumerate(&q, &d).unwrap(), vec![vec![0; q.cols()]]);
        }
    }

    #[test]
    fn d8_twist_counts() {
        let q = canonical_grading(Type13::D8);
        assert_eq!(count(&q, &delta(&q, vec![2], vec![0])).unwrap(), 9);
        assert_eq!(count(&q, &delta(&q, vec![2], vec![1])).unwrap(), 6);
    }

    #[test]
    fn paper_counts_4a2_and_2a4() {
        let q = canonical_grading(Type13::FourA2);
        assert_eq!(count(&q, &delta(&q, vec![2, 2, 2, 2], vec![0, 0])).unwrap(), 144);
        let q = canonical_grading(Type13::TwoA4);
        assert_eq!(count(&q, &delta(&q, vec![2, 2], vec![0])).unwrap(), 45);
    }

    #[test]
    fn count_matches_enumeration_and_degrees_verify() {
        for t in [Type13::D8, Type13::E7A1, Type13::TwoA3TwoA1] {
            let q = canonical_grading(t);
            let group = q.class_group();
            for twist in torsion_elements(&group) {
                let d = ClassGroupElement::new(vec![2; q.free_rank()], twist);
                let pts = enumerate(&q, &d).unwrap();
                assert_eq!(pts.len() as u64, count(&q, &d).unwrap(), "{t}");
                for p in &pts {
                    assert_eq!(q.apply(p).unwrap(), d, "{t}");
                }
            }
        }
    }

    #[test]
    fn torsion_forgetting_sums() {
        for t in [Type13::D8, Type13::FourA2] {
            let q = canonical_grading(t);
            let group = q.class_group();
            let free = vec![2; q.free_rank()];
            let total: u64 = torsion_elements(&group)
                .into_iter()
                .map(|tw| count(&q, &ClassGroupElement::new(free.clone(), tw)).unwrap())
                .sum();
            let free_only = GradingMatrix {
                free: q.free.clone(),
                torsion: vec![],
                blocks: q.blocks.clone(),
            };
            let whole = count(&free_only, &ClassGroupElement::new(free, vec![])).unwrap();
            assert_eq!(total, whole, "{t}");
        }
    }

    #[test]
    fn block_permutation_preserves_counts() {
        let q = canonical_grading(Type13::D8);
        // swap the first two columns (both mark one) inside the block
        let mut q2 = q.clone();
        for row in q2.free.iter_mut() {
            row.swap(0, 1);
        }
        for t in q2.torsion.iter_mut() {
            t.row.swap(0, 1);
        }
        for tw in [vec![0], vec![1]] {
            let d = ClassGroupElement::new(vec![2], tw);
            let a = enumerate(&q, &d).unwrap();
            let b = enumerate(&q2, &d).unwrap();
            let mut swapped: Vec<Vec<i64>> = a
                .into_iter()
                .map(|mut p| {
                    p.swap(0, 1);
                    p
                })
                .collect();
            swapped.sort();
            assert_eq!(swapped, b);
        }
    }

    #[test]
    fn shape_mismatch_rejected() {
        let q = canonical_grading(Type13::D8);
        assert!(count(&q, &ClassGroupElement::new(vec![2, 2], vec![0])).is_err());
        assert!(count(&q, &ClassGroupElement::new(vec![2], vec![])).is_err());
        assert!(count(&q, &ClassGroupElement::new(vec![2], vec![2])).is_err());
    }
}
