//! Coefficient extraction from the multigraded series
//! `prod_j 1/(1 - t^(deg column j))`, the generating function whose
//! coefficients count nonnegative integer vectors of a given degree.
//! Serves as the independent oracle for the polytope enumerator.

use crate::root_data::{ClassGroupElement, GradingMatrix};
use crate::Error;
use serde::Serialize;
use std::collections::BTreeMap;

/// Dense truncated coefficient table over free degrees up to a bound,
/// with one entry per torsion element per cell.
struct Table {
    bound: Vec<i64>,
    moduli: Vec<i64>,
    data: Vec<u64>,
    torsion_order: usize,
}

impl Table {
    fn cells(bound: &[i64]) -> usize {
        bound.iter().map(|&b| (b + 1) as usize).product()
    }

    fn new(bound: Vec<i64>, moduli: Vec<i64>) -> Table {
        let torsion_order: usize = moduli.iter().map(|&m| m as usize).product();
        let mut data = vec![0u64; Table::cells(&bound) * torsion_order];
        data[0] = 1;
        Table { bound, moduli, data, torsion_order }
    }

    fn free_index(&self, deg: &[i64]) -> usize {
        deg.iter()
            .zip(&self.bound)
            .fold(0usize, |acc, (&d, &b)| acc * (b + 1) as usize + d as usize)
    }

    fn torsion_index(&self, res: &[i64]) -> usize {
        res.iter().zip(&self.moduli).fold(0usize, |acc, (&r, &m)| acc * m as usize + r as usize)
    }

    fn get(&self, deg: &[i64], res: &[i64]) -> u64 {
        self.data[self.free_index(deg) * self.torsion_order + self.torsion_index(res)]
    }

    /// Multiply in place by the geometric series of one column degree.
    fn apply_factor(&mut self, free: &[i64], torsion: &[i64]) {
        assert!(free.iter().any(|&x| x > 0), "column must have positive free degree");
        let r = self.bound.len();
        let mut deg = vec![0i64; r];
        loop {
            // cell (deg) receives from cell (deg - free), same series
            if deg.iter().zip(free).all(|(&d, &w)| d >= w) {
                let src: Vec<i64> = deg.iter().zip(free).map(|(&d, &w)| d - w).collect();
                let src_base = self.free_index(&src) * self.torsion_order;
                let dst_base = self.free_index(&deg) * self.torsion_order;
                for t in 0..self.torsion_order {
                    // shift torsion index by the column residues
                    let mut digits = Vec::with_capacity(self.moduli.len());
                    let mut x = t;
                    for &m in self.moduli.iter().rev() {
                        digits.push(x as i64 % m);
                        x /= m as usize;
                    }
                    digits.reverse();
                    let shifted: Vec<i64> = digits
                        .iter()
                        .zip(torsion)
                        .zip(&self.moduli)
                        .map(|((&d, &s), &m)| (d - s).rem_euclid(m))
                        .collect();
                    let src_idx = src_base + self.torsion_index(&shifted);
                    self.data[dst_base + t] += self.data[src_idx];
                }
            }
            // advance deg in lexicographic order
            let mut i = r;
            loop {
                if i == 0 {
                    return;
                }
                i -= 1;
                if deg[i] < self.bound[i] {
                    deg[i] += 1;
                    for d in deg.iter_mut().skip(i + 1) {
                        *d = 0;
                    }
                    break;
                }
                if i == 0 {
                    return;
                }
            }
        }
    }
}

fn build_table(q: &GradingMatrix, bound: &[i64]) -> Result<Table, Error> {
    if bound.len() != q.free_rank() {
        return Err(Error::ShapeMismatch(format!(
            "bound length {} does not match free rank {}",
            bound.len(),
            q.free_rank()
        )));
    }
    if bound.iter().any(|&b| b < 0) {
        return Err(Error::ShapeMismatch("bound must be nonnegative".into()));
    }
    let moduli: Vec<i64> = q.torsion.iter().map(|t| t.modulus).collect();
    let mut table = Table::new(bound.to_vec(), moduli);
    for j in 0..q.cols() {
        let free = q.column_free_degree(j);
        let torsion = q.column_torsion(j);
        // a column whose degree already leaves the box contributes only
        // its constant term
        if free.iter().zip(bound).any(|(&w, &b)| w > b) {
            continue;
        }
        table.apply_factor(&free, &torsion);
    }
    Ok(table)
}

/// Coefficient of the character with the given degree.
pub fn coefficient(q: &GradingMatrix, delta: &ClassGroupElement) -> Result<u64, Error> {
    if delta.free.len() != q.free_rank() || delta.torsion.len() != q.torsion.len() {
        return Err(Error::ShapeMismatch(format!(
            "degree shape ({}, {}) does not match grading shape ({}, {})",
            delta.free.len(),
            delta.torsion.len(),
            q.free_rank(),
            q.torsion.len()
        )));
    }
    if delta.free.iter().any(|&d| d < 0) {
        return Ok(0);
    }
    let table = build_table(q, &delta.free)?;
    Ok(table.get(&delta.free, &delta.torsion))
}

/// A coefficient record of the series table.
#[derive(Debug, Clone, Serialize)]
pub struct SeriesEntry {
    pub degree: ClassGroupElement,
    pub coeff: u64,
}

/// All coefficients with free part at most `bound` componentwise,
/// computed in one expansion pass.
pub fn series_table(
    q: &GradingMatrix,
    bound: &[i64],
) -> Result<BTreeMap<ClassGroupElement, u64>, Error> {
    let table = build_table(q, bound)?;
    let mut out = BTreeMap::new();
    let r = bound.len();
    let mut deg = vec![0i64; r];
    let torsion_elems = crate::root_data::torsion_elements(&q.class_group());
    'outer: loop {
        for res in &torsion_elems {
            out.insert(
                ClassGroupElement::new(deg.clone(), res.clone()),
                table.get(&deg, res),
            );
        }
        let mut i = r;
        loop {
            if i == 0 {
                break 'outer;
            }
            i -= 1;
            if deg[i] < bound[i] {
                deg[i] += 1;
                for d in deg.iter_mut().skip(i + 1) {
                    *d = 0;
                }
                break;
            }
            if i == 0 {
                break 'outer;
            }
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::root_data::{canonical_grading, torsion_elements, ClassGroup, Type13};

    #[test]
    fn d8_reference_coefficients() {
        let q = canonical_grading(Type13::D8);
        assert_eq!(coefficient(&q, &ClassGroupElement::new(vec![2], vec![0])).unwrap(), 9);
        assert_eq!(coefficient(&q, &ClassGroupElement::new(vec![2], vec![1])).unwrap(), 6);
    }

    #[test]
    fn e8_low_degrees() {
        let q = canonical_grading(Type13::E8);
        assert_eq!(coefficient(&q, &ClassGroupElement::new(vec![0], vec![])).unwrap(), 1);
        let table = series_table(&q, &[2]).unwrap();
        assert_eq!(table[&ClassGroupElement::new(vec![0], vec![])], 1);
        assert_eq!(table[&ClassGroupElement::new(vec![1], vec![])], 1);
        assert_eq!(table[&ClassGroupElement::new(vec![2], vec![])], 3);
    }

    #[test]
    fn d8_degree_one_split() {
        let q = canonical_grading(Type13::D8);
        let table = series_table(&q, &[2]).unwrap();
        assert_eq!(table[&ClassGroupElement::new(vec![1], vec![0])], 2);
        assert_eq!(table[&ClassGroupElement::new(vec![1], vec![1])], 2);
    }

    #[test]
    fn bound_zero_is_identity() {
        for t in [Type13::E8, Type13::FourA2] {
            let q = canonical_grading(t);
            let table = series_table(&q, &vec![0; q.free_rank()]).unwrap();
            for (deg, c) in table {
                let trivial = deg.torsion.iter().all(|&r| r == 0);
                assert_eq!(c, u64::from(trivial), "{t}");
            }
        }
    }

    #[test]
    fn matches_polytope_counts() {
        for t in Type13::ALL {
            let q = canonical_grading(t);
            let group = q.class_group();
            let bound = vec![2i64; q.free_rank()];
            let table = series_table(&q, &bound).unwrap();
            for (deg, c) in table {
                assert_eq!(c, crate::polytope::count(&q, &deg).unwrap(), "{t} {deg:?}");
            }
            let _ = torsion_elements(&group);
        }
    }

    #[test]
    fn disjoint_union_is_convolution() {
        let a = canonical_grading(Type13::E8);
        let b = canonical_grading(Type13::D8);
        // block-diagonal join with no shared torsion rows
        let mut free = vec![vec![0i64; 18]; 2];
        free[0][..9].copy_from_slice(&a.free[0]);
        free[1][9..].copy_from_slice(&b.free[0]);
        let mut trow = vec![0i64; 18];
        trow[9..].copy_from_slice(&b.torsion[0].row);
        let joined = GradingMatrix {
            free,
            torsion: vec![crate::root_data::TorsionRow { modulus: 2, row: trow }],
            blocks: vec![(0..9).collect(), (9..18).collect()],
        };
        joined.validate().unwrap();
        let ta = series_table(&a, &[3]).unwrap();
        let tb = series_table(&b, &[3]).unwrap();
        let tj = series_table(&joined, &[3, 3]).unwrap();
        let group = ClassGroup { free_rank: 2, moduli: vec![2] };
        for da in 0..=3i64 {
            for db in 0..=3i64 {
                for tw in torsion_elements(&group) {
                    let joined_c = tj[&ClassGroupElement::new(vec![da, db], tw.clone())];
                    let conv = ta[&ClassGroupElement::new(vec![da], vec![])]
                        * tb[&ClassGroupElement::new(vec![db], tw)];
                    assert_eq!(joined_c, conv);
                }
            }
        }
    }
}
