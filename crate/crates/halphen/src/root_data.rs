//! ADE root-system data: Cartan matrices, affine marks, fiber
//! configurations, grading matrices and their class groups, and the
//! cokernel presentation computed from an explicit root embedding.

use crate::linalg::{self, Mat};
use crate::picard::{e8_gram, E8Class};
use crate::Error;
use serde::{Deserialize, Serialize};
use std::fmt;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Family {
    A,
    D,
    E,
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Family::A => write!(f, "A"),
            Family::D => write!(f, "D"),
            Family::E => write!(f, "E"),
        }
    }
}

/// An irreducible simply-laced root-system type.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct AdeType {
    pub family: Family,
    pub rank: usize,
}

impl AdeType {
    pub fn new(family: Family, rank: usize) -> Result<Self, Error> {
        let ok = match family {
            Family::A => rank >= 1,
            Family::D => rank >= 4,
            Family::E => (6..=8).contains(&rank),
        };
        if !ok {
            return Err(Error::UnknownType(format!("{family}{rank}")));
        }
        Ok(AdeType { family, rank })
    }

    /// Edges of the finite Dynkin diagram, nodes 1..=rank.
    fn finite_edges(&self) -> Vec<(usize, usize)> {
        let n = self.rank;
        match self.family {
            Family::A => (1..n).map(|i| (i, i + 1)).collect(),
            Family::D => {
                let mut e: Vec<(usize, usize)> = (1..n - 2).map(|i| (i, i + 1)).collect();
                e.push((n - 2, n - 1));
                e.push((n - 2, n));
                e
            }
            Family::E => {
                let mut e = vec![(1, 3), (2, 4), (3, 4)];
                for i in 4..n {
                    e.push((i, i + 1));
                }
                e
            }
        }
    }

    /// Node attached to the affine vertex (node 0). For A_n with n >= 2
    /// the affine vertex is attached to both 1 and n.
    fn affine_attachments(&self) -> Vec<usize> {
        match (self.family, self.rank) {
            (Family::A, 1) => vec![1],
            (Family::A, n) => vec![1, n],
            (Family::D, _) => vec![2],
            (Family::E, 6) => vec![2],
            (Family::E, 7) => vec![1],
            (Family::E, _) => vec![8],
        }
    }

    /// Cartan matrix of the finite diagram, nodes 1..=rank.
    pub fn cartan_matrix(&self) -> Mat {
        let n = self.rank;
        let mut c = Mat::zeros(n, n);
        for i in 0..n {
            c[(i, i)] = 2;
        }
        for (a, b) in self.finite_edges() {
            c[(a - 1, b - 1)] = -1;
            c[(b - 1, a - 1)] = -1;
        }
        c
    }

    /// Extended (affine) Cartan matrix, node 0 = affine vertex followed by
    /// the finite nodes. Has corank exactly one.
    pub fn extended_cartan_matrix(&self) -> Mat {
        let n = self.rank + 1;
        let mut c = Mat::zeros(n, n);
        for i in 0..n {
            c[(i, i)] = 2;
        }
        for (a, b) in self.finite_edges() {
            c[(a, b)] = -1;
            c[(b, a)] = -1;
        }
        let bond = if self.family == Family::A && self.rank == 1 { -2 } else { -1 };
        for a in self.affine_attachments() {
            c[(0, a)] = bond;
            c[(a, 0)] = bond;
        }
        c
    }
}

impl fmt::Display for AdeType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}{}", self.family, self.rank)
    }
}

/// Affine marks: the unique primitive positive integer vector annihilated
/// by the extended Cartan matrix, affine node first.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Marks {
    pub values: Vec<i64>,
}

/// Compute the marks of an affine diagram as the kernel of its extended
/// Cartan matrix.
pub fn marks(t: AdeType) -> Marks {
    let ext = t.extended_cartan_matrix();
    let ker = linalg::kernel(&ext);
    assert_eq!(ker.len(), 1, "extended Cartan matrix must have corank 1");
    let mut v = ker.into_iter().next().unwrap();
    if v.iter().all(|&x| x <= 0) {
        for x in v.iter_mut() {
            *x = -*x;
        }
    }
    assert!(v.iter().all(|&x| x > 0), "marks must be positive");
    let g = linalg::gcd_slice(&v);
    assert_eq!(g, 1, "kernel generator must be primitive");
    assert_eq!(v[0], 1, "affine mark must be one");
    Marks { values: v }
}

/// An ordered list of fiber component types, total rank at most eight.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FiberConfiguration {
    pub components: Vec<AdeType>,
}

impl FiberConfiguration {
    pub fn new(components: Vec<AdeType>) -> Result<Self, Error> {
        let total: usize = components.iter().map(|c| c.rank).sum();
        if total > 8 {
            return Err(Error::Unsupported(format!(
                "total rank {total} exceeds eight"
            )));
        }
        Ok(FiberConfiguration { components })
    }

    pub fn total_rank(&self) -> usize {
        self.components.iter().map(|c| c.rank).sum()
    }

    /// Number of curve columns: sum of (rank + 1) over components.
    pub fn column_count(&self) -> usize {
        self.components.iter().map(|c| c.rank + 1).sum()
    }
}

impl fmt::Display for FiberConfiguration {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        // group equal consecutive components with a multiplier, as in 2A4
        let mut parts: Vec<String> = Vec::new();
        let mut i = 0;
        while i < self.components.len() {
            let mut j = i;
            while j < self.components.len() && self.components[j] == self.components[i] {
                j += 1;
            }
            let count = j - i;
            if count == 1 {
                parts.push(self.components[i].to_string());
            } else {
                parts.push(format!("{}{}", count, self.components[i]));
            }
            i = j;
        }
        write!(f, "{}", parts.join("+"))
    }
}

/// One torsion row of a grading matrix: residues modulo `modulus`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TorsionRow {
    #[serde(rename = "mod")]
    pub modulus: i64,
    pub row: Vec<i64>,
}

/// Block matrix presenting the class group grading: free rows of affine
/// marks (one per component) plus torsion rows.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GradingMatrix {
    pub free: Vec<Vec<i64>>,
    pub torsion: Vec<TorsionRow>,
    pub blocks: Vec<Vec<usize>>,
}

impl GradingMatrix {
    pub fn cols(&self) -> usize {
        self.free.first().map_or(0, |r| r.len())
    }

    pub fn free_rank(&self) -> usize {
        self.free.len()
    }

    pub fn class_group(&self) -> ClassGroup {
        ClassGroup {
            free_rank: self.free_rank(),
            moduli: self.torsion.iter().map(|t| t.modulus).collect(),
        }
    }

    /// Free degree of a column (its entries down the free rows).
    pub fn column_free_degree(&self, j: usize) -> Vec<i64> {
        self.free.iter().map(|r| r[j]).collect()
    }

    /// Torsion residues of a column, reduced.
    pub fn column_torsion(&self, j: usize) -> Vec<i64> {
        self.torsion.iter().map(|t| t.row[j].rem_euclid(t.modulus)).collect()
    }

    /// Degree of an arbitrary integer vector of the column space.
    pub fn apply(&self, e: &[i64]) -> Result<ClassGroupElement, Error> {
        if e.len() != self.cols() {
            return Err(Error::ShapeMismatch(format!(
                "vector length {} does not match {} columns",
                e.len(),
                self.cols()
            )));
        }
        let free = self
            .free
            .iter()
            .map(|r| r.iter().zip(e).fold(0i64, |s, (&a, &b)| linalg::add(s, linalg::mul(a, b))))
            .collect();
        let torsion = self
            .torsion
            .iter()
            .map(|t| {
                t.row
                    .iter()
                    .zip(e)
                    .fold(0i64, |s, (&a, &b)| linalg::add(s, linalg::mul(a, b)))
                    .rem_euclid(t.modulus)
            })
            .collect();
        Ok(ClassGroupElement { free, torsion })
    }

    /// Structural validity: every column has exactly one nonzero free
    /// entry, positive, located in its own block, and equal to the marks
    /// pattern of the block row.
    pub fn validate(&self) -> Result<(), Error> {
        let s = self.cols();
        if self.free.iter().any(|r| r.len() != s)
            || self.torsion.iter().any(|t| t.row.len() != s)
        {
            return Err(Error::ShapeMismatch("ragged grading matrix".into()));
        }
        let mut seen = vec![false; s];
        for (i, block) in self.blocks.iter().enumerate() {
            for &j in block {
                if j >= s || seen[j] {
                    return Err(Error::ShapeMismatch("invalid block partition".into()));
                }
                seen[j] = true;
                for (k, row) in self.free.iter().enumerate() {
                    if k == i {
                        if row[j] < 1 {
                            return Err(Error::ShapeMismatch(format!(
                                "column {j} has nonpositive free degree"
                            )));
                        }
                    } else if row[j] != 0 {
                        return Err(Error::ShapeMismatch(format!(
                            "column {j} has support outside its block"
                        )));
                    }
                }
            }
        }
        if !seen.iter().all(|&x| x) || self.blocks.len() != self.free.len() {
            return Err(Error::ShapeMismatch("blocks do not partition columns".into()));
        }
        for t in &self.torsion {
            if t.modulus < 2 {
                return Err(Error::ShapeMismatch("torsion modulus below two".into()));
            }
        }
        Ok(())
    }

    /// Marks of block `i` in column order.
    pub fn block_marks(&self, i: usize) -> Vec<i64> {
        self.blocks[i].iter().map(|&j| self.free[i][j]).collect()
    }

    /// An integer vector (not necessarily nonnegative) with the given
    /// degree, if one exists.
    pub fn lift_degree(&self, delta: &ClassGroupElement) -> Option<Vec<i64>> {
        let s = self.cols();
        let r = self.free_rank();
        let k = self.torsion.len();
        if delta.free.len() != r || delta.torsion.len() != k {
            return None;
        }
        // [ F 0 ] [x]   [free]
        // [ T D ] [y] = [tors]   with D = diag(moduli)
        let mut a = Mat::zeros(r + k, s + k);
        for (i, row) in self.free.iter().enumerate() {
            for (j, &x) in row.iter().enumerate() {
                a[(i, j)] = x;
            }
        }
        for (i, t) in self.torsion.iter().enumerate() {
            for (j, &x) in t.row.iter().enumerate() {
                a[(r + i, j)] = x;
            }
            a[(r + i, s + i)] = t.modulus;
        }
        let mut b = delta.free.clone();
        b.extend(delta.torsion.iter().copied());
        linalg::solve(&a, &b).map(|x| x[..s].to_vec())
    }
}

/// Finitely generated abelian group `Z^r + sum Z/d_i`, with the torsion
/// moduli stored in the row order of the grading matrix that presents it.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClassGroup {
    pub free_rank: usize,
    pub moduli: Vec<i64>,
}

impl ClassGroup {
    /// Invariant factors in divisibility order, the basis-free normal
    /// form of the torsion part.
    pub fn invariant_factors(&self) -> Vec<i64> {
        if self.moduli.is_empty() {
            return Vec::new();
        }
        let n = self.moduli.len();
        let mut diag = Mat::zeros(n, n);
        for (i, &d) in self.moduli.iter().enumerate() {
            diag[(i, i)] = d;
        }
        linalg::smith_normal_form(&diag).invariant_factors()
    }

    pub fn torsion_order(&self) -> i64 {
        self.moduli.iter().product()
    }

    /// Same abstract group: equal free rank and equal torsion normal form.
    pub fn is_isomorphic(&self, other: &ClassGroup) -> bool {
        self.free_rank == other.free_rank
            && self.invariant_factors() == other.invariant_factors()
    }
}

impl fmt::Display for ClassGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts: Vec<String> = Vec::new();
        match self.free_rank {
            0 => {}
            1 => parts.push("Z".into()),
            r => parts.push(format!("Z^{r}")),
        }
        for d in self.invariant_factors() {
            parts.push(format!("Z/{d}"));
        }
        if parts.is_empty() {
            parts.push("0".into());
        }
        write!(f, "{}", parts.join(" x "))
    }
}

/// A degree: free integers plus torsion residues in grading-row order.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct ClassGroupElement {
    pub free: Vec<i64>,
    pub torsion: Vec<i64>,
}

impl ClassGroupElement {
    pub fn new(free: Vec<i64>, torsion: Vec<i64>) -> Self {
        ClassGroupElement { free, torsion }
    }
}

/// All torsion residue vectors of a class group, in lexicographic order.
pub fn torsion_elements(g: &ClassGroup) -> Vec<Vec<i64>> {
    let mut out = vec![Vec::new()];
    for &d in &g.moduli {
        let mut next = Vec::with_capacity(out.len() * d as usize);
        for prefix in &out {
            for r in 0..d {
                let mut v = prefix.clone();
                v.push(r);
                next.push(v);
            }
        }
        out = next;
    }
    out
}

/// Free part of the distinguished degree for Halphen index `m`: every
/// component contributes `m`, except a reducible multiple fiber which
/// contributes `1` (that is `m - (m-1)`).
pub fn delta_free_part(
    cfg: &FiberConfiguration,
    m: i64,
    multiple_fiber: Option<usize>,
) -> Result<Vec<i64>, Error> {
    if m < 1 {
        return Err(Error::Unsupported("index must be positive".into()));
    }
    let r = cfg.components.len();
    if let Some(i) = multiple_fiber {
        if i >= r {
            return Err(Error::ShapeMismatch(format!(
                "multiple fiber index {i} out of range for {r} components"
            )));
        }
    }
    let mut v = vec![m; r];
    if let Some(i) = multiple_fiber {
        v[i] = 1;
    }
    Ok(v)
}

/// The thirteen maximal-rank configurations, in the reference order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Type13 {
    E8,
    D8,
    E7A1,
    A8,
    E6A2,
    A7A1,
    D5A3,
    TwoA4,
    A5A2A1,
    D6TwoA1,
    TwoD4,
    TwoA3TwoA1,
    FourA2,
}

impl Type13 {
    pub const ALL: [Type13; 13] = [
        Type13::E8,
        Type13::D8,
        Type13::E7A1,
        Type13::A8,
        Type13::E6A2,
        Type13::A7A1,
        Type13::D5A3,
        Type13::TwoA4,
        Type13::A5A2A1,
        Type13::D6TwoA1,
        Type13::TwoD4,
        Type13::TwoA3TwoA1,
        Type13::FourA2,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            Type13::E8 => "E8",
            Type13::D8 => "D8",
            Type13::E7A1 => "E7+A1",
            Type13::A8 => "A8",
            Type13::E6A2 => "E6+A2",
            Type13::A7A1 => "A7+A1",
            Type13::D5A3 => "D5+A3",
            Type13::TwoA4 => "2A4",
            Type13::A5A2A1 => "A5+A2+A1",
            Type13::D6TwoA1 => "D6+2A1",
            Type13::TwoD4 => "2D4",
            Type13::TwoA3TwoA1 => "2A3+2A1",
            Type13::FourA2 => "4A2",
        }
    }

    pub fn parse(s: &str) -> Result<Type13, Error> {
        let norm = s.trim().to_ascii_uppercase();
        Type13::ALL
            .iter()
            .copied()
            .find(|t| t.name() == norm)
            .ok_or_else(|| Error::UnknownType(s.to_string()))
    }

    pub fn configuration(&self) -> FiberConfiguration {
        let a = |r| AdeType { family: Family::A, rank: r };
        let d = |r| AdeType { family: Family::D, rank: r };
        let e = |r| AdeType { family: Family::E, rank: r };
        let comps = match self {
            Type13::E8 => vec![e(8)],
            Type13::D8 => vec![d(8)],
            Type13::E7A1 => vec![e(7), a(1)],
            Type13::A8 => vec![a(8)],
            Type13::E6A2 => vec![e(6), a(2)],
            Type13::A7A1 => vec![a(7), a(1)],
            Type13::D5A3 => vec![d(5), a(3)],
            Type13::TwoA4 => vec![a(4), a(4)],
            Type13::A5A2A1 => vec![a(5), a(2), a(1)],
            Type13::D6TwoA1 => vec![d(6), a(1), a(1)],
            Type13::TwoD4 => vec![d(4), d(4)],
            Type13::TwoA3TwoA1 => vec![a(3), a(3), a(1), a(1)],
            Type13::FourA2 => vec![a(2), a(2), a(2), a(2)],
        };
        FiberConfiguration { components: comps }
    }
}

impl fmt::Display for Type13 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.name())
    }
}

/// Canonical grading matrix of one of the thirteen types, from the
/// bundled fixture data.
pub fn canonical_grading(t: Type13) -> GradingMatrix {
    crate::fixtures::Fixtures::bundled().grading(t).clone()
}

/// Permutation reconciling the canonical column order of a block with the
/// affine-first marks order: entry `j` is the marks index shown in
/// canonical column `j`.
pub fn canonical_marks_permutation(t: AdeType) -> Vec<usize> {
    let n = t.rank;
    match t.family {
        Family::A => (0..=n).collect(),
        // four mark-one nodes first (affine, 1, n-1, n), then the chain
        Family::D => {
            let mut p = vec![0, 1, n - 1, n];
            p.extend(2..n - 1);
            p
        }
        Family::E => match n {
            6 => vec![0, 2, 4, 3, 1, 5, 6],
            7 => vec![0, 1, 3, 4, 5, 6, 7, 2],
            _ => vec![0, 1, 2, 3, 5, 4, 6, 7, 8],
        },
    }
}

/// Cokernel presentation computed from an explicit root embedding: the
/// columns are root classes in E8 coordinates forming disjoint affine
/// bases whose span has rank eight. Returns the grading matrix with free
/// rows normalized to the block-marks shape, torsion rows from the Smith
/// normal form, and the class group.
pub fn grading_from_embedding(columns: &[E8Class]) -> Result<(GradingMatrix, ClassGroup), Error> {
    let s = columns.len();
    for (j, &c) in columns.iter().enumerate() {
        if e8_gram(c, c) != -2 {
            return Err(Error::Unsupported(format!("column {j} is not a root")));
        }
    }

    // connected components of the pairing graph
    let mut comp = vec![usize::MAX; s];
    let mut blocks: Vec<Vec<usize>> = Vec::new();
    for start in 0..s {
        if comp[start] != usize::MAX {
            continue;
        }
        let id = blocks.len();
        let mut queue = vec![start];
        comp[start] = id;
        let mut members = vec![start];
        while let Some(i) = queue.pop() {
            for j in 0..s {
                if comp[j] == usize::MAX && e8_gram(columns[i], columns[j]) != 0 {
                    comp[j] = id;
                    members.push(j);
                    queue.push(j);
                }
            }
        }
        members.sort_unstable();
        blocks.push(members);
    }

    // marks per block from the kernel of its Gram matrix
    let mut free = vec![vec![0i64; s]; blocks.len()];
    for (i, block) in blocks.iter().enumerate() {
        let n = block.len();
        let mut gram = Mat::zeros(n, n);
        for (a, &ja) in block.iter().enumerate() {
            for (b, &jb) in block.iter().enumerate() {
                gram[(a, b)] = -e8_gram(columns[ja], columns[jb]);
            }
        }
        let ker = linalg::kernel(&gram);
        if ker.len() != 1 {
            return Err(Error::Unsupported(format!(
                "block {i} is not an affine configuration (corank {})",
                ker.len()
            )));
        }
        let mut mk = ker.into_iter().next().unwrap();
        if mk.iter().all(|&x| x <= 0) {
            for x in mk.iter_mut() {
                *x = -*x;
            }
        }
        if !mk.iter().all(|&x| x > 0) {
            return Err(Error::Unsupported(format!(
                "block {i} kernel vector is not positive"
            )));
        }
        for (a, &j) in block.iter().enumerate() {
            free[i][j] = mk[a];
        }
    }

    // cokernel of the dual embedding map via Smith normal form
    let mut mt = Mat::zeros(s, 8);
    for (j, c) in columns.iter().enumerate() {
        for i in 0..8 {
            mt[(j, i)] = c.0[i];
        }
    }
    let snf = linalg::smith_normal_form(&mt);
    let rank = snf.rank();
    if rank < 8 {
        return Err(Error::Unsupported(format!(
            "column span has rank {rank}, expected eight"
        )));
    }
    let r = s - 8;
    if blocks.len() != r {
        return Err(Error::Unsupported(format!(
            "found {} blocks for free rank {r}",
            blocks.len()
        )));
    }
    let torsion: Vec<TorsionRow> = (0..8)
        .filter(|&i| snf.d[(i, i)] > 1)
        .map(|i| {
            let m = snf.d[(i, i)];
            TorsionRow {
                modulus: m,
                row: snf.u.row(i).iter().map(|&x| x.rem_euclid(m)).collect(),
            }
        })
        .collect();

    // normalize the free quotient onto the block-marks rows: both row sets
    // present the same saturated quotient, so an unimodular change of
    // coordinates between them exists
    let f_rec = Mat::from_rows(&(8..s).map(|i| snf.u.row(i)).collect::<Vec<_>>());
    let f_blk = Mat::from_rows(&free);
    let mut h = Mat::zeros(r, r);
    let f_rec_t = f_rec.transpose();
    for i in 0..r {
        let target = f_blk.row(i);
        let y = linalg::solve(&f_rec_t, &target).ok_or_else(|| {
            Error::Postcondition("free quotient normalization has no integer solution".into())
        })?;
        for j in 0..r {
            h[(i, j)] = y[j];
        }
    }
    if h.det().abs() != 1 || h.matmul(&f_rec) != f_blk {
        return Err(Error::Postcondition(
            "free quotient normalization is not unimodular".into(),
        ));
    }

    let q = GradingMatrix { free, torsion, blocks };
    q.validate()?;
    let group = q.class_group();
    Ok((q, group))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::picard::e8_project;

    #[test]
    fn marks_known_multisets() {
        let sorted = |t: AdeType| {
            let mut v = marks(t).values;
            v.sort_unstable();
            v
        };
        assert_eq!(sorted(AdeType::new(Family::A, 1).unwrap()), vec![1, 1]);
        assert_eq!(sorted(AdeType::new(Family::A, 8).unwrap()), vec![1; 9]);
        assert_eq!(
            sorted(AdeType::new(Family::D, 8).unwrap()),
            vec![1, 1, 1, 1, 2, 2, 2, 2, 2]
        );
        assert_eq!(
            sorted(AdeType::new(Family::E, 8).unwrap()),
            vec![1, 2, 2, 3, 3, 4, 4, 5, 6]
        );
        assert_eq!(
            sorted(AdeType::new(Family::E, 7).unwrap()),
            vec![1, 1, 2, 2, 2, 3, 3, 4]
        );
        assert_eq!(
            sorted(AdeType::new(Family::E, 6).unwrap()),
            vec![1, 1, 1, 2, 2, 2, 3]
        );
    }

    #[test]
    fn marks_satisfy_relation_all_types() {
        let mut types = vec![
            AdeType::new(Family::E, 6).unwrap(),
            AdeType::new(Family::E, 7).unwrap(),
            AdeType::new(Family::E, 8).unwrap(),
        ];
        for r in 1..=8 {
            types.push(AdeType::new(Family::A, r).unwrap());
        }
        for r in 4..=8 {
            types.push(AdeType::new(Family::D, r).unwrap());
        }
        for t in types {
            let m = marks(t);
            let ext = t.extended_cartan_matrix();
            assert_eq!(ext.mul_vec(&m.values), vec![0; t.rank + 1], "{t}");
            assert_eq!(m.values[0], 1, "{t}");
            assert_eq!(linalg::gcd_slice(&m.values), 1, "{t}");
        }
    }

    #[test]
    fn type13_parse_roundtrip() {
        for t in Type13::ALL {
            assert_eq!(Type13::parse(t.name()).unwrap(), t);
        }
        assert_eq!(Type13::parse("2a4").unwrap(), Type13::TwoA4);
        assert!(Type13::parse("B2").is_err());
    }

    #[test]
    fn delta_free_part_examples() {
        let cfg = Type13::E8.configuration();
        assert_eq!(delta_free_part(&cfg, 2, None).unwrap(), vec![2]);
        let cfg = Type13::TwoA4.configuration();
        assert_eq!(delta_free_part(&cfg, 2, None).unwrap(), vec![2, 2]);
        let cfg = Type13::D8.configuration();
        assert_eq!(delta_free_part(&cfg, 3, Some(0)).unwrap(), vec![1]);
    }

    #[test]
    fn torsion_elements_counts() {
        let g = ClassGroup { free_rank: 1, moduli: vec![] };
        assert_eq!(torsion_elements(&g), vec![Vec::<i64>::new()]);
        let g = ClassGroup { free_rank: 1, moduli: vec![2] };
        assert_eq!(torsion_elements(&g), vec![vec![0], vec![1]]);
        let g = ClassGroup { free_rank: 4, moduli: vec![3, 3] };
        assert_eq!(torsion_elements(&g).len(), 9);
    }

    #[test]
    fn invariant_factor_normal_form() {
        let g = ClassGroup { free_rank: 4, moduli: vec![4, 2] };
        assert_eq!(g.invariant_factors(), vec![2, 4]);
        let g = ClassGroup { free_rank: 2, moduli: vec![2, 3] };
        assert_eq!(g.invariant_factors(), vec![6]);
    }

    #[test]
    fn embedding_of_simple_roots_is_unimodular() {
        // eight simple roots plus the lowest root: affine E8 basis
        let mut cols: Vec<E8Class> = crate::picard::basis_roots()
            .iter()
            .map(|&r| e8_project(r).unwrap())
            .collect();
        // affine vertex: E8 - E9 in the fixed picture
        let affine = crate::picard::DivisorClass::exceptional(8)
            - crate::picard::DivisorClass::exceptional(9);
        cols.push(e8_project(affine).unwrap());
        let (q, group) = grading_from_embedding(&cols).unwrap();
        assert_eq!(group.free_rank, 1);
        assert!(group.moduli.is_empty());
        let mut degs: Vec<i64> = (0..9).map(|j| q.free[0][j]).collect();
        degs.sort_unstable();
        assert_eq!(degs, vec![1, 2, 2, 3, 3, 4, 4, 5, 6]);

        // permuting the columns leaves the invariant factors unchanged
        let permuted: Vec<E8Class> =
            vec![cols[8], cols[3], cols[0], cols[5], cols[1], cols[7], cols[2], cols[6], cols[4]];
        let (_, group2) = grading_from_embedding(&permuted).unwrap();
        assert!(group.is_isomorphic(&group2));
    }
}
