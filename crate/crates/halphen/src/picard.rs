//! Exact arithmetic in the rank-10 Picard lattice of a plane blown up at
//! nine points, its canonical-orthogonal sublattice, and the induced E8
//! quotient lattice.
//!
//! A divisor class is stored as ten integers `(c0, c1..c9)` meaning
//! `c0*L + c1*E1 + ... + c9*E9`, so the class `d*L - sum m_i E_i` has
//! coefficients `(d, -m1, ..., -m9)`. The intersection form is
//! `diag(+1, -1, ..., -1)`.

use crate::linalg::{self, Mat};
use crate::Error;
use serde::{Deserialize, Serialize};

/// Divisor class on the blow-up of the plane at nine points.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct DivisorClass(pub [i64; 10]);

impl DivisorClass {
    pub const ZERO: DivisorClass = DivisorClass([0; 10]);

    /// Canonical class `-3L + E1 + ... + E9`.
    pub const K: DivisorClass = DivisorClass([-3, 1, 1, 1, 1, 1, 1, 1, 1, 1]);

    /// Pull-back of a line.
    pub fn line() -> DivisorClass {
        let mut c = [0; 10];
        c[0] = 1;
        DivisorClass(c)
    }

    /// Exceptional class `E_i`, 1-based.
    pub fn exceptional(i: usize) -> DivisorClass {
        assert!((1..=9).contains(&i), "exceptional index out of range");
        let mut c = [0; 10];
        c[i] = 1;
        DivisorClass(c)
    }

    /// Class `d*L - sum m_i E_i` from degree and multiplicities.
    pub fn from_degree_mults(d: i64, mults: [i64; 9]) -> DivisorClass {
        let mut c = [0; 10];
        c[0] = d;
        for i in 0..9 {
            c[i + 1] = -mults[i];
        }
        DivisorClass(c)
    }

    pub fn degree(&self) -> i64 {
        self.0[0]
    }

    /// Multiplicities `m_i = -c_i`.
    pub fn multiplicities(&self) -> [i64; 9] {
        let mut m = [0; 9];
        for i in 0..9 {
            m[i] = -self.0[i + 1];
        }
        m
    }

    pub fn scale(&self, k: i64) -> DivisorClass {
        let mut c = [0; 10];
        for i in 0..10 {
            c[i] = linalg::mul(self.0[i], k);
        }
        DivisorClass(c)
    }

    pub fn self_intersection(&self) -> i64 {
        intersect(*self, *self)
    }

    /// Human-readable `(d; m1,...,m9)` form.
    pub fn display_degree_mults(&self) -> String {
        let m = self.multiplicities();
        let ms: Vec<String> = m.iter().map(|x| x.to_string()).collect();
        format!("({}; {})", self.degree(), ms.join(","))
    }
}

impl std::ops::Add for DivisorClass {
    type Output = DivisorClass;
    fn add(self, rhs: DivisorClass) -> DivisorClass {
        let mut c = [0; 10];
        for i in 0..10 {
            c[i] = linalg::add(self.0[i], rhs.0[i]);
        }
        DivisorClass(c)
    }
}

impl std::ops::Sub for DivisorClass {
    type Output = DivisorClass;
    fn sub(self, rhs: DivisorClass) -> DivisorClass {
        self + rhs.scale(-1)
    }
}

impl std::ops::Neg for DivisorClass {
    type Output = DivisorClass;
    fn neg(self) -> DivisorClass {
        self.scale(-1)
    }
}

/// Intersection pairing `a0*b0 - sum_{i>=1} a_i*b_i`.
pub fn intersect(a: DivisorClass, b: DivisorClass) -> i64 {
    let mut s = linalg::mul(a.0[0], b.0[0]);
    for i in 1..10 {
        s = linalg::add(s, -linalg::mul(a.0[i], b.0[i]));
    }
    s
}

/// True iff `c` is a root class: `c.c = -2` and `c.K = 0`.
pub fn is_root(c: DivisorClass) -> bool {
    c.self_intersection() == -2 && intersect(c, DivisorClass::K) == 0
}

/// True iff `c` is numerically a (-1)-curve class: `c.c = c.K = -1`.
pub fn is_minus_one_class(c: DivisorClass) -> bool {
    c.self_intersection() == -1 && intersect(c, DivisorClass::K) == -1
}

/// Coordinates in the fixed root basis of a unimodular E8 complement of
/// the canonical class inside its orthogonal sublattice.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct E8Class(pub [i64; 8]);

impl E8Class {
    pub const ZERO: E8Class = E8Class([0; 8]);

    pub fn unit(i: usize) -> E8Class {
        let mut c = [0; 8];
        c[i] = 1;
        E8Class(c)
    }
}

impl std::ops::Neg for E8Class {
    type Output = E8Class;
    fn neg(self) -> E8Class {
        let mut c = [0; 8];
        for i in 0..8 {
            c[i] = -self.0[i];
        }
        E8Class(c)
    }
}

/// The fixed basis roots: `r1 = L - E1 - E2 - E3`, `r_i = E_{i-1} - E_i`
/// for i = 2..8. Together with K they form a basis of the orthogonal
/// complement of K.
pub fn basis_roots() -> [DivisorClass; 8] {
    let mut out = [DivisorClass::ZERO; 8];
    out[0] = DivisorClass([1, -1, -1, -1, 0, 0, 0, 0, 0, 0]);
    for i in 1..8 {
        let mut c = [0; 10];
        c[i] = 1;
        c[i + 1] = -1;
        out[i] = DivisorClass(c);
    }
    out
}

/// E8 Cartan matrix in the basis-root ordering: a chain r2-...-r8 with r1
/// attached to r4.
pub fn e8_cartan() -> Mat {
    let mut c = Mat::zeros(8, 8);
    for i in 0..8 {
        c[(i, i)] = 2;
    }
    let edges = [(0, 3), (1, 2), (2, 3), (3, 4), (4, 5), (5, 6), (6, 7)];
    for (a, b) in edges {
        c[(a, b)] = -1;
        c[(b, a)] = -1;
    }
    c
}

/// Negative-definite pairing on E8 coordinates (the negated Cartan form).
pub fn e8_gram(a: E8Class, b: E8Class) -> i64 {
    let c = e8_cartan();
    let mut s = 0i64;
    for i in 0..8 {
        for j in 0..8 {
            s = linalg::add(s, -linalg::mul(linalg::mul(a.0[i], c[(i, j)]), b.0[j]));
        }
    }
    s
}

/// Quotient projection onto the E8 lattice; kernel is exactly the span of
/// K. Rejects classes not orthogonal to K.
pub fn e8_project(c: DivisorClass) -> Result<E8Class, Error> {
    if intersect(c, DivisorClass::K) != 0 {
        return Err(Error::NotInKPerp(format!(
            "class {:?} has nonzero pairing with K",
            c.0
        )));
    }
    let roots = basis_roots();
    // pairings against the basis determine coordinates via the Cartan form
    let g: Vec<i64> = roots.iter().map(|&r| -intersect(c, r)).collect();
    let x = linalg::solve(&e8_cartan(), &g).expect("unimodular Cartan system must solve");
    let mut out = [0; 8];
    out.copy_from_slice(&x);
    Ok(E8Class(out))
}

/// A representative in the K-orthogonal sublattice projecting to `x`.
pub fn e8_lift(x: E8Class) -> DivisorClass {
    let roots = basis_roots();
    let mut c = DivisorClass::ZERO;
    for i in 0..8 {
        c = c + roots[i].scale(x.0[i]);
    }
    c
}

/// All 120 root pairs of E8, one representative per pair, as classes in
/// the K-orthogonal sublattice: `E_i - E_j` (i < j) and `L - Ei - Ej - Ek`.
pub fn root_pair_representatives() -> Vec<DivisorClass> {
    let mut out = Vec::with_capacity(120);
    for i in 1..=9 {
        for j in i + 1..=9 {
            out.push(DivisorClass::exceptional(i) - DivisorClass::exceptional(j));
        }
    }
    for i in 1..=9 {
        for j in i + 1..=9 {
            for k in j + 1..=9 {
                let c = DivisorClass::line()
                    - DivisorClass::exceptional(i)
                    - DivisorClass::exceptional(j)
                    - DivisorClass::exceptional(k);
                out.push(c);
            }
        }
    }
    debug_assert_eq!(out.len(), 120);
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn form_basics() {
        let l = DivisorClass::line();
        assert_eq!(intersect(l, l), 1);
        assert_eq!(intersect(DivisorClass::K, DivisorClass::K), 0);
        assert_eq!(intersect(DivisorClass::K, DivisorClass::exceptional(1)), -1);
    }

    #[test]
    fn root_and_minus_one_predicates() {
        let e1 = DivisorClass::exceptional(1);
        let e2 = DivisorClass::exceptional(2);
        assert!(is_root(e1 - e2));
        assert!(!is_root(e1));
        assert!(!is_root(-DivisorClass::K));
        assert!(is_minus_one_class(DivisorClass::exceptional(9)));
        assert!(is_minus_one_class(DivisorClass::line() - e1 - e2));
        assert!(!is_minus_one_class(DivisorClass::line()));
    }

    #[test]
    fn projection_kernel_and_basis() {
        assert_eq!(e8_project(DivisorClass::K).unwrap(), E8Class::ZERO);
        let roots = basis_roots();
        for (i, &r) in roots.iter().enumerate() {
            assert!(is_root(r));
            assert_eq!(e8_project(r).unwrap(), E8Class::unit(i));
        }
        assert!(e8_project(DivisorClass::exceptional(1)).is_err());
    }

    #[test]
    fn projection_preserves_pairing() {
        let e1 = DivisorClass::exceptional(1);
        let e2 = DivisorClass::exceptional(2);
        let p = e8_project(e1 - e2).unwrap();
        assert_eq!(e8_gram(p, p), -2);
    }

    #[test]
    fn projection_surjective() {
        // every unit vector has a preimage among integer combinations of
        // the basis roots, by construction of e8_lift
        for i in 0..8 {
            let x = E8Class::unit(i);
            let lift = e8_lift(x);
            assert_eq!(e8_project(lift).unwrap(), x);
        }
    }

    #[test]
    fn root_pairs_are_roots() {
        let reps = root_pair_representatives();
        assert_eq!(reps.len(), 120);
        for &c in &reps {
            assert!(is_root(c));
        }
        // distinct projections up to sign
        let mut seen = std::collections::HashSet::new();
        for &c in &reps {
            let p = e8_project(c).unwrap();
            assert!(seen.insert(p.0));
            assert!(!seen.contains(&(-p).0));
        }
    }

    fn arb_class() -> impl Strategy<Value = DivisorClass> {
        proptest::array::uniform10(-6i64..7).prop_map(DivisorClass)
    }

    proptest! {
        #[test]
        fn pairing_symmetric_bilinear(a in arb_class(), b in arb_class(), c in arb_class(), k in -4i64..5) {
            prop_assert_eq!(intersect(a, b), intersect(b, a));
            prop_assert_eq!(intersect(a + b, c), intersect(a, c) + intersect(b, c));
            prop_assert_eq!(intersect(a.scale(k), b), k * intersect(a, b));
        }

        #[test]
        fn projection_compatible_with_pairing(x in proptest::array::uniform8(-3i64..4), y in proptest::array::uniform8(-3i64..4)) {
            // for classes in the K-orthogonal sublattice the E8 pairing of
            // the projections equals the intersection pairing
            let a = e8_lift(E8Class(x));
            let b = e8_lift(E8Class(y)) + DivisorClass::K.scale(1);
            prop_assert_eq!(intersect(a, b), e8_gram(e8_project(a).unwrap(), e8_project(b).unwrap()));
        }
    }
}
