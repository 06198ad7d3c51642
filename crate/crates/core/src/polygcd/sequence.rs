// SPDX-License-Identifier: Apache-2.0
//! Serial form of the GCD-preserving reductions the arrays implement.

use crate::gfield::{FieldError, FieldPoly};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TransformKind {
    /// `A := A - q x^d B`, used when `deg A >= deg B`.
    ReduceA,
    /// `B := B - q x^d A`, used when `deg A < deg B`.
    ReduceB,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Transformation {
    pub kind: TransformKind,
    pub a: FieldPoly,
    pub b: FieldPoly,
    /// Drop in `deg A + deg B`, counting the zero polynomial as degree -1.
    pub reduction: usize,
}

/// `A - (a_i / b_j) x^(i-j) B`. Requires nonzero B and `deg A >= deg B`.
pub fn apply_ra(a: &FieldPoly, b: &FieldPoly) -> Result<FieldPoly, FieldError> {
    let (i, j) = (a.degree(), b.degree());
    assert!(j >= 0 && i >= j, "R_A needs deg A >= deg B >= 0");
    let q = a.leading().unwrap().checked_div(b.leading().unwrap())?;
    Ok(a.sub(&FieldPoly::monomial(q, (i - j) as usize).mul(b)))
}

/// `B - (b_j / a_i) x^(j-i) A`. Requires nonzero A and `deg B > deg A`.
pub fn apply_rb(a: &FieldPoly, b: &FieldPoly) -> Result<FieldPoly, FieldError> {
    let (i, j) = (a.degree(), b.degree());
    assert!(i >= 0 && j > i, "R_B needs deg B > deg A >= 0");
    let q = b.leading().unwrap().checked_div(a.leading().unwrap())?;
    Ok(b.sub(&FieldPoly::monomial(q, (j - i) as usize).mul(a)))
}

/// The unique sequence of reductions that takes (A, B) to a pair with one
/// zero member.
pub fn transformation_sequence(a: &FieldPoly, b: &FieldPoly) -> Result<Vec<Transformation>, FieldError> {
    let (mut a, mut b) = (a.clone(), b.clone());
    let mut seq = Vec::new();
    while !a.is_zero() && !b.is_zero() {
        let before = a.degree() + b.degree();
        let kind = if a.degree() >= b.degree() {
            a = apply_ra(&a, &b)?;
            TransformKind::ReduceA
        } else {
            b = apply_rb(&a, &b)?;
            TransformKind::ReduceB
        };
        let reduction = (before - a.degree() - b.degree()) as usize;
        seq.push(Transformation { kind, a: a.clone(), b: b.clone(), reduction });
    }
    Ok(seq)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gfield::Field;

    #[test]
    fn reductions_lower_degree() {
        let f = Field::new(7).unwrap();
        let a = FieldPoly::from_ints(f, &[6, 5, 1]);
        let b = FieldPoly::from_ints(f, &[3, 0, 1]);
        let r = apply_ra(&a, &b).unwrap();
        assert!(r.degree() < a.degree());
        let seq = transformation_sequence(&a, &b).unwrap();
        let total: usize = seq.iter().map(|t| t.reduction).sum();
        assert!(total <= 5);
        let last = seq.last().unwrap();
        let survivor = if last.a.is_zero() { &last.b } else { &last.a };
        assert_eq!(survivor.monic(), FieldPoly::from_ints(f, &[2, 1]));
    }
}
