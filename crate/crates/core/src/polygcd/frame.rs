// SPDX-License-Identifier: Apache-2.0

use super::{PolyGcdError, Variant};
use crate::gfield::{FieldElement, FieldPoly};

/// One slot of a frame: what enters cell 0 on each line during one tick.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Slot {
    pub a: FieldElement,
    pub b: FieldElement,
    pub start: bool,
    pub stop: bool,
    pub sig: bool,
    pub d: i64,
}

/// A pair of polynomials laid out high degree first, leading terms in
/// slot 0.
///
/// For [`Variant::Fig4`] the frame has `max(deg A, deg B) + 1` slots and
/// slot 0 carries `d = deg A - deg B`. For [`Variant::AppA`] A has the
/// larger degree (the encoder swaps if needed), the frame has `deg A + 2`
/// slots with `stop` on a trailing zero slot, and `sig` is set on slot
/// `deg A - deg B`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PolyStreamFrame {
    pub variant: Variant,
    pub slots: Vec<Slot>,
    pub deg_a: isize,
    pub deg_b: isize,
    pub swapped: bool,
}

impl PolyStreamFrame {
    pub fn len(&self) -> usize {
        self.slots.len()
    }

    pub fn is_empty(&self) -> bool {
        self.slots.is_empty()
    }

    pub fn a_values(&self) -> Vec<u32> {
        self.slots.iter().map(|s| s.a.value()).collect()
    }

    pub fn b_values(&self) -> Vec<u32> {
        self.slots.iter().map(|s| s.b.value()).collect()
    }
}

/// Coefficient `deg - t` of `p`, or zero when out of range.
fn high_first(p: &FieldPoly, t: usize) -> FieldElement {
    let deg = p.degree();
    let i = deg - t as isize;
    if i < 0 {
        p.field().zero()
    } else {
        p.coeff(i as usize)
    }
}

pub fn encode_frame(a: &FieldPoly, b: &FieldPoly, variant: Variant) -> Result<PolyStreamFrame, PolyGcdError> {
    if a.is_zero() && b.is_zero() {
        return Err(PolyGcdError::BothZero);
    }
    if a.x_order().unwrap_or(usize::MAX) > 0 && b.x_order().unwrap_or(usize::MAX) > 0 {
        return Err(PolyGcdError::CommonXFactor);
    }
    let blank = |t: usize| Slot {
        a: high_first(a, t),
        b: high_first(b, t),
        start: t == 0,
        stop: false,
        sig: false,
        d: 0,
    };
    match variant {
        Variant::Fig4 => {
            let len = a.degree().max(b.degree()) as usize + 1;
            let mut slots: Vec<Slot> = (0..len).map(blank).collect();
            slots[0].d = (a.degree() - b.degree()) as i64;
            Ok(PolyStreamFrame { variant, slots, deg_a: a.degree(), deg_b: b.degree(), swapped: false })
        }
        Variant::AppA => {
            let swapped = b.degree() > a.degree();
            let (a, b) = if swapped { (b, a) } else { (a, b) };
            let n = a.degree() as usize;
            let d = (a.degree() - b.degree()) as usize;
            let len = n + 2;
            let slots = (0..len)
                .map(|t| Slot {
                    a: high_first(a, t),
                    b: high_first(b, t),
                    start: t == 0,
                    stop: t == len - 1,
                    sig: t == d,
                    d: 0,
                })
                .collect();
            Ok(PolyStreamFrame { variant, slots, deg_a: a.degree(), deg_b: b.degree(), swapped })
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gfield::Field;

    #[test]
    fn fig4_layout() {
        let f2 = Field::new(2).unwrap();
        let fr = encode_frame(&FieldPoly::from_ints(f2, &[1, 1]), &FieldPoly::from_ints(f2, &[1]), Variant::Fig4).unwrap();
        assert_eq!(fr.a_values(), vec![1, 1]);
        assert_eq!(fr.b_values(), vec![1, 0]);
        assert!(fr.slots[0].start && !fr.slots[1].start);
        assert_eq!(fr.slots[0].d, 1);

        let one = FieldPoly::from_ints(f2, &[1]);
        let fr = encode_frame(&one, &one, Variant::Fig4).unwrap();
        assert_eq!(fr.len(), 1);
        assert_eq!(fr.slots[0].d, 0);

        let z = FieldPoly::zero(f2);
        assert_eq!(encode_frame(&z, &z, Variant::Fig4), Err(PolyGcdError::BothZero));
    }

    #[test]
    fn appa_layout_swaps_and_marks() {
        let f7 = Field::new(7).unwrap();
        let a = FieldPoly::from_ints(f7, &[1, 2]);
        let b = FieldPoly::from_ints(f7, &[3, 4, 5, 6]);
        let fr = encode_frame(&a, &b, Variant::AppA).unwrap();
        assert!(fr.swapped);
        assert_eq!(fr.a_values(), vec![6, 5, 4, 3, 0]);
        assert_eq!(fr.b_values(), vec![2, 1, 0, 0, 0]);
        let sig: Vec<bool> = fr.slots.iter().map(|s| s.sig).collect();
        assert_eq!(sig, vec![false, false, true, false, false]);
        assert!(fr.slots[4].stop);
    }

    #[test]
    fn common_x_rejected() {
        let f7 = Field::new(7).unwrap();
        let a = FieldPoly::from_ints(f7, &[0, 1]);
        let b = FieldPoly::from_ints(f7, &[0, 0, 1]);
        assert_eq!(encode_frame(&a, &b, Variant::Fig4), Err(PolyGcdError::CommonXFactor));
    }
}
