//! Integer Heisenberg group, the unbounded-cocycle control model.

use serde::Serialize;

use super::{stable_digest, Generator, GroupModel};

/// `(x1,y1,z1)(x2,y2,z2) = (x1+x2, y1+y2, z1+z2+x1*y2)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub struct HeisenbergElement {
    pub x: i64,
    pub y: i64,
    pub z: i64,
}

impl HeisenbergElement {
    pub const fn new(x: i64, y: i64, z: i64) -> Self {
        HeisenbergElement { x, y, z }
    }
}

/// Generated by `a = (1,0,0)` and `b = (0,1,0)`; `[a, b] = (0,0,1)`.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct Heisenberg;

impl GroupModel for Heisenberg {
    type Element = HeisenbergElement;

    fn name(&self) -> String {
        "heisenberg".into()
    }

    fn identity(&self) -> HeisenbergElement {
        HeisenbergElement::new(0, 0, 0)
    }

    fn mul(&self, a: &HeisenbergElement, b: &HeisenbergElement) -> HeisenbergElement {
        HeisenbergElement::new(a.x + b.x, a.y + b.y, a.z + b.z + a.x * b.y)
    }

    fn inv(&self, a: &HeisenbergElement) -> HeisenbergElement {
        HeisenbergElement::new(-a.x, -a.y, a.x * a.y - a.z)
    }

    fn eq(&self, a: &HeisenbergElement, b: &HeisenbergElement) -> bool {
        a == b
    }

    fn digest(&self, a: &HeisenbergElement) -> u64 {
        let mut bytes = [0u8; 24];
        bytes[..8].copy_from_slice(&a.x.to_le_bytes());
        bytes[8..16].copy_from_slice(&a.y.to_le_bytes());
        bytes[16..].copy_from_slice(&a.z.to_le_bytes());
        stable_digest(&bytes)
    }

    fn generators(&self) -> Vec<Generator<HeisenbergElement>> {
        vec![
            Generator::new("a", HeisenbergElement::new(1, 0, 0)),
            Generator::new("A", HeisenbergElement::new(-1, 0, 0)),
            Generator::new("b", HeisenbergElement::new(0, 1, 0)),
            Generator::new("B", HeisenbergElement::new(0, -1, 0)),
        ]
    }

    fn format(&self, a: &HeisenbergElement) -> String {
        format!("({},{},{})", a.x, a.y, a.z)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::groups::commutator;

    #[test]
    fn commutator_of_generators() {
        let h = Heisenberg;
        let a = HeisenbergElement::new(1, 0, 0);
        let b = HeisenbergElement::new(0, 1, 0);
        assert_eq!(commutator(&h, &a, &b), HeisenbergElement::new(0, 0, 1));
        let z = HeisenbergElement::new(0, 0, 1);
        for e in [a, b, HeisenbergElement::new(3, -2, 7)] {
            assert_eq!(h.mul(&z, &e), h.mul(&e, &z));
        }
    }
}
