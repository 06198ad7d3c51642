// SPDX-License-Identifier: Apache-2.0

use std::fmt;

use crate::gfield::{Field, FieldElement};

/// The payload carried by a port or reported as cell state.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub enum PortValue {
    #[default]
    Empty,
    Bit(bool),
    Field(FieldElement),
    Real(f64),
    Word(i64),
}

/// Payload kind, used to keep each port single-typed.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PortKind {
    Bit,
    Field,
    Real,
    Word,
}

impl fmt::Display for PortKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            PortKind::Bit => "bit",
            PortKind::Field => "field",
            PortKind::Real => "real",
            PortKind::Word => "word",
        };
        f.write_str(s)
    }
}

impl PortValue {
    pub fn kind(self) -> Option<PortKind> {
        match self {
            PortValue::Empty => None,
            PortValue::Bit(_) => Some(PortKind::Bit),
            PortValue::Field(_) => Some(PortKind::Field),
            PortValue::Real(_) => Some(PortKind::Real),
            PortValue::Word(_) => Some(PortKind::Word),
        }
    }

    pub fn is_empty(self) -> bool {
        matches!(self, PortValue::Empty)
    }

    /// Bit value; an empty port reads as 0.
    pub fn bit(self) -> bool {
        match self {
            PortValue::Bit(b) => b,
            PortValue::Empty => false,
            other => panic!("expected bit, found {other:?}"),
        }
    }

    /// Real value; an empty port reads as 0.0.
    pub fn real(self) -> f64 {
        match self {
            PortValue::Real(x) => x,
            PortValue::Empty => 0.0,
            other => panic!("expected real, found {other:?}"),
        }
    }

    /// Integer word; an empty port reads as 0.
    pub fn word(self) -> i64 {
        match self {
            PortValue::Word(w) => w,
            PortValue::Empty => 0,
            other => panic!("expected word, found {other:?}"),
        }
    }

    /// Field element; an empty port reads as zero of `field`.
    pub fn field(self, field: Field) -> FieldElement {
        match self {
            PortValue::Field(e) => e,
            PortValue::Empty => field.zero(),
            other => panic!("expected field element, found {other:?}"),
        }
    }

    /// JSON rendering used by trace export.
    pub fn to_json(self) -> serde_json::Value {
        use serde_json::Value;
        match self {
            PortValue::Empty => Value::Null,
            PortValue::Bit(b) => Value::from(u8::from(b)),
            PortValue::Field(e) => Value::from(e.value()),
            PortValue::Real(x) => serde_json::Number::from_f64(x).map_or(Value::Null, Value::Number),
            PortValue::Word(w) => Value::from(w),
        }
    }
}

impl From<bool> for PortValue {
    fn from(b: bool) -> Self {
        PortValue::Bit(b)
    }
}

impl From<FieldElement> for PortValue {
    fn from(e: FieldElement) -> Self {
        PortValue::Field(e)
    }
}

impl From<f64> for PortValue {
    fn from(x: f64) -> Self {
        PortValue::Real(x)
    }
}

impl From<i64> for PortValue {
    fn from(w: i64) -> Self {
        PortValue::Word(w)
    }
}
