// SPDX-License-Identifier: Apache-2.0

use std::collections::BTreeMap;
use std::io::{self, BufRead, Write};
use std::sync::Arc;

use serde_json::{Map, Value};
use thiserror::Error;

use super::array::CellId;
use super::value::PortValue;

/// How much of a run is recorded.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum TraceMode {
    #[default]
    Full,
    /// Record only ticks divisible by the given period.
    Every(u64),
    Off,
}

impl TraceMode {
    pub(crate) fn records(self, tick: u64) -> bool {
        match self {
            TraceMode::Full => true,
            TraceMode::Every(k) => k > 0 && tick % k == 0,
            TraceMode::Off => false,
        }
    }
}

/// One active cell at one tick.
#[derive(Debug, Clone, PartialEq)]
pub struct TraceRecord {
    pub tick: u64,
    pub cell: CellId,
    pub state: Vec<(&'static str, PortValue)>,
    pub inputs: Vec<(Arc<str>, PortValue)>,
    pub outputs: Vec<(Arc<str>, PortValue)>,
}

impl TraceRecord {
    pub fn input(&self, name: &str) -> Option<PortValue> {
        self.inputs.iter().find(|(n, _)| **n == *name).map(|(_, v)| *v)
    }

    pub fn output(&self, name: &str) -> Option<PortValue> {
        self.outputs.iter().find(|(n, _)| **n == *name).map(|(_, v)| *v)
    }

    pub fn register(&self, name: &str) -> Option<PortValue> {
        self.state.iter().find(|(n, _)| *n == name).map(|(_, v)| *v)
    }

    pub fn to_json(&self) -> Value {
        fn obj<'a>(it: impl Iterator<Item = (&'a str, PortValue)>) -> Value {
            Value::Object(it.map(|(k, v)| (k.to_string(), v.to_json())).collect::<Map<_, _>>())
        }
        let mut m = Map::new();
        m.insert("tick".into(), Value::from(self.tick));
        m.insert("row".into(), Value::from(self.cell.row));
        m.insert("col".into(), Value::from(self.cell.col));
        m.insert("state".into(), obj(self.state.iter().map(|(k, v)| (*k, *v))));
        m.insert("in".into(), obj(self.inputs.iter().map(|(k, v)| (&**k, *v))));
        m.insert("out".into(), obj(self.outputs.iter().map(|(k, v)| (&**k, *v))));
        Value::Object(m)
    }
}

/// Records in tick order, cells in index order within a tick.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Trace {
    pub records: Vec<TraceRecord>,
}

impl Trace {
    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    pub fn append(&mut self, other: Trace) {
        self.records.extend(other.records);
    }

    /// Newline-delimited JSON, one object per (tick, cell).
    pub fn write_ndjson<W: Write>(&self, mut w: W) -> io::Result<()> {
        for r in &self.records {
            serde_json::to_writer(&mut w, &r.to_json())?;
            w.write_all(b"\n")?;
        }
        Ok(())
    }

    pub fn to_ndjson(&self) -> String {
        let mut buf = Vec::new();
        self.write_ndjson(&mut buf).expect("writing to a Vec cannot fail");
        String::from_utf8(buf).expect("serde_json emits UTF-8")
    }

    pub fn utilisation(&self) -> Utilisation {
        let mut u = Utilisation::default();
        for r in &self.records {
            u.observe(r.tick, r.cell);
        }
        u
    }
}

#[derive(Debug, Error)]
pub enum TraceParseError {
    #[error("line {line}: {msg}")]
    Malformed { line: usize, msg: String },
    #[error(transparent)]
    Io(#[from] io::Error),
}

/// Per-cell activity over the tick span covered by a trace.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Utilisation {
    pub first_tick: Option<u64>,
    pub last_tick: Option<u64>,
    pub active: BTreeMap<CellId, u64>,
}

impl Utilisation {
    fn observe(&mut self, tick: u64, cell: CellId) {
        self.first_tick = Some(self.first_tick.map_or(tick, |t| t.min(tick)));
        self.last_tick = Some(self.last_tick.map_or(tick, |t| t.max(tick)));
        *self.active.entry(cell).or_default() += 1;
    }

    /// Reads an NDJSON trace, needing only the tick/row/col fields.
    pub fn from_ndjson<R: BufRead>(r: R) -> Result<Self, TraceParseError> {
        let mut u = Utilisation::default();
        for (i, line) in r.lines().enumerate() {
            let line = line?;
            if line.trim().is_empty() {
                continue;
            }
            let bad = |msg: &str| TraceParseError::Malformed { line: i + 1, msg: msg.to_string() };
            let v: Value = serde_json::from_str(&line).map_err(|e| bad(&e.to_string()))?;
            let field = |k: &str| v.get(k).and_then(Value::as_u64).ok_or_else(|| bad(&format!("missing {k}")));
            let (tick, row, col) = (field("tick")?, field("row")?, field("col")?);
            u.observe(tick, CellId::new(row as usize, col as usize));
        }
        Ok(u)
    }

    pub fn span(&self) -> u64 {
        match (self.first_tick, self.last_tick) {
            (Some(a), Some(b)) => b - a + 1,
            _ => 0,
        }
    }

    /// Fraction of the span during which `cell` was active.
    pub fn fraction(&self, cell: CellId) -> f64 {
        let span = self.span();
        if span == 0 {
            return 0.0;
        }
        self.active.get(&cell).copied().unwrap_or(0) as f64 / span as f64
    }

    /// Mean fraction over the cells present in the trace.
    pub fn mean(&self) -> f64 {
        if self.active.is_empty() {
            return 0.0;
        }
        self.active.keys().map(|&c| self.fraction(c)).sum::<f64>() / self.active.len() as f64
    }
}
