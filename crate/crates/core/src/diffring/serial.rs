//! JSON term records and the text rendering of coefficients.
//!
//! Text grammar: a coefficient is a signed sum of products. Factors are
//! `k`, `c`, `s`, `z`, `r`, `F<d>`, `G<d>`, optionally raised with `^<n>`,
//! joined by `*`. Negative powers move below a single `/`; a denominator with
//! more than one factor is parenthesized, e.g. `2*k*c/(s^2*r^2)`.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Signed};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::{CoeffExpr, CoeffTerm, Jet, JetKind, Jets, Monomial, Rational};
use crate::error::Error;

/// Wire form of one coefficient term.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TermRecord {
    pub q: String,
    pub k: u32,
    pub r: i32,
    pub z: u32,
    pub s: i32,
    pub c: u32,
    pub jets: BTreeMap<String, u32>,
}

impl From<&CoeffTerm> for TermRecord {
    fn from(t: &CoeffTerm) -> Self {
        TermRecord {
            q: t.q.to_string(),
            k: t.mono.k,
            r: t.mono.r,
            z: t.mono.z,
            s: t.mono.s,
            c: t.mono.c,
            jets: t
                .mono
                .jets
                .iter()
                .map(|(j, n)| (j.to_string(), n))
                .collect(),
        }
    }
}

impl TryFrom<&TermRecord> for CoeffTerm {
    type Error = Error;

    fn try_from(rec: &TermRecord) -> Result<Self, Error> {
        let q: Rational = rec
            .q
            .parse()
            .map_err(|_| Error::Parse(format!("bad rational `{}`", rec.q)))?;
        let mut jets = Jets::new();
        for (name, &n) in &rec.jets {
            jets.insert(parse_jet(name)?, n);
        }
        Ok(CoeffTerm::new(
            q,
            Monomial {
                k: rec.k,
                r: rec.r,
                z: rec.z,
                s: rec.s,
                c: rec.c,
                jets,
            },
        ))
    }
}

fn parse_jet(name: &str) -> Result<Jet, Error> {
    let bad = || Error::Parse(format!("bad jet name `{name}`"));
    let kind = match name.chars().next() {
        Some('F') => JetKind::F,
        Some('G') => JetKind::G,
        _ => return Err(bad()),
    };
    let order = name[1..].parse::<u32>().map_err(|_| bad())?;
    Ok(Jet { kind, order })
}

impl CoeffExpr {
    pub fn records(&self) -> Vec<TermRecord> {
        self.to_terms().iter().map(TermRecord::from).collect()
    }

    pub fn from_records(records: &[TermRecord]) -> Result<Self, Error> {
        let terms = records
            .iter()
            .map(CoeffTerm::try_from)
            .collect::<Result<Vec<_>, _>>()?;
        Ok(CoeffExpr::canonicalize(terms))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("term records always serialize")
    }

    /// `(negative, body)` for each term, in canonical order.
    pub(crate) fn signed_bodies(&self) -> Vec<(bool, String)> {
        self.iter()
            .map(|(m, q)| (q.is_negative(), term_body(&q.abs(), m)))
            .collect()
    }
}

impl Serialize for CoeffExpr {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        self.records().serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for CoeffExpr {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let records = Vec::<TermRecord>::deserialize(deserializer)?;
        CoeffExpr::from_records(&records).map_err(serde::de::Error::custom)
    }
}

fn factor(name: &str, e: i64) -> String {
    if e == 1 {
        name.to_string()
    } else {
        format!("{name}^{e}")
    }
}

/// Renders `q * mono` for a nonnegative `q`.
fn term_body(q: &Rational, m: &Monomial) -> String {
    let mut numer = Vec::new();
    let mut denom = Vec::new();
    if !q.numer().is_one() {
        numer.push(q.numer().to_string());
    }
    if *q.denom() != BigInt::one() {
        denom.push(q.denom().to_string());
    }
    let mut place = |name: &str, e: i64| match e {
        0 => {}
        e if e > 0 => numer.push(factor(name, e)),
        e => denom.push(factor(name, -e)),
    };
    place("k", m.k as i64);
    place("c", m.c as i64);
    place("s", m.s as i64);
    place("z", m.z as i64);
    place("r", m.r as i64);
    for (j, n) in m.jets.iter() {
        place(&j.to_string(), n as i64);
    }
    let top = if numer.is_empty() {
        "1".to_string()
    } else {
        numer.join("*")
    };
    match denom.len() {
        0 => top,
        1 => format!("{top}/{}", denom[0]),
        _ => format!("{top}/({})", denom.join("*")),
    }
}

pub(crate) fn join_signed(pieces: &[(bool, String)]) -> String {
    if pieces.is_empty() {
        return "0".into();
    }
    let mut out = String::new();
    for (i, (neg, body)) in pieces.iter().enumerate() {
        match (i, neg) {
            (0, true) => out.push('-'),
            (0, false) => {}
            (_, true) => out.push_str(" - "),
            (_, false) => out.push_str(" + "),
        }
        out.push_str(body);
    }
    out
}

impl fmt::Display for CoeffExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&join_signed(&self.signed_bodies()))
    }
}
