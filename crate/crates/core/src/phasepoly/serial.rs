//! JSON form and text rendering of momentum polynomials.
//!
//! Text terms are printed from the highest momentum index down, e.g.
//! `c*p_r^2 - (2*s/r)*p_r*p_psi - (c/r^2)*p_psi^2 - 2*k*c/(s^2*r^2)`.
//! A single-term coefficient containing `/` is parenthesized before a momentum
//! factor; coefficients with several terms are always parenthesized.

use std::fmt;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::{Dims, MomentumIndex, PhasePoly};
use crate::diffring::{CoeffExpr, TermRecord};
use crate::error::Error;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MonomialRecord {
    pub pr: u32,
    pub ppsi: u32,
    pub pz: u32,
    pub coeff: Vec<TermRecord>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PolyRecord {
    pub dims: Dims,
    pub terms: Vec<MonomialRecord>,
}

impl From<&PhasePoly> for PolyRecord {
    fn from(p: &PhasePoly) -> Self {
        PolyRecord {
            dims: p.dims,
            terms: p
                .iter()
                .map(|(i, c)| MonomialRecord {
                    pr: i.pr,
                    ppsi: i.ppsi,
                    pz: i.pz,
                    coeff: c.records(),
                })
                .collect(),
        }
    }
}

impl TryFrom<&PolyRecord> for PhasePoly {
    type Error = Error;
    fn try_from(rec: &PolyRecord) -> Result<Self, Error> {
        let mut p = PhasePoly::zero(rec.dims);
        for t in &rec.terms {
            p.add_term(
                MomentumIndex::new(t.pr, t.ppsi, t.pz),
                CoeffExpr::from_records(&t.coeff)?,
            );
        }
        Ok(p)
    }
}

impl Serialize for PhasePoly {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        PolyRecord::from(self).serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for PhasePoly {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let rec = PolyRecord::deserialize(deserializer)?;
        PhasePoly::try_from(&rec).map_err(serde::de::Error::custom)
    }
}

impl PhasePoly {
    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("polynomials always serialize")
    }

    pub fn to_json_pretty(&self) -> String {
        serde_json::to_string_pretty(self).expect("polynomials always serialize")
    }
}

fn momentum_factors(i: &MomentumIndex) -> String {
    let mut parts = Vec::new();
    for (name, e) in [("p_r", i.pr), ("p_psi", i.ppsi), ("p_z", i.pz)] {
        match e {
            0 => {}
            1 => parts.push(name.to_string()),
            e => parts.push(format!("{name}^{e}")),
        }
    }
    parts.join("*")
}

impl fmt::Display for PhasePoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut pieces = Vec::with_capacity(self.len());
        for (idx, coeff) in self.iter().rev() {
            let m = momentum_factors(idx);
            let bodies = coeff.signed_bodies();
            if let [(neg, body)] = bodies.as_slice() {
                let piece = match (m.is_empty(), body.as_str()) {
                    (true, _) => body.clone(),
                    (false, "1") => m,
                    (false, b) if b.contains('/') => format!("({b})*{m}"),
                    (false, b) => format!("{b}*{m}"),
                };
                pieces.push((*neg, piece));
            } else if m.is_empty() {
                pieces.push((false, format!("({coeff})")));
            } else {
                pieces.push((false, format!("({coeff})*{m}")));
            }
        }
        f.write_str(&crate::diffring::join_signed(&pieces))
    }
}
