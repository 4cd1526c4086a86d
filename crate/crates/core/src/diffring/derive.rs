use num_traits::One;

use super::{int, CoeffExpr, Jet, JetKind, Monomial, Rational};

impl CoeffExpr {
    /// Derivative in psi, with `s = sin(lambda*psi + psi0)` and
    /// `c = cos(lambda*psi + psi0)`: `s' = lambda c`, `c' = -lambda s`,
    /// `F_d' = F_{d+1}`, `G_d' = G_{d+1}`.
    pub fn d_psi(&self, lambda: u32) -> CoeffExpr {
        let lam = int(lambda as i64);
        let mut out = CoeffExpr::zero();
        for (m, q) in self.iter() {
            if m.s != 0 && lambda != 0 {
                let mono = Monomial {
                    s: m.s - 1,
                    c: m.c + 1,
                    ..m.clone()
                };
                out.push(q * &lam * int(m.s as i64), mono);
            }
            if m.c == 1 && lambda != 0 {
                let mono = Monomial {
                    s: m.s + 1,
                    c: 0,
                    ..m.clone()
                };
                out.push(-(q * &lam), mono);
            }
            for (jet, n) in m.jets.iter() {
                let mut jets = m.jets.clone();
                jets.remove_one(jet);
                jets.insert(jet.shifted(), 1);
                let mono = Monomial { jets, ..m.clone() };
                out.push(q * int(n as i64), mono);
            }
        }
        out
    }

    pub fn d_r(&self) -> CoeffExpr {
        let mut out = CoeffExpr::zero();
        for (m, q) in self.iter() {
            if m.r != 0 {
                let mono = Monomial {
                    r: m.r - 1,
                    ..m.clone()
                };
                out.push(q * int(m.r as i64), mono);
            }
        }
        out
    }

    pub fn d_z(&self) -> CoeffExpr {
        let mut out = CoeffExpr::zero();
        for (m, q) in self.iter() {
            if m.z != 0 {
                let mono = Monomial {
                    z: m.z - 1,
                    ..m.clone()
                };
                out.push(q * int(m.z as i64), mono);
            }
        }
        out
    }

    /// Replaces `F_d` by the d-th psi-derivative of `k s^-2` and `G_d` by the
    /// d-th derivative of `c`.
    pub fn specialize_jets(&self, lambda: u32) -> CoeffExpr {
        if self.is_jet_free() {
            return self.clone();
        }
        let max_order = self
            .iter()
            .flat_map(|(m, _)| m.jets.iter().map(|(j, _)| j.order))
            .max()
            .unwrap_or(0);
        let f_series = derivative_series(&sine_potential(), lambda, max_order);
        let g_series = derivative_series(&CoeffExpr::c(), lambda, max_order);

        let mut out = CoeffExpr::zero();
        for (m, q) in self.iter() {
            let base = Monomial {
                jets: Default::default(),
                ..m.clone()
            };
            let mut term = CoeffExpr::term(q.clone(), base);
            for (jet, n) in m.jets.iter() {
                let sub = match jet.kind {
                    JetKind::F => &f_series[jet.order as usize],
                    JetKind::G => &g_series[jet.order as usize],
                };
                term = &term * &sub.pow(n);
            }
            out += &term;
        }
        out
    }

    /// Substitutes a concrete jet-free expression for every `F_d` (with its
    /// derivatives) and leaves G-jets alone.
    pub fn substitute_f(&self, f: &CoeffExpr, lambda: u32) -> CoeffExpr {
        let max_order = self
            .iter()
            .flat_map(|(m, _)| {
                m.jets
                    .iter()
                    .filter(|(j, _)| j.kind == JetKind::F)
                    .map(|(j, _)| j.order)
            })
            .max();
        let Some(max_order) = max_order else {
            return self.clone();
        };
        let series = derivative_series(f, lambda, max_order);
        let mut out = CoeffExpr::zero();
        for (m, q) in self.iter() {
            let mut jets = m.jets.clone();
            let mut factors = Vec::new();
            for (jet, n) in m.jets.iter().filter(|(j, _)| j.kind == JetKind::F) {
                for _ in 0..n {
                    jets.remove_one(jet);
                }
                factors.push((jet.order, n));
            }
            let mut term = CoeffExpr::term(q.clone(), Monomial { jets, ..m.clone() });
            for (order, n) in factors {
                term = &term * &series[order as usize].pow(n);
            }
            out += &term;
        }
        out
    }

    /// Flips the sign of every term under `(s, c) -> (-s, -c)`.
    pub fn reflect(&self) -> CoeffExpr {
        self.map_signs(|m| (m.s + m.c as i32).rem_euclid(2) == 1)
    }
}

/// `k / s^2`, the angular potential written in the ring.
pub fn sine_potential() -> CoeffExpr {
    CoeffExpr::term(
        Rational::one(),
        Monomial {
            k: 1,
            s: -2,
            ..Monomial::one()
        },
    )
}

/// The first psi-derivative of [`sine_potential`], `-2 lambda k c s^-3`.
pub fn sine_potential_dot(lambda: u32) -> CoeffExpr {
    sine_potential().d_psi(lambda)
}

/// `[e, e', e'', ...]` up to order `n` inclusive.
pub fn derivative_series(e: &CoeffExpr, lambda: u32, n: u32) -> Vec<CoeffExpr> {
    let mut out = Vec::with_capacity(n as usize + 1);
    out.push(e.clone());
    for i in 0..n as usize {
        let next = out[i].d_psi(lambda);
        out.push(next);
    }
    out
}

pub fn jet_f(order: u32) -> CoeffExpr {
    CoeffExpr::jet(Jet::f(order))
}

pub fn jet_g(order: u32) -> CoeffExpr {
    CoeffExpr::jet(Jet::g(order))
}
