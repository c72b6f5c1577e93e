//! Truncated q-series for the charged û(1) part, the ℤ₃ parafermion coset
//! characters and the full chiral partition functions.
//!
//! Series carry exact rational q-exponents and an optional charge variable
//! y = e^{2πiζ} with rational exponents. The analytic prefactors CZ/η(τ) of
//! the û(1) partition function are not included; [`eta_series`] is provided
//! separately.

use std::collections::BTreeMap;

use num_rational::Rational64;
use num_traits::{ToPrimitive, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::fusion::Label;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CharError {
    #[error("truncation order must be positive")]
    Order,
    #[error("sigma must be 0, 1 or 2, got {0}")]
    Sigma(u8),
    #[error("sector (l = {l}, rho = {rho}) violates l - rho <= rho")]
    Restriction { l: i64, rho: i64 },
}

type Coeffs = BTreeMap<Rational64, i64>;

/// Σ c_{e,k} q^e y^k, exact for every q-exponent below `cutoff`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct QSeries {
    terms: BTreeMap<Rational64, Coeffs>,
    cutoff: Rational64,
}

/// One row of a printed series.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SeriesTerm {
    pub q_exponent: String,
    pub y_exponent: String,
    pub coefficient: i64,
}

fn r(n: i64, d: i64) -> Rational64 {
    Rational64::new(n, d)
}

impl QSeries {
    pub fn zero(cutoff: Rational64) -> Self {
        Self { terms: BTreeMap::new(), cutoff }
    }

    /// Single monomial c·q^e·y^k.
    pub fn monomial(e: Rational64, k: Rational64, c: i64, cutoff: Rational64) -> Self {
        let mut s = Self::zero(cutoff);
        s.add_term(e, k, c);
        s
    }

    fn add_term(&mut self, e: Rational64, k: Rational64, c: i64) {
        if c == 0 || e >= self.cutoff {
            return;
        }
        let row = self.terms.entry(e).or_default();
        let v = row.entry(k).or_insert(0);
        *v += c;
        if *v == 0 {
            row.remove(&k);
            if row.is_empty() {
                self.terms.remove(&e);
            }
        }
    }

    pub fn cutoff(&self) -> Rational64 {
        self.cutoff
    }

    pub fn leading_exponent(&self) -> Option<Rational64> {
        self.terms.keys().next().copied()
    }

    pub fn coefficient(&self, e: Rational64, k: Rational64) -> i64 {
        self.terms.get(&e).and_then(|row| row.get(&k)).copied().unwrap_or(0)
    }

    /// Coefficients with y set to 1.
    pub fn at_y_one(&self) -> BTreeMap<Rational64, i64> {
        self.terms.iter().map(|(e, row)| (*e, row.values().sum())).filter(|(_, c)| *c != 0).collect()
    }

    pub fn iter(&self) -> impl Iterator<Item = (Rational64, Rational64, i64)> + '_ {
        self.terms.iter().flat_map(|(e, row)| row.iter().map(move |(k, c)| (*e, *k, *c)))
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn rows(&self) -> Vec<SeriesTerm> {
        self.iter()
            .map(|(e, k, c)| SeriesTerm { q_exponent: e.to_string(), y_exponent: k.to_string(), coefficient: c })
            .collect()
    }

    /// Drops everything at or above `cutoff` (never raises it).
    pub fn truncate(mut self, cutoff: Rational64) -> Self {
        if cutoff < self.cutoff {
            self.cutoff = cutoff;
            drop(self.terms.split_off(&cutoff));
        }
        self
    }

    pub fn add(&self, rhs: &Self) -> Self {
        let mut out = Self::zero(self.cutoff.min(rhs.cutoff));
        for s in [self, rhs] {
            for (e, k, c) in s.iter() {
                out.add_term(e, k, c);
            }
        }
        out
    }

    /// Product, exact below min(cut_a + lead_b, lead_a + cut_b).
    pub fn mul(&self, rhs: &Self) -> Self {
        let (Some(la), Some(lb)) = (self.leading_exponent(), rhs.leading_exponent()) else {
            return Self::zero(self.cutoff.min(rhs.cutoff));
        };
        let cut = (self.cutoff + lb).min(la + rhs.cutoff);
        let mut out = Self::zero(cut);
        for (e1, k1, c1) in self.iter() {
            if e1 + lb >= cut {
                break;
            }
            for (e2, k2, c2) in rhs.iter() {
                if e1 + e2 >= cut {
                    break;
                }
                out.add_term(e1 + e2, k1 + k2, c1 * c2);
            }
        }
        out
    }

    /// y → y^n.
    pub fn scale_y(&self, n: i64) -> Self {
        let mut out = Self::zero(self.cutoff);
        for (e, k, c) in self.iter() {
            out.add_term(e, k * Rational64::from_integer(n), c);
        }
        out
    }

    /// Numerical value at real 0 < q < 1, y = 1.
    pub fn eval_real(&self, q: f64) -> f64 {
        self.at_y_one()
            .iter()
            .map(|(e, c)| *c as f64 * q.powf(e.to_f64().unwrap_or(f64::NAN)))
            .sum()
    }
}

fn check_order(order: Rational64) -> Result<(), CharError> {
    if order <= Rational64::zero() {
        return Err(CharError::Order);
    }
    Ok(())
}

/// Σ_n q^{(m/2)(n + l/m)²} y^{n + l/m}, kept below leading + order.
pub fn k_function(l: i64, m: i64, order: Rational64) -> Result<QSeries, CharError> {
    check_order(order)?;
    let m_r = Rational64::from_integer(m);
    let exp = |n: i64| {
        let x = Rational64::from_integer(n) + r(l, m);
        (m_r / 2 * x * x, x)
    };
    // the exponent is a convex parabola in n; its minimum sits at n ≈ −l/m
    let center = (-(l as f64) / m as f64).round() as i64;
    let lead = (center - 2..=center + 2).map(|n| exp(n).0).min().expect("non-empty");
    let cutoff = lead + order;
    let mut s = QSeries::zero(cutoff);
    for dir in [1i64, -1] {
        let mut n = if dir == 1 { center } else { center - 1 };
        loop {
            let (e, k) = exp(n);
            if e >= cutoff && (n - center).abs() > 2 {
                break;
            }
            s.add_term(e, k, 1);
            n += dir;
        }
    }
    Ok(s)
}

/// 1/(q)_m = Σ p_{≤m}(k) q^k for k < limit.
fn inverse_q_pochhammer(m: u64, limit: usize) -> Vec<i64> {
    let mut s = vec![0i64; limit];
    if limit > 0 {
        s[0] = 1;
    }
    for j in 1..=m as usize {
        for k in j..limit {
            s[k] += s[k - j];
        }
    }
    s
}

/// Δ^PF(σ) = σ(3 − σ)/30.
pub fn delta_pf(sigma: u8) -> Rational64 {
    r(i64::from(sigma) * (3 - i64::from(sigma)), 30)
}

/// m·C⁻¹·(m − Λ_σ) for the su(3) inverse Cartan matrix.
pub fn quadratic_form(m1: i64, m2: i64, sigma: u8) -> Rational64 {
    let (l1, l2) = match sigma {
        1 => (1, 0),
        2 => (0, 1),
        _ => (0, 0),
    };
    let (a, b) = (m1 - l1, m2 - l2);
    // C⁻¹ = [[2, 1], [1, 2]] / 3
    r(m1 * (2 * a + b) + m2 * (a + 2 * b), 3)
}

/// ch_{σ,Q} with all terms below leading + order.
pub fn parafermion_char(sigma: u8, q_charge: u8, order: Rational64) -> Result<QSeries, CharError> {
    check_order(order)?;
    if sigma > 2 {
        return Err(CharError::Sigma(sigma));
    }
    let pre = delta_pf(sigma) - r(1, 30);
    let admissible = |m1: i64, m2: i64| (m1 + 2 * m2 - i64::from(q_charge)).rem_euclid(3) == 0;
    // the quadratic form is ≥ |m|²/3 − (√5/3)|m|, so the box below covers every
    // m whose exponent can fall under the window
    let lead = (0..3)
        .flat_map(|a| (0..3).map(move |b| (a, b)))
        .filter(|&(a, b)| admissible(a, b))
        .map(|(a, b)| quadratic_form(a, b, sigma))
        .min()
        .expect("some residue in a 3x3 box");
    let window = (lead + order).to_f64().unwrap_or(f64::MAX);
    let s5 = 5f64.sqrt();
    let bound = ((s5 + (5.0 + 12.0 * window.max(0.0)).sqrt()) / 2.0).ceil() as i64 + 1;
    let cutoff = pre + lead + order;
    let limit = order.ceil().to_integer().max(0) as usize + 1;
    let mut s = QSeries::zero(cutoff);
    for m1 in 0..=bound {
        for m2 in 0..=bound {
            if !admissible(m1, m2) {
                continue;
            }
            let base = pre + quadratic_form(m1, m2, sigma);
            if base >= cutoff {
                continue;
            }
            let a = inverse_q_pochhammer(m1 as u64, limit);
            let b = inverse_q_pochhammer(m2 as u64, limit);
            for (i, &x) in a.iter().enumerate() {
                for (j, &y) in b.iter().enumerate() {
                    let e = base + Rational64::from_integer((i + j) as i64);
                    if e >= cutoff {
                        break;
                    }
                    s.add_term(e, Rational64::zero(), x * y);
                }
            }
        }
    }
    Ok(s)
}

/// Coset weight (μ, ν) with the (σ, Q) labels.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct CosetWeight {
    pub mu: u8,
    pub nu: u8,
}

impl CosetWeight {
    /// Reduces indices mod 3 and orders them so that μ ≤ ν.
    pub fn from_indices(a: i64, b: i64) -> Self {
        let (a, b) = (a.rem_euclid(3) as u8, b.rem_euclid(3) as u8);
        Self { mu: a.min(b), nu: a.max(b) }
    }

    pub fn from_sigma_q(sigma: u8, q: u8) -> Self {
        Self { mu: q - sigma, nu: q }
    }

    pub fn sigma(&self) -> u8 {
        self.nu - self.mu
    }

    pub fn q(&self) -> u8 {
        self.nu
    }

    pub fn label(&self) -> Label {
        Label::from_weight(self.mu, self.nu).expect("0 <= mu <= nu <= 2")
    }
}

/// One summand K_{l+5s}(τ, 3ζ; 15)·ch(Λ_a + Λ_b).
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FullSummand {
    pub s: u8,
    pub k_index: i64,
    pub weight: CosetWeight,
}

/// Summand structure of χ_{l,ρ}; the restriction is applied to residues.
pub fn full_character_summands(l: i64, rho: i64) -> Result<Vec<FullSummand>, CharError> {
    if (l - rho).rem_euclid(3) > rho.rem_euclid(3) {
        return Err(CharError::Restriction { l, rho });
    }
    Ok((0..3u8)
        .map(|s| {
            let si = i64::from(s);
            FullSummand { s, k_index: l + 5 * si, weight: CosetWeight::from_indices(l - rho + si, rho + si) }
        })
        .collect())
}

/// χ_{l,ρ} truncated to leading + order.
pub fn full_character(l: i64, rho: i64, order: Rational64) -> Result<QSeries, CharError> {
    check_order(order)?;
    let parts = full_character_summands(l, rho)?;
    // each product is exact to its own leading + order; the sum is cut at
    // the overall leading exponent + order
    let mut acc: Option<QSeries> = None;
    let mut lead: Option<Rational64> = None;
    let mut products = Vec::new();
    for p in &parts {
        let k = k_function(p.k_index, 15, order)?.scale_y(3);
        let ch = parafermion_char(p.weight.sigma(), p.weight.q(), order)?;
        let prod = k.mul(&ch);
        if let Some(e) = prod.leading_exponent() {
            lead = Some(lead.map_or(e, |x: Rational64| x.min(e)));
        }
        products.push(prod);
    }
    let lead = lead.unwrap_or_else(Rational64::zero);
    for p in products {
        let p = p.truncate(lead + order);
        acc = Some(match acc {
            Some(a) => a.add(&p),
            None => p,
        });
    }
    let out = acc.expect("three summands");
    debug_assert!(out.cutoff() >= lead + order);
    Ok(out.truncate(lead + order))
}

/// η(τ) = q^{1/24} Π_{n≥1} (1 − qⁿ), kept below 1/24 + order.
pub fn eta_series(order: Rational64) -> Result<QSeries, CharError> {
    check_order(order)?;
    let limit = order.ceil().to_integer() as usize;
    let mut c = vec![0i64; limit.max(1)];
    c[0] = 1;
    for n in 1..limit {
        for k in (n..limit).rev() {
            c[k] -= c[k - n];
        }
    }
    let shift = r(1, 24);
    let mut s = QSeries::zero(shift + order);
    for (k, v) in c.into_iter().enumerate() {
        s.add_term(shift + Rational64::from_integer(k as i64), Rational64::zero(), v);
    }
    Ok(s)
}

/// Minimum of the quadratic form by direct search over the box m₁, m₂ ≤ `max`.
pub fn brute_force_minimum(sigma: u8, q_charge: u8, max: i64) -> (Rational64, (i64, i64)) {
    let mut best: Option<(Rational64, (i64, i64))> = None;
    for m1 in 0..=max {
        for m2 in 0..=max {
            if (m1 + 2 * m2 - i64::from(q_charge)).rem_euclid(3) != 0 {
                continue;
            }
            let v = quadratic_form(m1, m2, sigma);
            if best.is_none_or(|(b, _)| v < b) {
                best = Some((v, (m1, m2)));
            }
        }
    }
    best.expect("admissible vector exists")
}

/// True iff every coefficient is a nonnegative integer.
pub fn is_positive(s: &QSeries) -> bool {
    s.iter().all(|(_, _, c)| c >= 0)
}
