//! Fusion algebra of the ℤ₃ parafermion primaries and Fibonacci fusion paths.
//!
//! Only the {𝕀, ε} subalgebra carries fusion-path Hilbert spaces; the full
//! six-field table is kept for fusion queries and interferometry labels.

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;

use num_rational::Rational64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::golden::Golden;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum FusionError {
    #[error("total charge must be I or eps, got {0}")]
    BadCharge(Label),
    #[error("anyon count must be at least 1")]
    NoAnyons,
    #[error("unknown label {0:?}")]
    UnknownLabel(String),
    #[error("path has {got} steps, expected {expected}")]
    PathLength { expected: usize, got: usize },
    #[error("path is not admissible at position {0}")]
    Inadmissible(usize),
    #[error("register path must start and end in I")]
    RegisterCharge,
    #[error("path count for {0} anyons overflows u64")]
    Overflow(usize),
}

/// Primary field of the diagonal-coset ℤ₃ parafermion theory.
///
/// Variant order is the order used for canonical path enumeration, so
/// `I < Eps` holds.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Label {
    #[serde(rename = "I")]
    I,
    Sigma1,
    Sigma2,
    Psi1,
    Psi2,
    Eps,
}

impl Label {
    pub const ALL: [Label; 6] = [Label::I, Label::Sigma1, Label::Sigma2, Label::Psi1, Label::Psi2, Label::Eps];

    /// Level-2 weight Λ_μ + Λ_ν as (μ, ν), 0 ≤ μ ≤ ν ≤ 2.
    pub fn weight(self) -> (u8, u8) {
        match self {
            Label::I => (0, 0),
            Label::Sigma1 => (0, 1),
            Label::Sigma2 => (0, 2),
            Label::Psi1 => (1, 1),
            Label::Eps => (1, 2),
            Label::Psi2 => (2, 2),
        }
    }

    pub fn from_weight(mu: u8, nu: u8) -> Option<Label> {
        let (mu, nu) = if mu <= nu { (mu, nu) } else { (nu, mu) };
        Label::ALL.into_iter().find(|l| l.weight() == (mu, nu))
    }

    /// Conformal dimension Δ.
    pub fn conformal_dimension(self) -> Rational64 {
        match self {
            Label::I => Rational64::new(0, 1),
            Label::Sigma1 | Label::Sigma2 => Rational64::new(1, 15),
            Label::Psi1 | Label::Psi2 => Rational64::new(2, 3),
            Label::Eps => Rational64::new(2, 5),
        }
    }

    /// ℤ₃ charge P = μ + ν mod 3.
    pub fn z3_charge(self) -> u8 {
        let (mu, nu) = self.weight();
        (mu + nu) % 3
    }

    /// Coset labels (σ, Q) with σ = ν − μ, Q = ν.
    pub fn sigma_q(self) -> (u8, u8) {
        let (mu, nu) = self.weight();
        (nu - mu, nu)
    }

    pub fn quantum_dimension(self) -> Golden {
        match self {
            Label::I | Label::Psi1 | Label::Psi2 => Golden::one(),
            Label::Sigma1 | Label::Sigma2 | Label::Eps => Golden::delta(),
        }
    }

    pub fn is_abelian(self) -> bool {
        self.quantum_dimension() == Golden::one()
    }

    pub fn name(self) -> &'static str {
        match self {
            Label::I => "I",
            Label::Sigma1 => "sigma1",
            Label::Sigma2 => "sigma2",
            Label::Psi1 => "psi1",
            Label::Psi2 => "psi2",
            Label::Eps => "eps",
        }
    }
}

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Label {
    type Err = FusionError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "I" | "i" | "1" | "vac" | "vacuum" => Ok(Label::I),
            "sigma1" | "s1" => Ok(Label::Sigma1),
            "sigma2" | "s2" => Ok(Label::Sigma2),
            "psi1" => Ok(Label::Psi1),
            "psi2" => Ok(Label::Psi2),
            "eps" | "epsilon" | "e" => Ok(Label::Eps),
            _ => Err(FusionError::UnknownLabel(s.to_owned())),
        }
    }
}

/// Fusion outcomes a × b; multiplicities are at most one in this theory.
pub fn fuse(a: Label, b: Label) -> Vec<Label> {
    use Label::*;
    let (a, b) = if a <= b { (a, b) } else { (b, a) };
    let mut out = match (a, b) {
        (I, x) => vec![x],
        (Sigma1, Sigma1) => vec![Sigma2, Psi1],
        (Sigma1, Sigma2) => vec![I, Eps],
        (Sigma1, Psi1) => vec![Eps],
        (Sigma1, Psi2) => vec![Sigma2],
        (Sigma1, Eps) => vec![Sigma1, Psi2],
        (Sigma2, Sigma2) => vec![Sigma1, Psi2],
        (Sigma2, Psi1) => vec![Sigma1],
        (Sigma2, Psi2) => vec![Eps],
        (Sigma2, Eps) => vec![Sigma2, Psi1],
        (Psi1, Psi1) => vec![Psi2],
        (Psi1, Psi2) => vec![I],
        (Psi1, Eps) => vec![Sigma2],
        (Psi2, Psi2) => vec![Psi1],
        (Psi2, Eps) => vec![Sigma1],
        (Eps, Eps) => vec![I, Eps],
        _ => unreachable!("pairs are sorted"),
    };
    out.sort();
    out
}

/// The full fusion table keyed by unordered pairs.
#[derive(Clone, Debug)]
pub struct FusionTable {
    entries: HashMap<(Label, Label), Vec<Label>>,
}

impl FusionTable {
    pub fn new() -> Self {
        let mut entries = HashMap::new();
        for (i, &a) in Label::ALL.iter().enumerate() {
            for &b in &Label::ALL[i..] {
                let key = if a <= b { (a, b) } else { (b, a) };
                entries.insert(key, fuse(a, b));
            }
        }
        Self { entries }
    }

    pub fn get(&self, a: Label, b: Label) -> &[Label] {
        let key = if a <= b { (a, b) } else { (b, a) };
        &self.entries[&key]
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
}

impl Default for FusionTable {
    fn default() -> Self {
        Self::new()
    }
}

fn check_charge(charge: Label) -> Result<(), FusionError> {
    match charge {
        Label::I | Label::Eps => Ok(()),
        other => Err(FusionError::BadCharge(other)),
    }
}

/// Number of fusion paths of `n` Fibonacci anyons with the given total charge.
pub fn count_paths(n: usize, charge: Label) -> Result<u64, FusionError> {
    check_charge(charge)?;
    if n == 0 {
        return Err(FusionError::NoAnyons);
    }
    // D^(eps)_1 = D^(eps)_2 = 1, D^(I)_{n+1} = D^(eps)_n
    let fib_eps = |k: usize| -> Result<u64, FusionError> {
        let (mut a, mut b) = (1u64, 1u64);
        for _ in 2..k {
            let c = a.checked_add(b).ok_or(FusionError::Overflow(n))?;
            a = b;
            b = c;
        }
        Ok(if k <= 1 { 1 } else { b })
    };
    match charge {
        Label::Eps => fib_eps(n),
        _ if n == 1 => Ok(0),
        _ => fib_eps(n - 1),
    }
}

/// Admissible charge sequence x₀ = 𝕀, x₁, …, x_n with x_{k+1} ∈ x_k × ε.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct FusionPath {
    charges: Vec<Label>,
}

impl FusionPath {
    pub fn new(charges: Vec<Label>) -> Result<Self, FusionError> {
        if charges.len() < 2 {
            return Err(FusionError::NoAnyons);
        }
        if charges[0] != Label::I {
            return Err(FusionError::Inadmissible(0));
        }
        for (k, w) in charges.windows(2).enumerate() {
            check_charge(w[1]).map_err(|_| FusionError::Inadmissible(k + 1))?;
            if !fuse(w[0], Label::Eps).contains(&w[1]) {
                return Err(FusionError::Inadmissible(k + 1));
            }
        }
        Ok(Self { charges })
    }

    pub fn charges(&self) -> &[Label] {
        &self.charges
    }

    /// Number of anyons (steps).
    pub fn steps(&self) -> usize {
        self.charges.len() - 1
    }

    pub fn total_charge(&self) -> Label {
        *self.charges.last().expect("non-empty path")
    }

    pub fn at(&self, k: usize) -> Label {
        self.charges[k]
    }

    /// Lengths between successive visits of the 𝕀 level, e.g. `3+3+2`.
    pub fn run_label(&self) -> String {
        let stops: Vec<usize> =
            self.charges.iter().enumerate().filter(|(_, &c)| c == Label::I).map(|(k, _)| k).collect();
        let mut parts: Vec<String> = stops.windows(2).map(|w| (w[1] - w[0]).to_string()).collect();
        if self.total_charge() != Label::I {
            parts.push(format!("({})", self.steps() - stops.last().copied().unwrap_or(0)));
        }
        parts.join("+")
    }
}

impl fmt::Display for FusionPath {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s: Vec<&str> = self.charges.iter().map(|c| if *c == Label::I { "I" } else { "e" }).collect();
        f.write_str(&s.join(""))
    }
}

impl FromStr for FusionPath {
    type Err = FusionError;
    /// Compact form `IeIeI` (also accepts `ε`).
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let charges = s
            .chars()
            .filter(|c| !c.is_whitespace() && *c != ',')
            .map(|c| match c {
                'I' | 'i' | '1' => Ok(Label::I),
                'e' | 'E' | 'ε' => Ok(Label::Eps),
                other => Err(FusionError::UnknownLabel(other.to_string())),
            })
            .collect::<Result<Vec<_>, _>>()?;
        Self::new(charges)
    }
}

/// All paths of `n` anyons ending at `charge`, lexicographic with 𝕀 < ε.
pub fn enumerate_paths(n: usize, charge: Label) -> Result<Vec<FusionPath>, FusionError> {
    check_charge(charge)?;
    if n == 0 {
        return Err(FusionError::NoAnyons);
    }
    let mut out = Vec::new();
    let mut cur = vec![Label::I];
    fn rec(n: usize, charge: Label, cur: &mut Vec<Label>, out: &mut Vec<FusionPath>) {
        let k = cur.len() - 1;
        if k == n {
            if *cur.last().unwrap() == charge {
                out.push(FusionPath { charges: cur.clone() });
            }
            return;
        }
        for next in fuse(*cur.last().unwrap(), Label::Eps) {
            // an 𝕀 at step k needs an ε at k+1; prune paths that cannot reach the target
            if k + 1 == n && next != charge {
                continue;
            }
            cur.push(next);
            rec(n, charge, cur, out);
            cur.pop();
        }
    }
    rec(n, charge, &mut cur, &mut out);
    Ok(out)
}

/// Decoded register state.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum QubitWord {
    /// Bits in register order (qubit 1 first).
    Bits(Vec<bool>),
    /// Non-computational path, indexed in canonical order among NC paths.
    NonComputational { index: usize, label: String },
}

impl QubitWord {
    pub fn is_computational(&self) -> bool {
        matches!(self, QubitWord::Bits(_))
    }
}

impl fmt::Display for QubitWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            QubitWord::Bits(b) => {
                let s: String = b.iter().map(|&x| if x { '1' } else { '0' }).collect();
                write!(f, "|{s}>")
            }
            QubitWord::NonComputational { index, label } => write!(f, "|NC{index}:{label}>"),
        }
    }
}

fn is_computational_path(path: &FusionPath) -> bool {
    path.charges.iter().skip(1).step_by(2).all(|&c| c == Label::Eps)
}

fn check_register(path: &FusionPath, n_qubits: usize) -> Result<(), FusionError> {
    let expected = 2 * n_qubits + 2;
    if path.steps() != expected {
        return Err(FusionError::PathLength { expected, got: path.steps() });
    }
    if path.total_charge() != Label::I {
        return Err(FusionError::RegisterCharge);
    }
    Ok(())
}

/// Register path → qubit word.
pub fn decode(path: &FusionPath, n_qubits: usize) -> Result<QubitWord, FusionError> {
    check_register(path, n_qubits)?;
    if is_computational_path(path) {
        return Ok(QubitWord::Bits((1..=n_qubits).map(|l| path.at(2 * l) == Label::Eps).collect()));
    }
    let index = non_computational_paths(n_qubits)
        .iter()
        .position(|p| p == path)
        .expect("non-computational path is enumerated");
    Ok(QubitWord::NonComputational { index, label: path.run_label() })
}

/// Qubit word → the unique computational register path.
pub fn encode(bits: &[bool]) -> FusionPath {
    let n = bits.len();
    let mut charges = vec![Label::Eps; 2 * n + 3];
    charges[0] = Label::I;
    charges[2 * n + 2] = Label::I;
    for (l, &b) in bits.iter().enumerate() {
        charges[2 * (l + 1)] = if b { Label::Eps } else { Label::I };
    }
    FusionPath { charges }
}

/// Non-computational paths of a `2n+2`-anyon register, canonical order.
pub fn non_computational_paths(n_qubits: usize) -> Vec<FusionPath> {
    enumerate_paths(2 * n_qubits + 2, Label::I)
        .expect("valid register size")
        .into_iter()
        .filter(|p| !is_computational_path(p))
        .collect()
}

/// Row order in which a path basis is presented.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BasisKind {
    /// Lexicographic on the charge sequence.
    Canonical,
    /// Block order in which B_i^(n) = B_i^(n−2) ⊕ B_i^(n−1) (charge 𝕀) or
    /// B_i^(n−1,𝕀) ⊕ B_i^(n−1,ε) (charge ε) for the lower generators.
    Recursive,
    /// Printed register order for 4, 6 and 8 anyons with total charge 𝕀.
    Paper,
}

impl FromStr for BasisKind {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "canonical" => Ok(BasisKind::Canonical),
            "recursive" => Ok(BasisKind::Recursive),
            "paper" => Ok(BasisKind::Paper),
            _ => Err(format!("unknown basis {s:?}")),
        }
    }
}

/// An ordered basis of fusion paths.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PathBasis {
    pub strands: usize,
    pub charge: Label,
    pub kind: BasisKind,
    paths: Vec<FusionPath>,
    /// `to_canonical[k]` is the canonical index of the k-th basis path.
    to_canonical: Vec<usize>,
}

impl PathBasis {
    pub fn canonical(n: usize, charge: Label) -> Result<Self, FusionError> {
        let paths = enumerate_paths(n, charge)?;
        let to_canonical = (0..paths.len()).collect();
        Ok(Self { strands: n, charge, kind: BasisKind::Canonical, paths, to_canonical })
    }

    pub fn new(n: usize, charge: Label, kind: BasisKind) -> Result<Self, FusionError> {
        let canon = Self::canonical(n, charge)?;
        let ordered = match kind {
            BasisKind::Canonical => return Ok(canon),
            BasisKind::Recursive => recursive_paths(n, charge),
            BasisKind::Paper => paper_paths(n, charge).ok_or(FusionError::PathLength { expected: 8, got: n })?,
        };
        let index: HashMap<&FusionPath, usize> = canon.paths.iter().enumerate().map(|(i, p)| (p, i)).collect();
        let to_canonical = ordered.iter().map(|p| index[p]).collect();
        Ok(Self { strands: n, charge, kind, paths: ordered, to_canonical })
    }

    pub fn paths(&self) -> &[FusionPath] {
        &self.paths
    }

    pub fn dim(&self) -> usize {
        self.paths.len()
    }

    pub fn to_canonical(&self) -> &[usize] {
        &self.to_canonical
    }

    pub fn index_of(&self, path: &FusionPath) -> Option<usize> {
        self.paths.iter().position(|p| p == path)
    }

    /// Positions of computational and non-computational basis vectors when
    /// the strands form a `(strands−2)/2`-qubit register.
    pub fn register_partition(&self) -> Option<(Vec<usize>, Vec<usize>)> {
        if self.charge != Label::I || self.strands < 4 || !self.strands.is_multiple_of(2) {
            return None;
        }
        let (comp, nc): (Vec<usize>, Vec<usize>) = (0..self.dim()).partition(|&k| is_computational_path(&self.paths[k]));
        Some((comp, nc))
    }

    /// Computational indices sorted by the binary value of the decoded bits
    /// (qubit 1 most significant).
    pub fn computational_in_binary_order(&self) -> Option<Vec<usize>> {
        let (mut comp, _) = self.register_partition()?;
        let nq = (self.strands - 2) / 2;
        let key = |k: &usize| -> u64 {
            let p = &self.paths[*k];
            (1..=nq).fold(0u64, |acc, l| (acc << 1) | u64::from(p.at(2 * l) == Label::Eps))
        };
        comp.sort_by_key(key);
        Some(comp)
    }
}

fn recursive_paths(n: usize, charge: Label) -> Vec<FusionPath> {
    let extend = |paths: Vec<FusionPath>, tail: &[Label], replace_last: Option<Label>| -> Vec<FusionPath> {
        paths
            .into_iter()
            .map(|p| {
                let mut c = p.charges;
                if let Some(r) = replace_last {
                    *c.last_mut().unwrap() = r;
                }
                c.extend_from_slice(tail);
                FusionPath { charges: c }
            })
            .collect()
    };
    match (n, charge) {
        (1, Label::Eps) => vec![FusionPath { charges: vec![Label::I, Label::Eps] }],
        (1, _) => vec![],
        (2, Label::I) => vec![FusionPath { charges: vec![Label::I, Label::Eps, Label::I] }],
        (_, Label::I) => {
            // last pair fuses to 𝕀 (x_{n−2} = 𝕀) or to ε (x_{n−2} = x_{n−1} = ε)
            let mut out = extend(recursive_paths(n - 2, Label::I), &[Label::Eps, Label::I], None);
            out.extend(extend(recursive_paths(n - 1, Label::I), &[Label::I], Some(Label::Eps)));
            out
        }
        _ => {
            let mut out = extend(recursive_paths(n - 1, Label::I), &[Label::Eps], None);
            out.extend(extend(recursive_paths(n - 1, Label::Eps), &[Label::Eps], None));
            out
        }
    }
}

/// Published row order for 8 anyons (qubit 1 is the leftmost bit).
pub const PAPER_ORDER_8: [&str; 13] =
    ["000", "100", "3+3+2", "010", "110", "3+2+3", "2+3+3", "5+3", "001", "101", "3+5", "011", "111"];

fn paper_paths(n: usize, charge: Label) -> Option<Vec<FusionPath>> {
    if charge != Label::I {
        return None;
    }
    let canon = enumerate_paths(n, charge).ok()?;
    let nq = n.checked_sub(2)? / 2;
    let label_of = |p: &FusionPath| -> String {
        if is_computational_path(p) {
            (1..=nq).map(|l| if p.at(2 * l) == Label::Eps { '1' } else { '0' }).collect()
        } else {
            p.run_label()
        }
    };
    let by_label = |labels: &[&str]| -> Option<Vec<FusionPath>> {
        labels.iter().map(|l| canon.iter().find(|p| label_of(p) == *l).cloned()).collect()
    };
    match n {
        4 => by_label(&["0", "1"]),
        6 => by_label(&["00", "01", "10", "11", "3+3"]),
        8 => by_label(&PAPER_ORDER_8),
        _ => None,
    }
}
