//! Named verification suites with tabular pass/fail rows.

use std::str::FromStr;

use num_complex::Complex64;
use num_rational::Rational64;
use serde::{Deserialize, Serialize};

use crate::blocks::{braid_consistency_check, expected_monodromy, monodromy_matrix, ContinuationPath, Puncture};
use crate::braidrep::artin_check;
use crate::cftchars::{brute_force_minimum, delta_pf, is_positive, parafermion_char};
use crate::fusion::Label;
use crate::gatesynth::verify_paper_words;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Suite {
    Artin,
    PaperWords,
    Blocks,
    Chars,
    All,
}

impl FromStr for Suite {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "artin" => Ok(Suite::Artin),
            "paper-words" => Ok(Suite::PaperWords),
            "blocks" => Ok(Suite::Blocks),
            "chars" => Ok(Suite::Chars),
            "all" => Ok(Suite::All),
            _ => Err(format!("unknown suite {s:?} (artin, paper-words, blocks, chars, all)")),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CheckRow {
    pub suite: String,
    pub name: String,
    pub value: f64,
    pub tolerance: f64,
    pub pass: bool,
    pub detail: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VerifyReport {
    pub suite: Suite,
    pub rows: Vec<CheckRow>,
    pub pass: bool,
}

fn row(suite: &str, name: String, value: f64, tolerance: f64, detail: String) -> CheckRow {
    CheckRow { suite: suite.into(), name, value, tolerance, pass: value <= tolerance, detail }
}

pub fn artin_rows(strands: &[usize]) -> Vec<CheckRow> {
    let mut out = Vec::new();
    for &n in strands {
        for charge in [Label::I, Label::Eps] {
            let name = format!("n={n} charge={}", charge.name());
            match artin_check::<f64>(n, charge) {
                Ok(r) => out.push(row(
                    "artin",
                    name,
                    r.max_violation,
                    1e-11,
                    format!("dim={} commutation={:.3e} braid={:.3e}", r.dim, r.max_commutation, r.max_braid),
                )),
                Err(e) => out.push(CheckRow {
                    suite: "artin".into(),
                    name,
                    value: f64::INFINITY,
                    tolerance: 1e-11,
                    pass: false,
                    detail: e.to_string(),
                }),
            }
        }
    }
    out
}

pub fn paper_word_rows() -> Vec<CheckRow> {
    verify_paper_words()
        .into_iter()
        .map(|r| {
            row(
                "paper-words",
                format!("{} -> {}", r.gate, r.target),
                r.distance,
                r.bound,
                format!("{} weaves={} stated={}", r.word, r.weave_count, r.stated_weaves),
            )
        })
        .collect()
}

pub fn block_rows() -> Vec<CheckRow> {
    let mut out = Vec::new();
    let base = Complex64::new(0.5, 0.0);
    let fail = |name: &str, e: String| CheckRow {
        suite: "blocks".into(),
        name: name.into(),
        value: f64::INFINITY,
        tolerance: 1e-6,
        pass: false,
        detail: e,
    };
    let mut mats = Vec::new();
    for around in [Puncture::Zero, Puncture::One] {
        let name = format!("monodromy around {around:?}");
        let a = monodromy_matrix(around, base, &ContinuationPath::with_radius(0.5));
        let b = monodromy_matrix(around, base, &ContinuationPath::with_radius(0.3));
        match (a, b) {
            (Ok(a), Ok(b)) => {
                out.push(row("blocks", name.clone(), a.max_abs_diff(&expected_monodromy(around)), 1e-6, "radius 0.5".into()));
                out.push(row("blocks", format!("{name} radius agreement"), a.max_abs_diff(&b), 1e-6, "radii 0.5, 0.3".into()));
                mats.push(a);
            }
            (Err(e), _) | (_, Err(e)) => out.push(fail(&name, e.to_string())),
        }
    }
    if mats.len() == 2 {
        match monodromy_matrix(Puncture::Infinity, base, &ContinuationPath::with_radius(1.5)) {
            Ok(inf) => {
                let comp = &(&mats[0] * &mats[1]) * &inf;
                let id = crate::linalg::CMatrix::identity(2);
                out.push(row("blocks", "M0·M1·M∞ = 1".into(), comp.max_abs_diff(&id), 1e-5, String::new()));
            }
            Err(e) => out.push(fail("loop around infinity", e.to_string())),
        }
    }
    match braid_consistency_check() {
        Ok(r) => {
            for p in &r.phases {
                out.push(row("blocks", p.name.clone(), p.error, 1e-12, format!("arg={:.15}", p.computed_arg)));
            }
            out.push(row("blocks", "eta=1 eigenbasis vs F".into(), r.f_basis_deviation, 1e-6, String::new()));
        }
        Err(e) => out.push(fail("braid consistency", e.to_string())),
    }
    out
}

/// The six sectors with their conformal dimensions.
pub const SECTORS: [Label; 6] = [Label::I, Label::Psi1, Label::Psi2, Label::Sigma1, Label::Sigma2, Label::Eps];

pub fn char_rows(order: i64) -> Vec<CheckRow> {
    let mut out = Vec::new();
    for lab in SECTORS {
        let (s, q) = lab.sigma_q();
        let expected = lab.conformal_dimension() - Rational64::new(1, 30);
        let (min, at) = brute_force_minimum(s, q, 12);
        let brute = min + delta_pf(s) - Rational64::new(1, 30);
        match parafermion_char(s, q, Rational64::from_integer(order)) {
            Ok(ch) => {
                let lead = ch.leading_exponent().unwrap_or(Rational64::from_integer(i64::MAX));
                let ok = lead == expected && brute == expected;
                out.push(CheckRow {
                    suite: "chars".into(),
                    name: format!("{} leading exponent", lab.name()),
                    value: if ok { 0.0 } else { 1.0 },
                    tolerance: 0.0,
                    pass: ok,
                    detail: format!("series {lead}, brute force {brute} at m={at:?}, expected {expected}"),
                });
                let pos = is_positive(&ch);
                out.push(CheckRow {
                    suite: "chars".into(),
                    name: format!("{} positivity to order {order}", lab.name()),
                    value: if pos { 0.0 } else { 1.0 },
                    tolerance: 0.0,
                    pass: pos,
                    detail: String::new(),
                });
            }
            Err(e) => out.push(CheckRow {
                suite: "chars".into(),
                name: lab.name().into(),
                value: 1.0,
                tolerance: 0.0,
                pass: false,
                detail: e.to_string(),
            }),
        }
    }
    out
}

pub fn run(suite: Suite, artin_strands: &[usize]) -> VerifyReport {
    let rows = match suite {
        Suite::Artin => artin_rows(artin_strands),
        Suite::PaperWords => paper_word_rows(),
        Suite::Blocks => block_rows(),
        Suite::Chars => char_rows(10),
        Suite::All => {
            let mut v = artin_rows(artin_strands);
            v.extend(paper_word_rows());
            v.extend(block_rows());
            v.extend(char_rows(10));
            v
        }
    };
    let pass = rows.iter().all(|r| r.pass);
    VerifyReport { suite, rows, pass }
}
