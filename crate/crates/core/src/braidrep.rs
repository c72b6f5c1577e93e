//! Braid-group generators on Fibonacci fusion-path spaces.

use std::collections::HashMap;
use std::sync::{Arc, OnceLock, RwLock};

use num_complex::Complex;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::fusion::{BasisKind, FusionError, FusionPath, Label, PathBasis};
use crate::linalg::{CMatrix, LinalgError};
use crate::scalar::{cis, q_pow, tau, Real};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum BraidError {
    #[error("generator index {i} out of range for {n} strands")]
    IndexOutOfRange { n: usize, i: usize },
    #[error(transparent)]
    Fusion(#[from] FusionError),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
    #[error("{n} strands exceeds the configured limit ({max_strands} strands, dimension {max_dim})")]
    TooLarge { n: usize, max_strands: usize, max_dim: usize },
    #[error("no explicit matrix for B_{i} on {n} strands")]
    Unsupported { n: usize, i: usize },
    #[error("phase {0} does not have unit modulus")]
    NotUnitModulus(&'static str),
}

/// Size guard for dense generator construction.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Limits {
    pub max_strands: usize,
    pub max_dim: usize,
}

impl Default for Limits {
    fn default() -> Self {
        Self { max_strands: 22, max_dim: 17711 }
    }
}

impl Limits {
    pub fn check(&self, n: usize, dim: usize) -> Result<(), BraidError> {
        if n > self.max_strands || dim > self.max_dim {
            return Err(BraidError::TooLarge { n, max_strands: self.max_strands, max_dim: self.max_dim });
        }
        Ok(())
    }
}

/// Exchange phases of two ε anyons in the 𝕀 and ε channels plus the
/// Abelian charge-sector phase applied per exchange.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RData<T: Real> {
    pub r_i: Complex<T>,
    pub r_eps: Complex<T>,
    pub u1_phase: Complex<T>,
}

impl<T: Real> Default for RData<T> {
    /// Full quantum Hall convention: u1 = q³, so u1·r_𝕀 = q⁻¹ and u1·r_ε = −q.
    fn default() -> Self {
        let pi = T::PI();
        Self {
            r_i: cis(-T::lit(4.0) * pi / T::lit(5.0)),
            r_eps: cis(T::lit(3.0) * pi / T::lit(5.0)),
            u1_phase: q_pow(3),
        }
    }
}

impl<T: Real> RData<T> {
    /// Neutral-sector exchange only (u1 = 1).
    pub fn pure_parafermion() -> Self {
        Self { u1_phase: Complex::new(T::one(), T::zero()), ..Self::default() }
    }

    pub fn validate(&self) -> Result<(), BraidError> {
        let tol = T::lit(1e-9);
        for (name, z) in [("r_i", self.r_i), ("r_eps", self.r_eps), ("u1_phase", self.u1_phase)] {
            if (z.norm() - T::one()).abs() > tol {
                return Err(BraidError::NotUnitModulus(name));
            }
        }
        Ok(())
    }

    /// 2×2 exchange block u1·F·diag(r_𝕀, r_ε)·F over the middle label (𝕀, ε).
    pub fn exchange_block(&self) -> CMatrix<T> {
        let f = f_matrix::<T>().to_matrix();
        let r = CMatrix::from_diag(&[self.r_i, self.r_eps]);
        (&(&f * &r) * &f).scale(self.u1_phase)
    }
}

/// The real symmetric basis change [[τ, √τ], [√τ, −τ]].
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct FMatrix<T: Real> {
    pub tau: T,
    pub sqrt_tau: T,
}

impl<T: Real> FMatrix<T> {
    pub fn to_matrix(&self) -> CMatrix<T> {
        let c = |x: T| Complex::new(x, T::zero());
        CMatrix::from_fn(2, 2, |i, j| match (i, j) {
            (0, 0) => c(self.tau),
            (1, 1) => c(-self.tau),
            _ => c(self.sqrt_tau),
        })
    }
}

pub fn f_matrix<T: Real>() -> FMatrix<T> {
    let t = tau::<T>();
    FMatrix { tau: t, sqrt_tau: t.sqrt() }
}

/// A matrix together with the ordered path basis it acts on.
#[derive(Clone, Debug, PartialEq)]
pub struct Operator<T: Real> {
    pub matrix: CMatrix<T>,
    pub basis: Arc<PathBasis>,
}

impl<T: Real> Operator<T> {
    pub fn dim(&self) -> usize {
        self.matrix.rows()
    }

    /// The same operator with rows and columns in canonical path order.
    pub fn canonical_matrix(&self) -> CMatrix<T> {
        let perm = self.basis.to_canonical();
        let mut inv = vec![0; perm.len()];
        for (k, &c) in perm.iter().enumerate() {
            inv[c] = k;
        }
        self.matrix.permuted(&inv)
    }

    /// Re-express in another ordering of the same path space.
    pub fn in_basis(&self, kind: BasisKind) -> Result<Self, BraidError> {
        if kind == self.basis.kind {
            return Ok(self.clone());
        }
        let target = Arc::new(PathBasis::new(self.basis.strands, self.basis.charge, kind)?);
        let matrix = self.canonical_matrix().permuted(target.to_canonical());
        Ok(Self { matrix, basis: target })
    }

    pub fn unitarity_defect(&self) -> T {
        self.matrix.unitarity_defect()
    }

    pub fn to_json(&self) -> MatrixJson {
        MatrixJson::new(&self.matrix, Some(&self.basis))
    }
}

/// Wire format: row-major `[re, im]` pairs plus basis metadata.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MatrixJson {
    pub rows: usize,
    pub cols: usize,
    pub entries: Vec<Vec<[f64; 2]>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub basis: Option<BasisJson>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BasisJson {
    pub strands: usize,
    pub charge: Label,
    pub kind: BasisKind,
    pub paths: Vec<String>,
}

impl MatrixJson {
    pub fn new<T: Real>(m: &CMatrix<T>, basis: Option<&PathBasis>) -> Self {
        let f = |x: T| x.to_f64().unwrap_or(f64::NAN);
        let entries = (0..m.rows()).map(|i| m.row(i).iter().map(|z| [f(z.re), f(z.im)]).collect()).collect();
        Self {
            rows: m.rows(),
            cols: m.cols(),
            entries,
            basis: basis.map(|b| BasisJson {
                strands: b.strands,
                charge: b.charge,
                kind: b.kind,
                paths: b.paths().iter().map(FusionPath::to_string).collect(),
            }),
        }
    }

    pub fn to_matrix<T: Real>(&self) -> Result<CMatrix<T>, LinalgError> {
        let rows = self
            .entries
            .iter()
            .map(|r| r.iter().map(|&[re, im]| Complex::new(T::lit(re), T::lit(im))).collect())
            .collect();
        let m = CMatrix::from_rows(rows)?;
        if m.rows() != self.rows || m.cols() != self.cols {
            return Err(LinalgError::Shape(self.rows, self.cols, m.rows(), m.cols()));
        }
        Ok(m)
    }
}

fn build_generator<T: Real>(basis: &PathBasis, i: usize, r: &RData<T>) -> CMatrix<T> {
    let dim = basis.dim();
    let block = r.exchange_block();
    let diag_i = r.u1_phase * r.r_i;
    let diag_eps = r.u1_phase * r.r_eps;
    let index: HashMap<&FusionPath, usize> = basis.paths().iter().enumerate().map(|(k, p)| (p, k)).collect();
    let mut m = CMatrix::zeros(dim, dim);
    for (row, p) in basis.paths().iter().enumerate() {
        let (left, right) = (p.at(i - 1), p.at(i + 1));
        match (left, right) {
            (Label::I, Label::I) => m[(row, row)] = diag_i,
            (a, b) if a != b => m[(row, row)] = diag_eps,
            _ => {
                let mut flipped = p.charges().to_vec();
                let x = usize::from(flipped[i] == Label::Eps);
                flipped[i] = if x == 0 { Label::Eps } else { Label::I };
                let col = index[&FusionPath::new(flipped).expect("flip between two eps is admissible")];
                m[(row, row)] = block[(x, x)];
                m[(row, col)] = block[(x, 1 - x)];
            }
        }
    }
    m
}

/// All generators B_1 … B_{n−1} in canonical order for the given R data.
pub fn generators_with<T: Real>(
    n: usize,
    charge: Label,
    rdata: &RData<T>,
    limits: &Limits,
) -> Result<Vec<Operator<T>>, BraidError> {
    rdata.validate()?;
    let dim = crate::fusion::count_paths(n, charge)? as usize;
    limits.check(n, dim)?;
    let basis = Arc::new(PathBasis::canonical(n, charge)?);
    Ok((1..n).map(|i| Operator { matrix: build_generator(&basis, i, rdata), basis: basis.clone() }).collect())
}

pub fn generator_with<T: Real>(
    n: usize,
    i: usize,
    charge: Label,
    rdata: &RData<T>,
    limits: &Limits,
) -> Result<Operator<T>, BraidError> {
    if i == 0 || i >= n {
        return Err(BraidError::IndexOutOfRange { n, i });
    }
    rdata.validate()?;
    let dim = crate::fusion::count_paths(n, charge)? as usize;
    limits.check(n, dim)?;
    let basis = Arc::new(PathBasis::canonical(n, charge)?);
    Ok(Operator { matrix: build_generator(&basis, i, rdata), basis })
}

/// B_i on `n` strands with total `charge`, default R data, canonical basis.
pub fn generator<T: Real>(n: usize, i: usize, charge: Label) -> Result<Operator<T>, BraidError> {
    generator_with(n, i, charge, &RData::default(), &Limits::default())
}

type GeneratorCache = RwLock<HashMap<(usize, Label), Arc<Vec<Operator<f64>>>>>;

fn cache() -> &'static GeneratorCache {
    static CACHE: OnceLock<GeneratorCache> = OnceLock::new();
    CACHE.get_or_init(Default::default)
}

/// Shared double-precision generators with default R data.
pub fn cached_generators(n: usize, charge: Label) -> Result<Arc<Vec<Operator<f64>>>, BraidError> {
    if let Some(g) = cache().read().expect("generator cache poisoned").get(&(n, charge)) {
        return Ok(g.clone());
    }
    let mut w = cache().write().expect("generator cache poisoned");
    if let Some(g) = w.get(&(n, charge)) {
        return Ok(g.clone());
    }
    let g = Arc::new(generators_with(n, charge, &RData::default(), &Limits::default())?);
    w.insert((n, charge), g.clone());
    Ok(g)
}

/// Matrix entries as printed for 4, 6 and 8 anyons, in the printed basis.
///
/// Transcribed without correction, so (6, 3) and everything derived from it
/// keep the printed diagonal on the |11⟩/|NC⟩ block.
pub fn paper_generator<T: Real>(n: usize, i: usize) -> Result<Operator<T>, BraidError> {
    let unsupported = || BraidError::Unsupported { n, i };
    let qm1: Complex<T> = q_pow(-1);
    let mq: Complex<T> = -q_pow::<T>(1);
    let b2 = paper_b4(2);
    let (b11, b12, b21, b22) = (b2[(0, 0)], b2[(0, 1)], b2[(1, 0)], b2[(1, 1)]);
    let z = Complex::new(T::zero(), T::zero());
    let matrix = match (n, i) {
        (4, 1..=3) => paper_b4(i),
        (6, 1..=5) => {
            let rows: Vec<Vec<Complex<T>>> = match i {
                1 => diag_rows(&[qm1, qm1, mq, mq, mq]),
                2 => vec![
                    vec![b11, z, b12, z, z],
                    vec![z, b11, z, b12, z],
                    vec![b21, z, b22, z, z],
                    vec![z, b21, z, b22, z],
                    vec![z, z, z, z, mq],
                ],
                3 => vec![
                    vec![qm1, z, z, z, z],
                    vec![z, mq, z, z, z],
                    vec![z, z, mq, z, z],
                    vec![z, z, z, b11, b12],
                    vec![z, z, z, b21, b22],
                ],
                4 => vec![
                    vec![b11, b12, z, z, z],
                    vec![b21, b22, z, z, z],
                    vec![z, z, b11, b12, z],
                    vec![z, z, b21, b22, z],
                    vec![z, z, z, z, mq],
                ],
                _ => diag_rows(&[qm1, mq, qm1, mq, mq]),
            };
            CMatrix::from_rows(rows)?
        }
        (8, 1..=5) => {
            // B^(8)_i = B^(6)_i ⊕ B^(7)_i in the fuse-last-pair order
            let six = paper_generator::<T>(6, i)?.in_basis(BasisKind::Recursive)?;
            let seven = generator_with(7, i, Label::I, &RData::default(), &Limits::default())?
                .in_basis(BasisKind::Recursive)?;
            six.matrix.direct_sum(&seven.matrix)
        }
        (8, 6) => {
            let mut m = CMatrix::zeros(13, 13);
            for k in 0..5 {
                m[(k, k)] = b11;
                m[(k, k + 8)] = b12;
                m[(k + 8, k)] = b21;
                m[(k + 8, k + 8)] = b22;
            }
            for k in 5..8 {
                m[(k, k)] = mq;
            }
            m
        }
        (8, 7) => {
            let d: Vec<Complex<T>> = (0..13).map(|k| if k < 5 { qm1 } else { mq }).collect();
            CMatrix::from_diag(&d)
        }
        _ => return Err(unsupported()),
    };
    let basis = Arc::new(PathBasis::new(n, Label::I, BasisKind::Paper)?);
    Ok(Operator { matrix, basis })
}

fn diag_rows<T: Real>(d: &[Complex<T>]) -> Vec<Vec<Complex<T>>> {
    let n = d.len();
    (0..n).map(|i| (0..n).map(|j| if i == j { d[i] } else { Complex::new(T::zero(), T::zero()) }).collect()).collect()
}

fn paper_b4<T: Real>(i: usize) -> CMatrix<T> {
    let t = tau::<T>();
    let s = Complex::new(t.sqrt(), T::zero());
    if i == 2 {
        CMatrix::from_rows(vec![vec![q_pow::<T>(-3).scale(t), s], vec![s, -q_pow::<T>(3).scale(t)]])
            .expect("2x2")
    } else {
        CMatrix::from_diag(&[q_pow(-1), -q_pow::<T>(1)])
    }
}

/// Largest violations of far commutativity and the braid relation.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ArtinReport {
    pub strands: usize,
    pub charge: Label,
    pub dim: usize,
    pub max_commutation: f64,
    pub max_braid: f64,
    pub max_violation: f64,
    /// Generator pair (i, j) attaining `max_violation`, if any relation exists.
    pub worst: Option<(usize, usize)>,
}

/// Checks the Artin relations of a given generator family.
pub fn artin_check_matrices<T: Real>(gens: &[CMatrix<T>]) -> (f64, f64, Option<(usize, usize)>) {
    let f = |x: T| x.to_f64().unwrap_or(f64::NAN);
    let (mut comm, mut braid, mut worst, mut worst_v) = (0.0f64, 0.0f64, None, -1.0f64);
    for a in 0..gens.len() {
        for b in a + 1..gens.len() {
            let (ga, gb) = (&gens[a], &gens[b]);
            let v = if b == a + 1 {
                let lhs = &(ga * gb) * ga;
                let rhs = &(gb * ga) * gb;
                let v = f((&lhs - &rhs).spectral_norm());
                braid = braid.max(v);
                v
            } else {
                let v = f((&(ga * gb) - &(gb * ga)).spectral_norm());
                comm = comm.max(v);
                v
            };
            if v > worst_v {
                worst_v = v;
                worst = Some((a + 1, b + 1));
            }
        }
    }
    (comm, braid, worst)
}

pub fn artin_check<T: Real>(n: usize, charge: Label) -> Result<ArtinReport, BraidError> {
    let gens = generators_with::<T>(n, charge, &RData::default(), &Limits::default())?;
    let mats: Vec<CMatrix<T>> = gens.into_iter().map(|g| g.matrix).collect();
    let (c, b, worst) = artin_check_matrices(&mats);
    Ok(ArtinReport {
        strands: n,
        charge,
        dim: mats.first().map_or(0, CMatrix::rows),
        max_commutation: c,
        max_braid: b,
        max_violation: c.max(b),
        worst,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::eigenvalues_2x2;

    fn c(re: f64, im: f64) -> Complex<f64> {
        Complex::new(re, im)
    }

    #[test]
    fn defaults_reproduce_four_anyon_phases() {
        let r = RData::<f64>::default();
        assert!((r.u1_phase * r.r_i - q_pow(-1)).norm() < 1e-15);
        assert!((r.u1_phase * r.r_eps + q_pow::<f64>(1)).norm() < 1e-15);
        assert!(RData { r_i: c(2.0, 0.0), ..r }.validate().is_err());
    }

    #[test]
    fn f_is_an_involution() {
        let f = f_matrix::<f64>().to_matrix();
        assert!((&f * &f).max_abs_diff(&CMatrix::identity(2)) < 1e-14);
    }

    #[test]
    fn four_anyon_generators() {
        let b1 = generator::<f64>(4, 1, Label::I).unwrap().matrix;
        let b2 = generator::<f64>(4, 2, Label::I).unwrap().matrix;
        let b3 = generator::<f64>(4, 3, Label::I).unwrap().matrix;
        assert!(b1.max_abs_diff(&paper_b4(1)) < 1e-12);
        assert!(b2.max_abs_diff(&paper_b4(2)) < 1e-12);
        assert!(b3.max_abs_diff(&b1) < 1e-15);
        let f = f_matrix::<f64>().to_matrix();
        assert!((&(&f * &b1) * &f).max_abs_diff(&b2) < 1e-12);
        let bbb = &(&b1 * &b2) * &b1;
        assert!(bbb.max_abs_diff(&f.scale(c(-1.0, 0.0))) < 1e-12);
    }

    #[test]
    fn eigenvalues_are_q_inverse_and_minus_q() {
        let b2 = generator::<f64>(4, 2, Label::I).unwrap().matrix;
        let ev = eigenvalues_2x2(&b2);
        let (a, b): (Complex<f64>, Complex<f64>) = (q_pow(-1), -q_pow::<f64>(1));
        let ok = |x: Complex<f64>, y: Complex<f64>| (x - a).norm() < 1e-12 && (y - b).norm() < 1e-12;
        assert!(ok(ev[0], ev[1]) || ok(ev[1], ev[0]), "{ev:?}");
    }

    #[test]
    fn generators_are_unitary() {
        for n in 2..=10 {
            for ch in [Label::I, Label::Eps] {
                if crate::fusion::count_paths(n, ch).unwrap() == 0 {
                    continue;
                }
                for g in generators_with::<f64>(n, ch, &RData::default(), &Limits::default()).unwrap() {
                    assert!(g.unitarity_defect() < 1e-12, "n={n} {ch}");
                }
            }
        }
    }

    #[test]
    fn artin_holds_generically() {
        for (n, ch) in [(3, Label::Eps), (4, Label::I), (5, Label::Eps), (6, Label::I), (7, Label::I)] {
            let r = artin_check::<f64>(n, ch).unwrap();
            assert!(r.max_violation < 1e-12, "{r:?}");
        }
        let r = artin_check::<f64>(3, Label::Eps).unwrap();
        assert_eq!(r.max_commutation, 0.0);
        let pure = generators_with::<f64>(5, Label::I, &RData::pure_parafermion(), &Limits::default()).unwrap();
        let mats: Vec<_> = pure.into_iter().map(|g| g.matrix).collect();
        let (cm, br, _) = artin_check_matrices(&mats);
        assert!(cm.max(br) < 1e-12);
    }

    #[test]
    fn six_anyon_agreement_except_printed_b3() {
        for i in [1, 2, 4, 5] {
            let g = generator::<f64>(6, i, Label::I).unwrap().in_basis(BasisKind::Paper).unwrap();
            let p = paper_generator::<f64>(6, i).unwrap();
            assert!(g.matrix.max_abs_diff(&p.matrix) < 1e-12, "B{i}");
        }
        let g = generator::<f64>(6, 3, Label::I).unwrap().in_basis(BasisKind::Paper).unwrap();
        let mut p = paper_generator::<f64>(6, 3).unwrap().matrix;
        let d = (p[(3, 3)], p[(4, 4)]);
        p[(3, 3)] = d.1;
        p[(4, 4)] = d.0;
        assert!(g.matrix.max_abs_diff(&p) < 1e-12);
    }

    #[test]
    fn printed_b3_breaks_the_braid_relation() {
        let mats: Vec<CMatrix<f64>> = (1..6).map(|i| paper_generator::<f64>(6, i).unwrap().matrix).collect();
        let (_, braid, worst) = artin_check_matrices(&mats);
        assert!(braid > 0.1);
        assert!(matches!(worst, Some((2, 3)) | Some((3, 4))));
    }

    #[test]
    fn eight_anyon_last_generators_match() {
        for i in [6, 7] {
            let g = generator::<f64>(8, i, Label::I).unwrap().in_basis(BasisKind::Paper).unwrap();
            let p = paper_generator::<f64>(8, i).unwrap();
            assert!(g.matrix.max_abs_diff(&p.matrix) < 1e-12, "B{i}");
        }
        for i in [1, 2, 4, 5] {
            let g = generator::<f64>(8, i, Label::I).unwrap().in_basis(BasisKind::Paper).unwrap();
            let p = paper_generator::<f64>(8, i).unwrap();
            assert!(g.matrix.max_abs_diff(&p.matrix) < 1e-12, "B{i}");
        }
    }

    #[test]
    fn recursion_holds_for_lower_generators() {
        for n in 5..=10 {
            for i in 1..=n - 3 {
                let big = generator::<f64>(n, i, Label::I).unwrap().in_basis(BasisKind::Recursive).unwrap();
                let a = generator::<f64>(n - 2, i, Label::I).unwrap().in_basis(BasisKind::Recursive).unwrap();
                let b = generator::<f64>(n - 1, i, Label::I).unwrap().in_basis(BasisKind::Recursive).unwrap();
                assert!(big.matrix.max_abs_diff(&a.matrix.direct_sum(&b.matrix)) < 1e-14, "n={n} i={i}");
            }
        }
    }

    #[test]
    fn basis_roundtrip_and_json() {
        let g = generator::<f64>(6, 3, Label::I).unwrap();
        let back = g.in_basis(BasisKind::Paper).unwrap().in_basis(BasisKind::Canonical).unwrap();
        assert!(back.matrix.max_abs_diff(&g.matrix) < 1e-15);
        let js = g.to_json();
        assert_eq!(js.entries.len(), 5);
        assert_eq!(js.basis.as_ref().unwrap().paths[0], "IeIeIeI");
        let m: CMatrix<f64> = js.to_matrix().unwrap();
        assert_eq!(m, g.matrix);
    }

    #[test]
    fn errors_and_limits() {
        assert!(matches!(generator::<f64>(4, 4, Label::I), Err(BraidError::IndexOutOfRange { .. })));
        assert!(matches!(generator::<f64>(4, 0, Label::I), Err(BraidError::IndexOutOfRange { .. })));
        assert!(matches!(generator::<f64>(4, 1, Label::Psi1), Err(BraidError::Fusion(_))));
        let lim = Limits { max_strands: 6, max_dim: 100 };
        assert!(matches!(
            generator_with::<f64>(8, 1, Label::I, &RData::default(), &lim),
            Err(BraidError::TooLarge { .. })
        ));
        assert!(matches!(paper_generator::<f64>(5, 1), Err(BraidError::Unsupported { .. })));
    }

    #[test]
    fn single_precision_builds() {
        let g = generator::<f32>(6, 3, Label::I).unwrap();
        assert!(g.unitarity_defect() < 1e-5);
    }

    #[test]
    fn cache_returns_shared_instances() {
        let a = cached_generators(6, Label::I).unwrap();
        let b = cached_generators(6, Label::I).unwrap();
        assert!(Arc::ptr_eq(&a, &b));
        assert_eq!(a.len(), 5);
    }
}
