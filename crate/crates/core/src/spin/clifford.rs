use nalgebra::{DMatrix, DVector};
use num_complex::Complex;

use crate::error::{Error, Result};
use crate::scalar::Real;

/// Complex spinor components in the orthonormal frame trivialization.
pub type Spinor<T> = DVector<Complex<T>>;

pub const MIN_DIM: usize = 3;
pub const MAX_DIM: usize = 8;

/// Complex representation of `Cl(ℝⁿ)` with `γ_iγ_j + γ_jγ_i = −2δ_ij`.
///
/// For odd `n` the bundle is doubled: `c(X) = diag(c(X), −c(X))` on `S ⊕ S`
/// and `Q` swaps the two factors.
#[derive(Clone, Debug, PartialEq)]
pub struct CliffordRep<T: Real> {
    dim: usize,
    rank: usize,
    gammas: Vec<DMatrix<Complex<T>>>,
    chirality: DMatrix<Complex<T>>,
}

fn c<T: Real>(re: f64, im: f64) -> Complex<T> {
    Complex::new(T::lit(re), T::lit(im))
}

fn pauli<T: Real>() -> [DMatrix<Complex<T>>; 4] {
    let z = c::<T>(0.0, 0.0);
    let one = c::<T>(1.0, 0.0);
    let i = c::<T>(0.0, 1.0);
    [
        DMatrix::from_row_slice(2, 2, &[one, z, z, one]),
        DMatrix::from_row_slice(2, 2, &[z, one, one, z]),
        DMatrix::from_row_slice(2, 2, &[z, -i, i, z]),
        DMatrix::from_row_slice(2, 2, &[one, z, z, -one]),
    ]
}

fn kron_all<T: Real>(factors: &[&DMatrix<Complex<T>>]) -> DMatrix<Complex<T>> {
    factors.iter().fold(DMatrix::from_element(1, 1, c::<T>(1.0, 0.0)), |acc, f| acc.kronecker(f))
}

/// Jordan–Wigner construction from the Pauli matrices.
pub fn build_clifford<T: Real>(n: usize) -> Result<CliffordRep<T>> {
    if !(MIN_DIM..=MAX_DIM).contains(&n) {
        return Err(Error::UnsupportedDimension(n));
    }
    let k = n / 2;
    let [id, s1, s2, s3] = pauli::<T>();
    let i = c::<T>(0.0, 1.0);
    let mut gammas = Vec::with_capacity(n);
    for j in 0..k {
        for s in [&s1, &s2] {
            let mut f: Vec<&DMatrix<Complex<T>>> = vec![&s3; j];
            f.push(s);
            f.extend(std::iter::repeat(&id).take(k - j - 1));
            gammas.push(kron_all(&f) * i);
        }
    }
    let omega = kron_all(&vec![&s3; k]);
    let rank = 1 << k;
    let chirality = if n % 2 == 1 {
        gammas.push(&omega * i);
        let mut q = DMatrix::zeros(2 * rank, 2 * rank);
        let eye = DMatrix::<Complex<T>>::identity(rank, rank);
        q.view_mut((0, rank), (rank, rank)).copy_from(&eye);
        q.view_mut((rank, 0), (rank, rank)).copy_from(&eye);
        q
    } else {
        omega
    };
    Ok(CliffordRep { dim: n, rank, gammas, chirality })
}

/// Largest deviations from the defining relations.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CliffordResiduals {
    pub anticommutation: f64,
    pub skew_adjoint: f64,
    /// `Q* − Q`, `Q² − Id` and `Qc(e_i) + c(e_i)Q`.
    pub chirality: f64,
}

impl CliffordResiduals {
    pub fn max(&self) -> f64 {
        self.anticommutation.max(self.skew_adjoint).max(self.chirality)
    }
}

impl<T: Real> CliffordRep<T> {
    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Rank `2^k` of the spinor bundle `S`.
    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn is_doubled(&self) -> bool {
        self.dim % 2 == 1
    }

    /// Rank of the bundle `Q` acts on: `2^k`, or `2^{k+1}` for odd `n`.
    pub fn bundle_rank(&self) -> usize {
        if self.is_doubled() {
            2 * self.rank
        } else {
            self.rank
        }
    }

    /// `γ_i` on `S`, zero-based.
    pub fn gamma(&self, i: usize) -> Result<&DMatrix<Complex<T>>> {
        self.gammas.get(i).ok_or(Error::IndexOutOfRange { index: i, dim: self.dim })
    }

    pub fn gammas(&self) -> &[DMatrix<Complex<T>>] {
        &self.gammas
    }

    /// `c(X) = Σ X_i γ_i` on `S`.
    pub fn spinor_action(&self, x: &[T]) -> Result<DMatrix<Complex<T>>> {
        if x.len() != self.dim {
            return Err(Error::DimensionMismatch { expected: self.dim, got: x.len() });
        }
        let mut m = DMatrix::zeros(self.rank, self.rank);
        for (g, &xi) in self.gammas.iter().zip(x) {
            m += g * Complex::new(xi, T::zero());
        }
        Ok(m)
    }

    /// Clifford action on the bundle `Q` acts on.
    pub fn action(&self, x: &[T]) -> Result<DMatrix<Complex<T>>> {
        let m = self.spinor_action(x)?;
        Ok(self.lift(&m, true))
    }

    /// `diag(m, ±m)` for odd `n`, `m` otherwise.
    pub(crate) fn lift(&self, m: &DMatrix<Complex<T>>, flip: bool) -> DMatrix<Complex<T>> {
        if !self.is_doubled() {
            return m.clone();
        }
        let r = self.rank;
        let mut out = DMatrix::zeros(2 * r, 2 * r);
        out.view_mut((0, 0), (r, r)).copy_from(m);
        let lower = if flip { -m } else { m.clone() };
        out.view_mut((r, r), (r, r)).copy_from(&lower);
        out
    }

    /// Volume element for even `n`, the factor swap for odd `n`.
    pub fn chirality(&self) -> &DMatrix<Complex<T>> {
        &self.chirality
    }

    pub fn residuals(&self) -> CliffordResiduals {
        let r = self.rank;
        let eye = DMatrix::<Complex<T>>::identity(r, r);
        let two = Complex::new(T::lit(2.0), T::zero());
        let size = |m: DMatrix<Complex<T>>| {
            m.iter().map(|z| (z.re * z.re + z.im * z.im).sqrt().to_f64_lossy()).fold(0.0, f64::max)
        };
        let mut anti = 0.0f64;
        let mut skew = 0.0f64;
        for (i, gi) in self.gammas.iter().enumerate() {
            skew = skew.max(size(gi.adjoint() + gi));
            for (j, gj) in self.gammas.iter().enumerate() {
                let target = if i == j { -&eye * two } else { DMatrix::zeros(r, r) };
                anti = anti.max(size(gi * gj + gj * gi - target));
            }
        }
        let q = &self.chirality;
        let rb = self.bundle_rank();
        let mut chir = size(q.adjoint() - q).max(size(q * q - DMatrix::identity(rb, rb)));
        for i in 0..self.dim {
            let mut e = vec![T::zero(); self.dim];
            e[i] = T::one();
            let ci = self.action(&e).expect("dimension matches");
            chir = chir.max(size(q * &ci + &ci * q));
        }
        CliffordResiduals { anticommutation: anti, skew_adjoint: skew, chirality: chir }
    }
}

/// `⟨a, b⟩ = Σ a_i conj(b_i)`, complex linear in the first slot.
pub fn inner<T: Real>(a: &Spinor<T>, b: &Spinor<T>) -> Complex<T> {
    b.dotc(a)
}

/// The boundary chirality operator `𝒬 = Q c(ν)` for `ν = ∂_{x_n}`, with its
/// eigenprojections and orthonormal bases of the two eigenspaces.
#[derive(Clone, Debug)]
pub struct BoundaryChirality<T: Real> {
    pub operator: DMatrix<Complex<T>>,
    pub plus: DMatrix<Complex<T>>,
    pub minus: DMatrix<Complex<T>>,
    pub plus_basis: Vec<Spinor<T>>,
    pub minus_basis: Vec<Spinor<T>>,
}

/// Orthonormal basis of the column space of a projector, by Gram–Schmidt in column order.
pub(crate) fn range_basis<T: Real>(p: &DMatrix<Complex<T>>) -> Vec<Spinor<T>> {
    let mut basis: Vec<Spinor<T>> = Vec::new();
    for j in 0..p.ncols() {
        let mut v: Spinor<T> = p.column(j).into_owned();
        for b in &basis {
            let proj = b.dotc(&v);
            v -= b * proj;
        }
        let norm = v.norm();
        if norm.to_f64_lossy() > 1e-8 {
            basis.push(v / Complex::new(norm, T::zero()));
        }
    }
    basis
}

pub fn boundary_chirality<T: Real>(rep: &CliffordRep<T>) -> BoundaryChirality<T> {
    let mut nu = vec![T::zero(); rep.dim()];
    nu[rep.dim() - 1] = T::one();
    let operator = rep.chirality() * rep.action(&nu).expect("dimension matches");
    let rb = rep.bundle_rank();
    let eye = DMatrix::<Complex<T>>::identity(rb, rb);
    let half = Complex::new(T::lit(0.5), T::zero());
    let plus = (&eye + &operator) * half;
    let minus = (&eye - &operator) * half;
    let plus_basis = range_basis(&plus);
    let minus_basis = range_basis(&minus);
    BoundaryChirality { operator, plus, minus, plus_basis, minus_basis }
}

impl<T: Real> BoundaryChirality<T> {
    pub fn projector(&self, sign: Chirality) -> &DMatrix<Complex<T>> {
        match sign {
            Chirality::Plus => &self.plus,
            Chirality::Minus => &self.minus,
        }
    }

    pub fn basis(&self, sign: Chirality) -> &[Spinor<T>] {
        match sign {
            Chirality::Plus => &self.plus_basis,
            Chirality::Minus => &self.minus_basis,
        }
    }
}

/// Eigenvalue `±1` of `𝒬`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Chirality {
    Plus,
    Minus,
}

impl Chirality {
    pub fn sign(self) -> f64 {
        match self {
            Chirality::Plus => 1.0,
            Chirality::Minus => -1.0,
        }
    }
}
