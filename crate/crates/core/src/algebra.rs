//! H-type Lie algebras `n = v ⊕ z` given by structure matrices `C^1..C^r`.
//!
//! The structure matrices are skew-symmetric, square to `-Id` and pairwise
//! anticommute. They are built from Kronecker products of the 2×2 blocks
//!
//! ```text
//! E = [[1, 0], [0, 1]]   J = [[0, -1], [1, 0]]
//! K = [[0, 1], [1, 0]]   L = [[1, 0], [0, -1]]
//! ```
//!
//! so every entry lies in `{-1, 0, 1}` and the relations hold exactly in
//! floating point. The bracket convention is `[v, w]_k = ⟨C^k v, w⟩`.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};

/// Minimal dimension of a real module carrying `r` anticommuting complex
/// structures: `(2, 4, 4, 8, 8, 8, 8, 16)` for `r = 1..=8`, then
/// `d(r + 8) = 16 d(r)`.
pub fn min_module_dim(r: usize) -> Result<usize> {
    const BASE: [usize; 8] = [2, 4, 4, 8, 8, 8, 8, 16];
    if r == 0 {
        return Err(Error::InvalidRank(r));
    }
    let periods = (r - 1) / 8;
    let mut d = BASE[(r - 1) % 8];
    for _ in 0..periods {
        d = d.checked_mul(16).ok_or(Error::DimensionOverflow(r))?;
    }
    Ok(d)
}

fn block(entries: [i8; 4]) -> DMatrix<f64> {
    DMatrix::from_row_slice(2, 2, &entries.map(f64::from))
}

fn e() -> DMatrix<f64> {
    DMatrix::identity(2, 2)
}
fn j() -> DMatrix<f64> {
    block([0, -1, 1, 0])
}
fn k() -> DMatrix<f64> {
    block([0, 1, 1, 0])
}
fn l() -> DMatrix<f64> {
    block([1, 0, 0, -1])
}

fn kron(factors: &[DMatrix<f64>]) -> DMatrix<f64> {
    factors
        .iter()
        .skip(1)
        .fold(factors[0].clone(), |acc, f| acc.kronecker(f))
}

/// Seven anticommuting complex structures on R^8: left multiplication by
/// the imaginary quaternions tensored with `K`, `J ⊗ Id`, and the right
/// quaternion multiplications tensored with `L`.
fn octonionic_family() -> Vec<DMatrix<f64>> {
    vec![
        kron(&[k(), j(), e()]),
        kron(&[k(), k(), j()]),
        kron(&[k(), l(), j()]),
        kron(&[j(), e(), e()]),
        kron(&[l(), e(), j()]),
        kron(&[l(), j(), k()]),
        kron(&[l(), j(), l()]),
    ]
}

fn quaternionic_family() -> Vec<DMatrix<f64>> {
    vec![kron(&[j(), e()]), kron(&[k(), j()]), kron(&[l(), j()])]
}

/// Eight anticommuting complex structures on R^16.
fn clifford8_family() -> Vec<DMatrix<f64>> {
    let eye8 = DMatrix::identity(8, 8);
    let mut gens: Vec<_> = octonionic_family()
        .iter()
        .map(|g| k().kronecker(g))
        .collect();
    gens.push(j().kronecker(&eye8));
    gens
}

/// Irreducible family of `r` generators on R^{d(r)}.
fn minimal_family(r: usize) -> Vec<DMatrix<f64>> {
    match r {
        1 => vec![j()],
        2 | 3 => quaternionic_family().into_iter().take(r).collect(),
        4..=7 => octonionic_family().into_iter().take(r).collect(),
        8 => clifford8_family(),
        _ => {
            // Cl_{r} from Cl_{r-8}: eps_i ⊗ Id and vol ⊗ gamma_j, where vol is
            // the (symmetric, involutive) product of the eight eps_i.
            let eps = clifford8_family();
            let inner = minimal_family(r - 8);
            let d_inner = inner[0].nrows();
            let vol = eps
                .iter()
                .skip(1)
                .fold(eps[0].clone(), |acc, g| acc * g);
            let eye = DMatrix::identity(d_inner, d_inner);
            eps.iter()
                .map(|g| g.kronecker(&eye))
                .chain(inner.iter().map(|g| vol.kronecker(g)))
                .collect()
        }
    }
}

/// An H-type Lie algebra described by its structure matrices.
#[derive(Debug, Clone, PartialEq)]
pub struct HTypeAlgebra {
    m: usize,
    c: Vec<DMatrix<f64>>,
}

impl HTypeAlgebra {
    /// Builds the algebra with center dimension `r` and horizontal dimension
    /// `m`. For `m > d(r)` the module is a direct sum of `m / d(r)` copies
    /// of the irreducible one.
    pub fn build(r: usize, m: usize) -> Result<Self> {
        let d = min_module_dim(r)?;
        if m == 0 || !m.is_multiple_of(d) {
            return Err(Error::NoCliffordModule { r, m, d });
        }
        let copies = DMatrix::<f64>::identity(m / d, m / d);
        let c = minimal_family(r)
            .iter()
            .map(|g| copies.kronecker(g))
            .collect();
        let alg = Self { m, c };
        let violation = alg.verify_relations();
        if violation != 0.0 {
            return Err(Error::RelationsViolated(violation));
        }
        Ok(alg)
    }

    /// Wraps arbitrary structure matrices after checking that they are
    /// square, share one size, and are finite. The H-type relations are not
    /// checked here; see [`HTypeAlgebra::verify_relations`] and
    /// [`HTypeAlgebra::validated`].
    pub fn from_matrices(c: Vec<DMatrix<f64>>) -> Result<Self> {
        let first = c.first().ok_or(Error::InvalidRank(0))?;
        let m = first.nrows();
        if m == 0 {
            return Err(Error::Invalid("empty structure matrix".into()));
        }
        for mat in &c {
            if mat.nrows() != m || mat.ncols() != m {
                return Err(Error::DimensionMismatch {
                    what: "structure matrix",
                    expected: m,
                    found: if mat.nrows() != m { mat.nrows() } else { mat.ncols() },
                });
            }
            if mat.iter().any(|v| !v.is_finite()) {
                return Err(Error::NonFinite("structure matrix"));
            }
        }
        Ok(Self { m, c })
    }

    /// Like [`HTypeAlgebra::from_matrices`], but rejects any family whose
    /// relations do not hold exactly or whose size is not admissible.
    pub fn validated(c: Vec<DMatrix<f64>>) -> Result<Self> {
        let alg = Self::from_matrices(c)?;
        let violation = alg.verify_relations();
        if violation > 0.0 {
            return Err(Error::RelationsViolated(violation));
        }
        let d = min_module_dim(alg.r())?;
        if alg.m % d != 0 {
            return Err(Error::NoCliffordModule { r: alg.r(), m: alg.m, d });
        }
        Ok(alg)
    }

    /// Center dimension.
    pub fn r(&self) -> usize {
        self.c.len()
    }

    /// Horizontal dimension.
    pub fn m(&self) -> usize {
        self.m
    }

    pub fn structure_matrices(&self) -> &[DMatrix<f64>] {
        &self.c
    }

    pub fn structure_matrix(&self, k: usize) -> &DMatrix<f64> {
        &self.c[k]
    }

    /// Largest entry-wise residual of skew-symmetry, `(C^k)^2 = -Id` and
    /// anticommutation over all generators. Zero means the relations hold
    /// exactly.
    pub fn verify_relations(&self) -> f64 {
        let eye = DMatrix::<f64>::identity(self.m, self.m);
        let mut worst: f64 = 0.0;
        for (idx, ck) in self.c.iter().enumerate() {
            worst = worst.max((ck + ck.transpose()).amax());
            worst = worst.max((ck * ck + &eye).amax());
            for cp in &self.c[idx + 1..] {
                worst = worst.max((ck * cp + cp * ck).amax());
            }
        }
        worst
    }

    fn check_horizontal(&self, v: &DVector<f64>, what: &'static str) -> Result<()> {
        if v.len() != self.m {
            return Err(Error::DimensionMismatch {
                what,
                expected: self.m,
                found: v.len(),
            });
        }
        Ok(())
    }

    fn check_vertical(&self, z: &DVector<f64>, what: &'static str) -> Result<()> {
        if z.len() != self.r() {
            return Err(Error::DimensionMismatch {
                what,
                expected: self.r(),
                found: z.len(),
            });
        }
        Ok(())
    }

    /// Lie bracket of two horizontal vectors: `[v, w]_k = ⟨C^k v, w⟩`.
    pub fn bracket(&self, v: &DVector<f64>, w: &DVector<f64>) -> Result<DVector<f64>> {
        self.check_horizontal(v, "bracket argument")?;
        self.check_horizontal(w, "bracket argument")?;
        Ok(DVector::from_iterator(
            self.r(),
            self.c.iter().map(|ck| (ck * v).dot(w)),
        ))
    }

    /// `J_Z v = (Σ_k Z_k C^k) v`, dual to the bracket:
    /// `⟨J_Z v, w⟩ = ⟨Z, [v, w]⟩`.
    pub fn j_map(&self, z: &DVector<f64>, v: &DVector<f64>) -> Result<DVector<f64>> {
        self.check_vertical(z, "J-map vertical argument")?;
        self.check_horizontal(v, "J-map horizontal argument")?;
        Ok(self.combine(z.as_slice()) * v)
    }

    /// `Σ_k coeffs_k C^k`. Callers guarantee `coeffs.len() == r`.
    pub(crate) fn combine(&self, coeffs: &[f64]) -> DMatrix<f64> {
        let mut out = DMatrix::zeros(self.m, self.m);
        for (ck, &a) in self.c.iter().zip(coeffs) {
            if a != 0.0 {
                out += ck * a;
            }
        }
        out
    }

    /// `Ω = Σ_k θ_k C^k`, which satisfies `Ω^2 = -|θ|^2 Id`.
    pub fn omega(&self, theta: &Covector) -> Result<DMatrix<f64>> {
        self.check_vertical(theta.as_vector(), "covector")?;
        Ok(self.combine(theta.as_vector().as_slice()))
    }
}

/// A point `(x, z)` of the group in exponential coordinates.
#[derive(Debug, Clone, PartialEq)]
pub struct GroupPoint {
    pub x: DVector<f64>,
    pub z: DVector<f64>,
}

impl GroupPoint {
    pub fn new(alg: &HTypeAlgebra, x: Vec<f64>, z: Vec<f64>) -> Result<Self> {
        Self::from_vectors(alg, DVector::from_vec(x), DVector::from_vec(z))
    }

    pub fn from_vectors(alg: &HTypeAlgebra, x: DVector<f64>, z: DVector<f64>) -> Result<Self> {
        alg.check_horizontal(&x, "horizontal part")?;
        alg.check_vertical(&z, "vertical part")?;
        if x.iter().chain(z.iter()).any(|v| !v.is_finite()) {
            return Err(Error::NonFinite("group point"));
        }
        Ok(Self { x, z })
    }

    pub fn origin(alg: &HTypeAlgebra) -> Self {
        Self {
            x: DVector::zeros(alg.m()),
            z: DVector::zeros(alg.r()),
        }
    }
}

/// Vertical covector `θ` with its cached Euclidean norm.
#[derive(Debug, Clone, PartialEq)]
pub struct Covector {
    theta: DVector<f64>,
    norm: f64,
}

impl Covector {
    pub fn new(theta: DVector<f64>) -> Result<Self> {
        if theta.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite("covector"));
        }
        let norm = theta.norm();
        Ok(Self { theta, norm })
    }

    pub fn from_vec(theta: Vec<f64>) -> Result<Self> {
        Self::new(DVector::from_vec(theta))
    }

    pub fn zeros(r: usize) -> Self {
        Self {
            theta: DVector::zeros(r),
            norm: 0.0,
        }
    }

    pub fn as_vector(&self) -> &DVector<f64> {
        &self.theta
    }

    pub fn norm(&self) -> f64 {
        self.norm
    }

    pub fn is_zero(&self) -> bool {
        self.norm == 0.0
    }

    pub fn len(&self) -> usize {
        self.theta.len()
    }

    pub fn is_empty(&self) -> bool {
        self.theta.is_empty()
    }
}
