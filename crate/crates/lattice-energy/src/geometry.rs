//! Lattices, periodic point configurations and the Gaussian potential.
//!
//! A lattice is a full-rank discrete subgroup of R^d described by an
//! invertible basis matrix whose *columns* are the generators. A periodic
//! configuration is a finite union of translates of one lattice,
//!
//! ```text
//! Gamma = union_{j=1..J} (Lambda + x_j),   x_j - x_k not in Lambda for j != k,
//! ```
//!
//! with density J / covol(Lambda). Everything here is immutable after
//! construction and safe to share across threads.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};

/// Relative tolerance below which a basis counts as singular.
const SINGULAR_REL_TOL: f64 = 1e-12;

/// Tolerance (in lattice-basis coordinates) for deciding that two shifts
/// coincide modulo the lattice.
const SHIFT_DISTINCT_TOL: f64 = 1e-9;

/// Full-rank lattice `B Z^d` with cached covolume and inverse basis.
#[derive(Debug, Clone)]
pub struct Lattice {
    basis: DMatrix<f64>,
    inv_basis: DMatrix<f64>,
    covolume: f64,
}

impl Lattice {
    /// Builds a lattice from a square basis matrix (columns are generators).
    pub fn from_basis(basis: DMatrix<f64>) -> Result<Self> {
        let d = basis.nrows();
        if d == 0 || basis.ncols() != d {
            return Err(Error::Validation(format!(
                "basis must be square and nonempty, got {}x{}",
                basis.nrows(),
                basis.ncols()
            )));
        }
        // Scale for the singularity test: Hadamard bound on |det|.
        let scale: f64 = (0..d).map(|j| basis.column(j).norm()).product();
        let det = basis.determinant();
        if !det.is_finite() || scale == 0.0 || det.abs() <= SINGULAR_REL_TOL * scale {
            return Err(Error::DegenerateLattice(format!(
                "det = {det:.3e} relative to column scale {scale:.3e}"
            )));
        }
        let inv_basis = basis.clone().try_inverse().ok_or_else(|| {
            Error::DegenerateLattice("basis matrix is not invertible".to_string())
        })?;
        Ok(Self {
            covolume: det.abs(),
            basis,
            inv_basis,
        })
    }

    /// Convenience constructor from column-major data.
    pub fn from_columns(columns: &[Vec<f64>]) -> Result<Self> {
        let d = columns.len();
        if columns.iter().any(|c| c.len() != d) {
            return Err(Error::Validation(
                "basis columns must all have length equal to the dimension".to_string(),
            ));
        }
        let mut m = DMatrix::zeros(d, d);
        for (j, col) in columns.iter().enumerate() {
            for (i, v) in col.iter().enumerate() {
                m[(i, j)] = *v;
            }
        }
        Self::from_basis(m)
    }

    /// `diag(entries) Z^d`.
    pub fn diagonal(entries: &[f64]) -> Result<Self> {
        let d = entries.len();
        let mut m = DMatrix::zeros(d, d);
        for (i, v) in entries.iter().enumerate() {
            m[(i, i)] = *v;
        }
        Self::from_basis(m)
    }

    /// The integer lattice Z^d.
    pub fn integer(d: usize) -> Self {
        Self::from_basis(DMatrix::identity(d, d)).expect("identity basis is never singular")
    }

    pub fn dim(&self) -> usize {
        self.basis.nrows()
    }

    pub fn basis(&self) -> &DMatrix<f64> {
        &self.basis
    }

    pub fn inv_basis(&self) -> &DMatrix<f64> {
        &self.inv_basis
    }

    /// Volume of the fundamental parallelepiped, |det basis|.
    pub fn covolume(&self) -> f64 {
        self.covolume
    }

    /// Points per unit volume of the bare lattice, 1 / covolume.
    pub fn density(&self) -> f64 {
        1.0 / self.covolume
    }

    /// The lattice scaled by `s > 0`.
    pub fn scaled(&self, s: f64) -> Result<Self> {
        if !(s > 0.0) || !s.is_finite() {
            return Err(Error::Validation(format!("scale must be positive, got {s}")));
        }
        Self::from_basis(&self.basis * s)
    }

    /// The lattice point `B n`.
    pub fn point(&self, n: &[i64]) -> DVector<f64> {
        let coeffs = DVector::from_iterator(n.len(), n.iter().map(|&k| k as f64));
        &self.basis * coeffs
    }

    /// Coordinates of `x` in the lattice basis, `B^{-1} x`.
    pub fn basis_coords(&self, x: &DVector<f64>) -> DVector<f64> {
        &self.inv_basis * x
    }

    /// Reduces `x` modulo the lattice into the basis parallelepiped
    /// (basis coordinates in `[0, 1)`).
    pub fn reduce_to_fundamental(&self, x: &DVector<f64>) -> DVector<f64> {
        let mut t = self.basis_coords(x);
        for v in t.iter_mut() {
            *v -= v.floor();
            // floor of a value just below an integer can leave exactly 1.0
            if *v >= 1.0 {
                *v = 0.0;
            }
        }
        &self.basis * t
    }

    /// Reduces `x` modulo the lattice with basis coordinates in `[-1/2, 1/2)`,
    /// which keeps the representative short.
    pub fn reduce_centered(&self, x: &DVector<f64>) -> DVector<f64> {
        let mut t = self.basis_coords(x);
        for v in t.iter_mut() {
            *v -= v.round();
        }
        &self.basis * t
    }

    /// Distance of `x` to the lattice measured in basis coordinates,
    /// `max_i |t_i - round(t_i)|` for `t = B^{-1} x`.
    pub fn coord_distance_to_lattice(&self, x: &DVector<f64>) -> f64 {
        let t = self.basis_coords(x);
        t.iter().map(|v| (v - v.round()).abs()).fold(0.0, f64::max)
    }

    /// Dual lattice: basis is the inverse transpose, so covolumes multiply to 1.
    pub fn dual(&self) -> Result<Self> {
        Self::from_basis(self.inv_basis.transpose())
    }

    /// Adjoint lattice (2D only): the 90-degree rotation `J` applied to the
    /// dual basis. For unit covolume the adjoint equals the lattice itself.
    pub fn adjoint(&self) -> Result<Self> {
        if self.dim() != 2 {
            return Err(Error::UnsupportedDimension {
                dim: self.dim(),
                reason: "adjoint lattice is defined via the symplectic form in R^2".to_string(),
            });
        }
        let dual = self.dual()?;
        let j = DMatrix::from_row_slice(2, 2, &[0.0, -1.0, 1.0, 0.0]);
        Self::from_basis(j * dual.basis)
    }

    /// Gram matrix `B^T B`.
    pub fn gram(&self) -> DMatrix<f64> {
        self.basis.transpose() * &self.basis
    }

    /// Lagrange (Gauss) reduction of a 2D lattice basis. Returns the reduced
    /// Gram triple `(a, b, c)` with `0 <= 2b <= a <= c`, which is a complete
    /// congruence invariant for 2D lattices modulo orthogonal maps.
    pub fn lagrange_reduced_gram(&self) -> Result<(f64, f64, f64)> {
        if self.dim() != 2 {
            return Err(Error::UnsupportedDimension {
                dim: self.dim(),
                reason: "Lagrange reduction implemented for 2D only".to_string(),
            });
        }
        let mut u = self.basis.column(0).clone_owned();
        let mut v = self.basis.column(1).clone_owned();
        for _ in 0..1000 {
            if v.norm_squared() < u.norm_squared() {
                std::mem::swap(&mut u, &mut v);
            }
            let r = (u.dot(&v) / u.norm_squared()).round();
            if r == 0.0 {
                break;
            }
            v -= &u * r;
        }
        let mut b = u.dot(&v);
        if b < 0.0 {
            b = -b; // reflecting v is an orthogonal change, allowed by congruence
        }
        Ok((u.norm_squared(), b, v.norm_squared()))
    }

    /// Whether two lattices agree up to an orthogonal transformation (and
    /// basis change). Implemented by comparing Lagrange-reduced Gram triples;
    /// supported in dimensions 1 and 2.
    pub fn congruent(&self, other: &Lattice, tol: f64) -> Result<bool> {
        if self.dim() != other.dim() {
            return Err(Error::Validation(format!(
                "congruence needs equal dimensions, got {} and {}",
                self.dim(),
                other.dim()
            )));
        }
        match self.dim() {
            1 => {
                let a = self.covolume;
                let b = other.covolume;
                Ok((a - b).abs() <= tol * a.max(b))
            }
            2 => {
                let (a1, b1, c1) = self.lagrange_reduced_gram()?;
                let (a2, b2, c2) = other.lagrange_reduced_gram()?;
                let scale = [a1, c1, a2, c2].into_iter().fold(0.0, f64::max);
                Ok((a1 - a2).abs() <= tol * scale
                    && (b1 - b2).abs() <= tol * scale
                    && (c1 - c2).abs() <= tol * scale)
            }
            d => Err(Error::UnsupportedDimension {
                dim: d,
                reason: "congruence test implemented for d <= 2".to_string(),
            }),
        }
    }

    /// Squared length of a shortest nonzero vector (d <= 2).
    pub fn shortest_vector_sq(&self) -> Result<f64> {
        match self.dim() {
            1 => Ok(self.covolume * self.covolume),
            2 => Ok(self.lagrange_reduced_gram()?.0),
            d => Err(Error::UnsupportedDimension {
                dim: d,
                reason: "shortest vector via reduction implemented for d <= 2".to_string(),
            }),
        }
    }
}

/// Periodic configuration: a lattice together with `J >= 1` shift vectors,
/// pairwise distinct modulo the lattice.
#[derive(Debug, Clone)]
pub struct PeriodicConfig {
    lattice: Lattice,
    shifts: Vec<DVector<f64>>,
}

impl PeriodicConfig {
    pub fn new(lattice: Lattice, shifts: Vec<DVector<f64>>) -> Result<Self> {
        if shifts.is_empty() {
            return Err(Error::Validation("configuration needs at least one shift".into()));
        }
        let d = lattice.dim();
        if shifts.iter().any(|s| s.len() != d) {
            return Err(Error::Validation(format!(
                "all shifts must have dimension {d}"
            )));
        }
        for j in 0..shifts.len() {
            for k in (j + 1)..shifts.len() {
                let diff = &shifts[j] - &shifts[k];
                if lattice.coord_distance_to_lattice(&diff) <= SHIFT_DISTINCT_TOL {
                    return Err(Error::Validation(format!(
                        "shifts {j} and {k} coincide modulo the lattice"
                    )));
                }
            }
        }
        Ok(Self { lattice, shifts })
    }

    /// The bare lattice as a configuration with the single shift 0.
    pub fn lattice_only(lattice: Lattice) -> Self {
        let d = lattice.dim();
        Self {
            lattice,
            shifts: vec![DVector::zeros(d)],
        }
    }

    pub fn lattice(&self) -> &Lattice {
        &self.lattice
    }

    pub fn shifts(&self) -> &[DVector<f64>] {
        &self.shifts
    }

    pub fn num_shifts(&self) -> usize {
        self.shifts.len()
    }

    pub fn dim(&self) -> usize {
        self.lattice.dim()
    }

    /// Average number of points per unit volume, `J / covol`.
    pub fn density(&self) -> f64 {
        self.shifts.len() as f64 / self.lattice.covolume()
    }

    /// The configuration scaled by `s > 0` (lattice and shifts alike).
    pub fn scaled(&self, s: f64) -> Result<Self> {
        let lattice = self.lattice.scaled(s)?;
        let shifts = self.shifts.iter().map(|x| x * s).collect();
        // Distinctness is scale invariant; rebuild without re-checking.
        Ok(Self { lattice, shifts })
    }

    /// Rescales so the density becomes `rho`; the scale factor is
    /// `(density / rho)^(1/d)`.
    pub fn normalized_to_density(&self, rho: f64) -> Result<Self> {
        if !(rho > 0.0) || !rho.is_finite() {
            return Err(Error::Validation(format!(
                "target density must be positive, got {rho}"
            )));
        }
        let s = (self.density() / rho).powf(1.0 / self.dim() as f64);
        self.scaled(s)
    }
}

/// Gaussian potential `phi(r) = exp(-a r^2)` where the raw exponent is
/// `a = alpha` or `a = pi * alpha` depending on `pi_scaled`. The flag exists
/// because energies are quoted in both conventions; keeping it explicit
/// avoids silent factor-of-pi mistakes.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GaussianPotential {
    pub alpha: f64,
    pub pi_scaled: bool,
}

impl GaussianPotential {
    pub fn new(alpha: f64, pi_scaled: bool) -> Result<Self> {
        if !(alpha > 0.0) || !alpha.is_finite() {
            return Err(Error::Validation(format!(
                "Gaussian width must be positive, got {alpha}"
            )));
        }
        Ok(Self { alpha, pi_scaled })
    }

    /// `exp(-alpha r^2)` convention.
    pub fn raw(alpha: f64) -> Result<Self> {
        Self::new(alpha, false)
    }

    /// `exp(-pi alpha r^2)` convention.
    pub fn pi_scaled(alpha: f64) -> Result<Self> {
        Self::new(alpha, true)
    }

    /// The exponent actually multiplying `r^2`.
    pub fn raw_exponent(&self) -> f64 {
        if self.pi_scaled {
            std::f64::consts::PI * self.alpha
        } else {
            self.alpha
        }
    }

    pub fn eval(&self, r2: f64) -> f64 {
        (-self.raw_exponent() * r2).exp()
    }
}
