use std::sync::OnceLock;

use nalgebra::DMatrix;
use num_complex::Complex64;

use super::system::{check_unique, offsets, position, total_dim, SystemLabel};
use super::{C64, DENSITY_TRACE_TOL, PSD_TOL};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy)]
struct Flags {
    hermitian_deviation: f64,
    min_eigenvalue: f64,
}

/// Square complex matrix over an ordered list of labeled subsystems.
///
/// The matrix index of a basis vector `|i_0 i_1 ... i_{n-1}>` is
/// `sum_s i_s * prod_{t>s} dim_t`, so the first system is the most
/// significant digit and the layout agrees with the Kronecker product.
#[derive(Debug, Clone)]
pub struct MultipartiteOperator {
    systems: Vec<SystemLabel>,
    matrix: DMatrix<C64>,
    flags: OnceLock<Flags>,
}

impl PartialEq for MultipartiteOperator {
    fn eq(&self, other: &Self) -> bool {
        self.systems == other.systems && self.matrix == other.matrix
    }
}

impl MultipartiteOperator {
    pub fn new(systems: Vec<SystemLabel>, matrix: DMatrix<C64>) -> Result<Self> {
        check_unique(&systems)?;
        let side = total_dim(&systems);
        if matrix.nrows() != side || matrix.ncols() != side {
            return Err(Error::DimensionMismatch(format!(
                "matrix is {}x{} but systems span dimension {side}",
                matrix.nrows(),
                matrix.ncols()
            )));
        }
        Ok(Self {
            systems,
            matrix,
            flags: OnceLock::new(),
        })
    }

    /// The 1x1 operator `[value]` on no systems.
    pub fn scalar(value: C64) -> Self {
        Self {
            systems: Vec::new(),
            matrix: DMatrix::from_element(1, 1, value),
            flags: OnceLock::new(),
        }
    }

    pub fn identity(systems: Vec<SystemLabel>) -> Result<Self> {
        let d = total_dim(&systems);
        Self::new(systems, DMatrix::identity(d, d))
    }

    /// `pi = I / d` on the given systems.
    pub fn maximally_mixed(systems: Vec<SystemLabel>) -> Result<Self> {
        let d = total_dim(&systems);
        Self::new(systems, DMatrix::identity(d, d).scale(1.0 / d as f64))
    }

    pub fn from_diagonal(systems: Vec<SystemLabel>, diag: &[f64]) -> Result<Self> {
        let v: Vec<C64> = diag.iter().map(|&x| Complex64::new(x, 0.0)).collect();
        let d = v.len();
        let mut m = DMatrix::zeros(d, d);
        m.set_diagonal(&nalgebra::DVector::from_vec(v));
        Self::new(systems, m)
    }

    pub fn systems(&self) -> &[SystemLabel] {
        &self.systems
    }

    pub fn system(&self, name: &str) -> Result<&SystemLabel> {
        Ok(&self.systems[position(&self.systems, name)?])
    }

    pub fn names(&self) -> Vec<&str> {
        self.systems.iter().map(SystemLabel::name).collect()
    }

    pub fn dims(&self) -> Vec<usize> {
        self.systems.iter().map(SystemLabel::dim).collect()
    }

    pub fn side(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn matrix(&self) -> &DMatrix<C64> {
        &self.matrix
    }

    pub fn into_matrix(self) -> DMatrix<C64> {
        self.matrix
    }

    pub fn has_system(&self, name: &str) -> bool {
        self.systems.iter().any(|s| s.name() == name)
    }

    pub fn trace(&self) -> C64 {
        self.matrix.trace()
    }

    pub fn dagger(&self) -> Self {
        self.with_matrix(self.matrix.adjoint())
    }

    pub fn scale(&self, c: f64) -> Self {
        self.with_matrix(self.matrix.scale(c))
    }

    /// Same systems, new entries. The caller guarantees matching shape.
    pub(crate) fn with_matrix(&self, matrix: DMatrix<C64>) -> Self {
        debug_assert_eq!(matrix.nrows(), self.side());
        Self {
            systems: self.systems.clone(),
            matrix,
            flags: OnceLock::new(),
        }
    }

    /// Renames systems in place of position; dimensions must agree.
    pub fn relabel(&self, systems: Vec<SystemLabel>) -> Result<Self> {
        if systems.len() != self.systems.len()
            || systems.iter().zip(&self.systems).any(|(a, b)| a.dim() != b.dim())
        {
            return Err(Error::DimensionMismatch(
                "relabeling must preserve the dimension list".into(),
            ));
        }
        Self::new(systems, self.matrix.clone())
    }

    pub fn rename(&self, from: &str, to: &str) -> Result<Self> {
        let mut systems = self.systems.clone();
        let p = position(&systems, from)?;
        systems[p] = systems[p].renamed(to);
        Self::new(systems, self.matrix.clone())
    }

    fn flags(&self) -> Flags {
        *self.flags.get_or_init(|| {
            let dev = (&self.matrix - self.matrix.adjoint()).norm();
            let herm = self.matrix.clone() + self.matrix.adjoint();
            let eig = herm.scale(0.5).symmetric_eigenvalues();
            Flags {
                hermitian_deviation: dev,
                min_eigenvalue: eig.iter().cloned().fold(f64::INFINITY, f64::min),
            }
        })
    }

    pub fn hermitian_deviation(&self) -> f64 {
        self.flags().hermitian_deviation
    }

    pub fn is_hermitian(&self) -> bool {
        self.hermitian_deviation() <= PSD_TOL * self.scale_hint()
    }

    /// Minimum eigenvalue of the Hermitian part.
    pub fn min_eigenvalue(&self) -> f64 {
        self.flags().min_eigenvalue
    }

    pub fn is_psd(&self) -> bool {
        self.is_hermitian() && self.min_eigenvalue() >= -PSD_TOL * self.scale_hint()
    }

    pub fn is_density(&self) -> bool {
        self.is_psd() && (self.trace().re - 1.0).abs() <= DENSITY_TRACE_TOL
    }

    fn scale_hint(&self) -> f64 {
        self.matrix.norm().max(1.0)
    }

    pub fn ensure_psd(&self) -> Result<()> {
        if !self.is_hermitian() {
            return Err(Error::NotHermitian {
                deviation: self.hermitian_deviation(),
            });
        }
        if !self.is_psd() {
            return Err(Error::NotPsd {
                min_eigenvalue: self.min_eigenvalue(),
            });
        }
        Ok(())
    }

    /// Kronecker product; systems are concatenated.
    pub fn tensor_product(&self, other: &Self) -> Result<Self> {
        let mut systems = self.systems.clone();
        systems.extend(other.systems.iter().cloned());
        check_unique(&systems)?;
        Self::new(systems, self.matrix.kronecker(&other.matrix))
    }

    /// Traces out everything not named in `keep`; kept systems retain their
    /// relative order.
    pub fn partial_trace<S: AsRef<str>>(&self, keep: &[S]) -> Result<Self> {
        let mut keep_pos = Vec::with_capacity(keep.len());
        for k in keep {
            let p = position(&self.systems, k.as_ref())?;
            if keep_pos.contains(&p) {
                return Err(Error::SystemClash(k.as_ref().to_owned()));
            }
            keep_pos.push(p);
        }
        keep_pos.sort_unstable();
        let traced: Vec<usize> = (0..self.systems.len())
            .filter(|p| !keep_pos.contains(p))
            .collect();
        let dims = self.dims();
        let kept_off = offsets(&dims, &keep_pos);
        let traced_off = offsets(&dims, &traced);
        let dk = kept_off.len();
        let m = &self.matrix;
        let out = DMatrix::from_fn(dk, dk, |r, c| {
            let (br, bc) = (kept_off[r], kept_off[c]);
            traced_off.iter().map(|&t| m[(br + t, bc + t)]).sum::<C64>()
        });
        let systems = keep_pos.iter().map(|&p| self.systems[p].clone()).collect();
        Self::new(systems, out)
    }

    pub fn trace_out<S: AsRef<str>>(&self, remove: &[S]) -> Result<Self> {
        for r in remove {
            position(&self.systems, r.as_ref())?;
        }
        let keep: Vec<&str> = self
            .names()
            .into_iter()
            .filter(|n| !remove.iter().any(|r| r.as_ref() == *n))
            .collect();
        self.partial_trace(&keep)
    }

    /// `order[j]` is the old position of the system that ends up at position `j`.
    pub fn permute_systems(&self, order: &[usize]) -> Result<Self> {
        let n = self.systems.len();
        let mut seen = vec![false; n];
        if order.len() != n {
            return Err(Error::NotPermutation);
        }
        for &o in order {
            if o >= n || seen[o] {
                return Err(Error::NotPermutation);
            }
            seen[o] = true;
        }
        if order.iter().enumerate().all(|(i, &o)| i == o) {
            return Ok(self.clone());
        }
        let map = permutation_map(&self.dims(), order);
        let m = &self.matrix;
        let out = DMatrix::from_fn(m.nrows(), m.ncols(), |r, c| m[(map[r], map[c])]);
        let systems = order.iter().map(|&o| self.systems[o].clone()).collect();
        Self::new(systems, out)
    }

    /// Reorders to the given name sequence, which must name every system once.
    pub fn reorder<S: AsRef<str>>(&self, names: &[S]) -> Result<Self> {
        if names.len() != self.systems.len() {
            return Err(Error::NotPermutation);
        }
        let order = names
            .iter()
            .map(|n| position(&self.systems, n.as_ref()))
            .collect::<Result<Vec<_>>>()?;
        self.permute_systems(&order)
    }

    /// `self ⊗ I` on the systems of `target` not already present, arranged
    /// in `target`'s order.
    pub fn extend_to(&self, target: &[SystemLabel]) -> Result<Self> {
        for s in &self.systems {
            let p = position(target, s.name())?;
            if target[p].dim() != s.dim() {
                return Err(Error::DimensionMismatch(format!(
                    "system `{}` has dimension {} here but {} in the target",
                    s.name(),
                    s.dim(),
                    target[p].dim()
                )));
            }
        }
        let rest: Vec<SystemLabel> = target
            .iter()
            .filter(|t| !self.has_system(t.name()))
            .cloned()
            .collect();
        let full = self.tensor_product(&Self::identity(rest)?)?;
        let names: Vec<&str> = target.iter().map(SystemLabel::name).collect();
        full.reorder(&names)
    }

    /// Matrix product after aligning `other` to this operator's system order.
    pub fn compose(&self, other: &Self) -> Result<Self> {
        let other = other.reorder(&self.names())?;
        Ok(self.with_matrix(&self.matrix * other.matrix))
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        let other = other.reorder(&self.names())?;
        Ok(self.with_matrix(&self.matrix + other.matrix))
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        let other = other.reorder(&self.names())?;
        Ok(self.with_matrix(&self.matrix - other.matrix))
    }

    /// `Tr[self * other]` after alignment.
    pub fn trace_product(&self, other: &Self) -> Result<C64> {
        let other = other.reorder(&self.names())?;
        Ok(trace_of_product(&self.matrix, &other.matrix))
    }

    /// Conjugation `A X A^dag` by an operator on a subset of the systems.
    pub fn conjugate_by(&self, a: &Self) -> Result<Self> {
        let full = a.extend_to(&self.systems)?;
        Ok(self.with_matrix(&full.matrix * &self.matrix * full.matrix.adjoint()))
    }

    /// Maximum absolute entry difference after alignment.
    pub fn max_abs_diff(&self, other: &Self) -> Result<f64> {
        let other = other.reorder(&self.names())?;
        Ok((&self.matrix - other.matrix)
            .iter()
            .map(|z| z.norm())
            .fold(0.0, f64::max))
    }
}

pub(crate) fn trace_of_product(a: &DMatrix<C64>, b: &DMatrix<C64>) -> C64 {
    let mut acc = C64::new(0.0, 0.0);
    for i in 0..a.nrows() {
        for j in 0..a.ncols() {
            acc += a[(i, j)] * b[(j, i)];
        }
    }
    acc
}

/// For each new flat index, the flat index in the old layout.
pub(crate) fn permutation_map(dims: &[usize], order: &[usize]) -> Vec<usize> {
    let new_dims: Vec<usize> = order.iter().map(|&o| dims[o]).collect();
    let old_strides = super::system::strides(dims);
    let n: usize = dims.iter().product();
    let mut map = Vec::with_capacity(n);
    let mut digits = vec![0usize; order.len()];
    for _ in 0..n {
        map.push(digits.iter().zip(order).map(|(&d, &o)| d * old_strides[o]).sum());
        for j in (0..digits.len()).rev() {
            digits[j] += 1;
            if digits[j] < new_dims[j] {
                break;
            }
            digits[j] = 0;
        }
    }
    map
}
