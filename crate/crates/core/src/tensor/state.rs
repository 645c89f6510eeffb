use nalgebra::{DMatrix, DVector};

use super::operator::{permutation_map, MultipartiteOperator};
use super::system::{check_unique, position, total_dim, SystemLabel};
use super::{C64, NORM_TOL};
use crate::error::{Error, Result};

/// Unit vector over an ordered list of labeled subsystems.
#[derive(Debug, Clone, PartialEq)]
pub struct PureState {
    systems: Vec<SystemLabel>,
    amplitudes: DVector<C64>,
}

impl PureState {
    pub fn new(systems: Vec<SystemLabel>, amplitudes: DVector<C64>) -> Result<Self> {
        check_unique(&systems)?;
        if amplitudes.len() != total_dim(&systems) {
            return Err(Error::DimensionMismatch(format!(
                "{} amplitudes for systems of total dimension {}",
                amplitudes.len(),
                total_dim(&systems)
            )));
        }
        let norm = amplitudes.norm();
        if (norm - 1.0).abs() > NORM_TOL {
            return Err(Error::NotNormalized(norm));
        }
        Ok(Self { systems, amplitudes })
    }

    /// Normalizes the given vector first; fails on the zero vector.
    pub fn normalized(systems: Vec<SystemLabel>, amplitudes: DVector<C64>) -> Result<Self> {
        let norm = amplitudes.norm();
        if norm == 0.0 {
            return Err(Error::NotNormalized(0.0));
        }
        Self::new(systems, amplitudes.unscale(norm))
    }

    /// Computational basis vector `|digits>`.
    pub fn basis(systems: Vec<SystemLabel>, digits: &[usize]) -> Result<Self> {
        if digits.len() != systems.len() || digits.iter().zip(&systems).any(|(&d, s)| d >= s.dim()) {
            return Err(Error::InvalidArgument("basis digits out of range".into()));
        }
        let idx = digits
            .iter()
            .zip(&systems)
            .fold(0, |acc, (&d, s)| acc * s.dim() + d);
        let mut v = DVector::zeros(total_dim(&systems));
        v[idx] = C64::new(1.0, 0.0);
        Self::new(systems, v)
    }

    pub fn systems(&self) -> &[SystemLabel] {
        &self.systems
    }

    pub fn names(&self) -> Vec<&str> {
        self.systems.iter().map(SystemLabel::name).collect()
    }

    pub fn amplitudes(&self) -> &DVector<C64> {
        &self.amplitudes
    }

    pub fn density(&self) -> MultipartiteOperator {
        let m = &self.amplitudes * self.amplitudes.adjoint();
        MultipartiteOperator::new(self.systems.clone(), m).expect("pure state systems are consistent")
    }

    /// Reduced density operator on `keep`.
    pub fn marginal<S: AsRef<str>>(&self, keep: &[S]) -> Result<MultipartiteOperator> {
        // Tr_rest |v><v| = W W^dag where W is the (keep x rest) reshaping.
        for k in keep {
            position(&self.systems, k.as_ref())?;
        }
        let keep_names: Vec<&str> = self
            .names()
            .into_iter()
            .filter(|n| keep.iter().any(|k| k.as_ref() == *n))
            .collect();
        let (w, kept, _) = self.split(&keep_names)?;
        MultipartiteOperator::new(kept, &w * w.adjoint())
    }

    pub fn tensor_product(&self, other: &Self) -> Result<Self> {
        let mut systems = self.systems.clone();
        systems.extend(other.systems.iter().cloned());
        check_unique(&systems)?;
        Self::new(systems, self.amplitudes.kronecker(&other.amplitudes))
    }

    pub fn reorder<S: AsRef<str>>(&self, names: &[S]) -> Result<Self> {
        if names.len() != self.systems.len() {
            return Err(Error::NotPermutation);
        }
        let order = names
            .iter()
            .map(|n| position(&self.systems, n.as_ref()))
            .collect::<Result<Vec<_>>>()?;
        let mut seen = vec![false; order.len()];
        for &o in &order {
            if seen[o] {
                return Err(Error::NotPermutation);
            }
            seen[o] = true;
        }
        let dims: Vec<usize> = self.systems.iter().map(SystemLabel::dim).collect();
        let map = permutation_map(&dims, &order);
        let amps = DVector::from_fn(map.len(), |i, _| self.amplitudes[map[i]]);
        Ok(Self {
            systems: order.iter().map(|&o| self.systems[o].clone()).collect(),
            amplitudes: amps,
        })
    }

    pub fn relabel(&self, systems: Vec<SystemLabel>) -> Result<Self> {
        if systems.len() != self.systems.len()
            || systems.iter().zip(&self.systems).any(|(a, b)| a.dim() != b.dim())
        {
            return Err(Error::DimensionMismatch(
                "relabeling must preserve the dimension list".into(),
            ));
        }
        Self::new(systems, self.amplitudes.clone())
    }

    /// Reshapes into a `(front x rest)` matrix with the named systems as the
    /// row index. Returns the matrix, the front systems and the rest.
    pub fn split<S: AsRef<str>>(
        &self,
        front: &[S],
    ) -> Result<(DMatrix<C64>, Vec<SystemLabel>, Vec<SystemLabel>)> {
        let mut order: Vec<String> = front.iter().map(|s| s.as_ref().to_owned()).collect();
        for n in self.names() {
            if !order.iter().any(|o| o == n) {
                order.push(n.to_owned());
            }
        }
        let v = self.reorder(&order)?;
        let front_sys: Vec<SystemLabel> = v.systems[..front.len()].to_vec();
        let rest_sys: Vec<SystemLabel> = v.systems[front.len()..].to_vec();
        let (r, c) = (total_dim(&front_sys), total_dim(&rest_sys));
        // row-major (front, rest) flattening
        let m = DMatrix::from_fn(r, c, |i, j| v.amplitudes[i * c + j]);
        Ok((m, front_sys, rest_sys))
    }

    /// Applies an operator mapping `inputs` to `outputs`; the outputs are
    /// placed first, followed by the untouched systems in their order.
    /// The result must be a unit vector.
    pub fn apply<S: AsRef<str>>(
        &self,
        op: &DMatrix<C64>,
        inputs: &[S],
        outputs: Vec<SystemLabel>,
    ) -> Result<Self> {
        let (m, in_sys, rest) = self.split(inputs)?;
        if op.ncols() != total_dim(&in_sys) || op.nrows() != total_dim(&outputs) {
            return Err(Error::DimensionMismatch(format!(
                "operator is {}x{} but maps dimension {} to {}",
                op.nrows(),
                op.ncols(),
                total_dim(&in_sys),
                total_dim(&outputs)
            )));
        }
        let out = op * m;
        let c = out.ncols();
        let amps = DVector::from_fn(out.nrows() * c, |k, _| out[(k / c, k % c)]);
        let mut systems = outputs;
        systems.extend(rest);
        Self::new(systems, amps)
    }

    /// `<self|other>` after aligning system order.
    pub fn inner(&self, other: &Self) -> Result<C64> {
        let o = other.reorder(&self.names())?;
        Ok(self.amplitudes.dotc(&o.amplitudes))
    }
}
