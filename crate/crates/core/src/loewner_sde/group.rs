//! The representation-level process `Q(H_t)` on a level-truncated Verma module.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grassmann::{merge_sign, GrassmannElement};
use crate::scalar::Rational;
use crate::superalgebra::{operator_matrix, GrassmannMatrix, TruncatedBasis, UEAElement, VermaModule};

use super::driver::{DriverConfig, Increments};

type G = GrassmannElement<f64>;

/// One Brownian component: contributes `√variance · E · dB_k`.
#[derive(Clone, Debug)]
pub struct NoiseTerm {
    pub variance: Rational,
    pub element: UEAElement,
}

/// `Q⁻¹dQ = X dt + Σ_k √var_k E_k dB_k` (Itô form) on a Verma module.
#[derive(Clone, Debug)]
pub struct GroupSde {
    pub module: VermaModule,
    pub drift: UEAElement,
    pub noise: Vec<NoiseTerm>,
}

/// How the per-step group increment is formed.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub enum GroupScheme {
    /// `expm((X − ½Σ var_k E_k²)Δ + Σ √var_k E_k ΔB_k)`, whose Itô drift is exactly `X`.
    #[default]
    ItoCorrected,
    /// `expm(XΔ + Σ √var_k E_k ΔB_k)` taken verbatim; its Itô drift is `X + ½Σ var_k E_k²`.
    Literal,
}

impl GroupSde {
    pub fn num_generators(&self) -> u8 {
        self.drift.num_generators()
    }

    /// The exponent's deterministic part for a scheme.
    pub fn step_drift(&self, scheme: GroupScheme) -> Result<UEAElement> {
        match scheme {
            GroupScheme::Literal => Ok(self.drift.clone()),
            GroupScheme::ItoCorrected => {
                let mut x = self.drift.clone();
                for n in &self.noise {
                    let sq = n.element.mul(&n.element)?.scale(&(n.variance.clone() / Rational::integer(2)));
                    x = x.sub(&sq)?;
                }
                x.normal_order()
            }
        }
    }

    pub fn compile(&self, level2_max: i32, scheme: GroupScheme) -> Result<CompiledGroup> {
        if level2_max < 0 {
            return Err(Error::Usage("level cutoff must be non-negative".into()));
        }
        for n in &self.noise {
            if n.variance.signum() < 0 {
                return Err(Error::Usage("noise variance must be non-negative".into()));
            }
        }
        let basis = TruncatedBasis::new(&self.module, level2_max);
        let drift_r = operator_matrix(&self.module, &self.step_drift(scheme)?, &basis)?;
        let levels = basis.levels2();
        let mut noise = Vec::with_capacity(self.noise.len());
        for n in &self.noise {
            let m = operator_matrix(&self.module, &n.element, &basis)?;
            noise.push(m.map_scalars(|q| q.to_f64()).scale(&n.variance.to_f64().sqrt()));
        }
        let drift = drift_r.map_scalars(|q| q.to_f64());
        for m in std::iter::once(&drift).chain(&noise) {
            if !m.strictly_raising(&levels) {
                return Err(Error::Usage("group generators must strictly raise the level".into()));
            }
        }
        let n_gen = self.num_generators();
        let sparse_drift = SparseOp::from_matrix(&drift);
        let sparse_noise = noise.iter().map(SparseOp::from_matrix).collect();
        let depth = levels.iter().copied().max().unwrap_or(0) as usize + 1;
        Ok(CompiledGroup { basis, n_gen, drift, noise, sparse_drift, sparse_noise, depth })
    }
}

/// Real-linear form of a Grassmann matrix on `R^{dim · 2^n}`, indexed by `basis · 2^n + mask`.
#[derive(Clone, Debug)]
pub struct SparseOp {
    rows: Vec<u32>,
    cols: Vec<u32>,
    vals: Vec<f64>,
}

impl SparseOp {
    pub fn from_matrix(a: &GrassmannMatrix<f64>) -> Self {
        let n = a.num_generators() as u32;
        let w = 1usize << n;
        let par = a.basis_parities();
        let mut op = SparseOp { rows: vec![], cols: vec![], vals: vec![] };
        for i in 0..a.dim() {
            for j in 0..a.dim() {
                let flip = par[i] != par[j];
                for &(ma, c) in a.get(i, j).terms() {
                    for m in 0..w as u64 {
                        let s = merge_sign(ma, m);
                        if s == 0 {
                            continue;
                        }
                        let inv = if flip && m.count_ones() % 2 == 1 { -1.0 } else { 1.0 };
                        op.rows.push((i * w + (ma | m) as usize) as u32);
                        op.cols.push((j * w + m as usize) as u32);
                        op.vals.push(c * s as f64 * inv);
                    }
                }
            }
        }
        op
    }

    pub fn nnz(&self) -> usize {
        self.vals.len()
    }

    /// `out += s · A x`.
    #[inline]
    pub fn apply_add(&self, s: f64, x: &[f64], out: &mut [f64]) {
        for k in 0..self.vals.len() {
            out[self.rows[k] as usize] += s * self.vals[k] * x[self.cols[k] as usize];
        }
    }
}

/// Truncated matrices of one SDE ready for stepping.
#[derive(Clone, Debug)]
pub struct CompiledGroup {
    pub basis: TruncatedBasis,
    pub n_gen: u8,
    /// Deterministic exponent per unit time.
    pub drift: GrassmannMatrix<f64>,
    /// `√var_k E_k`.
    pub noise: Vec<GrassmannMatrix<f64>>,
    sparse_drift: SparseOp,
    sparse_noise: Vec<SparseOp>,
    depth: usize,
}

/// `Q(H_t)` at one recorded time.
#[derive(Clone, Debug, PartialEq)]
pub struct GroupState {
    pub t: f64,
    pub q: GrassmannMatrix<f64>,
}

impl CompiledGroup {
    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    fn check_driver(&self, inc: &Increments) -> Result<()> {
        if inc.dims() != self.noise.len() {
            return Err(Error::Usage(format!(
                "driver has {} components but the model has {} noise terms",
                inc.dims(),
                self.noise.len()
            )));
        }
        Ok(())
    }

    /// Exponent `AΔ + Σ ΔB_k N_k` of one step.
    pub fn step_generator(&self, dt: f64, db: &[f64]) -> Result<GrassmannMatrix<f64>> {
        let mut m = self.drift.scale(&dt);
        for (n, b) in self.noise.iter().zip(db) {
            m = m.add(&n.scale(b))?;
        }
        Ok(m)
    }

    /// Dense left-increment integration `Q ← Q·expm(step)`, keeping every `record_every`-th state.
    pub fn simulate(&self, dt: f64, inc: &Increments, record_every: usize) -> Result<Vec<GroupState>> {
        self.check_driver(inc)?;
        let mut q = GrassmannMatrix::identity(self.n_gen, self.basis.parities());
        let mut out = vec![GroupState { t: 0.0, q: q.clone() }];
        let steps = inc.steps();
        for k in 0..steps {
            q = q.mul(&self.step_generator(dt, inc.step(k))?.exp_nilpotent()?)?;
            if k + 1 == steps || (k + 1) % record_every.max(1) == 0 {
                out.push(GroupState { t: (k + 1) as f64 * dt, q: q.clone() });
            }
        }
        Ok(out)
    }

    /// Real-linearized `Q_T|hw⟩`, computed right to left over the stored increments.
    pub fn propagate_highest_weight(&self, dt: f64, inc: &Increments) -> Result<Vec<f64>> {
        self.check_driver(inc)?;
        let w = 1usize << self.n_gen;
        let len = self.dim() * w;
        let mut v = vec![0.0; len];
        v[0] = 1.0;
        let mut term = vec![0.0; len];
        let mut next = vec![0.0; len];
        for k in (0..inc.steps()).rev() {
            let db = inc.step(k);
            term.copy_from_slice(&v);
            for p in 1..=self.depth {
                next.iter_mut().for_each(|x| *x = 0.0);
                let inv_p = 1.0 / p as f64;
                self.sparse_drift.apply_add(dt * inv_p, &term, &mut next);
                for (op, b) in self.sparse_noise.iter().zip(db) {
                    op.apply_add(b * inv_p, &term, &mut next);
                }
                if next.iter().all(|x| *x == 0.0) {
                    break;
                }
                for (a, b) in v.iter_mut().zip(&next) {
                    *a += b;
                }
                std::mem::swap(&mut term, &mut next);
            }
        }
        Ok(v)
    }

    /// Grassmann coordinates from a real-linearized vector.
    pub fn coords_from_real(&self, v: &[f64]) -> Vec<G> {
        let w = 1usize << self.n_gen;
        (0..self.dim())
            .map(|i| {
                G::from_terms(self.n_gen, (0..w).map(|m| (m as u64, v[i * w + m]))).expect("masks within range")
            })
            .collect()
    }
}

/// Dense simulation of `Q(H_t)` for one trial.
pub fn simulate_group(
    sde: &GroupSde,
    level2_max: i32,
    driver: &DriverConfig,
    trial: u64,
    scheme: GroupScheme,
    record_every: usize,
) -> Result<Vec<GroupState>> {
    driver.validate()?;
    let c = sde.compile(level2_max, scheme)?;
    c.simulate(driver.dt, &driver.increments(trial), record_every)
}
