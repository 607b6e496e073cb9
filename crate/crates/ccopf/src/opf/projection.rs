use crate::grid::{build_admittance, GridError, NetworkCase, UncertaintySpec};
use crate::pce::GalerkinTensors;
use ndarray::Array2;

/// Full per-bus voltage coefficient arrays, including pinned entries.
#[derive(Debug, Clone)]
pub struct VoltageCoeffs {
    pub e: Vec<Vec<f64>>,
    pub f: Vec<Vec<f64>>,
}

impl VoltageCoeffs {
    pub fn flat(n_bus: usize, n_terms: usize) -> Self {
        let mut e = vec![vec![0.0; n_terms]; n_bus];
        let f = vec![vec![0.0; n_terms]; n_bus];
        for row in &mut e {
            row[0] = 1.0;
        }
        Self { e, f }
    }
}

/// Variable a derivative entry refers to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Target {
    E(usize, usize),
    F(usize, usize),
    Pg(usize, usize),
    Qg(usize, usize),
}

/// The Galerkin-projected rectangular power flow: `2 N (K+1)` equations in
/// the PCE coefficients. Row layout: for bus `i` and order `k`, the active
/// row is `2 (i (K+1) + k)` and the reactive row follows it.
///
/// Each active row reads
/// `sum_j sum_{k1,k2} <psi_k1 psi_k2, psi_k> (G_ij (e_i,k1 e_j,k2 + f_i,k1 f_j,k2)
///  + B_ij (f_i,k1 e_j,k2 - e_i,k1 f_j,k2)) - gamma_k (pg_i,k + pu_i,k) = 0`,
/// and the reactive row swaps in the corresponding q-form.
pub struct GalerkinSystem<'a> {
    pub case: &'a NetworkCase,
    pub tensors: &'a GalerkinTensors,
    pub g: Array2<f64>,
    pub b: Array2<f64>,
    pub n_terms: usize,
    /// Uncontrollable injection coefficients per bus.
    pub pu: Vec<Vec<f64>>,
    pub qu: Vec<Vec<f64>>,
    /// Generator indices attached to each dense bus index.
    pub gens_at: Vec<Vec<usize>>,
    /// Bus neighbourhoods: indices j with a nonzero Y_ij entry.
    neighbors: Vec<Vec<usize>>,
}

impl<'a> GalerkinSystem<'a> {
    pub fn new(
        case: &'a NetworkCase,
        spec: &UncertaintySpec,
        tensors: &'a GalerkinTensors,
    ) -> Result<Self, GridError> {
        let n_terms = tensors.n_terms();
        if spec.p_inj.iter().any(|c| c.len() != n_terms) {
            return Err(GridError::Uncertainty(
                "injection coefficients do not match the basis dimension".into(),
            ));
        }
        let (g, b) = build_admittance(case)?;
        let n = case.n_buses();
        let gens_at = (0..n).map(|i| case.generators_at(i)).collect();
        let neighbors = (0..n)
            .map(|i| {
                (0..n)
                    .filter(|&j| g[[i, j]] != 0.0 || b[[i, j]] != 0.0)
                    .collect()
            })
            .collect();
        Ok(Self {
            case,
            tensors,
            g,
            b,
            n_terms,
            pu: spec.p_inj.clone(),
            qu: spec.q_inj.clone(),
            gens_at,
            neighbors,
        })
    }

    pub fn n_buses(&self) -> usize {
        self.case.n_buses()
    }

    pub fn n_rows(&self) -> usize {
        2 * self.n_buses() * self.n_terms
    }

    pub fn row_p(&self, bus: usize, k: usize) -> usize {
        2 * (bus * self.n_terms + k)
    }

    pub fn row_q(&self, bus: usize, k: usize) -> usize {
        self.row_p(bus, k) + 1
    }

    /// Per-(bus, order) admittance-weighted voltage sums:
    /// `U_i(k) = sum_j G_ij e_j,k - B_ij f_j,k`,
    /// `W_i(k) = sum_j G_ij f_j,k + B_ij e_j,k`.
    pub fn uw(&self, volt: &VoltageCoeffs) -> (Vec<Vec<f64>>, Vec<Vec<f64>>) {
        let n = self.n_buses();
        let kk = self.n_terms;
        let mut u = vec![vec![0.0; kk]; n];
        let mut w = vec![vec![0.0; kk]; n];
        for i in 0..n {
            for &j in &self.neighbors[i] {
                let gij = self.g[[i, j]];
                let bij = self.b[[i, j]];
                for k in 0..kk {
                    u[i][k] += gij * volt.e[j][k] - bij * volt.f[j][k];
                    w[i][k] += gij * volt.f[j][k] + bij * volt.e[j][k];
                }
            }
        }
        (u, w)
    }

    /// Residuals of all `2 N (K+1)` projected equations.
    pub fn residual(
        &self,
        volt: &VoltageCoeffs,
        pg: &[Vec<f64>],
        qg: &[Vec<f64>],
    ) -> Vec<f64> {
        let (u, w) = self.uw(volt);
        let n = self.n_buses();
        let kk = self.n_terms;
        let norms = self.tensors.norms();
        let mut out = vec![0.0; self.n_rows()];
        for i in 0..n {
            for k in 0..kk {
                let mut acc_p = 0.0;
                let mut acc_q = 0.0;
                for &(k1, k2, t) in self.tensors.pairs_for(k) {
                    // symmetrized double sum over ordered (k1, k2)
                    let (e1, f1) = (volt.e[i][k1], volt.f[i][k1]);
                    let mut p = e1 * u[i][k2] + f1 * w[i][k2];
                    let mut q = f1 * u[i][k2] - e1 * w[i][k2];
                    if k1 != k2 {
                        let (e2, f2) = (volt.e[i][k2], volt.f[i][k2]);
                        p += e2 * u[i][k1] + f2 * w[i][k1];
                        q += f2 * u[i][k1] - e2 * w[i][k1];
                    }
                    acc_p += t * p;
                    acc_q += t * q;
                }
                let mut pg_k = self.pu[i][k];
                let mut qg_k = self.qu[i][k];
                for &gidx in &self.gens_at[i] {
                    pg_k += pg[gidx][k];
                    qg_k += qg[gidx][k];
                }
                out[self.row_p(i, k)] = acc_p - norms[k] * pg_k;
                out[self.row_q(i, k)] = acc_q - norms[k] * qg_k;
            }
        }
        out
    }

    /// Emits all nonzero Jacobian entries as `(row, target, value)`.
    pub fn jacobian(&self, volt: &VoltageCoeffs, mut emit: impl FnMut(usize, Target, f64)) {
        let (u, w) = self.uw(volt);
        let n = self.n_buses();
        let kk = self.n_terms;
        let norms = self.tensors.norms();

        // per (i, k): sparse T_k matrix-vector products against the bus's own
        // coefficients and the accumulated U/W vectors
        let mut te = vec![0.0; kk];
        let mut tf = vec![0.0; kk];
        let mut tu = vec![0.0; kk];
        let mut tw = vec![0.0; kk];
        for i in 0..n {
            for k in 0..kk {
                te.iter_mut().for_each(|v| *v = 0.0);
                tf.iter_mut().for_each(|v| *v = 0.0);
                tu.iter_mut().for_each(|v| *v = 0.0);
                tw.iter_mut().for_each(|v| *v = 0.0);
                for &(k1, k2, t) in self.tensors.pairs_for(k) {
                    te[k2] += t * volt.e[i][k1];
                    tf[k2] += t * volt.f[i][k1];
                    tu[k2] += t * u[i][k1];
                    tw[k2] += t * w[i][k1];
                    if k1 != k2 {
                        te[k1] += t * volt.e[i][k2];
                        tf[k1] += t * volt.f[i][k2];
                        tu[k1] += t * u[i][k2];
                        tw[k1] += t * w[i][k2];
                    }
                }
                let rp = self.row_p(i, k);
                let rq = self.row_q(i, k);
                for &m in &self.neighbors[i] {
                    let gim = self.g[[i, m]];
                    let bim = self.b[[i, m]];
                    for kp in 0..kk {
                        let a = te[kp];
                        let bf = tf[kp];
                        if a != 0.0 || bf != 0.0 {
                            let mut dpe = gim * a + bim * bf;
                            let mut dpf = -bim * a + gim * bf;
                            let mut dqe = gim * bf - bim * a;
                            let mut dqf = -bim * bf - gim * a;
                            if m == i {
                                dpe += tu[kp];
                                dpf += tw[kp];
                                dqe -= tw[kp];
                                dqf += tu[kp];
                            }
                            emit(rp, Target::E(m, kp), dpe);
                            emit(rp, Target::F(m, kp), dpf);
                            emit(rq, Target::E(m, kp), dqe);
                            emit(rq, Target::F(m, kp), dqf);
                        } else if m == i {
                            if tu[kp] != 0.0 || tw[kp] != 0.0 {
                                emit(rp, Target::E(m, kp), tu[kp]);
                                emit(rp, Target::F(m, kp), tw[kp]);
                                emit(rq, Target::E(m, kp), -tw[kp]);
                                emit(rq, Target::F(m, kp), tu[kp]);
                            }
                        }
                    }
                }
                for &gidx in &self.gens_at[i] {
                    emit(rp, Target::Pg(gidx, k), -norms[k]);
                    emit(rq, Target::Qg(gidx, k), -norms[k]);
                }
            }
        }
    }

    /// Accumulates the constant Hessian of `sum_rows lambda_row * r_row(x)`
    /// as symmetric bilinear contributions `(target_a, target_b, c)` where
    /// the underlying term is `c * x_a * x_b` (diagonal terms get `2c`).
    pub fn weighted_hessian(
        &self,
        lambdas: &[f64],
        mut add: impl FnMut(Target, Target, f64),
    ) {
        let n = self.n_buses();
        let kk = self.n_terms;
        // M_i^(p)[ka][kb] = sum_k lambda_p(i,k) T[ka,kb,k], same for q
        let mut mp = Array2::<f64>::zeros((kk, kk));
        let mut mq = Array2::<f64>::zeros((kk, kk));
        for i in 0..n {
            mp.fill(0.0);
            mq.fill(0.0);
            for k in 0..kk {
                let lp = lambdas[self.row_p(i, k)];
                let lq = lambdas[self.row_q(i, k)];
                if lp == 0.0 && lq == 0.0 {
                    continue;
                }
                for &(k1, k2, t) in self.tensors.pairs_for(k) {
                    mp[[k1, k2]] += lp * t;
                    mq[[k1, k2]] += lq * t;
                    if k1 != k2 {
                        mp[[k2, k1]] += lp * t;
                        mq[[k2, k1]] += lq * t;
                    }
                }
            }
            for &j in &self.neighbors[i] {
                let gij = self.g[[i, j]];
                let bij = self.b[[i, j]];
                for ka in 0..kk {
                    for kb in 0..kk {
                        let p = mp[[ka, kb]];
                        let q = mq[[ka, kb]];
                        if p == 0.0 && q == 0.0 {
                            continue;
                        }
                        let ee = gij * p - bij * q;
                        let ef = -bij * p - gij * q;
                        let fe = bij * p + gij * q;
                        let ff = gij * p - bij * q;
                        if ee != 0.0 {
                            add(Target::E(i, ka), Target::E(j, kb), ee);
                        }
                        if ef != 0.0 {
                            add(Target::E(i, ka), Target::F(j, kb), ef);
                        }
                        if fe != 0.0 {
                            add(Target::F(i, ka), Target::E(j, kb), fe);
                        }
                        if ff != 0.0 {
                            add(Target::F(i, ka), Target::F(j, kb), ff);
                        }
                    }
                }
            }
        }
    }
}
