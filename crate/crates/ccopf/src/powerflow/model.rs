use super::PowerFlowError;
use crate::grid::{build_admittance, BusKind, NetworkCase};
use crate::linalg::LuFactors;
use ndarray::{Array1, Array2};

/// Network state: rectangular voltages and net injections, per dense bus
/// index.
#[derive(Debug, Clone, PartialEq)]
pub struct OperatingPoint {
    pub v_re: Vec<f64>,
    pub v_im: Vec<f64>,
    pub p: Vec<f64>,
    pub q: Vec<f64>,
}

impl OperatingPoint {
    pub fn flat(n: usize) -> Self {
        Self {
            v_re: vec![1.0; n],
            v_im: vec![0.0; n],
            p: vec![0.0; n],
            q: vec![0.0; n],
        }
    }

    pub fn v_mag(&self, i: usize) -> f64 {
        self.v_re[i].hypot(self.v_im[i])
    }
}

/// Per-bus specification of the independent variables.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum BusSpec {
    Slack { v_re: f64, v_im: f64 },
    Pv { p: f64, v_mag: f64 },
    Pq { p: f64, q: f64 },
}

/// Covers every bus exactly once, aligned with the dense bus indexing.
#[derive(Debug, Clone, PartialEq)]
pub struct IndependentAssignment(pub Vec<BusSpec>);

impl IndependentAssignment {
    /// Assignment consistent with the case's bus kinds, taking values from an
    /// operating point.
    pub fn from_point(case: &NetworkCase, point: &OperatingPoint) -> Self {
        let specs = case
            .buses
            .iter()
            .enumerate()
            .map(|(i, b)| match b.kind {
                BusKind::Slack => BusSpec::Slack {
                    v_re: point.v_re[i],
                    v_im: point.v_im[i],
                },
                BusKind::Pv => BusSpec::Pv {
                    p: point.p[i],
                    v_mag: point.v_mag(i),
                },
                BusKind::Pq => BusSpec::Pq {
                    p: point.p[i],
                    q: point.q[i],
                },
            })
            .collect();
        Self(specs)
    }
}

#[derive(Debug, Clone, Copy)]
pub struct NewtonOptions {
    pub tol: f64,
    pub max_iter: usize,
    /// Halve the step while the residual norm grows (for stressed samples).
    pub damping: bool,
}

impl Default for NewtonOptions {
    fn default() -> Self {
        Self {
            tol: 1e-10,
            max_iter: 30,
            damping: false,
        }
    }
}

/// Power flow machinery over a fixed admittance matrix.
pub struct PowerFlowModel {
    pub g: Array2<f64>,
    pub b: Array2<f64>,
    n: usize,
}

impl PowerFlowModel {
    pub fn new(case: &NetworkCase) -> Result<Self, crate::grid::GridError> {
        let (g, b) = build_admittance(case)?;
        let n = case.n_buses();
        Ok(Self { g, b, n })
    }

    pub fn n_buses(&self) -> usize {
        self.n
    }

    /// Computed net injections from the voltages.
    pub fn injections(&self, v_re: &[f64], v_im: &[f64]) -> (Vec<f64>, Vec<f64>) {
        let n = self.n;
        let mut p = vec![0.0; n];
        let mut q = vec![0.0; n];
        for i in 0..n {
            let mut u = 0.0;
            let mut w = 0.0;
            for j in 0..n {
                u += self.g[[i, j]] * v_re[j] - self.b[[i, j]] * v_im[j];
                w += self.g[[i, j]] * v_im[j] + self.b[[i, j]] * v_re[j];
            }
            p[i] = v_re[i] * u + v_im[i] * w;
            q[i] = v_im[i] * u - v_re[i] * w;
        }
        (p, q)
    }

    /// The 2N power mismatches, active then reactive per bus.
    pub fn residual(&self, point: &OperatingPoint) -> Vec<f64> {
        let (p, q) = self.injections(&point.v_re, &point.v_im);
        let mut r = Vec::with_capacity(2 * self.n);
        for i in 0..self.n {
            r.push(p[i] - point.p[i]);
            r.push(q[i] - point.q[i]);
        }
        r
    }

    /// Magnitude of the series current through line `line_idx`, with shunt
    /// charging and taps neglected.
    pub fn branch_current(&self, case: &NetworkCase, line_idx: usize, v_re: &[f64], v_im: &[f64]) -> f64 {
        let line = &case.lines[line_idx];
        let f = case.bus_index(line.from).expect("validated");
        let t = case.bus_index(line.to).expect("validated");
        let den = line.r * line.r + line.x * line.x;
        let (yg, yb) = (line.r / den, -line.x / den);
        let de = v_re[f] - v_re[t];
        let df = v_im[f] - v_im[t];
        let ire = yg * de - yb * df;
        let iim = yg * df + yb * de;
        ire.hypot(iim)
    }

    /// Solves for the dependent variables with the independent ones held
    /// fixed, Newton iteration from `initial` (flat start if `None`).
    pub fn solve_newton(
        &self,
        assignment: &IndependentAssignment,
        initial: Option<&OperatingPoint>,
        opts: NewtonOptions,
    ) -> Result<OperatingPoint, PowerFlowError> {
        let n = self.n;
        if assignment.0.len() != n {
            return Err(PowerFlowError::BadAssignment);
        }
        let mut e: Vec<f64>;
        let mut f: Vec<f64>;
        match initial {
            Some(p0) => {
                e = p0.v_re.clone();
                f = p0.v_im.clone();
            }
            None => {
                e = vec![1.0; n];
                f = vec![0.0; n];
            }
        }
        // slack voltages are fixed up front
        let mut unknowns = Vec::new();
        for (i, spec) in assignment.0.iter().enumerate() {
            match spec {
                BusSpec::Slack { v_re, v_im } => {
                    e[i] = *v_re;
                    f[i] = *v_im;
                }
                _ => unknowns.push(i),
            }
        }
        let m = 2 * unknowns.len();
        if m == 0 {
            return Ok(self.finish(assignment, e, f));
        }

        let mut residual_norm = f64::INFINITY;
        for iter in 0..=opts.max_iter {
            let mismatch = self.assignment_residual(assignment, &e, &f);
            residual_norm = mismatch.iter().fold(0.0f64, |a, v| a.max(v.abs()));
            if residual_norm <= opts.tol {
                return Ok(self.finish(assignment, e, f));
            }
            if iter == opts.max_iter {
                break;
            }

            let jac = self.assignment_jacobian(assignment, &unknowns, &e, &f);
            let lu = LuFactors::factor(&jac)?;
            let rhs = Array1::from_vec(mismatch.clone());
            let dx = lu.solve(&rhs);

            let mut alpha = 1.0;
            loop {
                let mut e_new = e.clone();
                let mut f_new = f.clone();
                for (row, &i) in unknowns.iter().enumerate() {
                    e_new[i] -= alpha * dx[2 * row];
                    f_new[i] -= alpha * dx[2 * row + 1];
                }
                if !opts.damping {
                    e = e_new;
                    f = f_new;
                    break;
                }
                let new_norm = self
                    .assignment_residual(assignment, &e_new, &f_new)
                    .iter()
                    .fold(0.0f64, |a, v| a.max(v.abs()));
                if new_norm < residual_norm || alpha < 1.0 / 64.0 {
                    e = e_new;
                    f = f_new;
                    break;
                }
                alpha *= 0.5;
            }
        }
        Err(PowerFlowError::NoConvergence {
            iterations: opts.max_iter,
            residual: residual_norm,
            iterate: Box::new(self.finish(assignment, e, f)),
        })
    }

    /// Mismatch vector of the assignment equations: two rows per non-slack
    /// bus (active power, then reactive power or squared magnitude).
    fn assignment_residual(
        &self,
        assignment: &IndependentAssignment,
        e: &[f64],
        f: &[f64],
    ) -> Vec<f64> {
        let (p, q) = self.injections(e, f);
        let mut out = Vec::with_capacity(2 * self.n);
        for (i, spec) in assignment.0.iter().enumerate() {
            match spec {
                BusSpec::Slack { .. } => {}
                BusSpec::Pv { p: ps, v_mag } => {
                    out.push(p[i] - ps);
                    out.push(e[i] * e[i] + f[i] * f[i] - v_mag * v_mag);
                }
                BusSpec::Pq { p: ps, q: qs } => {
                    out.push(p[i] - ps);
                    out.push(q[i] - qs);
                }
            }
        }
        out
    }

    fn assignment_jacobian(
        &self,
        assignment: &IndependentAssignment,
        unknowns: &[usize],
        e: &[f64],
        f: &[f64],
    ) -> Array2<f64> {
        let n = self.n;
        let m = 2 * unknowns.len();
        // per-bus accumulations U_i, W_i
        let mut u = vec![0.0; n];
        let mut w = vec![0.0; n];
        for i in 0..n {
            for j in 0..n {
                u[i] += self.g[[i, j]] * e[j] - self.b[[i, j]] * f[j];
                w[i] += self.g[[i, j]] * f[j] + self.b[[i, j]] * e[j];
            }
        }
        let col_of: std::collections::HashMap<usize, usize> =
            unknowns.iter().enumerate().map(|(c, &i)| (i, c)).collect();
        let mut jac = Array2::zeros((m, m));
        let mut row = 0;
        for (i, spec) in assignment.0.iter().enumerate() {
            let is_pv = match spec {
                BusSpec::Slack { .. } => continue,
                BusSpec::Pv { .. } => true,
                BusSpec::Pq { .. } => false,
            };
            // active power row
            for (&mbus, &col) in &col_of {
                let gim = self.g[[i, mbus]];
                let bim = self.b[[i, mbus]];
                let mut dpe = e[i] * gim + f[i] * bim;
                let mut dpf = -e[i] * bim + f[i] * gim;
                if mbus == i {
                    dpe += u[i];
                    dpf += w[i];
                }
                jac[[row, 2 * col]] = dpe;
                jac[[row, 2 * col + 1]] = dpf;
            }
            // reactive or magnitude row
            let r2 = row + 1;
            if is_pv {
                let col = col_of[&i];
                jac[[r2, 2 * col]] = 2.0 * e[i];
                jac[[r2, 2 * col + 1]] = 2.0 * f[i];
            } else {
                for (&mbus, &col) in &col_of {
                    let gim = self.g[[i, mbus]];
                    let bim = self.b[[i, mbus]];
                    let mut dqe = f[i] * gim - e[i] * bim;
                    let mut dqf = -f[i] * bim - e[i] * gim;
                    if mbus == i {
                        dqe -= w[i];
                        dqf += u[i];
                    }
                    jac[[r2, 2 * col]] = dqe;
                    jac[[r2, 2 * col + 1]] = dqf;
                }
            }
            row += 2;
        }
        jac
    }

    fn finish(&self, assignment: &IndependentAssignment, e: Vec<f64>, f: Vec<f64>) -> OperatingPoint {
        let (p, q) = self.injections(&e, &f);
        let _ = assignment;
        OperatingPoint {
            v_re: e,
            v_im: f,
            p,
            q,
        }
    }

    /// First-order sensitivity of the voltage state to the independent
    /// variables, from the power-flow Jacobian partitioned by
    /// independent/dependent variables at a solved base point.
    pub fn linearize(
        &self,
        assignment: &IndependentAssignment,
        base: &OperatingPoint,
    ) -> Result<LinearizedMap, PowerFlowError> {
        let n = self.n;
        if assignment.0.len() != n {
            return Err(PowerFlowError::BadAssignment);
        }
        let unknowns: Vec<usize> = assignment
            .0
            .iter()
            .enumerate()
            .filter(|(_, s)| !matches!(s, BusSpec::Slack { .. }))
            .map(|(i, _)| i)
            .collect();
        let m = 2 * unknowns.len();
        let jac = self.assignment_jacobian(assignment, &unknowns, &base.v_re, &base.v_im);
        let lu = LuFactors::factor(&jac)?;

        // input layout mirrors the assignment: two entries per bus
        let n_u = 2 * n;
        let mut sens = Array2::zeros((m, n_u));
        let mut row = 0;
        for (i, spec) in assignment.0.iter().enumerate() {
            match spec {
                BusSpec::Slack { .. } => continue,
                BusSpec::Pv { v_mag, .. } => {
                    // rows: [p-row; magnitude-row], inputs (p, v_mag)
                    sens[[row, 2 * i]] = 1.0;
                    sens[[row + 1, 2 * i + 1]] = 2.0 * v_mag;
                }
                BusSpec::Pq { .. } => {
                    sens[[row, 2 * i]] = 1.0;
                    sens[[row + 1, 2 * i + 1]] = 1.0;
                }
            }
            row += 2;
        }
        // dx/du = J^{-1} * dF/du (mismatch decreases when the spec grows)
        let mut state_sens = Array2::zeros((m, n_u));
        for c in 0..n_u {
            let col = sens.column(c).to_owned();
            if col.iter().all(|&v| v == 0.0) {
                continue;
            }
            let dx = lu.solve(&col);
            for r in 0..m {
                state_sens[[r, c]] = dx[r];
            }
        }
        Ok(LinearizedMap {
            unknowns,
            state_sens,
            base: base.clone(),
            assignment: assignment.clone(),
            n,
        })
    }
}

/// Sensitivity operator mapping changes of the independent variables to
/// changes of the voltage state.
pub struct LinearizedMap {
    unknowns: Vec<usize>,
    state_sens: Array2<f64>,
    pub base: OperatingPoint,
    pub assignment: IndependentAssignment,
    n: usize,
}

impl LinearizedMap {
    /// Input layout: two entries per bus, matching the assignment:
    /// slack `(v_re, v_im)`, PV `(p, v_mag)`, PQ `(p, q)`.
    pub fn delta_u(&self, new_assignment: &IndependentAssignment) -> Vec<f64> {
        let mut du = vec![0.0; 2 * self.n];
        for (i, (new, old)) in new_assignment
            .0
            .iter()
            .zip(&self.assignment.0)
            .enumerate()
        {
            match (new, old) {
                (
                    BusSpec::Slack { v_re: a, v_im: b },
                    BusSpec::Slack { v_re: a0, v_im: b0 },
                ) => {
                    du[2 * i] = a - a0;
                    du[2 * i + 1] = b - b0;
                }
                (BusSpec::Pv { p: a, v_mag: b }, BusSpec::Pv { p: a0, v_mag: b0 }) => {
                    du[2 * i] = a - a0;
                    du[2 * i + 1] = b - b0;
                }
                (BusSpec::Pq { p: a, q: b }, BusSpec::Pq { p: a0, q: b0 }) => {
                    du[2 * i] = a - a0;
                    du[2 * i + 1] = b - b0;
                }
                _ => panic!("assignment kinds changed between base and sample"),
            }
        }
        du
    }

    /// Linearized voltage state at the perturbed independent variables.
    pub fn apply(&self, du: &[f64]) -> (Vec<f64>, Vec<f64>) {
        let mut e = self.base.v_re.clone();
        let mut f = self.base.v_im.clone();
        // slack voltages move identically with their inputs
        for (i, spec) in self.assignment.0.iter().enumerate() {
            if matches!(spec, BusSpec::Slack { .. }) {
                e[i] += du[2 * i];
                f[i] += du[2 * i + 1];
            }
        }
        for (row, &i) in self.unknowns.iter().enumerate() {
            let mut de = 0.0;
            let mut dfv = 0.0;
            for c in 0..du.len() {
                if du[c] != 0.0 {
                    de += self.state_sens[[2 * row, c]] * du[c];
                    dfv += self.state_sens[[2 * row + 1, c]] * du[c];
                }
            }
            e[i] += de;
            f[i] += dfv;
        }
        (e, f)
    }
}
