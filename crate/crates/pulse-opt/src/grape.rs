//! Gradient-ascent pulse search on piecewise-constant (Ω, φ) controls.
//!
//! Gradients are exact: each segment propagator is diagonalized and the
//! derivative of exp(-iHΔt) along a Hamiltonian direction is assembled from
//! the divided-difference (Loewner) matrix of the eigenvalues, so finite
//! differences are needed only as a cross-check.

use crate::{PulseOptError, Result};
use nmr_sim::{
    apply_relaxation, apply_relaxation_adjoint, control_generators, drift_angular, pulse_unitary,
    segment_hamiltonian_angular, MoleculeSpec, PulseSegment, PulseSequence,
};
use qcore::{hermitian_eigen, trace, CMatrix, UnitaryOp, C64};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub struct OptimizationProblem {
    pub molecule: MoleculeSpec,
    pub target: UnitaryOp,
    /// Total pulse length, seconds.
    pub duration: f64,
    pub n_segments: usize,
    /// Peak control amplitude, rad/s.
    pub amp_limit: f64,
    pub fidelity_goal: f64,
    pub seed: u64,
    pub n_starts: usize,
    pub max_iterations: usize,
    /// Representative (input, ideal output) state pairs. When non-empty the
    /// search ascends Φ + probe_weight · (relaxed transfer overlap of the
    /// probes), so the whole trajectory is shaped to keep those states off
    /// the transverse plane; convergence is still judged on Φ alone. The
    /// gate fidelity is first-order blind to where a pulse parks coherence,
    /// so this is what steers the solution away from T2 damage on the states
    /// the pulse will actually see.
    pub probes: Vec<(CMatrix, CMatrix)>,
    pub probe_weight: f64,
    /// Extra constrained iterations after the goal is reached: probe overlap
    /// keeps rising while Φ is held above the goal.
    pub polish_iterations: usize,
}

impl OptimizationProblem {
    /// Problem with default search settings: 2π·5 kHz amplitude cap,
    /// goal 0.999, 8 starts, 400 iterations per start.
    pub fn new(molecule: MoleculeSpec, target: UnitaryOp, duration: f64, n_segments: usize) -> Self {
        Self {
            molecule,
            target,
            duration,
            n_segments,
            amp_limit: 2.0 * std::f64::consts::PI * 5000.0,
            fidelity_goal: 0.999,
            seed: 7,
            n_starts: 8,
            max_iterations: 400,
            probes: Vec::new(),
            probe_weight: 0.3,
            polish_iterations: 0,
        }
    }

    fn validate(&self) -> Result<()> {
        if self.n_segments == 0 {
            return Err(PulseOptError::InvalidProblem("n_segments must be > 0".into()));
        }
        if !(self.duration > 0.0) {
            return Err(PulseOptError::InvalidProblem(format!(
                "duration must be > 0, got {}",
                self.duration
            )));
        }
        if !(self.amp_limit > 0.0) {
            return Err(PulseOptError::InvalidProblem(format!(
                "amp_limit must be > 0, got {}",
                self.amp_limit
            )));
        }
        if !(self.fidelity_goal > 0.0 && self.fidelity_goal <= 1.0) {
            return Err(PulseOptError::InvalidProblem(format!(
                "fidelity_goal must be in (0, 1], got {}",
                self.fidelity_goal
            )));
        }
        let dim = self.molecule.dim();
        if self.target.matrix().nrows() != dim {
            return Err(PulseOptError::InvalidProblem(format!(
                "target is {}x{} but the molecule register has dimension {}",
                self.target.matrix().nrows(),
                self.target.matrix().ncols(),
                dim
            )));
        }
        if self.n_starts == 0 {
            return Err(PulseOptError::InvalidProblem("n_starts must be > 0".into()));
        }
        for (rho, sigma) in &self.probes {
            if rho.nrows() != dim || sigma.nrows() != dim {
                return Err(PulseOptError::InvalidProblem(format!(
                    "probe states are {}x{}/{}x{} but the register has dimension {}",
                    rho.nrows(),
                    rho.ncols(),
                    sigma.nrows(),
                    sigma.ncols(),
                    dim
                )));
            }
        }
        Ok(())
    }

    fn dt(&self) -> f64 {
        self.duration / self.n_segments as f64
    }
}

#[derive(Debug, Clone)]
pub struct OptimizationReport {
    pub pulse: PulseSequence,
    pub achieved_fidelity: f64,
    pub iterations: usize,
    pub converged: bool,
    pub gradient_norm_final: f64,
}

/// Global-phase-invariant gate overlap Φ = |Tr(V†U)|²/d².
pub fn gate_fidelity(u: &UnitaryOp, target: &UnitaryOp) -> Result<f64> {
    gate_fidelity_mat(u.matrix(), target.matrix())
}

fn gate_fidelity_mat(u: &CMatrix, v: &CMatrix) -> Result<f64> {
    if u.nrows() != v.nrows() {
        return Err(PulseOptError::InvalidProblem(format!(
            "fidelity of a {}-dim and a {}-dim unitary",
            u.nrows(),
            v.nrows()
        )));
    }
    let d = u.nrows() as f64;
    let g = trace(&(v.adjoint() * u));
    Ok((g.norm_sqr() / (d * d)).min(1.0))
}

/// Drift/control operators shared by every evaluation of one problem.
struct Workspace {
    drift: CMatrix,
    hx: CMatrix,
    hy: CMatrix,
    vdag: CMatrix,
    dt: f64,
    dim: usize,
    molecule: MoleculeSpec,
    /// (input, ideal output, Tr(σσ)) per probe pair.
    probes: Vec<(CMatrix, CMatrix, f64)>,
}

impl Workspace {
    fn new(problem: &OptimizationProblem) -> Self {
        let (hx, hy) = control_generators(problem.molecule.n_spins());
        let probes = problem
            .probes
            .iter()
            .map(|(rho, sigma)| {
                let norm = trace(&(sigma * sigma)).re.max(f64::MIN_POSITIVE);
                (rho.clone(), sigma.clone(), norm)
            })
            .collect();
        Self {
            drift: drift_angular(&problem.molecule),
            hx,
            hy,
            vdag: problem.target.matrix().adjoint(),
            dt: problem.dt(),
            dim: problem.molecule.dim(),
            molecule: problem.molecule.clone(),
            probes,
        }
    }

    fn n_controls(&self, x: &[f64]) -> usize {
        x.len() / 2
    }

    /// Controls are stored as x = [u_0..u_{N-1}, φ_0..φ_{N-1}] with
    /// u = Ω/amp_limit for conditioning.
    fn segment(&self, x: &[f64], j: usize, amp_limit: f64) -> (f64, f64) {
        let n = self.n_controls(x);
        (x[j] * amp_limit, x[n + j])
    }

    fn fidelity(&self, x: &[f64], amp_limit: f64) -> f64 {
        let n = self.n_controls(x);
        let mut u = qcore::identity(self.dim);
        for j in 0..n {
            let (amp, phi) = self.segment(x, j, amp_limit);
            let h = segment_hamiltonian_angular(&self.drift, &self.hx, &self.hy, amp, phi);
            let (vals, q) = hermitian_eigen(&h).expect("segment Hamiltonian is Hermitian");
            u = exp_from_eigen(&vals, &q, self.dt) * u;
        }
        let d = self.dim as f64;
        (trace(&(&self.vdag * u)).norm_sqr() / (d * d)).min(1.0)
    }

    /// Φ and its exact gradient with respect to every (u_j, φ_j).
    fn fidelity_and_gradient(&self, x: &[f64], amp_limit: f64) -> (f64, Vec<f64>) {
        let n = self.n_controls(x);
        let d = self.dim as f64;

        // Forward pass: per-segment eigensystems, propagators, and the
        // cumulative products F_j = U_j ... U_1 (F_0 = I).
        let mut eigs = Vec::with_capacity(n);
        let mut props = Vec::with_capacity(n);
        let mut fwd = Vec::with_capacity(n + 1);
        fwd.push(qcore::identity(self.dim));
        for j in 0..n {
            let (amp, phi) = self.segment(x, j, amp_limit);
            let h = segment_hamiltonian_angular(&self.drift, &self.hx, &self.hy, amp, phi);
            let (vals, q) = hermitian_eigen(&h).expect("segment Hamiltonian is Hermitian");
            let u = exp_from_eigen(&vals, &q, self.dt);
            fwd.push(&u * fwd.last().unwrap());
            eigs.push((vals, q));
            props.push(u);
        }
        let u_total = fwd.last().unwrap().clone();
        let g = trace(&(&self.vdag * &u_total));
        let phi_val = (g.norm_sqr() / (d * d)).min(1.0);

        // Backward pass: B_j = U_{N-1} ... U_{j+1} (B at the last segment is
        // the identity), and the per-segment gradient contraction.
        let mut grad = vec![0.0; 2 * n];
        let mut back = qcore::identity(self.dim);
        let gbar = g.conj();
        for j in (0..n).rev() {
            let (vals, q) = &eigs[j];
            let gamma = loewner_exp(vals, self.dt);
            // K_j puts the derivative in the middle of Tr(V† B_j dU_j F_{j-1}).
            let k = &fwd[j] * &self.vdag * &back;
            let a = q.adjoint() * k * q;
            let qx = q.adjoint() * &self.hx * q;
            let qy = q.adjoint() * &self.hy * q;
            let (amp, phi) = self.segment(x, j, amp_limit);
            let (cp, sp) = (phi.cos(), phi.sin());
            let mut t_amp = C64::new(0.0, 0.0);
            let mut t_phi = C64::new(0.0, 0.0);
            for b in 0..self.dim {
                for a_idx in 0..self.dim {
                    let w = a[(a_idx, b)] * gamma[(b, a_idx)];
                    let ex = qx[(b, a_idx)];
                    let ey = qy[(b, a_idx)];
                    t_amp += w * (ex * cp + ey * sp);
                    t_phi += w * (ey * cp - ex * sp) * amp;
                }
            }
            let scale = 2.0 / (d * d);
            grad[j] = scale * (gbar * t_amp).re * amp_limit;
            grad[n + j] = scale * (gbar * t_phi).re;
            back = &back * &props[j];
        }
        (phi_val, grad)
    }

    /// Quadrature view of one segment's Hamiltonian: H = drift +
    /// amp_limit (z_x Hx + z_y Hy). Same control set as (Ω, φ) via
    /// Ω = amp_limit·√(z_x² + z_y²), φ = atan2(z_y, z_x), but the objective
    /// is smooth in z at zero amplitude, which the search needs; the pulse
    /// is converted back to (Ω, φ) on emission.
    fn segment_quad(&self, z: &[f64], j: usize, amp_limit: f64) -> CMatrix {
        let n = self.n_controls(z);
        &self.drift
            + self.hx.map(|v| v * (z[j] * amp_limit))
            + self.hy.map(|v| v * (z[n + j] * amp_limit))
    }

    /// Φ and the mean normalized probe overlap Tr(E(ρ)σ)/Tr(σσ), with E the
    /// pulse propagation including the simulator's per-segment relaxation.
    /// `with_probes = false` skips the probe propagation (score 0).
    fn polish_objective(&self, z: &[f64], amp_limit: f64, with_probes: bool) -> (f64, f64) {
        let n = self.n_controls(z);
        let mut u_total = qcore::identity(self.dim);
        let mut rhos: Vec<CMatrix> = if with_probes {
            self.probes.iter().map(|(r, _, _)| r.clone()).collect()
        } else {
            Vec::new()
        };
        for j in 0..n {
            let h = self.segment_quad(z, j, amp_limit);
            let (vals, q) = hermitian_eigen(&h).expect("segment Hamiltonian is Hermitian");
            let u = exp_from_eigen(&vals, &q, self.dt);
            for rho in &mut rhos {
                *rho = apply_relaxation(&(&u * &*rho * u.adjoint()), &self.molecule, self.dt);
            }
            u_total = u * u_total;
        }
        let d = self.dim as f64;
        let phi = (trace(&(&self.vdag * u_total)).norm_sqr() / (d * d)).min(1.0);
        let mut score = 0.0;
        for ((_, sigma, norm), rho) in self.probes.iter().zip(&rhos) {
            score += trace(&(sigma * rho)).re / norm;
        }
        if !self.probes.is_empty() {
            score /= self.probes.len() as f64;
        }
        (phi, score)
    }

    /// Φ, probe overlap, ∇Φ, and ∇overlap in the quadrature
    /// parameterization. The probe term is differentiated by the adjoint
    /// method: σ is pulled back through the relaxation adjoint and U† · U,
    /// and each segment reuses the Loewner contraction of the main gradient.
    #[allow(clippy::type_complexity)]
    fn polish_gradients(
        &self,
        z: &[f64],
        amp_limit: f64,
        with_probes: bool,
    ) -> (f64, f64, Vec<f64>, Vec<f64>) {
        let n = self.n_controls(z);
        let d = self.dim as f64;

        let mut eigs = Vec::with_capacity(n);
        let mut props = Vec::with_capacity(n);
        let mut fwd = Vec::with_capacity(n + 1);
        fwd.push(qcore::identity(self.dim));
        for j in 0..n {
            let h = self.segment_quad(z, j, amp_limit);
            let (vals, q) = hermitian_eigen(&h).expect("segment Hamiltonian is Hermitian");
            let u = exp_from_eigen(&vals, &q, self.dt);
            fwd.push(&u * fwd.last().unwrap());
            eigs.push((vals, q));
            props.push(u);
        }
        let g = trace(&(&self.vdag * fwd.last().unwrap()));
        let phi_val = (g.norm_sqr() / (d * d)).min(1.0);

        // Probe forward passes: the state entering each segment.
        let p_count = if with_probes { self.probes.len() } else { 0 };
        let mut probe_states: Vec<Vec<CMatrix>> = Vec::with_capacity(p_count);
        let mut probe_lams: Vec<CMatrix> = Vec::with_capacity(p_count);
        let mut score = 0.0;
        for (rho0, sigma, norm) in &self.probes[..p_count] {
            let mut states = Vec::with_capacity(n);
            let mut rho = rho0.clone();
            for u in &props {
                states.push(rho.clone());
                rho = apply_relaxation(&(u * rho * u.adjoint()), &self.molecule, self.dt);
            }
            score += trace(&(sigma * rho)).re / norm;
            probe_states.push(states);
            probe_lams.push(sigma.clone());
        }
        if p_count > 0 {
            score /= p_count as f64;
        }

        let mut grad_phi = vec![0.0; 2 * n];
        let mut grad_probe = vec![0.0; 2 * n];
        let mut back = qcore::identity(self.dim);
        let gbar = g.conj();
        for j in (0..n).rev() {
            let (vals, q) = &eigs[j];
            let gamma = loewner_exp(vals, self.dt);
            let qx = q.adjoint() * &self.hx * q;
            let qy = q.adjoint() * &self.hy * q;
            let contract = |k: &CMatrix| -> (C64, C64) {
                let a = q.adjoint() * k * q;
                let mut t_x = C64::new(0.0, 0.0);
                let mut t_y = C64::new(0.0, 0.0);
                for b in 0..self.dim {
                    for a_idx in 0..self.dim {
                        let gw = a[(a_idx, b)] * gamma[(b, a_idx)];
                        t_x += gw * qx[(b, a_idx)];
                        t_y += gw * qy[(b, a_idx)];
                    }
                }
                (t_x, t_y)
            };

            let k_main = &fwd[j] * &self.vdag * &back;
            let (t_x, t_y) = contract(&k_main);
            let scale = 2.0 * amp_limit / (d * d);
            grad_phi[j] = scale * (gbar * t_x).re;
            grad_phi[n + j] = scale * (gbar * t_y).re;

            let udag = props[j].adjoint();
            for (p, (_, _, norm)) in self.probes[..p_count].iter().enumerate() {
                let m = apply_relaxation_adjoint(&probe_lams[p], &self.molecule, self.dt);
                let k_p = &probe_states[p][j] * &udag * &m;
                let (t_x, t_y) = contract(&k_p);
                let pscale = 2.0 * amp_limit / (p_count as f64 * norm);
                grad_probe[j] += pscale * t_x.re;
                grad_probe[n + j] += pscale * t_y.re;
                probe_lams[p] = &udag * m * &props[j];
            }
            back = &back * &props[j];
        }
        (phi_val, score, grad_phi, grad_probe)
    }
}

fn exp_from_eigen(vals: &[f64], q: &CMatrix, dt: f64) -> CMatrix {
    let d = vals.len();
    let mut m = q.clone();
    for col in 0..d {
        let ph = C64::new(0.0, -vals[col] * dt).exp();
        for row in 0..d {
            m[(row, col)] *= ph;
        }
    }
    m * q.adjoint()
}

/// Divided-difference matrix of f(λ) = e^{-iλΔt}: Γ_ab = (f(λa) - f(λb)) /
/// (λa - λb), with the confluent limit -iΔt f(λa) on the diagonal. Written
/// in the phase/sinc form, which is stable for near-degenerate pairs.
fn loewner_exp(vals: &[f64], dt: f64) -> CMatrix {
    let d = vals.len();
    let mut m = CMatrix::zeros(d, d);
    for a in 0..d {
        for b in 0..d {
            let mid = 0.5 * (vals[a] + vals[b]);
            let half = 0.5 * (vals[a] - vals[b]) * dt;
            m[(a, b)] = C64::new(0.0, -dt) * C64::new(0.0, -mid * dt).exp() * sinc(half);
        }
    }
    m
}

fn sinc(x: f64) -> f64 {
    if x.abs() < 1e-8 {
        1.0 - x * x / 6.0
    } else {
        x.sin() / x
    }
}

fn project(z: &mut [f64]) {
    // Amplitude cap: each segment's quadrature pair is clipped back into the
    // unit disc, a smooth constraint with no corner at zero amplitude.
    let n = z.len() / 2;
    for j in 0..n {
        let r = z[j].hypot(z[n + j]);
        if r > 1.0 {
            z[j] /= r;
            z[n + j] /= r;
        }
    }
}

struct StartResult {
    x: Vec<f64>,
    fidelity: f64,
    iterations: usize,
    gradient_norm: f64,
}

/// L-BFGS two-loop recursion: ascent direction from the last `m` curvature
/// pairs applied to the current Φ-gradient.
fn lbfgs_direction(grad: &[f64], s_hist: &[Vec<f64>], y_hist: &[Vec<f64>]) -> Vec<f64> {
    let dot = |a: &[f64], b: &[f64]| a.iter().zip(b).map(|(x, y)| x * y).sum::<f64>();
    // Work in minimization convention on f = -Φ.
    let mut q: Vec<f64> = grad.iter().map(|g| -g).collect();
    let k = s_hist.len();
    let mut alphas = vec![0.0; k];
    let mut rhos = vec![0.0; k];
    for i in (0..k).rev() {
        rhos[i] = 1.0 / dot(&y_hist[i], &s_hist[i]);
        alphas[i] = rhos[i] * dot(&s_hist[i], &q);
        for (qj, yj) in q.iter_mut().zip(&y_hist[i]) {
            *qj -= alphas[i] * yj;
        }
    }
    if k > 0 {
        let gamma = dot(&s_hist[k - 1], &y_hist[k - 1]) / dot(&y_hist[k - 1], &y_hist[k - 1]);
        for qj in &mut q {
            *qj *= gamma;
        }
    }
    for i in 0..k {
        let beta = rhos[i] * dot(&y_hist[i], &q);
        for (qj, sj) in q.iter_mut().zip(&s_hist[i]) {
            *qj += (alphas[i] - beta) * sj;
        }
    }
    // Negate back: q approximates -H∇f = H∇Φ, the ascent direction.
    q.iter().map(|v| -v).collect()
}

fn run_start(ws: &Workspace, problem: &OptimizationProblem, mut z: Vec<f64>) -> StartResult {
    const MEMORY: usize = 10;
    let dot = |a: &[f64], b: &[f64]| a.iter().zip(b).map(|(x, y)| x * y).sum::<f64>();

    let (mut phi, _, gphi, _) = ws.polish_gradients(&z, problem.amp_limit, false);
    let mut grad = gphi;
    let mut s_hist: Vec<Vec<f64>> = Vec::new();
    let mut y_hist: Vec<Vec<f64>> = Vec::new();
    let mut iterations = 0;
    // Stall detection: a start trapped on a plateau (no measurable gain
    // over a window, or only vanishing accepted steps) is abandoned so the
    // budget moves to the next start.
    const STALL_WINDOW: usize = 50;
    const STALL_GAIN: f64 = 1e-7;
    let mut checkpoint = phi;
    let mut tiny_steps = 0usize;
    while iterations < problem.max_iterations && phi < problem.fidelity_goal {
        if iterations % STALL_WINDOW == 0 {
            if iterations > 0 && phi - checkpoint < STALL_GAIN {
                break;
            }
            checkpoint = phi;
        }
        if tiny_steps >= 5 {
            break;
        }
        let gnorm = grad.iter().map(|g| g * g).sum::<f64>().sqrt();
        if gnorm < 1e-10 {
            break;
        }
        let mut dir = lbfgs_direction(&grad, &s_hist, &y_hist);
        if dot(&dir, &grad) <= 0.0 {
            // Curvature memory is stale (projection kinks); fall back.
            s_hist.clear();
            y_hist.clear();
            dir = grad.clone();
        }

        // Monotone backtracking: only strictly improving steps are taken.
        // A failed search along the quasi-Newton direction clears the
        // curvature memory and retries once along the raw gradient.
        let line_search = |dir: &[f64], phi: f64| -> Option<(Vec<f64>, f64, f64)> {
            let mut step = 1.0;
            while step > 1e-14 {
                let mut cand: Vec<f64> = z.iter().zip(dir).map(|(zi, di)| zi + step * di).collect();
                project(&mut cand);
                let (phi_c, _) = ws.polish_objective(&cand, problem.amp_limit, false);
                if phi_c > phi {
                    return Some((cand, phi_c, step));
                }
                step *= 0.5;
            }
            None
        };
        let mut accepted = line_search(&dir, phi);
        if accepted.is_none() && !s_hist.is_empty() {
            s_hist.clear();
            y_hist.clear();
            let scaled: Vec<f64> = grad.iter().map(|g| g / gnorm).collect();
            accepted = line_search(&scaled, phi);
        }
        let Some((z_new, phi_new, step_taken)) = accepted else { break };
        tiny_steps = if step_taken < 1e-10 { tiny_steps + 1 } else { 0 };
        let (_, _, grad_new, _) = ws.polish_gradients(&z_new, problem.amp_limit, false);
        let s: Vec<f64> = z_new.iter().zip(&z).map(|(a, b)| a - b).collect();
        // y in minimization convention on f = -Φ: y = ∇f_new - ∇f = grad - grad_new.
        let y: Vec<f64> = grad.iter().zip(&grad_new).map(|(a, b)| a - b).collect();
        if dot(&s, &y) > 1e-14 {
            s_hist.push(s);
            y_hist.push(y);
            if s_hist.len() > MEMORY {
                s_hist.remove(0);
                y_hist.remove(0);
            }
        }
        z = z_new;
        phi = phi_new;
        grad = grad_new;
        iterations += 1;
    }
    if phi >= problem.fidelity_goal && !ws.probes.is_empty() && problem.polish_iterations > 0 {
        let (zp, phip, extra) = polish_constrained(ws, problem, z);
        let (_, _, g, _) = ws.polish_gradients(&zp, problem.amp_limit, false);
        let gradient_norm = g.iter().map(|v| v * v).sum::<f64>().sqrt();
        return StartResult { x: zp, fidelity: phip, iterations: iterations + extra, gradient_norm };
    }
    let gradient_norm = grad.iter().map(|g| g * g).sum::<f64>().sqrt();
    StartResult { x: z, fidelity: phi, iterations, gradient_norm }
}

/// Post-convergence probe polish: maximize the relaxed probe overlap while
/// holding the gate fidelity just above the goal. Works on the penalty
/// objective J = score + β·Φ where β is re-tuned every iteration to pin Φ
/// inside a narrow band over the goal — an adaptive boundary-riding scheme:
/// β grows when Φ sags toward the floor and shrinks when Φ has headroom, so
/// the ascent spends its steps on the probe term while staying feasible.
/// Returns the feasible iterate with the best score (never worse than the
/// entry point, which is feasible by construction). The floor sits slightly
/// above the goal so the emitted pulse cannot re-measure below it.
fn polish_constrained(
    ws: &Workspace,
    problem: &OptimizationProblem,
    mut z: Vec<f64>,
) -> (Vec<f64>, f64, usize) {
    let slack = (1.0 - problem.fidelity_goal).max(1e-9);
    let floor = problem.fidelity_goal + slack * 1e-4;
    let band_hi = problem.fidelity_goal + slack * 0.5;

    let (mut phi, mut score, mut gphi, mut gprobe) =
        ws.polish_gradients(&z, problem.amp_limit, true);
    if std::env::var("GRAPE_DEBUG").is_ok() {
        eprintln!("polish enter: phi={phi:.7} score={score:.7}");
    }
    let mut best = (z.clone(), phi, score);
    let mut beta = 1.0f64;
    let mut step = 1.0f64;
    let mut iterations = 0;
    while iterations < problem.polish_iterations {
        iterations += 1;
        let grad: Vec<f64> = gprobe.iter().zip(&gphi).map(|(s, p)| s + beta * p).collect();
        let gnorm = grad.iter().map(|g| g * g).sum::<f64>().sqrt();
        if gnorm < 1e-12 {
            break;
        }
        let objective = score + beta * phi;
        let mut accepted = None;
        let mut trial = (step * 2.0).min(1e3 / gnorm);
        while trial > 1e-12 {
            let mut cand: Vec<f64> = z.iter().zip(&grad).map(|(zi, gi)| zi + trial * gi).collect();
            project(&mut cand);
            let (phi_c, score_c) = ws.polish_objective(&cand, problem.amp_limit, true);
            if score_c + beta * phi_c > objective {
                accepted = Some((cand, phi_c, score_c, trial));
                break;
            }
            trial *= 0.5;
        }
        let Some((z_new, phi_new, score_new, taken)) = accepted else { break };
        z = z_new;
        phi = phi_new;
        score = score_new;
        step = taken;
        let g = ws.polish_gradients(&z, problem.amp_limit, true);
        gphi = g.2;
        gprobe = g.3;
        if phi >= floor && score > best.2 {
            best = (z.clone(), phi, score);
        }
        // Re-tune the penalty: pin Φ into [floor, band_hi].
        if phi < floor {
            beta = (beta * 2.0).min(1e6);
        } else if phi > band_hi {
            beta = (beta * 0.7).max(1e-4);
        }
    }
    if std::env::var("GRAPE_DEBUG").is_ok() {
        eprintln!(
            "polish exit: phi={phi:.7} score={score:.7} best_phi={:.7} best_score={:.7} iters={iterations}",
            best.1, best.2
        );
    }
    (best.0, best.1, iterations)
}

fn initial_point(problem: &OptimizationProblem, start: usize) -> Vec<f64> {
    let n = problem.n_segments;
    let mut x = vec![0.0; 2 * n];
    if start == 0 {
        return x; // zero controls: free if the target is (close to) free evolution
    }
    let stream = problem.seed ^ (start as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15);
    let mut rng = ChaCha8Rng::seed_from_u64(stream);
    for j in 0..n {
        let r = rng.gen_range(0.02..0.35);
        let phi = rng.gen_range(-std::f64::consts::PI..std::f64::consts::PI);
        x[j] = r * phi.cos();
        x[n + j] = r * phi.sin();
    }
    x
}

/// Multi-start gradient ascent. Starts run sequentially in seed order and
/// the search stops at the first start that reaches the goal; otherwise the
/// best Φ over all starts wins. Deterministic given the problem seed.
pub fn optimize(problem: &OptimizationProblem) -> Result<OptimizationReport> {
    problem.validate()?;
    let ws = Workspace::new(problem);

    let mut best: Option<StartResult> = None;
    for start in 0..problem.n_starts {
        let result = run_start(&ws, problem, initial_point(problem, start));
        let done = result.fidelity >= problem.fidelity_goal;
        if best.as_ref().map_or(true, |b| result.fidelity > b.fidelity) {
            best = Some(result);
        }
        if done {
            break;
        }
    }
    let best = best.expect("n_starts >= 1");

    let n = problem.n_segments;
    let segments = (0..n)
        .map(|j| {
            let (zx, zy) = (best.x[j], best.x[n + j]);
            let r = zx.hypot(zy);
            PulseSegment {
                amplitude: r * problem.amp_limit,
                phase: if r == 0.0 { 0.0 } else { zy.atan2(zx) },
            }
        })
        .collect();
    let pulse = PulseSequence::new(problem.dt(), segments)?;

    // Report the fidelity of the pulse as the simulator will actually apply
    // it, not the optimizer's internal bookkeeping.
    let u = pulse_unitary(&problem.molecule, &pulse)?;
    let achieved_fidelity = gate_fidelity_mat(&u, problem.target.matrix())?;

    Ok(OptimizationReport {
        pulse,
        converged: achieved_fidelity >= problem.fidelity_goal,
        achieved_fidelity,
        iterations: best.iterations,
        gradient_norm_final: best.gradient_norm,
    })
}

/// Relative disagreement ‖g_analytic − g_fd‖/‖g_fd‖ between the exact
/// gradient and central finite differences (step 1e-6) at a random interior
/// control point drawn from the problem seed.
pub fn gradient_fd_relative_error(problem: &OptimizationProblem) -> Result<f64> {
    problem.validate()?;
    let ws = Workspace::new(problem);
    let n = problem.n_segments;
    let mut rng = ChaCha8Rng::seed_from_u64(problem.seed.wrapping_add(0xF1D0));
    let mut x = vec![0.0; 2 * n];
    for u in &mut x[..n] {
        *u = rng.gen_range(0.1..0.9);
    }
    for phi in &mut x[n..] {
        *phi = rng.gen_range(-std::f64::consts::PI..std::f64::consts::PI);
    }

    let (_, analytic) = ws.fidelity_and_gradient(&x, problem.amp_limit);
    let h = 1e-6;
    let mut fd = vec![0.0; 2 * n];
    for i in 0..2 * n {
        let mut xp = x.clone();
        let mut xm = x.clone();
        xp[i] += h;
        xm[i] -= h;
        fd[i] = (ws.fidelity(&xp, problem.amp_limit) - ws.fidelity(&xm, problem.amp_limit)) / (2.0 * h);
    }
    let diff: f64 = analytic.iter().zip(&fd).map(|(a, f)| (a - f) * (a - f)).sum::<f64>().sqrt();
    let norm: f64 = fd.iter().map(|f| f * f).sum::<f64>().sqrt();
    Ok(if norm == 0.0 { diff } else { diff / norm })
}
