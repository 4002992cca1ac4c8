//! The constraint system for implementing ⅓(TR+BL+BR) in the 0/6 game with
//! a shared state and standard-basis advice.
//!
//! With the row player's qubit string `0x`/`1x` and the column player's
//! `0y`/`1y`, write the state as
//! `Σ a_xy |0x⟩|1y⟩ + b_xy |1x⟩|0y⟩ + c_xy |1x⟩|1y⟩` and collect the
//! coefficients into matrices `A`, `B`, `C`. Neither player can profit from
//! a deviation exactly when
//!
//! * `Tr(AA†) = Tr(BB†) = Tr(CC†) = ⅓`,
//! * `AC† = 0` and `BB† = CC†` (row player),
//! * `B†C = 0` and `A†A = C†C` (column player).
//!
//! The last two row conditions force `(CC†)² = 0`, contradicting the trace
//! condition on `C`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::games::NormalFormGame;
use crate::linalg::{hermitian_eig, r, Matrix, C64};
use crate::quantum::normal::{conditional_states, QceInstance};
use crate::quantum::random::{gaussian_c64, random_unitary};
use crate::quantum::state::QuantumState;

/// Probability of TL above which a state is rejected outright.
pub const SUPPORT_TOL: f64 = 1e-6;

/// Default restart budget for [`infeasibility_search`].
pub const DEFAULT_RESTARTS: usize = 100;

/// Residuals of every condition, all as max-abs norms.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConstraintReport {
    /// Largest deviation of the TR/BL/BR probabilities from ⅓.
    pub distribution_residual: f64,
    /// Off-diagonal block of the row player's state given advice R.
    pub sigma2_norm: f64,
    /// `‖σ₃ − ρ̃/2‖` for the row player.
    pub sigma3_residual: f64,
    pub col_sigma2_norm: f64,
    pub col_sigma3_residual: f64,
    pub trace_aa: f64,
    pub trace_bb: f64,
    pub trace_cc: f64,
    pub ac_dagger: f64,
    pub b_dagger_c: f64,
    pub bb_minus_cc: f64,
    pub a_dagger_a_minus_c_dagger_c: f64,
}

impl ConstraintReport {
    pub fn residuals(&self) -> Vec<(&'static str, f64)> {
        vec![
            ("distribution", self.distribution_residual),
            ("row sigma2", self.sigma2_norm),
            ("row sigma3 - rho~/2", self.sigma3_residual),
            ("column sigma2", self.col_sigma2_norm),
            ("column sigma3 - rho~/2", self.col_sigma3_residual),
            ("Tr(AA^dagger) - 1/3", self.trace_aa),
            ("Tr(BB^dagger) - 1/3", self.trace_bb),
            ("Tr(CC^dagger) - 1/3", self.trace_cc),
            ("AC^dagger", self.ac_dagger),
            ("B^dagger C", self.b_dagger_c),
            ("BB^dagger - CC^dagger", self.bb_minus_cc),
            ("A^dagger A - C^dagger C", self.a_dagger_a_minus_c_dagger_c),
        ]
    }

    /// Row player's no-deviation conditions.
    pub fn row_passes(&self, eps: f64) -> bool {
        [self.sigma2_norm, self.sigma3_residual, self.ac_dagger, self.bb_minus_cc].iter().all(|&v| v <= eps)
    }

    pub fn column_passes(&self, eps: f64) -> bool {
        [self.col_sigma2_norm, self.col_sigma3_residual, self.b_dagger_c, self.a_dagger_a_minus_c_dagger_c]
            .iter()
            .all(|&v| v <= eps)
    }

    pub fn passes(&self, eps: f64) -> bool {
        self.residuals().iter().all(|&(_, v)| v <= eps)
    }
}

/// The 0/6 coordination game: TL and BR pay 0, TR and BL pay 6 each.
pub fn target_game() -> NormalFormGame {
    NormalFormGame::from_labels(&[&["T", "B"], &["L", "R"]], &[&[0.0, 0.0], &[6.0, 6.0], &[6.0, 6.0], &[0.0, 0.0]])
        .expect("static game")
}

/// Coefficient blocks of a two-player state.
#[derive(Clone, Debug, PartialEq)]
pub struct CoefficientBlocks {
    pub a: Matrix,
    pub b: Matrix,
    pub c: Matrix,
    /// Squared norm of the `|0x⟩|0y⟩` part (probability of TL).
    pub tl_weight: f64,
}

pub fn coefficient_blocks(state: &QuantumState) -> Result<CoefficientBlocks> {
    if state.owners().iter().any(|&o| o > 1) {
        return Err(Error::InvalidState("expected a two-player state".into()));
    }
    let row = state.qubits_of(0);
    let col = state.qubits_of(1);
    if row.is_empty() || col.is_empty() {
        return Err(Error::InvalidState("each player needs at least one qubit".into()));
    }
    let (rd, cd) = (1 << (row.len() - 1), 1 << (col.len() - 1));
    let mut blocks = [Matrix::zeros(rd, cd), Matrix::zeros(rd, cd), Matrix::zeros(rd, cd)];
    let mut tl_weight = 0.0;
    for (k, &amp) in state.amplitudes().iter().enumerate() {
        let x = state.read_bits(k, &row);
        let y = state.read_bits(k, &col);
        let (xa, xr) = (x / rd, x % rd);
        let (ya, yr) = (y / cd, y % cd);
        match (xa, ya) {
            (0, 0) => tl_weight += amp.norm_sqr(),
            (0, 1) => blocks[0][(xr, yr)] = amp,
            (1, 0) => blocks[1][(xr, yr)] = amp,
            _ => blocks[2][(xr, yr)] = amp,
        }
    }
    let [a, b, c] = blocks;
    Ok(CoefficientBlocks { a, b, c, tl_weight })
}

/// Builds a state from blocks, row qubits first. The blocks must already
/// have unit total weight.
pub fn state_from_blocks(a: &Matrix, b: &Matrix, c: &Matrix) -> Result<QuantumState> {
    let (rd, cd) = (a.rows(), a.cols());
    if !rd.is_power_of_two()
        || !cd.is_power_of_two()
        || b.rows() != rd
        || c.rows() != rd
        || b.cols() != cd
        || c.cols() != cd
    {
        return Err(Error::Dimension("blocks must share a power-of-two shape".into()));
    }
    let n = rd.trailing_zeros() as usize + 1;
    let m = cd.trailing_zeros() as usize + 1;
    let mut amplitudes = vec![r(0.0); 1 << (n + m)];
    for x in 0..rd {
        for y in 0..cd {
            let at = |xa: usize, ya: usize| ((xa * rd + x) << m) | (ya * cd + y);
            amplitudes[at(0, 1)] = a[(x, y)];
            amplitudes[at(1, 0)] = b[(x, y)];
            amplitudes[at(1, 1)] = c[(x, y)];
        }
    }
    let owners = std::iter::repeat_n(0, n).chain(std::iter::repeat_n(1, m)).collect();
    QuantumState::new(amplitudes, owners)
}

fn trace_weight(m: &Matrix) -> f64 {
    m.data().iter().map(|z| z.norm_sqr()).sum()
}

/// Every residual of the system for `state`, the σ blocks being computed
/// from the conditional states rather than from `A`, `B`, `C`.
pub fn appendix_d_report(state: &QuantumState) -> Result<ConstraintReport> {
    let blocks = coefficient_blocks(state)?;
    if blocks.tl_weight > SUPPORT_TOL {
        return Err(Error::WrongSupport(format!("TL has probability {:e}", blocks.tl_weight)));
    }
    let CoefficientBlocks { a, b, c, .. } = &blocks;
    let third = 1.0 / 3.0;
    let (wa, wb, wc) = (trace_weight(a), trace_weight(b), trace_weight(c));
    let distribution_residual = [wa, wb, wc].iter().map(|w| (w - third).abs()).fold(blocks.tl_weight, f64::max);

    let inst = QceInstance::canonical(target_game(), state.clone())?;
    let (sigma2_norm, sigma3_residual) = sigma_residuals(&inst, 0)?;
    let (col_sigma2_norm, col_sigma3_residual) = sigma_residuals(&inst, 1)?;

    Ok(ConstraintReport {
        distribution_residual,
        sigma2_norm,
        sigma3_residual,
        col_sigma2_norm,
        col_sigma3_residual,
        trace_aa: (wa - third).abs(),
        trace_bb: (wb - third).abs(),
        trace_cc: (wc - third).abs(),
        ac_dagger: (a * &c.adjoint()).max_abs(),
        b_dagger_c: (&b.adjoint() * c).max_abs(),
        bb_minus_cc: (&(b * &b.adjoint()) - &(c * &c.adjoint())).max_abs(),
        a_dagger_a_minus_c_dagger_c: (&(&a.adjoint() * a) - &(&c.adjoint() * c)).max_abs(),
    })
}

/// `(‖σ₂‖, ‖σ₃ − ρ̃/2‖)` for one player, where ρ is their state given the
/// opponent's first advice and σ given the second.
fn sigma_residuals(inst: &QceInstance, player: usize) -> Result<(f64, f64)> {
    let fam = conditional_states(inst, player)?;
    let dim = 1 << inst.state.qubits_of(player).len();
    let h = dim / 2;
    let pick = |advice: usize| {
        fam.entries.iter().find(|e| e.advice == [advice]).map_or_else(|| Matrix::zeros(dim, dim), |e| e.rho.clone())
    };
    let (rho, sigma) = (pick(0), pick(1));
    let sigma2 = sigma.block(0, h, h, h);
    let sigma3 = sigma.block(h, h, h, h);
    let rho_tilde = rho.block(h, h, h, h);
    Ok((sigma2.max_abs(), (&sigma3 - &rho_tilde.scale(0.5)).max_abs()))
}

/// Smooth objective: squared Frobenius residuals of the whole system.
pub fn constraint_objective(a: &Matrix, b: &Matrix, c: &Matrix) -> f64 {
    let third = 1.0 / 3.0;
    let fro2 = |m: &Matrix| trace_weight(m);
    let (ad, bd, cd) = (a.adjoint(), b.adjoint(), c.adjoint());
    (fro2(a) - third).powi(2)
        + (fro2(b) - third).powi(2)
        + (fro2(c) - third).powi(2)
        + fro2(&(a * &cd))
        + fro2(&(&bd * c))
        + fro2(&(&(b * &bd) - &(c * &cd)))
        + fro2(&(&(&ad * a) - &(&cd * c)))
}

/// The bound `Tr(CC†) ≤ (rδ_E + sqrt(r²δ_E² + 4rδ_F²))/2` with
/// `δ_F = ‖AC†‖_F`, `δ_E = ‖C†C − A†A‖_F` and `r` the row count, from
/// `(CC†)² = (CA†)(AC†) + C(C†C − A†A)C†`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TraceBound {
    pub delta_f: f64,
    pub delta_e: f64,
    pub trace_cc: f64,
    pub bound: f64,
    pub holds: bool,
}

pub fn trace_bound(a: &Matrix, c: &Matrix) -> TraceBound {
    let rows = c.rows() as f64;
    let delta_f = trace_weight(&(a * &c.adjoint())).sqrt();
    let delta_e = trace_weight(&(&(&c.adjoint() * c) - &(&a.adjoint() * a))).sqrt();
    let trace_cc = trace_weight(c);
    let bound = (rows * delta_e + (rows * rows * delta_e * delta_e + 4.0 * rows * delta_f * delta_f).sqrt()) / 2.0;
    TraceBound { delta_f, delta_e, trace_cc, bound, holds: trace_cc <= bound * (1.0 + 1e-9) + 1e-12 }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SearchResult {
    /// Smallest [`constraint_objective`] value found.
    pub min_residual: f64,
    pub best_state: QuantumState,
    pub restarts: usize,
    pub evaluations: usize,
    pub bound: TraceBound,
}

/// Largest block side accepted by [`infeasibility_search`] (5 + 5 qubits).
pub const SEARCH_MAX_BLOCK: usize = 16;

const INITIAL_STEP: f64 = 0.1;
const FINAL_STEP: f64 = 1e-7;
const EVALS_PER_RESTART: usize = 200_000;

struct Params {
    rd: usize,
    cd: usize,
}

impl Params {
    fn len(&self) -> usize {
        6 * self.rd * self.cd
    }

    fn blocks(&self, x: &[f64]) -> (Matrix, Matrix, Matrix) {
        let cells = self.rd * self.cd;
        let block = |k: usize| {
            Matrix::from_fn(self.rd, self.cd, |i, j| {
                let at = 2 * (k * cells + i * self.cd + j);
                C64::new(x[at], x[at + 1])
            })
        };
        (block(0), block(1), block(2))
    }

    fn eval(&self, x: &[f64]) -> f64 {
        let (a, b, c) = self.blocks(x);
        constraint_objective(&a, &b, &c)
    }
}

fn normalize(x: &mut [f64]) {
    let norm = x.iter().map(|v| v * v).sum::<f64>().sqrt();
    if norm > 0.0 {
        x.iter_mut().for_each(|v| *v /= norm);
    }
}

/// Local search for a state satisfying the system, over states with
/// `row_qubits + col_qubits` qubits and no TL component.
///
/// The first start is the naive state `(|01⟩+|10⟩+|11⟩)/√3` embedded in the
/// larger registers; with `restarts = 0` it is only evaluated. Every
/// further restart begins at a seeded random point and runs coordinate
/// descent on the real and imaginary parts, renormalizing after each move.
pub fn infeasibility_search(row_qubits: usize, col_qubits: usize, restarts: usize, seed: u64) -> Result<SearchResult> {
    if row_qubits == 0 || col_qubits == 0 {
        return Err(Error::InvalidState("each player needs at least one qubit".into()));
    }
    let (rd, cd) = (1usize << (row_qubits - 1), 1usize << (col_qubits - 1));
    if rd > SEARCH_MAX_BLOCK || cd > SEARCH_MAX_BLOCK {
        return Err(Error::CapExceeded { what: "coefficient block side", count: rd.max(cd), cap: SEARCH_MAX_BLOCK });
    }
    let p = Params { rd, cd };
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut start = vec![0.0; p.len()];
    let cells = rd * cd;
    for k in 0..3 {
        start[2 * k * cells] = 1.0 / 3f64.sqrt();
    }
    let mut best_x = start.clone();
    let mut best = p.eval(&start);
    let mut evaluations = 1;
    for restart in 0..restarts {
        let mut x = if restart == 0 {
            start.clone()
        } else {
            let mut v: Vec<f64> = (0..p.len()).map(|_| gaussian_c64(&mut rng).re).collect();
            normalize(&mut v);
            v
        };
        let (f, evals) = descend(&p, &mut x);
        evaluations += evals;
        if f < best {
            best = f;
            best_x = x;
        }
    }
    let (a, b, c) = p.blocks(&best_x);
    Ok(SearchResult {
        min_residual: best,
        best_state: state_from_blocks(&a, &b, &c)?,
        restarts,
        evaluations,
        bound: trace_bound(&a, &c),
    })
}

fn descend(p: &Params, x: &mut [f64]) -> (f64, usize) {
    let mut f = p.eval(x);
    let mut evals = 1;
    let mut step = INITIAL_STEP;
    let mut trial = x.to_vec();
    while step > FINAL_STEP && evals < EVALS_PER_RESTART {
        let mut improved = false;
        for k in 0..x.len() {
            for dir in [1.0, -1.0] {
                trial.copy_from_slice(x);
                trial[k] += dir * step;
                normalize(&mut trial);
                let ft = p.eval(&trial);
                evals += 1;
                if ft < f {
                    f = ft;
                    x.copy_from_slice(&trial);
                    improved = true;
                    break;
                }
            }
        }
        if !improved {
            step *= 0.5;
        }
    }
    (f, evals)
}

/// An exact solution of `AC† = 0`, `A†A = C†C` built from the general form
/// `A = UΣV†`, `C = WΣV†` (shared right factor and singular values), plus a
/// random `B` of weight ⅓.
#[derive(Clone, Debug, PartialEq)]
pub struct ExactConstruction {
    pub a: Matrix,
    pub b: Matrix,
    pub c: Matrix,
    /// Dimension of the admissible singular-value space.
    pub admissible_dim: usize,
}

/// `AC† = UΣΣᵀW†` vanishes only for the `Σ²` in the null space of
/// `s ↦ Σ_j s_j u_j w_j†`; the construction draws `Σ²` from that null space.
pub fn exact_construction(rng: &mut impl Rng, rows: usize, cols: usize) -> Result<ExactConstruction> {
    let u = random_unitary(rng, rows);
    let w = random_unitary(rng, rows);
    let v = random_unitary(rng, cols);
    let k = rows.min(cols);
    // Gram matrix of the maps u_j w_j^dagger under the trace inner product.
    let gram = Matrix::from_fn(k, k, |i, j| {
        let uu: C64 = u.col(i).iter().zip(u.col(j)).map(|(a, b)| a.conj() * b).sum();
        let ww: C64 = w.col(j).iter().zip(w.col(i)).map(|(a, b)| a.conj() * b).sum();
        r((uu * ww).re)
    });
    let eig = hermitian_eig(&gram)?;
    let scale = eig.values.first().copied().unwrap_or(0.0).abs().max(1.0);
    let null: Vec<usize> = (0..k).filter(|&j| eig.values[j].abs() <= 1e-12 * scale).collect();
    let mut s2 = vec![0.0; k];
    for &j in &null {
        let coeff: f64 = rng.gen();
        for (t, z) in eig.vector(j).iter().enumerate() {
            s2[t] += coeff * z.re;
        }
    }
    let sigma = Matrix::from_fn(rows, cols, |i, j| if i == j && i < k { r(s2[i].max(0.0).sqrt()) } else { r(0.0) });
    let a = &(&u * &sigma) * &v.adjoint();
    let c = &(&w * &sigma) * &v.adjoint();
    let mut b = Matrix::from_fn(rows, cols, |_, _| gaussian_c64(rng));
    let wb = trace_weight(&b).sqrt();
    b = b.scale((1.0 / 3f64).sqrt() / wb);
    Ok(ExactConstruction { a, b, c, admissible_dim: null.len() })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn d1_state() -> QuantumState {
        let (s6, s12) = (1.0 / 6f64.sqrt(), 1.0 / 12f64.sqrt());
        let mut amps = vec![0.0; 16];
        for (idx, v) in [
            (0b0010, s6),
            (0b0011, -s6),
            (0b1000, s6),
            (0b1100, s6),
            (0b1010, s12),
            (0b1011, s12),
            (0b1110, s12),
            (0b1111, s12),
        ] {
            amps[idx] = v;
        }
        QuantumState::new(amps.into_iter().map(r).collect(), vec![0, 0, 1, 1]).unwrap()
    }

    #[test]
    fn naive_state_fails_row_conditions() {
        let s = QuantumState::normalized_real(&[0.0, 1.0, 1.0, 1.0], vec![0, 1]).unwrap();
        let rep = appendix_d_report(&s).unwrap();
        assert!(rep.sigma2_norm > 0.4);
        assert!(!rep.row_passes(1e-9));
        assert!(rep.distribution_residual < 1e-15);
    }

    #[test]
    fn d1_state_row_passes_column_fails() {
        let rep = appendix_d_report(&d1_state()).unwrap();
        assert!(rep.row_passes(1e-12), "{rep:?}");
        assert!(!rep.column_passes(1e-3));
        assert!(rep.b_dagger_c > 0.1);
        assert!(rep.distribution_residual < 1e-15);
    }

    #[test]
    fn no_c_block_fails_trace() {
        let s = QuantumState::normalized_real(&[0.0, 1.0, 1.0, 0.0], vec![0, 1]).unwrap();
        let rep = appendix_d_report(&s).unwrap();
        assert!((rep.trace_cc - 1.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn wrong_support_is_rejected() {
        let s = QuantumState::normalized_real(&[1.0, 1.0, 1.0, 1.0], vec![0, 1]).unwrap();
        assert!(matches!(appendix_d_report(&s), Err(Error::WrongSupport(_))));
    }

    #[test]
    fn blocks_round_trip() {
        let blocks = coefficient_blocks(&d1_state()).unwrap();
        let back = state_from_blocks(&blocks.a, &blocks.b, &blocks.c).unwrap();
        assert!(back.max_abs_diff(&d1_state()) < 1e-15);
    }

    #[test]
    fn search_without_restarts_scores_naive_state() {
        let res = infeasibility_search(1, 1, 0, 0).unwrap();
        assert!((res.min_residual - 2.0 / 9.0).abs() < 1e-12);
        assert!(res.bound.holds);
    }

    #[test]
    fn exact_constructions_collapse() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let e = exact_construction(&mut rng, 2, 2).unwrap();
        assert_eq!(e.admissible_dim, 0);
        let cc = &e.c * &e.c.adjoint();
        assert!((&cc * &cc).trace().re.abs() <= 1e-12);
        assert!((&e.a * &e.c.adjoint()).max_abs() <= 1e-12);
    }
}
