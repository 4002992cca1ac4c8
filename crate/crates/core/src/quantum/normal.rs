use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::classical::CorrelatingDevice;
use crate::distribution::Distribution;
use crate::error::{Error, Result};
use crate::games::{NormalFormGame, PlayerId, Profile};
use crate::linalg::{hermitian_eig, min_eigenvalue, positive_projector, r, trace_norm, Matrix, DEFAULT_MAX_QUBITS};
use crate::quantum::circuit::{Gate, PlayerCircuit, Register};
use crate::quantum::random::random_unitary;
use crate::quantum::state::QuantumState;
use crate::report::{EquilibriumReport, PlayerDeviation, Witness};

/// A shared state, its partition and one circuit per player.
#[derive(Clone, Debug, PartialEq)]
pub struct QceInstance {
    pub game: NormalFormGame,
    pub state: QuantumState,
    pub circuits: Vec<PlayerCircuit>,
}

fn action_bits(count: usize) -> Result<usize> {
    if count.is_power_of_two() {
        Ok(count.trailing_zeros() as usize)
    } else {
        Err(Error::Unsupported(format!("{count} actions is not a power of two")))
    }
}

impl QceInstance {
    pub fn new(game: NormalFormGame, state: QuantumState, circuits: Vec<PlayerCircuit>) -> Result<Self> {
        if circuits.len() != game.players() {
            return Err(Error::InvalidCircuit(format!("{} circuits for {} players", circuits.len(), game.players())));
        }
        if let Some(&o) = state.owners().iter().find(|&&o| o >= game.players()) {
            return Err(Error::InvalidState(format!("qubit owned by player {o} of a {}-player game", game.players())));
        }
        for (i, circ) in circuits.iter().enumerate() {
            if circ.owner != i {
                return Err(Error::InvalidCircuit(format!("circuit {i} is owned by player {}", circ.owner)));
            }
            circ.validate(state.qubits_of(i).len())?;
            if let Some(bad) = circ.actions.iter().find(|a| game.action_index(i, a).is_none()) {
                return Err(Error::InvalidCircuit(format!("player {i} has no action `{bad}`")));
            }
        }
        Ok(Self { game, state, circuits })
    }

    /// Every player measures the first `log2 |A_i|` qubits of their register
    /// and reads the bits as an action index.
    pub fn canonical(game: NormalFormGame, state: QuantumState) -> Result<Self> {
        let circuits = (0..game.players())
            .map(|i| {
                let k = action_bits(game.action_count(i))?;
                let outputs: Vec<usize> = (0..k).collect();
                let labels: Vec<&str> = game.action_labels(i).iter().map(String::as_str).collect();
                Ok(PlayerCircuit::measure(i, &outputs, &labels))
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(game, state, circuits)
    }

    pub fn is_canonical(&self) -> bool {
        self.circuits.iter().enumerate().all(|(i, circ)| {
            circ.is_bare_measurement()
                && circ.outputs.iter().enumerate().all(|(k, &q)| k == q)
                && circ.actions.as_slice() == self.game.action_labels(i)
        })
    }

    /// The same state and game with circuit `player` replaced.
    pub fn with_circuit(&self, circuit: PlayerCircuit) -> Result<Self> {
        let mut circuits = self.circuits.clone();
        let i = circuit.owner;
        if i >= circuits.len() {
            return Err(Error::InvalidCircuit(format!("no player {i}")));
        }
        circuits[i] = circuit;
        Self::new(self.game.clone(), self.state.clone(), circuits)
    }
}

/// State after every circuit's unitaries, applied in `order`, with each
/// player's register. Ancillas are allocated in player order first.
pub fn evolve_in_order(inst: &QceInstance, order: &[PlayerId]) -> Result<(QuantumState, Vec<Register>)> {
    let mut sorted = order.to_vec();
    sorted.sort_unstable();
    if sorted != (0..inst.game.players()).collect::<Vec<_>>() {
        return Err(Error::InvalidCircuit("application order must list every player once".into()));
    }
    let mut state = inst.state.clone();
    let regs =
        inst.circuits.iter().map(|circ| circ.allocate(&mut state, DEFAULT_MAX_QUBITS)).collect::<Result<Vec<_>>>()?;
    for &i in order {
        inst.circuits[i].apply_unitaries(&mut state, &regs[i])?;
    }
    Ok((state, regs))
}

fn evolve(inst: &QceInstance) -> Result<(QuantumState, Vec<Register>)> {
    evolve_in_order(inst, &(0..inst.game.players()).collect::<Vec<_>>())
}

fn measured_distribution(inst: &QceInstance, state: &QuantumState, regs: &[Register]) -> Result<Distribution<Profile>> {
    let outputs: Vec<Vec<usize>> = inst.circuits.iter().zip(regs).map(|(c, reg)| c.output_qubits(reg)).collect();
    let all: Vec<usize> = outputs.concat();
    let probs = state.outcome_probabilities(&all);
    let mut entries = Vec::new();
    for (bits, p) in probs.into_iter().enumerate() {
        if p == 0.0 {
            continue;
        }
        let mut shift = all.len();
        let profile: Profile = inst
            .circuits
            .iter()
            .enumerate()
            .map(|(i, circ)| {
                let k = circ.outputs.len();
                shift -= k;
                let b = (bits >> shift) & ((1 << k) - 1);
                inst.game.action_index(i, &circ.actions[b]).expect("validated labels")
            })
            .collect();
        entries.push((profile, p));
    }
    Distribution::new(entries)
}

/// Exact outcome distribution of the protocol.
pub fn simulate_normal_qce(inst: &QceInstance) -> Result<Distribution<Profile>> {
    let (state, regs) = evolve(inst)?;
    measured_distribution(inst, &state, &regs)
}

/// [`simulate_normal_qce`] with the unitaries applied in a given player order.
pub fn simulate_in_order(inst: &QceInstance, order: &[PlayerId]) -> Result<Distribution<Profile>> {
    let (state, regs) = evolve_in_order(inst, order)?;
    measured_distribution(inst, &state, &regs)
}

/// Permutation unitary sending `|b⟩` to `|perm[b]⟩`.
fn permutation_unitary(perm: &[usize]) -> Matrix {
    let n = perm.len();
    let mut m = Matrix::zeros(n, n);
    for (b, &t) in perm.iter().enumerate() {
        m[(t, b)] = r(1.0);
    }
    m
}

/// Deferred-measurement form: the state just before measurement, with every
/// circuit replaced by a bare measurement of the first qubits of its owner's
/// register.
pub fn canonicalize(inst: &QceInstance) -> Result<QceInstance> {
    let (mut state, regs) = evolve(inst)?;
    let mut outputs = Vec::with_capacity(regs.len());
    for (i, (circ, reg)) in inst.circuits.iter().zip(&regs).enumerate() {
        let k = action_bits(inst.game.action_count(i))?;
        if circ.outputs.len() != k {
            return Err(Error::Unsupported(format!(
                "player {i} measures {} qubits for {} actions",
                circ.outputs.len(),
                inst.game.action_count(i)
            )));
        }
        let perm: Vec<usize> =
            circ.actions.iter().map(|a| inst.game.action_index(i, a).expect("validated labels")).collect();
        let out = circ.output_qubits(reg);
        if perm.iter().enumerate().any(|(b, &t)| b != t) {
            state.apply(&permutation_unitary(&perm), &out)?;
        }
        outputs.push(out);
    }
    // Keep each player's set of positions, moving their outputs to the front.
    let mut queues: Vec<Vec<usize>> = outputs
        .iter()
        .enumerate()
        .map(|(i, out)| {
            let mut q = out.clone();
            q.extend(state.qubits_of(i).into_iter().filter(|x| !out.contains(x)));
            q.reverse();
            q
        })
        .collect();
    let order: Vec<usize> =
        state.owners().to_vec().iter().map(|&o| queues[o].pop().expect("one entry per owned qubit")).collect();
    let state = state.permute(&order)?;
    QceInstance::canonical(inst.game.clone(), state)
}

/// Correlating device with the same outcome distribution: measure every
/// qubit of the canonical state and read off each player's advice bits.
pub fn qce_to_ce(inst: &QceInstance) -> Result<CorrelatingDevice> {
    let canon = if inst.is_canonical() { inst.clone() } else { canonicalize(inst)? };
    let state = &canon.state;
    let all: Vec<usize> = (0..state.qubit_count()).collect();
    let registers: Vec<Vec<usize>> = (0..canon.game.players()).map(|i| state.qubits_of(i)).collect();
    let mut entries = Vec::new();
    for (k, p) in state.outcome_probabilities(&all).into_iter().enumerate() {
        if p == 0.0 {
            continue;
        }
        let profile: Profile = registers
            .iter()
            .zip(&canon.circuits)
            .map(|(reg, circ)| state.read_bits(k, &reg[..circ.outputs.len()]))
            .collect();
        entries.push((profile, p));
    }
    Distribution::new(entries)
}

/// A player's register state given one joint advice of their opponents.
#[derive(Clone, Debug, PartialEq)]
pub struct ConditionalState {
    /// Opponents' action indices, in player order with the target skipped.
    pub advice: Vec<usize>,
    pub probability: f64,
    pub rho: Matrix,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ConditionalStateFamily {
    pub player: PlayerId,
    pub entries: Vec<ConditionalState>,
}

impl ConditionalStateFamily {
    /// Full profile with `own` inserted at the target player's slot.
    pub fn profile(&self, entry: &ConditionalState, own: usize) -> Profile {
        let mut p = entry.advice.clone();
        p.insert(self.player, own);
        p
    }

    /// `u[k][x]`: the target's payoff for action `x` against entry `k`.
    pub fn utilities(&self, game: &NormalFormGame) -> Vec<Vec<f64>> {
        self.entries
            .iter()
            .map(|e| {
                (0..game.action_count(self.player)).map(|x| game.payoff(&self.profile(e, x), self.player)).collect()
            })
            .collect()
    }

    pub fn dim(&self) -> usize {
        self.entries.first().map_or(1, |e| e.rho.rows())
    }
}

/// Advice with probability at most this is dropped from a family.
const ADVICE_FLOOR: f64 = 1e-14;

/// Conditional states of `player`'s register, one per opponents' advice
/// outcome of positive probability.
pub fn conditional_states(inst: &QceInstance, player: PlayerId) -> Result<ConditionalStateFamily> {
    if player >= inst.game.players() {
        return Err(Error::InvalidGame(format!("no player {player}")));
    }
    let canon = if inst.is_canonical() { inst.clone() } else { canonicalize(inst)? };
    let state = &canon.state;
    let keep = state.qubits_of(player);
    let rest: Vec<usize> = (0..state.qubit_count()).filter(|&q| state.owner(q) != player).collect();
    let opponents: Vec<PlayerId> = (0..canon.game.players()).filter(|&j| j != player).collect();
    let advice_qubits: Vec<Vec<usize>> =
        opponents.iter().map(|&j| state.qubits_of(j)[..canon.circuits[j].outputs.len()].to_vec()).collect();

    let dim = 1 << keep.len();
    let mut env: Vec<Vec<crate::linalg::C64>> = vec![vec![r(0.0); dim]; 1 << rest.len()];
    for (k, &a) in state.amplitudes().iter().enumerate() {
        env[state.read_bits(k, &rest)][state.read_bits(k, &keep)] = a;
    }
    let mut groups: std::collections::BTreeMap<Vec<usize>, Matrix> = std::collections::BTreeMap::new();
    for (e, v) in env.iter().enumerate() {
        if v.iter().all(|z| z.norm_sqr() == 0.0) {
            continue;
        }
        // Recover a global basis index with these environment bits to read advice.
        let k = rest.iter().enumerate().fold(0usize, |acc, (pos, &q)| {
            if e >> (rest.len() - 1 - pos) & 1 == 1 {
                acc | state.mask(q)
            } else {
                acc
            }
        });
        let advice: Vec<usize> = advice_qubits.iter().map(|qs| state.read_bits(k, qs)).collect();
        let m = groups.entry(advice).or_insert_with(|| Matrix::zeros(dim, dim));
        *m = &*m + &Matrix::outer(v, v);
    }
    let mut entries = Vec::new();
    for (advice, m) in groups {
        let p = m.trace().re;
        if p > ADVICE_FLOOR {
            entries.push(ConditionalState { advice, probability: p, rho: m.scale(1.0 / p) });
        }
    }
    Ok(ConditionalStateFamily { player, entries })
}

/// `M_x = Σ_a p(a) u(x, a) ρ_a` for every action `x`.
pub fn deviation_operators(family: &ConditionalStateFamily, utilities: &[Vec<f64>]) -> Result<Vec<Matrix>> {
    if utilities.len() != family.entries.len() {
        return Err(Error::Dimension(format!(
            "{} utility rows for {} advice states",
            utilities.len(),
            family.entries.len()
        )));
    }
    let actions = utilities.first().map_or(0, Vec::len);
    if utilities.iter().any(|u| u.len() != actions) {
        return Err(Error::Dimension("utility rows differ in length".into()));
    }
    let dim = family.dim();
    Ok((0..actions)
        .map(|x| {
            family
                .entries
                .iter()
                .zip(utilities)
                .fold(Matrix::zeros(dim, dim), |acc, (e, u)| &acc + &e.rho.scale(e.probability * u[x]))
        })
        .collect())
}

/// Best response over all measurements for a two-action player.
#[derive(Clone, Debug, PartialEq)]
pub struct BinaryDeviation {
    pub value: f64,
    /// Projector whose outcome means "play the first action".
    pub measurement: Matrix,
}

/// Helstrom-optimal deviation: `Tr(M₁) + Tr((M₀ − M₁)₊)`, attained by the
/// projector onto the positive eigenspace of `M₀ − M₁`.
pub fn optimal_deviation_binary(family: &ConditionalStateFamily, utilities: &[Vec<f64>]) -> Result<BinaryDeviation> {
    if utilities.iter().any(|u| u.len() != 2) {
        return Err(Error::Unsupported("the closed form needs exactly two actions; use a dual certificate".into()));
    }
    let m = deviation_operators(family, utilities)?;
    let diff = &m[0] - &m[1];
    let eig = hermitian_eig(&diff)?;
    let positive: f64 = eig.values.iter().filter(|&&l| l > crate::linalg::ZERO_EIGENVALUE_BAND).sum();
    Ok(BinaryDeviation { value: m[1].trace().re + positive, measurement: positive_projector(&diff)? })
}

/// Value of the measurement `{P, I − P}` with "P" meaning the first action.
pub fn binary_measurement_value(m: &[Matrix], projector: &Matrix) -> f64 {
    let comp = &Matrix::identity(projector.rows()) - projector;
    (projector * &m[0]).trace().re + (&comp * &m[1]).trace().re
}

/// Value of measuring in the orthonormal basis given by the columns of `u`
/// and best-responding to each outcome.
pub fn basis_measurement_value(m: &[Matrix], u: &Matrix) -> f64 {
    (0..u.cols())
        .map(|k| {
            let v = u.col(k);
            m.iter()
                .map(|mx| {
                    let mv: Vec<_> =
                        (0..mx.rows()).map(|i| mx.row(i).iter().zip(&v).map(|(a, b)| a * b).sum()).collect();
                    v.iter()
                        .zip(&mv)
                        .map(|(a, b): (_, &crate::linalg::C64)| a.conj() * b)
                        .sum::<crate::linalg::C64>()
                        .re
                })
                .fold(f64::NEG_INFINITY, f64::max)
        })
        .sum()
}

/// True iff `Y − M_x ⪰ −eps` for every `x` and `Tr(Y) ≤ on_path + eps`,
/// which bounds every deviation's value by `on_path + eps`.
pub fn dual_certificate_check(m_list: &[Matrix], y: &Matrix, on_path: f64, eps: f64) -> Result<bool> {
    for m in m_list {
        if min_eigenvalue(&y.checked_sub(m)?)? < -eps {
            return Ok(false);
        }
    }
    Ok(y.trace().re <= on_path + eps)
}

pub(crate) fn matrix_pairs(m: &Matrix) -> Vec<Vec<[f64; 2]>> {
    (0..m.rows()).map(|i| m.row(i).iter().map(|z| [z.re, z.im]).collect()).collect()
}

#[derive(Clone, Debug)]
pub struct QceVerifyOptions {
    pub eps: f64,
    /// Random measurement bases tried for players without a closed form.
    pub samples: usize,
    pub seed: u64,
    /// Optional dual certificate `Y` per player.
    pub certificates: Vec<Option<Matrix>>,
}

impl QceVerifyOptions {
    pub fn new(eps: f64) -> Self {
        Self { eps, samples: 1000, seed: 0, certificates: Vec::new() }
    }
}

/// Checks that no player gains by replacing their circuit.
///
/// Any replacement circuit acts on the player's register and ends in a
/// measurement, so the best deviation is a measurement optimization over
/// their conditional states; for two actions it has the Helstrom closed form.
pub fn verify_canonical_qce(inst: &QceInstance, eps: f64) -> Result<EquilibriumReport> {
    verify_canonical_qce_with(inst, &QceVerifyOptions::new(eps))
}

pub fn verify_canonical_qce_with(inst: &QceInstance, opts: &QceVerifyOptions) -> Result<EquilibriumReport> {
    let canon = if inst.is_canonical() { inst.clone() } else { canonicalize(inst)? };
    let g = &canon.game;
    let on_path = g.expected_payoffs(&simulate_normal_qce(&canon)?);
    let mut players = Vec::with_capacity(g.players());
    let mut undetermined = Vec::new();
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    for i in 0..g.players() {
        let family = conditional_states(&canon, i)?;
        let utilities = family.utilities(g);
        let label = |x: usize| g.action_label(i, x).to_string();
        let dev = match g.action_count(i) {
            1 => PlayerDeviation {
                player: i,
                on_path: on_path[i],
                best_value: on_path[i],
                gain: 0.0,
                exact: true,
                witness: None,
            },
            2 => {
                let best = optimal_deviation_binary(&family, &utilities)?;
                let gain = (best.value - on_path[i]).max(0.0);
                let witness = (gain > opts.eps).then(|| Witness {
                    description: format!(
                        "measure {{P, I-P}} on own register; play {} on P, {} otherwise",
                        label(0),
                        label(1)
                    ),
                    moves: Vec::new(),
                    measurement: Some(matrix_pairs(&best.measurement)),
                });
                PlayerDeviation { player: i, on_path: on_path[i], best_value: best.value, gain, exact: true, witness }
            }
            _ => {
                let m = deviation_operators(&family, &utilities)?;
                let cert = opts.certificates.get(i).and_then(Option::as_ref);
                let certified = match cert {
                    Some(y) => dual_certificate_check(&m, y, on_path[i], opts.eps)?,
                    None => false,
                };
                if certified {
                    let bound = cert.expect("checked above").trace().re;
                    PlayerDeviation {
                        player: i,
                        on_path: on_path[i],
                        best_value: bound,
                        gain: (bound - on_path[i]).max(0.0),
                        exact: false,
                        witness: None,
                    }
                } else {
                    let dim = family.dim();
                    let mut best_value = basis_measurement_value(&m, &Matrix::identity(dim));
                    let mut best_u = Matrix::identity(dim);
                    for _ in 0..opts.samples {
                        let u = random_unitary(&mut rng, dim);
                        let v = basis_measurement_value(&m, &u);
                        if v > best_value {
                            best_value = v;
                            best_u = u;
                        }
                    }
                    let gain = (best_value - on_path[i]).max(0.0);
                    if gain <= opts.eps {
                        undetermined.push(i);
                    }
                    let witness = (gain > opts.eps).then(|| Witness {
                        description: "measure in the basis given by the columns and best-respond".into(),
                        moves: Vec::new(),
                        measurement: Some(matrix_pairs(&best_u)),
                    });
                    PlayerDeviation { player: i, on_path: on_path[i], best_value, gain, exact: false, witness }
                }
            }
        };
        players.push(dev);
    }
    Ok(EquilibriumReport::from_players(players, opts.eps, &undetermined))
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CriterionResult {
    pub trace_value: f64,
    pub has_incentive: bool,
}

/// `Tr|⅓ρ − ⅔σ|` and whether it exceeds `⅓ + eps`.
pub fn deviation_criterion_matrices(rho: &Matrix, sigma: &Matrix, eps: f64) -> Result<CriterionResult> {
    let m = rho.scale(1.0 / 3.0).checked_sub(&sigma.scale(2.0 / 3.0))?;
    let trace_value = trace_norm(&m)?;
    Ok(CriterionResult { trace_value, has_incentive: trace_value > 1.0 / 3.0 + eps })
}

/// Structure tolerance for the ⅓ / ⅔ advice weights.
const CRITERION_WEIGHT_TOL: f64 = 1e-9;

/// Row player's deviation test for the ⅓(TR+BL+BR) target: the family must
/// hold advice L with weight ⅓ (state ρ) and advice R with weight ⅔ (σ).
pub fn deviation_criterion(family: &ConditionalStateFamily, eps: f64) -> Result<CriterionResult> {
    let ok = family.entries.len() == 2
        && family.entries[0].advice == [0]
        && family.entries[1].advice == [1]
        && (family.entries[0].probability - 1.0 / 3.0).abs() <= CRITERION_WEIGHT_TOL
        && (family.entries[1].probability - 2.0 / 3.0).abs() <= CRITERION_WEIGHT_TOL;
    if !ok {
        return Err(Error::Unsupported(
            "family does not have the 1/3 (first advice), 2/3 (second advice) structure".into(),
        ));
    }
    deviation_criterion_matrices(&family.entries[0].rho, &family.entries[1].rho, eps)
}

/// Prepends `H` on the first qubit of `player`'s register to their circuit.
pub fn hadamard_deviation(inst: &QceInstance, player: PlayerId) -> Result<QceInstance> {
    let mut circ = inst.circuits[player].clone();
    circ.gates.insert(0, crate::quantum::circuit::GateOp::new(Gate::H, &[0]));
    inst.with_circuit(circ)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fig2() -> NormalFormGame {
        NormalFormGame::from_labels(&[&["T", "B"], &["L", "R"]], &[&[0.0, 0.0], &[6.0, 6.0], &[6.0, 6.0], &[0.0, 0.0]])
            .unwrap()
    }

    fn fig1() -> NormalFormGame {
        NormalFormGame::from_labels(&[&["T", "B"], &["L", "R"]], &[&[0.0, 0.0], &[1.0, 5.0], &[5.0, 1.0], &[0.0, 0.0]])
            .unwrap()
    }

    fn naive() -> QceInstance {
        let s = QuantumState::normalized_real(&[0.0, 1.0, 1.0, 1.0], vec![0, 1]).unwrap();
        QceInstance::canonical(fig2(), s).unwrap()
    }

    #[test]
    fn fig1_is_canonical_qce() {
        let s = QuantumState::normalized_real(&[0.0, 1.0, 1.0, 0.0], vec![0, 1]).unwrap();
        let inst = QceInstance::canonical(fig1(), s).unwrap();
        let d = simulate_normal_qce(&inst).unwrap();
        assert!((d.prob(&vec![0, 1]) - 0.5).abs() < 1e-15 && (d.prob(&vec![1, 0]) - 0.5).abs() < 1e-15);
        let rep = verify_canonical_qce(&inst, 1e-9).unwrap();
        assert!(rep.is_equilibrium(), "{rep}");
        assert!(rep.max_gain() <= 1e-9);
    }

    #[test]
    fn naive_state_hadamard_deviation() {
        let dev = hadamard_deviation(&naive(), 0).unwrap();
        let d = simulate_normal_qce(&dev).unwrap();
        assert!((d.prob(&vec![0, 0]) - 1.0 / 6.0).abs() < 1e-12);
        assert!((d.prob(&vec![0, 1]) - 2.0 / 3.0).abs() < 1e-12);
        assert!((d.prob(&vec![1, 0]) - 1.0 / 6.0).abs() < 1e-12);
        assert!((fig2().expected_payoffs(&d)[0] - 5.0).abs() < 1e-12);
        let canon = canonicalize(&dev).unwrap();
        let k = 1.0 / 6f64.sqrt();
        let expect = QuantumState::new(vec![r(k), r(2.0 * k), r(-k), r(0.0)], vec![0, 1]).unwrap();
        assert!(canon.state.max_abs_diff(&expect) < 1e-15);
    }

    #[test]
    fn naive_state_family_and_helstrom() {
        let inst = naive();
        let fam = conditional_states(&inst, 0).unwrap();
        assert_eq!(fam.entries.len(), 2);
        let s = 0.5;
        let plus = Matrix::from_real_rows(&[&[s, s], &[s, s]]);
        assert!((fam.entries[0].probability - 1.0 / 3.0).abs() < 1e-15);
        assert!((&fam.entries[0].rho - &Matrix::diag(&[0.0, 1.0])).max_abs() < 1e-15);
        assert!((&fam.entries[1].rho - &plus).max_abs() < 1e-15);
        let best = optimal_deviation_binary(&fam, &fam.utilities(&inst.game)).unwrap();
        assert!((best.value - (3.0 + 5f64.sqrt())).abs() < 1e-12);
        let m = deviation_operators(&fam, &fam.utilities(&inst.game)).unwrap();
        assert!((binary_measurement_value(&m, &best.measurement) - best.value).abs() < 1e-12);
        let rep = verify_canonical_qce(&inst, 1e-9).unwrap();
        assert!((rep.player(0).gain - (5f64.sqrt() - 1.0)).abs() < 1e-12);
        assert!(rep.player(0).witness.as_ref().unwrap().measurement.is_some());
        let crit = deviation_criterion(&fam, 1e-9).unwrap();
        assert!((crit.trace_value - 5f64.sqrt() / 3.0).abs() < 1e-12 && crit.has_incentive);
    }

    #[test]
    fn dual_certificates() {
        let inst = naive();
        let fam = conditional_states(&inst, 0).unwrap();
        let m = deviation_operators(&fam, &fam.utilities(&inst.game)).unwrap();
        let y = &m[1] + &crate::linalg::positive_part(&(&m[0] - &m[1])).unwrap();
        let value = optimal_deviation_binary(&fam, &fam.utilities(&inst.game)).unwrap().value;
        assert!((y.trace().re - value).abs() < 1e-9);
        assert!(dual_certificate_check(&m, &y, value, 1e-9).unwrap());
        assert!(!dual_certificate_check(&m, &y, 4.0, 1e-9).unwrap());
        assert!(!dual_certificate_check(&m, &Matrix::identity(2).scale(100.0), 4.0, 1e-9).unwrap());
        assert!(dual_certificate_check(&m, &Matrix::identity(2).scale(100.0), 200.0, 1e-9).unwrap());
        assert!(!dual_certificate_check(&m, &Matrix::zeros(2, 2), 4.0, 1e-9).unwrap());
    }

    #[test]
    fn ancilla_canonicalization_matches_simulation() {
        let s = QuantumState::normalized_real(&[0.0, 1.0, 1.0, 1.0], vec![0, 1]).unwrap();
        let circ = PlayerCircuit::measure(0, &[1], &["B", "T"]).with_ancillas(1).with_gate(Gate::Cnot, &[0, 1]);
        let inst = QceInstance::new(fig2(), s, vec![circ, PlayerCircuit::measure(1, &[0], &["L", "R"])]).unwrap();
        let direct = simulate_normal_qce(&inst).unwrap();
        let canon = canonicalize(&inst).unwrap();
        assert_eq!(canon.state.qubit_count(), 3);
        assert!(canon.is_canonical());
        assert!(simulate_normal_qce(&canon).unwrap().max_abs_diff(&direct) < 1e-12);
        assert!(qce_to_ce(&inst).unwrap().max_abs_diff(&direct) < 1e-12);
        // The action map swaps, so advice B on |0⟩: TR becomes BR etc.
        assert!((direct.prob(&vec![1, 1]) - 1.0 / 3.0).abs() < 1e-12);
    }
}
