use crate::error::{Error, Result};
use crate::games::PlayerId;
use crate::linalg::{r, Matrix, C64, DEFAULT_MAX_QUBITS};

/// Pure states must have unit norm within this slack.
pub const NORM_TOL: f64 = 1e-9;

/// Larger norm changes after a gate indicate a non-unitary operation.
pub const NORM_DRIFT_TOL: f64 = 1e-7;

/// A pure state on `n` qubits together with the player owning each qubit.
///
/// Amplitude index `k` is the big-endian reading of the qubit string, so
/// qubit 0 is the leftmost ket symbol.
#[derive(Clone, Debug, PartialEq)]
pub struct QuantumState {
    amplitudes: Vec<C64>,
    owners: Vec<PlayerId>,
}

impl QuantumState {
    pub fn new(amplitudes: Vec<C64>, owners: Vec<PlayerId>) -> Result<Self> {
        Self::with_max_qubits(amplitudes, owners, DEFAULT_MAX_QUBITS)
    }

    pub fn with_max_qubits(amplitudes: Vec<C64>, owners: Vec<PlayerId>, max_qubits: usize) -> Result<Self> {
        let n = owners.len();
        if n > max_qubits {
            return Err(Error::StateTooLarge { qubits: n, max: max_qubits });
        }
        if amplitudes.len() != 1 << n {
            return Err(Error::InvalidState(format!("{} amplitudes for {n} qubits", amplitudes.len())));
        }
        if amplitudes.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::NonFinite);
        }
        let state = Self { amplitudes, owners };
        let norm = state.norm();
        if (norm - 1.0).abs() > NORM_TOL {
            return Err(Error::InvalidState(format!("norm is {norm}, expected 1")));
        }
        Ok(state)
    }

    /// Real amplitudes scaled to unit norm.
    pub fn normalized_real(amplitudes: &[f64], owners: Vec<PlayerId>) -> Result<Self> {
        let norm = amplitudes.iter().map(|a| a * a).sum::<f64>().sqrt();
        if !(norm > 0.0) {
            return Err(Error::InvalidState("zero vector".into()));
        }
        Self::new(amplitudes.iter().map(|&a| r(a / norm)).collect(), owners)
    }

    /// Computational basis state; `bits[q]` is qubit `q`.
    pub fn basis(bits: &[u8], owners: Vec<PlayerId>) -> Result<Self> {
        if bits.len() != owners.len() {
            return Err(Error::InvalidState("one bit per qubit required".into()));
        }
        let index = bits.iter().fold(0usize, |acc, &b| acc << 1 | (b & 1) as usize);
        let mut amplitudes = vec![r(0.0); 1 << bits.len()];
        amplitudes[index] = r(1.0);
        Self::new(amplitudes, owners)
    }

    pub fn qubit_count(&self) -> usize {
        self.owners.len()
    }

    pub fn amplitudes(&self) -> &[C64] {
        &self.amplitudes
    }

    pub fn owners(&self) -> &[PlayerId] {
        &self.owners
    }

    pub fn owner(&self, qubit: usize) -> PlayerId {
        self.owners[qubit]
    }

    /// Qubits owned by `player`, ascending.
    pub fn qubits_of(&self, player: PlayerId) -> Vec<usize> {
        (0..self.owners.len()).filter(|&q| self.owners[q] == player).collect()
    }

    pub fn norm(&self) -> f64 {
        self.amplitudes.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Bit mask of qubit `q` within a basis index.
    pub fn mask(&self, q: usize) -> usize {
        1 << (self.owners.len() - 1 - q)
    }

    /// Reads the listed qubits of basis index `k` as a big-endian integer.
    pub fn read_bits(&self, k: usize, qubits: &[usize]) -> usize {
        qubits.iter().fold(0, |acc, &q| acc << 1 | usize::from(k & self.mask(q) != 0))
    }

    /// Appends `count` qubits in `|0⟩` owned by `owner`; returns their indices.
    pub fn append_zeros(&mut self, count: usize, owner: PlayerId, max_qubits: usize) -> Result<Vec<usize>> {
        let n = self.owners.len();
        if n + count > max_qubits {
            return Err(Error::StateTooLarge { qubits: n + count, max: max_qubits });
        }
        let mut amplitudes = vec![r(0.0); 1 << (n + count)];
        for (k, &a) in self.amplitudes.iter().enumerate() {
            amplitudes[k << count] = a;
        }
        self.amplitudes = amplitudes;
        self.owners.extend(std::iter::repeat_n(owner, count));
        Ok((n..n + count).collect())
    }

    /// Applies a `2^k x 2^k` unitary to the listed qubits, the first listed
    /// qubit being the most significant bit of the matrix index.
    pub fn apply(&mut self, u: &Matrix, targets: &[usize]) -> Result<()> {
        let k = targets.len();
        if u.rows() != 1 << k || u.cols() != 1 << k {
            return Err(Error::Dimension(format!("{}x{} gate on {k} qubits", u.rows(), u.cols())));
        }
        for (i, &t) in targets.iter().enumerate() {
            if t >= self.qubit_count() {
                return Err(Error::QubitOutOfRange { index: t, count: self.qubit_count() });
            }
            if targets[..i].contains(&t) {
                return Err(Error::InvalidCircuit(format!("qubit {t} targeted twice by one gate")));
            }
        }
        let masks: Vec<usize> = targets.iter().map(|&t| self.mask(t)).collect();
        let all: usize = masks.iter().sum();
        let offsets: Vec<usize> = (0..1usize << k)
            .map(|b| masks.iter().enumerate().filter(|(i, _)| b >> (k - 1 - i) & 1 == 1).map(|(_, &m)| m).sum())
            .collect();
        let mut buf = vec![r(0.0); 1 << k];
        for base in 0..self.amplitudes.len() {
            if base & all != 0 {
                continue;
            }
            for (b, &off) in offsets.iter().enumerate() {
                buf[b] = self.amplitudes[base | off];
            }
            for (row, &off) in offsets.iter().enumerate() {
                self.amplitudes[base | off] = u.row(row).iter().zip(&buf).map(|(m, v)| m * v).sum();
            }
        }
        Ok(())
    }

    /// Probability of each outcome of measuring `qubits` in the standard
    /// basis, indexed by the big-endian outcome bits.
    pub fn outcome_probabilities(&self, qubits: &[usize]) -> Vec<f64> {
        let mut probs = vec![0.0; 1 << qubits.len()];
        for (k, a) in self.amplitudes.iter().enumerate() {
            probs[self.read_bits(k, qubits)] += a.norm_sqr();
        }
        probs
    }

    /// Post-measurement state for outcome `bits` on `qubits`, with its
    /// probability. Returns `None` for probability zero.
    pub fn project(&self, qubits: &[usize], bits: usize) -> Option<(f64, QuantumState)> {
        let mut amplitudes = self.amplitudes.clone();
        let mut p = 0.0;
        for (k, a) in amplitudes.iter_mut().enumerate() {
            if self.read_bits(k, qubits) == bits {
                p += a.norm_sqr();
            } else {
                *a = r(0.0);
            }
        }
        if p <= 0.0 {
            return None;
        }
        let scale = 1.0 / p.sqrt();
        amplitudes.iter_mut().for_each(|a| *a *= scale);
        Some((p, QuantumState { amplitudes, owners: self.owners.clone() }))
    }

    /// Reorders qubits: new qubit `j` is old qubit `order[j]`.
    pub fn permute(&self, order: &[usize]) -> Result<QuantumState> {
        let n = self.qubit_count();
        let mut seen = vec![false; n];
        if order.len() != n || order.iter().any(|&q| q >= n || std::mem::replace(&mut seen[q], true)) {
            return Err(Error::InvalidState("qubit order is not a permutation".into()));
        }
        let mut amplitudes = vec![r(0.0); self.amplitudes.len()];
        for (k, &a) in self.amplitudes.iter().enumerate() {
            amplitudes[self.read_bits(k, order)] = a;
        }
        let owners = order.iter().map(|&q| self.owners[q]).collect();
        Ok(QuantumState { amplitudes, owners })
    }

    /// `|ψ⟩⟨ψ|` as a dense matrix.
    pub fn density_matrix(&self) -> Matrix {
        Matrix::outer(&self.amplitudes, &self.amplitudes)
    }

    /// Reduced density matrix on the qubits of `player`, ascending.
    pub fn reduced_state(&self, player: PlayerId) -> Matrix {
        let keep = self.qubits_of(player);
        self.reduced_on(&keep)
    }

    /// Reduced density matrix on `keep` (ascending order), computed directly
    /// from the amplitudes.
    pub fn reduced_on(&self, keep: &[usize]) -> Matrix {
        let mut keep = keep.to_vec();
        keep.sort_unstable();
        let rest: Vec<usize> = (0..self.qubit_count()).filter(|q| !keep.contains(q)).collect();
        let dim = 1 << keep.len();
        let mut blocks: Vec<Vec<C64>> = vec![vec![r(0.0); dim]; 1 << rest.len()];
        for (k, &a) in self.amplitudes.iter().enumerate() {
            blocks[self.read_bits(k, &rest)][self.read_bits(k, &keep)] = a;
        }
        let mut out = Matrix::zeros(dim, dim);
        for v in &blocks {
            for i in 0..dim {
                if v[i] == r(0.0) {
                    continue;
                }
                for j in 0..dim {
                    out[(i, j)] += v[i] * v[j].conj();
                }
            }
        }
        out
    }

    /// Maximum amplitude difference to `other`, or infinity if the shapes differ.
    pub fn max_abs_diff(&self, other: &QuantumState) -> f64 {
        if self.owners != other.owners {
            return f64::INFINITY;
        }
        self.amplitudes.iter().zip(&other.amplitudes).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max)
    }
}
