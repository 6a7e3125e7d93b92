use thiserror::Error;

#[derive(Debug, Error)]
pub enum GraphError {
    #[error("malformed graph JSON: {0}")]
    Json(#[from] serde_json::Error),
    #[error("vertex {vertex} out of range for a graph on {n} vertices")]
    VertexOutOfRange { vertex: usize, n: usize },
    #[error("self-loop arc at vertex {0}")]
    SelfLoop(usize),
    #[error("more than one arc between vertices {0} and {1}")]
    DuplicatePair(usize, usize),
    #[error("non-finite phase on arc ({from}, {to})")]
    NonFinitePhase { from: usize, to: usize },
    #[error("potentials has length {found}, expected {expected}")]
    PotentialLength { expected: usize, found: usize },
    #[error("non-finite potential at vertex {0}")]
    NonFinitePotential(usize),
    #[error("arc phases are not canonical")]
    NotCanonical,
    #[error("cycle length must be even and at least 4, got {0}")]
    InvalidCycleLength(usize),
    #[error("weighted arc count {k} out of range 1..={n}")]
    InvalidWeightedArcs { k: usize, n: usize },
    #[error("need at least {min} vertices, got {n}")]
    TooFewVertices { n: usize, min: usize },
    #[error("graph is not a single cycle")]
    NotACycle,
    #[error("graph contains a cycle")]
    NotAForest,
}

#[derive(Debug, Error)]
pub enum HamiltonianError {
    #[error("matrix is not square ({rows}x{cols})")]
    NotSquare { rows: usize, cols: usize },
    #[error("matrix is not Hermitian (max asymmetry {0:e})")]
    NotHermitian(f64),
    #[error("arc ({from}, {to}) has phase {found}, expected constant {expected}")]
    NonConstantPhase {
        from: usize,
        to: usize,
        found: f64,
        expected: f64,
    },
    #[error("constant-phase split requires zero potentials")]
    NonzeroPotentials,
    #[error("lift supports at most {max} qubits, got {n}")]
    TooManyQubits { n: usize, max: usize },
    #[error("excitation number {k} out of range 0..={n}")]
    ExcitationOutOfRange { k: usize, n: usize },
}

#[derive(Debug, Error)]
pub enum EvolutionError {
    #[error("Hermitian eigensolver did not converge")]
    NoConvergence,
    #[error("eigendecomposition failed its residual check ({0:e})")]
    InaccurateDecomposition(f64),
    #[error("negative cluster tolerance {0}")]
    NegativeTolerance(f64),
    #[error("vertex {vertex} out of range for dimension {dim}")]
    VertexOutOfRange { vertex: usize, dim: usize },
    #[error("probability {0} exceeds 1 beyond tolerance")]
    ProbabilityOutOfRange(f64),
    #[error("time grid needs steps >= 2 and t_max > 0 (got steps={steps}, t_max={t_max})")]
    DegenerateGrid { steps: usize, t_max: f64 },
}

#[derive(Debug, Error)]
pub enum SpectralError {
    #[error(transparent)]
    Evolution(#[from] EvolutionError),
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error("characteristic polynomial coefficient {index} has imaginary residue {residue:e}")]
    ImaginaryResidue { index: usize, residue: f64 },
    #[error("matrix dimension {0} exceeds the supported maximum of 64")]
    TooLarge(usize),
    #[error("tridiagonal input lengths inconsistent: {diag} diagonal, {upper} upper, {lower} lower")]
    LengthMismatch {
        diag: usize,
        upper: usize,
        lower: usize,
    },
    #[error("integer overflow in exact arithmetic")]
    Overflow,
    #[error("half-length must be at least 2, got {0}")]
    HalfLengthTooSmall(usize),
    #[error("spectral decomposition has dimension {spec}, matrix has dimension {matrix}")]
    DimensionMismatch { spec: usize, matrix: usize },
}

#[derive(Debug, Error)]
pub enum GaugeError {
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Evolution(#[from] EvolutionError),
}
