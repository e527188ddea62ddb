//! Numerical tolerances shared by every module.

/// All thresholds used to validate inputs and intermediate results.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerances {
    /// Completeness relation `Σ K†K = 1`.
    pub completeness: f64,
    /// Hermiticity, trace and positivity of density matrices.
    pub density: f64,
    /// Stationarity residual `‖T_*(ρ) − ρ‖`.
    pub stationarity: f64,
    /// Eigenvalues within this distance of 1 count as unit eigenvalues.
    pub unit_eigenvalue: f64,
    /// Other eigenvalues must have modulus below `1 − peripheral`.
    pub peripheral: f64,
    /// Centering precondition of the resolvent, `|Tr(ρ X)|`.
    pub centering: f64,
    /// Residual of the differentiated completeness relation.
    pub derivative_completeness: f64,
    /// Smallest admissible eigenvalue of a stationary state to be purified.
    pub min_eigenvalue: f64,
    /// Norm below which a Gram–Schmidt candidate is rejected.
    pub gram_schmidt: f64,
    /// Absorber identities `K̃_0 χ = χ`, `K̃_1 χ = 0`.
    pub absorber: f64,
    /// Joint gauge condition `|⟨χ|K̃̇_0 χ⟩|`.
    pub joint_gauge: f64,
    /// Agreement of the two λ_tot formulas.
    pub lambda_tot_agreement: f64,
    /// Conditional state norm below which sampling aborts.
    pub norm_collapse: f64,
}

pub const TOLERANCES: Tolerances = Tolerances {
    completeness: 1e-10,
    density: 1e-10,
    stationarity: 1e-9,
    unit_eigenvalue: 1e-8,
    peripheral: 1e-10,
    centering: 1e-8,
    derivative_completeness: 1e-6,
    min_eigenvalue: 1e-12,
    gram_schmidt: 1e-8,
    absorber: 1e-8,
    joint_gauge: 1e-6,
    lambda_tot_agreement: 1e-6,
    norm_collapse: 1e-14,
};

impl Default for Tolerances {
    fn default() -> Self {
        TOLERANCES
    }
}

/// Default first-derivative finite-difference step.
pub const DEFAULT_FD_STEP: f64 = 1e-5;
/// Default second-derivative finite-difference step.
pub const DEFAULT_FD_STEP_SECOND: f64 = 1e-4;
/// Default pattern length truncation for mode tables.
pub const DEFAULT_TRUNCATION: usize = 12;
/// Default separation exponent γ.
pub const DEFAULT_GAMMA: f64 = 0.5;
/// Default ε when ñ and τ_n are derived from n.
pub const DEFAULT_EPSILON: f64 = 0.1;
/// Maximum number of distinct pattern orderings enumerated by the exact event oracle.
pub const DEFAULT_ORDERING_BUDGET: u64 = 40_320;
