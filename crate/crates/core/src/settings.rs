/// Tolerances and enumeration caps shared by every computation.
///
/// The defaults target desk-scale instances: up to 20 pieces in dimension at most 6.
#[derive(Debug, Clone, PartialEq)]
pub struct Settings {
    /// Active-set detection: piece `i` is active at `x` when `f_i(x) >= f(x) - tol_active`.
    pub tol_active: f64,
    /// Feasibility and strictness threshold for linear systems.
    pub tol_feas: f64,
    /// Geometric tolerance (minimum-norm point, membership).
    pub tol_geo: f64,
    pub max_pieces: usize,
    pub max_dim: usize,
    /// Generator cap for facet enumeration.
    pub max_generators: usize,
    /// Row cap for vertex enumeration and projection.
    pub max_rows: usize,
    /// Largest dimension for which `tau` is computed exactly.
    pub max_tau_dim: usize,
}

impl Default for Settings {
    fn default() -> Self {
        Settings {
            tol_active: 1e-9,
            tol_feas: 1e-9,
            tol_geo: 1e-9,
            max_pieces: 20,
            max_dim: 6,
            max_generators: 16,
            max_rows: 24,
            max_tau_dim: 3,
        }
    }
}
