/// Resource limits for the exponential-cost routines.
///
/// None of these are hard constants; the CLI exposes each through a
/// `--budget-*` flag.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Budgets {
    /// Largest edge count for which `2^|E|` subset enumeration is attempted.
    pub subset_edges: usize,
    /// Largest `q^|V|` for direct spin enumeration.
    pub spin_configs: u64,
    /// Largest edge count a substituted lattice level may have.
    pub lattice_edges: u64,
    /// Largest number of memoized subgraphs in deletion-contraction.
    pub deletion_contraction_memo: usize,
    /// Largest vertex count accepted by deletion-contraction.
    pub deletion_contraction_vertices: usize,
    /// Total decimal digits allowed in one exact level state.
    pub coefficient_digits: u64,
    /// Largest polynomial degree handed to the root finder.
    pub root_degree: usize,
    /// Largest `width * height` for rendering.
    pub pixels: u64,
    /// Largest degree of an iterated map `r^n` built by symbolic composition.
    pub composition_degree: u64,
}

impl Default for Budgets {
    fn default() -> Self {
        Budgets {
            subset_edges: 24,
            spin_configs: 10_000_000,
            lattice_edges: 1 << 22,
            deletion_contraction_memo: 1 << 21,
            deletion_contraction_vertices: 64,
            coefficient_digits: 10_000_000,
            root_degree: 5000,
            pixels: 1 << 24,
            composition_degree: 1 << 12,
        }
    }
}
