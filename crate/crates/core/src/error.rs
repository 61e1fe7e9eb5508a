use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("coefficient precision must be at least 1")]
    ZeroPrecision,
    #[error("modulus {p}^{m} does not fit in 63 bits")]
    ModulusTooLarge { p: u64, m: u32 },
    #[error("{0} is not a unit modulo p")]
    NonUnit(u64),
    #[error("Hensel regime violated: v(f(r0)) = {value_val}, v(f'(r0)) = {deriv_val}")]
    HenselFailure { value_val: u32, deriv_val: u32 },
    #[error("precision exhausted: {0}")]
    PrecisionExhausted(String),

    #[error("polynomial is not Eisenstein: {0}")]
    NotEisenstein(String),
    #[error("residue polynomial is not irreducible mod {0}")]
    NotIrreducibleResiduePoly(u64),
    #[error("precision {0} is too small (need at least 4)")]
    PrecisionTooSmall(u32),
    #[error("degenerate tower: {0}")]
    DegenerateTower(String),
    #[error("division by an element indistinguishable from zero")]
    DivisionByIndistinguishableZero,
    #[error("quotient is not integral: v(numerator) = {num} < v(denominator) = {den}")]
    NonIntegralQuotient { num: u32, den: u32 },

    #[error("extension is not Galois: found {found} automorphisms, degree {degree}")]
    NotGalois { found: usize, degree: usize },
    #[error("element is not in ramification group G_{0}")]
    NotInLevel(i64),
    #[error("module level mismatch: expected {expected}, got {found}")]
    LevelMismatch { expected: u32, found: u32 },

    #[error("unit is not congruent to 1 modulo pi^{level}")]
    WrongLevel { level: u32 },
    #[error("layer {layer} cannot be read off a module of level {level}")]
    LayerMismatch { level: u32, layer: u32 },
    #[error("module self-check failed: {0}")]
    ModuleInconsistent(String),

    #[error("linear system has no solution")]
    NoSolution,
    #[error("element has infinite order")]
    InfiniteOrder,
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("map violates the 1-cocycle identity at ({0}, {1})")]
    NotACocycle(usize, usize),
    #[error("index set is not a subgroup")]
    NotASubgroup,
    #[error("module map is not G-equivariant at group element {0}")]
    NotEquivariant(usize),
    #[error("brute-force enumeration of {needed} maps exceeds budget {budget}")]
    BudgetExceeded { needed: u128, budget: u128 },

    #[error("no stabilization up to precision {0}")]
    NoStabilization(u32),
    #[error("config error: {0}")]
    Config(String),
    #[error("io error: {0}")]
    Io(String),
}
