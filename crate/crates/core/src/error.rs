use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("{0} is not a prime")]
    NotPrime(u64),

    #[error("{value} is not in Z_({prime}): denominator divisible by {prime}")]
    NotLocal { value: String, prime: u64 },

    #[error("cannot parse {input:?} as an integer or fraction a/b")]
    Parse { input: String },

    #[error("zero denominator in {0:?}")]
    ZeroDenominator(String),

    #[error("level must be at least 1")]
    ZeroLevel,

    #[error("polynomial levels differ: {left} vs {right}")]
    LevelMismatch { left: usize, right: usize },

    #[error("Adams operation psi^{0} has repeated eigenvalues; need l >= 2")]
    DegenerateEigenvalues(i64),

    #[error("coefficient {coeff} of x^{index} is not an integer")]
    NonIntegral { index: usize, coeff: String },

    #[error("modulus {modulus} is unsound for level {n}: must be divisible by {required}")]
    UnsoundModulus {
        modulus: u64,
        n: u32,
        required: String,
    },

    #[error("scan over {classes} residue classes exceeds the guard of {guard}")]
    ScanTooLarge { classes: String, guard: u64 },

    #[error(
        "closed form fails at p = {prime}, n = {n}: residue {residue} mod {prime}^{precision} \
         has scan membership {in_scan} but D_p compatibility {in_d_p}"
    )]
    ClosedFormMismatch {
        prime: u64,
        n: u32,
        precision: u32,
        residue: u64,
        in_scan: bool,
        in_d_p: bool,
    },
}

pub type Result<T> = std::result::Result<T, Error>;
