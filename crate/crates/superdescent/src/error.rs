use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("malformed algebra spec: {0}")]
    MalformedSpec(String),
    #[error("associativity fails at basis triple ({i}, {j}, {k})")]
    AssocViolation { i: usize, j: usize, k: usize },
    #[error("algebra is not nilpotent: the basis product e{} is nonzero", chain.iter().map(|i| i.to_string()).collect::<Vec<_>>().join("*e"))]
    NotNilpotent { chain: Vec<usize> },
    #[error("level mismatch: expected {expected}, got {got}")]
    LevelMismatch { expected: u32, got: u32 },
    #[error("{m} does not divide {n}")]
    NotDivisor { m: u32, n: u32 },
    #[error("level {0} is not in the configured lattice")]
    UnknownLevel(u32),
    #[error("enumeration of {needed} elements exceeds the size bound {bound}")]
    SizeBound { needed: u128, bound: u64 },
    #[error("no conjugator lands the norm of twisted class {class} (level {level}, twist {twist}) in level {twist}")]
    NoLanding { level: u32, twist: u32, class: usize },
    #[error("twisted class {class} (level {level}, twist {twist}) lands in distinct classes {first} and {second}")]
    AmbiguousLanding { level: u32, twist: u32, class: usize, first: usize, second: usize },
    #[error("function is outside the descent domain: supercharacter {0} carries a nonzero coefficient but twists to supercharacter {1}")]
    NotTwistedClassFunction(usize, usize),
    #[error("non-integer multiplicity for supercharacter {orbit}: degree {degree}, norm {norm}")]
    NonIntegerMultiplicity { orbit: usize, degree: u64, norm: u64 },
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error("invalid spec JSON: {0}")]
    Json(#[from] serde_json::Error),
    #[error("{0}")]
    InvalidArgument(String),
}

impl Error {
    /// Process exit code classes: 2 input, 3 size, 1 anything the
    /// verification machinery can surface at runtime.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::SizeBound { .. } => 3,
            Error::NotPrime(_)
            | Error::MalformedSpec(_)
            | Error::AssocViolation { .. }
            | Error::NotNilpotent { .. }
            | Error::NotDivisor { .. }
            | Error::UnknownLevel(_)
            | Error::Io(_)
            | Error::Json(_)
            | Error::InvalidArgument(_) => 2,
            _ => 1,
        }
    }
}
