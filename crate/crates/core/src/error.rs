use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("gamma function pole at nonpositive integer {0}")]
    GammaPole(i64),

    #[error("precision exhausted: needed more than {max_bits} bits ({detail})")]
    PrecisionExhausted { max_bits: u32, detail: String },

    #[error("domain error: {0}")]
    Domain(String),

    #[error("invalid precision policy: {0}")]
    InvalidPolicy(String),

    #[error("imaginary residue {residue:e} exceeds tolerance {tolerance:e} relative to scale")]
    ImaginaryResidue { residue: f64, tolerance: f64 },

    #[error("sign change lost while refining [{k_lo}, {k_hi}]")]
    LostSignChange { k_lo: f64, k_hi: f64 },

    #[error("missed root: parity sequence does not alternate at level {level}")]
    MissedRoot { level: usize },

    #[error("domain too small: level {level} not containable below r = {r_max}")]
    DomainTooSmall { level: usize, r_max: f64 },

    #[error("numerov oracle: {0}")]
    Oracle(String),
}

pub type Result<T> = std::result::Result<T, Error>;
