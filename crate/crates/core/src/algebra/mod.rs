pub mod coeffs;
pub mod extended;
pub mod groupring;
pub mod groups;
pub mod ntt;
pub mod perm;
pub(crate) mod poly;
