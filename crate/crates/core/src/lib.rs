//! Group-ring public-key encryption: arithmetic in `RG`, unit keys,
//! RSA and Hamming-code combinations, and the cyclic Euclidean attack.

pub mod algebra;
pub mod analysis;
pub mod coding;
pub mod crypto;
pub mod error;
pub mod format;
pub mod keys;
pub mod samples;

pub use algebra::coeffs::{Coeff, CoefficientRing};
pub use algebra::extended::ExtendedElement;
pub use algebra::groupring::GroupRingElement;
pub use algebra::groups::{parse_group, Group, GroupElement, GroupSpec};
pub use algebra::perm::Permutation;
pub use error::{Error, Result};
pub use keys::units::{KeyPair, PrivateKey, PublicKey, Side, UnitKey};
