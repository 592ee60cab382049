pub mod pipeline;
pub mod rsa;
