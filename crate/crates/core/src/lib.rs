pub mod analysis;
pub mod channels;
pub mod error;
pub mod mgf;
pub mod oracle;
pub mod specfun;
