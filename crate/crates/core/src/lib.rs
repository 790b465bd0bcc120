//! Interleaved variant of Loidreau's rank-metric McEliece-type cryptosystem.
//!
//! The crate is `no_std` (it needs `alloc`) and contains only algorithmic
//! code: field tower arithmetic, dense linear algebra, Gabidulin and
//! interleaved Gabidulin codes with a key-equation decoder, the cryptosystem
//! itself, exact parameter/failure analysis and the q-sum distinguisher.
//! File formats and the command-line tool live in the `ilrc` crate.

#![no_std]

extern crate alloc;

#[cfg(test)]
extern crate std;

pub mod analysis;
pub mod cryptosystem;
pub mod distinguisher;
pub mod gabidulin;
pub mod gf;
pub mod linalg;
pub mod rng;

pub use cryptosystem::{
    Ciphertext, CryptoError, Cryptosystem, ParamError, ParameterSet, PublicKey, SecretKey,
};
pub use gabidulin::{CodeError, Decoded, GabidulinCode};
pub use gf::{FieldCtx, Fq, FqmElem, GfError, Moduli};
pub use linalg::{Base, Ext, LinField, MatQ, MatQm, Matrix};
pub use rng::RngStream;
