//! Exact Picard-lattice arithmetic for rational surfaces, toric systems and
//! numerically exceptional collections of line bundles, and the
//! decomposition of maximal-length toric systems on del Pezzo lattices into
//! chains of augmentations.
//!
//! All arithmetic is on `i64` with checked operations; overflow panics.

#![allow(clippy::needless_range_loop)]

pub mod augmentation;
pub mod decompose;
pub mod enumerate;
pub mod error;
pub mod format;
pub mod lattice;
pub mod matrix;
pub mod minus_one;
pub mod numerics;
pub mod par;
pub mod restandardize;
pub mod toric;

pub use augmentation::{augment, blow_up_model, extract_blowdown, AugmentationStep, BlowUp, Blowdown, Variant};
pub use decompose::{
    classify_hirzebruch, decompose, decompose_with, is_exceptional_family, replay, toric_shadow_check, verify,
    CertificateStep, DecomposeOptions, DecompositionCertificate, HirzebruchClass, HirzebruchFamily, ShadowBase,
    ShadowChain,
};
pub use enumerate::{
    enumerate_on, enumerate_toric_systems, verify_theorem, Dedup, Enumeration, EnumerationSpec, VerificationReport,
};
pub use error::{Error, ErrorCategory, Result};
pub use lattice::{make_model, DivisorClass, ModelKind, SurfaceModel};
pub use matrix::IntMatrix;
pub use minus_one::{enumerate_minus_one_classes, minus_one_search_box};
pub use numerics::{euler_char, euler_pairing, is_num_left_orthogonal, pairing_gram, NumK0Class};
pub use par::Execution;
pub use restandardize::{restandardize, Restandardized};
pub use toric::{AxiomViolation, LineBundleCollection, ToricSystem};
