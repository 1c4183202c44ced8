//! Quantum-kernel support vector machines trained as QUBO problems.
//!
//! Inputs are standardized, reduced with PCA and scaled to rotation angles,
//! then embedded by a feature-map circuit simulated on a dense statevector.
//! The kernel is the state fidelity. The SVM dual is binary-encoded into a
//! QUBO and solved by simulated annealing (or brute force for small cases).
//!
//! ```
//! use qsvm::featuremaps::{FeatureMapConfig, FeatureMapKind};
//! use qsvm::kernel::fidelity;
//! use qsvm::simulator::Simulator;
//!
//! let map = FeatureMapConfig::new(FeatureMapKind::Z, 1, 1).unwrap();
//! let k = fidelity(&[0.0], &[0.5], &map, &Simulator::default()).unwrap();
//! assert!((k - 0.5f64.cos().powi(2)).abs() < 1e-12);
//! ```

pub mod anneal;
pub mod data;
pub mod error;
pub mod experiment;
pub mod featuremaps;
pub mod kernel;
pub mod qubo;
pub mod simulator;
pub mod svm;

pub use error::{Error, Result};

macro_rules! book_chapters {
    ($($name:ident => $file:literal),* $(,)?) => {
        $(
            #[cfg(doctest)]
            #[doc = include_str!(concat!("../../../book/src/", $file))]
            mod $name {}
        )*
    };
}

book_chapters! {
    book_introduction => "introduction.md",
    book_data => "data.md",
    book_simulator => "simulator.md",
    book_feature_maps => "feature-maps.md",
    book_kernels => "kernels.md",
    book_qubo => "qubo.md",
    book_annealing => "annealing.md",
    book_svm => "svm.md",
    book_experiments => "experiments.md",
}
