//! Float realizations on grids: coordinate maps, weights, potentials,
//! finite-difference Schrödinger residuals and Sturm–Liouville transforms.

pub mod fd;
pub mod grid;
pub mod maps;
pub mod profile;
pub mod quad;
pub mod schrodinger;
pub mod sturm;
pub mod weight;

pub use grid::{FloatPoly, Grid, Spacing};
pub use maps::{coordinate_maps, invert_map, CoordinateMaps, MapKind};
pub use profile::{potentials, LevelFunctions, NumericProfile};
pub use schrodinger::{
    auxiliary_plus, orthogonality, schrodinger_residual, AuxiliaryReport, OrthogonalityReport,
    ResidualReport, ResidualSpec,
};
pub use sturm::{
    r_from_q1, sl_full_susy_residual, sl_transform_type1, sl_transform_type2, SlSamples, TypeI,
    TypeII,
};
pub use weight::{weight_numeric, WeightFn};
