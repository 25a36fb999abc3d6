//! The sphere and surface examples, end to end.

mod sphere;
mod surface;

pub use sphere::{
    adaptive_simpson, derivation_basis, radial_integral, sphere_differential, sphere_integral_check, sphere_report,
    IntegralReport, SphereObstruction, SphereReport,
};
pub use surface::{
    intersection_form, johnson_tau1, lemma_check, mapping_torus_obstruction, quotient_derivation_dim,
    random_monodromy, surface_h01, wedge_basis, LemmaCheck, MappingTorusReport, MoritaIso, SurfaceH01, SurfaceModel,
};
