//! Geometry maps of the unit square, Faà di Bruno constants, mapped
//! projections with their bounds, and conforming multi-patch domains.

mod constants;
mod faa;
mod map;
mod mapped;
mod multipatch;

pub use constants::{geometry_constants, Direction, GeometryConstant, GeometryConstants, NormFlavor, DEFAULT_RESOLUTION};
pub use faa::{bell, faa_coefficient, faa_index_set};
pub use map::{catalog_map, GeometryMap, MAP_CATALOG};
pub use mapped::{mapped_first_order_bound, mapped_l2_bound, mapped_project, pullback, MappedResult, PhysicalSeminorms};
pub use multipatch::{interface_jumps, multipatch_q_project, two_patch_square, Edge, Interface, MultiPatch, Patch, RigidMotion};
