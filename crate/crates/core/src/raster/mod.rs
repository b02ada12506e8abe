//! Image representation, netpbm/PNG I/O, summed-area tables, gradient
//! fields and synthetic scene generation.

mod gradient;
mod image;
mod integral;
mod pnm;
mod scene;

pub use gradient::GradientField;
pub use image::GrayImage;
pub use integral::IntegralTables;
pub use pnm::{decode_pgm, load_image, save_pgm, save_ppm};
pub use scene::{make_scene, point_segment_distance, Scene, SceneKind, SceneTruth};
