//! Hair-flow estimation and brush-stroke planning.
//!
//! The pipeline runs from a hair mask and an image to an orientation field,
//! then to pixel paths (traced along the field, or shortest paths on a depth
//! mesh as a baseline), and finally to timed end-effector poses.
//!
//! ```
//! use hairflow_core::{
//!     synth::{generate, SceneKind, SyntheticSpec},
//!     orientation::{field_from_image, OrientationParams},
//!     path::{plan, PathParams},
//!     shock::CoherenceParams,
//!     PixelPoint,
//! };
//!
//! let scene = generate(&SyntheticSpec::new(SceneKind::Stripes { angle_rad: 0.3 }, 64)).unwrap();
//! let field = field_from_image(&scene.image, &CoherenceParams::default(), &OrientationParams::default()).unwrap();
//! let stroke = plan(&field, &scene.mask, PixelPoint::new(20.0, 20.0), &PathParams::default()).unwrap();
//! assert!(stroke.path.len() > 1);
//! ```

pub mod bench;
pub mod color;
pub mod error;
pub mod filter;
pub mod formats;
pub mod mask;
pub mod mesh;
pub mod orientation;
pub mod path;
pub mod raster;
pub mod refine;
pub mod shock;
pub mod synth;
pub mod tensor;
pub mod trajectory;

pub use error::{Error, Result};
pub use formats::FormatError;
pub use mask::{BinaryMask, SoftMask};
pub use orientation::OrientationField;
pub use path::{PixelPath, PlannedPath};
pub use raster::{IntensityImage, OrganizedCloud, PixelPoint, RgbImage};
pub use trajectory::{Pose, PosePath};
