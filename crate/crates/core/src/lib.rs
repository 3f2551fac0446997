//! Reversible data hiding in 8-bit grayscale images.
//!
//! Pixels are predicted from their eight neighbours with a graph signal prior
//! whose edge weights come from the most similar patch in a semi-local
//! window. Prediction errors of 0 and -1 are expanded to carry one bit each,
//! all other errors are shifted outward, so both the message and the cover
//! image can be recovered exactly.
//!
//! ```no_run
//! use graphpee::{codec, pgm, BitStream, PredictorKind, PredictorParams};
//!
//! let cover = pgm::load_pgm("cover.pgm")?;
//! let message = BitStream::from_bytes(b"hello");
//! let params = PredictorParams::default();
//! let (stego, report) = codec::embed(&cover, &message, PredictorKind::Quad, &params)?;
//! let (recovered, restored) = codec::extract(&stego, PredictorKind::Quad, &params)?;
//! assert_eq!(recovered, message);
//! assert_eq!(restored, cover);
//! println!("PSNR {:.2} dB", report.psnr);
//! # Ok::<(), graphpee::Error>(())
//! ```

pub mod bits;
pub mod codec;
pub mod error;
pub mod graph;
pub mod image;
pub mod linalg;
pub mod par;
pub mod patch_search;
pub mod pgm;
pub mod predictor;
pub mod sweep;
pub mod tensor_gate;

pub use bits::BitStream;
pub use error::{Error, Result};
pub use image::{psnr, GrayImage, NormalizedPatch, Pos};
pub use predictor::{PredictorKind, PredictorParams};
pub use tensor_gate::GateThreshold;
