#![doc = include_str!("../README.md")]

pub mod detect;
pub mod error;
pub mod field;
pub mod image;
pub mod nn;
pub mod pgm;
pub mod pipeline;
pub mod preprocess;
pub mod synth;

pub use error::{Error, Result};
pub use field::Field;
pub use image::{crop, CropRect, GrayImage};
