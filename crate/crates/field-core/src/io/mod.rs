//! Image and table file formats.

pub mod csv;
pub mod pgm;
