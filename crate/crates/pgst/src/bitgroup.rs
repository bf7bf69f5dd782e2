//! Elements and characters of the group of bit strings under XOR.
//!
//! A [`GroupElement`] is a `d`-bit mask; addition is bitwise XOR, every
//! element is its own inverse, and the characters are the sign functions
//! `x -> (-1)^{<g,x>}`. These index both the vertices of the hypercube
//! and its eigenvectors. Bit 0 is the distinguished coordinate that
//! carries the reweighted edge direction.

use crate::{Error, Result};

/// Exhaustive character enumerations cost `2^d`; larger dimensions are
/// rejected rather than silently allowed to blow up.
pub const MAX_DIMENSION: u8 = 24;

/// An element of the rank-`d` XOR group, stored as a bit mask.
#[derive(Copy, Clone, PartialEq, Eq, Hash, Debug)]
pub struct GroupElement {
    bits: u32,
    dim: u8,
}

impl GroupElement {
    pub fn new(bits: u32, dim: u8) -> Result<Self> {
        check_dimension(dim)?;
        if dim < 32 && bits >> dim != 0 {
            return Err(Error::MaskTooWide { mask: bits, dim });
        }
        Ok(GroupElement { bits, dim })
    }

    /// The identity element (all bits clear).
    pub fn zero(dim: u8) -> Result<Self> {
        Self::new(0, dim)
    }

    /// The all-ones element, antipodal to zero.
    pub fn all_ones(dim: u8) -> Result<Self> {
        check_dimension(dim)?;
        Ok(GroupElement {
            bits: ones_mask(dim),
            dim,
        })
    }

    /// Standard basis element with only bit `j` set.
    pub fn basis(j: u8, dim: u8) -> Result<Self> {
        check_dimension(dim)?;
        if j >= dim {
            return Err(Error::MaskTooWide {
                mask: 1u32 << j,
                dim,
            });
        }
        Ok(GroupElement { bits: 1 << j, dim })
    }

    pub fn bits(&self) -> u32 {
        self.bits
    }

    pub fn dimension(&self) -> u8 {
        self.dim
    }

    /// Coordinate `g_j` of the element.
    pub fn bit(&self, j: u8) -> bool {
        j < self.dim && (self.bits >> j) & 1 == 1
    }

    /// Group addition (bitwise XOR). Every element is self-inverse.
    pub fn add(&self, other: &Self) -> Result<Self> {
        if self.dim != other.dim {
            return Err(Error::DimensionMismatch(self.dim, other.dim));
        }
        Ok(GroupElement {
            bits: self.bits ^ other.bits,
            dim: self.dim,
        })
    }

    /// Number of set bits.
    pub fn hamming_weight(&self) -> u32 {
        self.bits.count_ones()
    }

    /// Character value `(-1)^{<g,x>}`, i.e. the parity of the overlap.
    pub fn character(&self, x: &Self) -> Result<i32> {
        if self.dim != x.dim {
            return Err(Error::DimensionMismatch(self.dim, x.dim));
        }
        Ok(sign_of_parity((self.bits & x.bits).count_ones()))
    }

    /// All-ones XOR `self`; flips every coordinate.
    pub fn complement(&self) -> Self {
        GroupElement {
            bits: self.bits ^ ones_mask(self.dim),
            dim: self.dim,
        }
    }

    /// Iterate over the whole group in mask order. `O(2^d)` items.
    pub fn enumerate(dim: u8) -> Result<impl Iterator<Item = GroupElement>> {
        check_dimension(dim)?;
        Ok((0u32..1 << dim).map(move |bits| GroupElement { bits, dim }))
    }
}

fn check_dimension(dim: u8) -> Result<()> {
    if dim == 0 || dim > MAX_DIMENSION {
        return Err(Error::DimensionOutOfRange {
            got: dim as u32,
            min: 1,
            max: MAX_DIMENSION as u32,
        });
    }
    Ok(())
}

fn ones_mask(dim: u8) -> u32 {
    if dim >= 32 {
        u32::MAX
    } else {
        (1u32 << dim) - 1
    }
}

fn sign_of_parity(count: u32) -> i32 {
    if count % 2 == 0 {
        1
    } else {
        -1
    }
}
