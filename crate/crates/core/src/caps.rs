//! Resource caps for enumeration and matrix assembly.

use serde::{Deserialize, Serialize};

/// Upper limits on enumeration sizes and constraint-matrix entries.
///
/// Defaults match the documented guards (10^7 enumerated elements,
/// 10^8 matrix entries). `clamp_to_ceiling` enforces the hard ceiling
/// regardless of user overrides.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Caps {
    pub enum_cap: u64,
    pub matrix_cap: u64,
}

pub const HARD_ENUM_CEILING: u64 = 100_000_000;
pub const HARD_MATRIX_CEILING: u64 = 1_000_000_000;

impl Default for Caps {
    fn default() -> Self {
        Caps { enum_cap: 10_000_000, matrix_cap: 100_000_000 }
    }
}

impl Caps {
    pub fn clamp_to_ceiling(self) -> Self {
        Caps {
            enum_cap: self.enum_cap.min(HARD_ENUM_CEILING),
            matrix_cap: self.matrix_cap.min(HARD_MATRIX_CEILING),
        }
    }

    pub fn check_enum(&self, size: u128) -> crate::Result<()> {
        if size > self.enum_cap as u128 {
            Err(crate::Error::EnumerationTooLarge { size, cap: self.enum_cap })
        } else {
            Ok(())
        }
    }

    pub fn check_matrix(&self, entries: u128) -> crate::Result<()> {
        if entries > self.matrix_cap as u128 {
            Err(crate::Error::MatrixTooLarge { entries, cap: self.matrix_cap })
        } else {
            Ok(())
        }
    }
}
