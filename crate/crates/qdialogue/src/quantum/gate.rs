//! The gate set the protocol uses: I, X, H, R(θ) and CNOT.

use num_complex::Complex64;
use std::f64::consts::FRAC_1_SQRT_2;
use std::fmt;

/// A named unitary. The two encoding operations are I and X; H only
/// appears when preparing or measuring X-basis decoy states; R(θ) is the
/// key-rotation [[cosθ, sinθ], [−sinθ, cosθ]].
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Gate {
    I,
    X,
    H,
    R(f64),
    Cnot,
}

impl Gate {
    /// The encoding operation for a message bit: I for 0, X for 1.
    pub fn encoding(bit: bool) -> Gate {
        if bit {
            Gate::X
        } else {
            Gate::I
        }
    }

    /// 2×2 matrix for single-qubit gates, row-major; None for CNOT.
    pub fn single_qubit_matrix(&self) -> Option<[[Complex64; 2]; 2]> {
        let r = |x: f64| Complex64::new(x, 0.0);
        match *self {
            Gate::I => Some([[r(1.0), r(0.0)], [r(0.0), r(1.0)]]),
            Gate::X => Some([[r(0.0), r(1.0)], [r(1.0), r(0.0)]]),
            Gate::H => Some([
                [r(FRAC_1_SQRT_2), r(FRAC_1_SQRT_2)],
                [r(FRAC_1_SQRT_2), r(-FRAC_1_SQRT_2)],
            ]),
            Gate::R(theta) => {
                let (s, c) = theta.sin_cos();
                Some([[r(c), r(s)], [r(-s), r(c)]])
            }
            Gate::Cnot => None,
        }
    }

    /// The gate's full unitary matrix (2×2, or 4×4 for CNOT).
    pub fn unitary(&self) -> nalgebra::DMatrix<Complex64> {
        match self.single_qubit_matrix() {
            Some(m) => nalgebra::DMatrix::from_fn(2, 2, |i, j| m[i][j]),
            None => {
                let r = |x: f64| Complex64::new(x, 0.0);
                nalgebra::DMatrix::from_row_slice(
                    4,
                    4,
                    &[
                        r(1.0),
                        r(0.0),
                        r(0.0),
                        r(0.0),
                        r(0.0),
                        r(1.0),
                        r(0.0),
                        r(0.0),
                        r(0.0),
                        r(0.0),
                        r(0.0),
                        r(1.0),
                        r(0.0),
                        r(0.0),
                        r(1.0),
                        r(0.0),
                    ],
                )
            }
        }
    }
}

impl fmt::Display for Gate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Gate::I => write!(f, "I"),
            Gate::X => write!(f, "X"),
            Gate::H => write!(f, "H"),
            Gate::R(theta) => write!(f, "R({theta})"),
            Gate::Cnot => write!(f, "CNOT"),
        }
    }
}
