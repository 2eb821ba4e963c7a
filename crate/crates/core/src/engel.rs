//! Closed-form Engel group arithmetic on fixed-size coordinate arrays.
//!
//! Second-kind coordinates `x` stand for `exp(x4 X4) exp(x3 X3) exp(x2 X2) exp(x1 X1)`,
//! first-kind coordinates `a` for `exp(a1 X1 + a2 X2 + a3 X3 + a4 X4)`.
//! Right translation by single-generator flows acts on second-kind
//! coordinates as
//!
//! ```text
//! x exp(t X1) = (x1 + t, x2, x3, x4)
//! x exp(t X2) = (x1, x2 + t, x3 + t x1, x4 + t x1^2 / 2)
//! x exp(t X3) = (x1, x2, x3 + t, x4 + t x1)
//! x exp(t X4) = (x1, x2, x3, x4 + t)
//! ```
//!
//! and composing them in the order `X4, X3, X2, X1` gives the product below.

/// A point of the Engel group as four real coordinates.
pub type Coords = [f64; 4];

/// Horizontal vector `u1 X1 + u2 X2`.
pub type Horizontal = [f64; 2];

pub const IDENTITY: Coords = [0.0; 4];

/// Homogeneity of each coordinate.
pub const HOMOGENEITY: [i32; 4] = [1, 1, 2, 3];

/// Group product in second-kind coordinates.
#[inline]
pub fn mul_second(x: &Coords, y: &Coords) -> Coords {
    [
        x[0] + y[0],
        x[1] + y[1],
        x[2] + y[2] + x[0] * y[1],
        x[3] + y[3] + x[0] * y[2] + 0.5 * x[0] * x[0] * y[1],
    ]
}

/// Group inverse in second-kind coordinates.
#[inline]
pub fn inv_second(x: &Coords) -> Coords {
    [
        -x[0],
        -x[1],
        -x[2] + x[0] * x[1],
        -x[3] + x[0] * x[2] - 0.5 * x[0] * x[0] * x[1],
    ]
}

/// Group product in first-kind coordinates (the step-three BCH formula).
#[inline]
pub fn mul_first(a: &Coords, b: &Coords) -> Coords {
    let w = a[0] * b[1] - a[1] * b[0];
    [
        a[0] + b[0],
        a[1] + b[1],
        a[2] + b[2] + 0.5 * w,
        a[3] + b[3] + 0.5 * (a[0] * b[2] - a[2] * b[0]) + (a[0] - b[0]) * w / 12.0,
    ]
}

/// Converts second-kind coordinates to first-kind coordinates.
#[inline]
pub fn second_to_first(y: &Coords) -> Coords {
    [
        y[0],
        y[1],
        y[2] - 0.5 * y[0] * y[1],
        y[3] + y[0] * y[0] * y[1] / 12.0 - 0.5 * y[0] * y[2],
    ]
}

/// Converts first-kind coordinates to second-kind coordinates.
#[inline]
pub fn first_to_second(a: &Coords) -> Coords {
    [
        a[0],
        a[1],
        a[2] + 0.5 * a[0] * a[1],
        a[3] + 0.5 * a[0] * a[2] + a[0] * a[0] * a[1] / 6.0,
    ]
}

/// `exp(h (u1 X1 + u2 X2))` in second-kind coordinates.
#[inline]
pub fn exp_horizontal_second(h: f64, u: &Horizontal) -> Coords {
    let (p, q) = (h * u[0], h * u[1]);
    [p, q, 0.5 * p * q, p * p * q / 6.0]
}

/// Anisotropic dilation; valid in either coordinate kind.
#[inline]
pub fn dilate(lambda: f64, x: &Coords) -> Coords {
    [
        lambda * x[0],
        lambda * x[1],
        lambda * lambda * x[2],
        lambda * lambda * lambda * x[3],
    ]
}

/// Box quasi-norm with unit layer constants, first-kind input.
#[inline]
pub fn box_norm_first(a: &Coords) -> f64 {
    a[0].hypot(a[1]).max(a[2].abs().sqrt()).max(a[3].abs().cbrt())
}

/// `d_Box(x, y) = ||y^{-1} x||_Box` for second-kind inputs.
#[inline]
pub fn box_dist_second(x: &Coords, y: &Coords) -> f64 {
    if x == y {
        return 0.0;
    }
    box_norm_first(&second_to_first(&mul_second(&inv_second(y), x)))
}

/// `d_Box(x, y)` for first-kind inputs.
#[inline]
pub fn box_dist_first(x: &Coords, y: &Coords) -> f64 {
    if x == y {
        return 0.0;
    }
    box_norm_first(&mul_first(&[-y[0], -y[1], -y[2], -y[3]], x))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn flow_of_x2_matches_composition() {
        let x = [0.4, -0.2, 0.9, 1.1];
        let t = 0.35;
        let y = mul_second(&x, &[0.0, t, 0.0, 0.0]);
        assert_eq!(y, [x[0], x[1] + t, x[2] + t * x[0], x[3] + t * x[0] * x[0] / 2.0]);
    }

    #[test]
    fn horizontal_exp_in_second_kind() {
        let (a, b) = (1.5, -0.5);
        assert_eq!(exp_horizontal_second(1.0, &[a, b]), first_to_second(&[a, b, 0.0, 0.0]));
        assert_eq!(
            exp_horizontal_second(1.0, &[a, b]),
            [a, b, a * b / 2.0, a * a * b / 6.0]
        );
    }

    #[test]
    fn box_norm_example() {
        assert_eq!(box_norm_first(&[3.0, 0.0, 4.0, -8.0]), 3.0);
        assert_eq!(box_norm_first(&[0.0, 0.0, 4.0, -27.0]), 3.0);
    }
}
