use crate::qcore::{Operator, C64};

/// Single-qubit unitary from three angles:
///
/// ```text
/// [ cos(p0/2)            -e^{i p1} sin(p0/2)      ]
/// [ e^{i p2} sin(p0/2)    e^{i(p1+p2)} cos(p0/2)  ]
/// ```
pub fn unitary_from_angles(phi0: f64, phi1: f64, phi2: f64) -> Operator {
    let (s, c) = (phi0 / 2.0).sin_cos();
    let e1 = C64::from_polar(1.0, phi1);
    let e2 = C64::from_polar(1.0, phi2);
    Operator::from_rows(
        2,
        &[
            C64::new(c, 0.0),
            -e1 * s,
            e2 * s,
            e1 * e2 * c,
        ],
    )
    .expect("2x2")
}

/// Angles reproducing `u` up to a global phase, with `phi0` in `[0, pi]`.
/// Callers are expected to pass a unitary.
pub fn angles_from_unitary(u: &Operator) -> [f64; 3] {
    let (u00, u10) = (u.get(0, 0), u.get(1, 0));
    let g = if u00.norm() > 1e-12 { u00.arg() } else { u10.arg() };
    let phase = C64::from_polar(1.0, -g);
    let v = |r, c| u.get(r, c) * phase;
    let (c, s) = (v(0, 0).norm(), v(1, 0).norm());
    let phi0 = 2.0 * s.atan2(c);
    let (phi1, phi2) = if s > 1e-12 {
        let phi2 = v(1, 0).arg();
        let phi1 = if c > 1e-12 && s < c {
            v(1, 1).arg() - phi2
        } else {
            (-v(0, 1)).arg()
        };
        (phi1, phi2)
    } else {
        (v(1, 1).arg(), 0.0)
    };
    [phi0, phi1, phi2]
}
