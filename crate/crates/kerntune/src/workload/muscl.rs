//! MUSCL face extrapolation and the van Leer ratio limiter.

/// Van Leer limiter `(r + |r|) / (1 + |r|)`, zero for non-positive ratios.
#[inline]
pub fn van_leer(r: f64) -> f64 {
    if r > 0.0 {
        (r + r.abs()) / (1.0 + r.abs())
    } else {
        0.0
    }
}

/// Limiter value for a slope ratio `numer/denom`, with the degenerate case
/// of a vanishing denominator defined as 1.
#[inline]
pub fn limiter_value(numer: f64, denom: f64) -> f64 {
    if denom == 0.0 {
        1.0
    } else {
        van_leer(numer / denom)
    }
}

/// Left/right states at the face between cells `k` and `k+1`:
///
/// ```text
/// qL = q_k     + eps/4 [ (1-kappa) psi+_{k-1/2} (q_k     - q_{k-1})
///                      + (1+kappa) psi-_{k+1/2} (q_{k+1} - q_k    ) ]
/// qR = q_{k+1} - eps/4 [ (1+kappa) psi+_{k+1/2} (q_{k+1} - q_k    )
///                      + (1-kappa) psi-_{k+3/2} (q_{k+2} - q_{k+1}) ]
/// ```
///
/// `eps = 0` collapses both states to the neighboring cell averages (fully
/// upwind first order); on linear data with unit limiters both states meet
/// at the exact midpoint for any `kappa`.
#[inline]
#[allow(clippy::too_many_arguments)]
pub fn muscl_reconstruct(
    q_km1: f64,
    q_k: f64,
    q_kp1: f64,
    q_kp2: f64,
    eps: f64,
    kappa: f64,
    psi_plus_upwind: f64,
    psi_minus_face: f64,
    psi_plus_face: f64,
    psi_minus_downwind: f64,
) -> (f64, f64) {
    let quarter = 0.25 * eps;
    let left = q_k
        + quarter
            * ((1.0 - kappa) * psi_plus_upwind * (q_k - q_km1)
                + (1.0 + kappa) * psi_minus_face * (q_kp1 - q_k));
    let right = q_kp1
        - quarter
            * ((1.0 + kappa) * psi_plus_face * (q_kp1 - q_k)
                + (1.0 - kappa) * psi_minus_downwind * (q_kp2 - q_kp1));
    (left, right)
}
