//! Deliberate defects used to check that the verification suite notices them.

use std::sync::atomic::{AtomicBool, Ordering};

static LAMBDA_SIGN: AtomicBool = AtomicBool::new(false);

/// When enabled, every noise layer applies `(1 + lambda) rho - lambda I/2`
/// instead of the depolarizing channel. Process-global.
pub fn set_lambda_sign_fault(enabled: bool) {
    LAMBDA_SIGN.store(enabled, Ordering::SeqCst);
}

pub fn lambda_sign_fault() -> bool {
    LAMBDA_SIGN.load(Ordering::Relaxed)
}

#[inline]
pub(crate) fn effective_lambda(lambda: f64) -> f64 {
    if lambda_sign_fault() {
        -lambda
    } else {
        lambda
    }
}
