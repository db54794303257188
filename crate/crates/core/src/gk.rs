//! Golub–Kahan bidiagonalization with optional reorthogonalization.
//!
//! Starting from `β₁u₁ = b`, `α₁v₁ = Aᵀu₁`, each step produces
//!
//! ```text
//! β_{k+1} u_{k+1} = A v_k − α_k u_k
//! α_{k+1} v_{k+1} = Aᵀ u_{k+1} − β_{k+1} v_k
//! ```
//!
//! so that `A V_k = U_{k+1} B_k` with `B_k` lower bidiagonal. `B_k` itself is
//! never stored; callers consume the `(α, β)` stream.

use alloc::vec;
use alloc::vec::Vec;

use crate::error::{check_len, Error, Result};
use crate::linop::LinearOperator;
use crate::math::sqrt;
use crate::vecops::{axpy, dot, norm2, scale};

/// Which Golub–Kahan vectors are reorthogonalized, and how many are kept.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ReorthMode {
    #[default]
    None,
    /// Every new `v` against all previous `v`.
    VOnly,
    /// Every new `u` against all previous `u`.
    UOnly,
    Both,
    /// Every new `v` against the most recent `window` vectors only.
    Local(usize),
    /// Restart the solver every `period` iterations. Inside a segment the
    /// `v` vectors are fully reorthogonalized.
    Restart(usize),
}

impl ReorthMode {
    pub fn validate(self) -> Result<()> {
        match self {
            ReorthMode::Local(0) => Err(Error::InvalidOptions("local window must be >= 1")),
            ReorthMode::Restart(0) => Err(Error::InvalidOptions("restart period must be >= 1")),
            _ => Ok(()),
        }
    }

    fn keeps_u(self) -> bool {
        matches!(self, ReorthMode::UOnly | ReorthMode::Both)
    }

    fn v_window(self) -> Option<Option<usize>> {
        match self {
            ReorthMode::None | ReorthMode::UOnly => None,
            ReorthMode::VOnly | ReorthMode::Both | ReorthMode::Restart(_) => Some(None),
            ReorthMode::Local(l) => Some(Some(l)),
        }
    }
}

/// Where the process stands. Anything other than `Active` is terminal.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GkStatus {
    Active,
    /// `β₁ = 0`: `b` is zero.
    ZeroRhs,
    /// `α₁ = 0`: `Aᵀb` is zero, so `x = 0` already solves the LS problem.
    ZeroAtb,
    /// `β_{k+1} = 0`: `A x_k = b` holds exactly for the current iterate.
    BetaBreakdown,
    /// `α_{k+1} = 0`: `Aᵀ r_k = 0` holds exactly for the current iterate.
    AlphaBreakdown,
}

/// Default limit on the number of floats held in reorthogonalization bases.
pub const DEFAULT_REORTH_CAP: usize = 1 << 26;

/// Orthonormal vectors of one length, stored contiguously. With a window it
/// becomes a ring buffer that drops the oldest vector.
#[derive(Debug, Clone)]
struct Basis {
    dim: usize,
    window: Option<usize>,
    data: Vec<f64>,
    len: usize,
    head: usize,
}

impl Basis {
    fn new(dim: usize, window: Option<usize>) -> Self {
        Self { dim, window, data: Vec::new(), len: 0, head: 0 }
    }

    fn floats(&self) -> usize {
        self.data.len()
    }

    fn push(&mut self, v: &[f64], used_elsewhere: usize, cap: usize) -> Result<()> {
        match self.window {
            Some(w) if self.len == w => {
                let slot = self.head;
                self.data[slot * self.dim..(slot + 1) * self.dim].copy_from_slice(v);
                self.head = (self.head + 1) % w;
            }
            _ => {
                let needed = used_elsewhere + self.data.len() + self.dim;
                if needed > cap {
                    return Err(Error::ReorthMemoryCap { needed, cap });
                }
                self.data.extend_from_slice(v);
                self.len += 1;
            }
        }
        Ok(())
    }

    /// Stored vectors, oldest first.
    fn iter(&self) -> impl Iterator<Item = &[f64]> + Clone + '_ {
        let (len, head, dim) = (self.len, self.head, self.dim);
        (0..len).map(move |i| {
            let slot = (head + i) % len;
            &self.data[slot * dim..(slot + 1) * dim]
        })
    }
}

/// Number of modified Gram–Schmidt sweeps per reorthogonalization.
pub const REORTH_PASSES: usize = 2;

/// Removes from `w` its components along each basis vector, `passes` times.
///
/// A result of (numerically) zero norm is legal and means `w` was in the span.
pub fn reorthogonalize_in_place<'a, I>(w: &mut [f64], basis: I, passes: usize)
where
    I: IntoIterator<Item = &'a [f64]>,
    I::IntoIter: Clone,
{
    let basis = basis.into_iter();
    for _ in 0..passes {
        for q in basis.clone() {
            let c = dot(q, w);
            axpy(-c, q, w);
        }
    }
}

/// Copying form of [`reorthogonalize_in_place`].
pub fn reorthogonalize(w: &[f64], basis: &[&[f64]], passes: usize) -> Vec<f64> {
    let mut out = w.to_vec();
    reorthogonalize_in_place(&mut out, basis.iter().copied(), passes);
    out
}

// Keeps the breakdown threshold away from subnormals.
const FLOOR: f64 = f64::MIN_POSITIVE / f64::EPSILON;

/// State of the bidiagonalization after `k` steps: the current `u_k`, `v_k`,
/// `α_k`, `β_k` and any stored basis vectors.
#[derive(Debug, Clone)]
pub struct GkState {
    k: usize,
    alpha: f64,
    beta: f64,
    u: Vec<f64>,
    v: Vec<f64>,
    av: Vec<f64>,
    mode: ReorthMode,
    stored_u: Option<Basis>,
    stored_v: Option<Basis>,
    frob2: f64,
    status: GkStatus,
    cap: usize,
}

/// Starts the process from `b`. Returns `β₁` and the state holding `u₁`, `v₁`, `α₁`.
pub fn gk_init<Op: LinearOperator + ?Sized>(
    op: &Op,
    b: &[f64],
    mode: ReorthMode,
    reorth_cap: usize,
) -> Result<(f64, GkState)> {
    check_len(op.nrows(), b.len())?;
    mode.validate()?;
    let (m, n) = (op.nrows(), op.ncols());
    let mut st = GkState {
        k: 1,
        alpha: 0.0,
        beta: 0.0,
        u: b.to_vec(),
        v: vec![0.0; n],
        av: vec![0.0; m],
        mode,
        stored_u: mode.keeps_u().then(|| Basis::new(m, None)),
        stored_v: mode.v_window().map(|w| Basis::new(n, w)),
        frob2: 0.0,
        status: GkStatus::Active,
        cap: reorth_cap,
    };

    st.beta = norm2(&st.u);
    if st.beta <= FLOOR * f64::EPSILON {
        st.beta = 0.0;
        st.status = GkStatus::ZeroRhs;
        return Ok((0.0, st));
    }
    scale(1.0 / st.beta, &mut st.u);
    st.remember_u()?;

    op.adjoint_into(&st.u, &mut st.v);
    st.alpha = norm2(&st.v);
    if st.alpha <= FLOOR * f64::EPSILON {
        st.alpha = 0.0;
        st.v.fill(0.0);
        st.status = GkStatus::ZeroAtb;
        return Ok((st.beta, st));
    }
    scale(1.0 / st.alpha, &mut st.v);
    st.remember_v()?;
    st.frob2 = st.alpha * st.alpha;
    Ok((st.beta, st))
}

impl GkState {
    /// Advances from step `k` to `k + 1`, returning `(β_{k+1}, α_{k+1})`.
    ///
    /// When `β_{k+1}` breaks down the adjoint product is skipped and
    /// `α_{k+1}` is reported as zero; either breakdown zeroes `v`.
    pub fn step<Op: LinearOperator + ?Sized>(&mut self, op: &Op) -> Result<(f64, f64)> {
        assert_eq!(self.status, GkStatus::Active, "bidiagonalization already terminated");
        let thresh = f64::EPSILON * (sqrt(self.frob2) + FLOOR);

        // β u ← A v − α u, built in the Av workspace.
        op.forward_into(&self.v, &mut self.av);
        axpy(-self.alpha, &self.u, &mut self.av);
        if let Some(basis) = &self.stored_u {
            reorthogonalize_in_place(&mut self.av, basis.iter(), REORTH_PASSES);
        }
        let beta = norm2(&self.av);
        self.k += 1;
        if beta <= thresh {
            self.beta = 0.0;
            self.alpha = 0.0;
            self.v.fill(0.0);
            self.status = GkStatus::BetaBreakdown;
            return Ok((0.0, 0.0));
        }
        core::mem::swap(&mut self.u, &mut self.av);
        scale(1.0 / beta, &mut self.u);
        self.beta = beta;
        self.frob2 += beta * beta;
        self.remember_u()?;

        // α v ← Aᵀ u − β v, in place.
        scale(-beta, &mut self.v);
        op.adjoint_acc(&self.u, &mut self.v);
        if let Some(basis) = &self.stored_v {
            reorthogonalize_in_place(&mut self.v, basis.iter(), REORTH_PASSES);
        }
        let alpha = norm2(&self.v);
        let thresh = f64::EPSILON * (sqrt(self.frob2) + FLOOR);
        if alpha <= thresh {
            self.alpha = 0.0;
            self.v.fill(0.0);
            self.status = GkStatus::AlphaBreakdown;
            return Ok((beta, 0.0));
        }
        scale(1.0 / alpha, &mut self.v);
        self.alpha = alpha;
        self.frob2 += alpha * alpha;
        self.remember_v()?;
        Ok((beta, alpha))
    }

    fn stored_floats(&self) -> usize {
        self.stored_u.as_ref().map_or(0, Basis::floats) + self.stored_v.as_ref().map_or(0, Basis::floats)
    }

    fn remember_u(&mut self) -> Result<()> {
        let used = self.stored_floats();
        if let Some(b) = &mut self.stored_u {
            let own = b.floats();
            b.push(&self.u, used - own, self.cap)?;
        }
        Ok(())
    }

    fn remember_v(&mut self) -> Result<()> {
        let used = self.stored_floats();
        if let Some(b) = &mut self.stored_v {
            let own = b.floats();
            b.push(&self.v, used - own, self.cap)?;
        }
        Ok(())
    }

    /// Current step index `k` (1 after [`gk_init`]).
    pub fn k(&self) -> usize {
        self.k
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    pub fn u(&self) -> &[f64] {
        &self.u
    }

    pub fn v(&self) -> &[f64] {
        &self.v
    }

    pub fn status(&self) -> GkStatus {
        self.status
    }

    pub fn is_active(&self) -> bool {
        self.status == GkStatus::Active
    }

    pub fn mode(&self) -> ReorthMode {
        self.mode
    }

    /// Running `Σα² + Σβ²` over the steps so far (excluding `β₁`).
    pub fn frobenius_sq(&self) -> f64 {
        self.frob2
    }

    /// Stored `v` vectors, oldest first.
    pub fn stored_v(&self) -> impl Iterator<Item = &[f64]> + '_ {
        self.stored_v.iter().flat_map(Basis::iter)
    }

    /// Stored `u` vectors, oldest first.
    pub fn stored_u(&self) -> impl Iterator<Item = &[f64]> + '_ {
        self.stored_u.iter().flat_map(Basis::iter)
    }

    /// Long vectors held by the process: `(n-vectors, m-vectors, basis floats)`.
    pub fn footprint(&self) -> (usize, usize, usize) {
        (1, 2, self.stored_floats())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linop::{DenseMatrix, Identity};

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol
    }

    #[test]
    fn init_on_identity() {
        let (beta1, st) = gk_init(&Identity(3), &[0.0, 3.0, 4.0], ReorthMode::None, DEFAULT_REORTH_CAP).unwrap();
        assert_eq!(beta1, 5.0);
        for (got, want) in st.u().iter().zip([0.0, 0.6, 0.8]) {
            assert!(close(*got, want, 4.0 * f64::EPSILON));
        }
        assert!(close(st.alpha(), 1.0, 4.0 * f64::EPSILON));
        for (v, u) in st.v().iter().zip(st.u()) {
            assert!(close(*v, *u, 4.0 * f64::EPSILON));
        }
        assert!(st.is_active());
    }

    #[test]
    fn init_flags_zero_rhs_and_orthogonal_rhs() {
        let (beta1, st) = gk_init(&Identity(2), &[0.0, 0.0], ReorthMode::None, DEFAULT_REORTH_CAP).unwrap();
        assert_eq!(beta1, 0.0);
        assert_eq!(st.status(), GkStatus::ZeroRhs);

        let a = DenseMatrix::from_rows(&[&[1.0], &[-1.0]]);
        let (beta1, st) = gk_init(&a, &[1.0, 1.0], ReorthMode::None, DEFAULT_REORTH_CAP).unwrap();
        assert!(close(beta1, 2.0_f64.sqrt(), 1e-15));
        assert_eq!(st.alpha(), 0.0);
        assert_eq!(st.status(), GkStatus::ZeroAtb);
    }

    #[test]
    fn init_checks_dimensions() {
        assert!(gk_init(&Identity(3), &[1.0], ReorthMode::None, DEFAULT_REORTH_CAP).is_err());
        assert!(gk_init(&Identity(3), &[1.0; 3], ReorthMode::Local(0), DEFAULT_REORTH_CAP).is_err());
    }

    #[test]
    fn identity_breaks_down_after_one_step() {
        let (_, mut st) = gk_init(&Identity(2), &[1.0, 0.0], ReorthMode::None, DEFAULT_REORTH_CAP).unwrap();
        let (beta2, alpha2) = st.step(&Identity(2)).unwrap();
        assert_eq!((beta2, alpha2), (0.0, 0.0));
        assert_eq!(st.status(), GkStatus::BetaBreakdown);
    }

    #[test]
    fn diag_two_by_two_first_step() {
        // A = diag(1, 2), b = (1, 1): β₁ = √2, α₁ = √(5/2), β₂ = 3/√10.
        let a = DenseMatrix::from_rows(&[&[1.0, 0.0], &[0.0, 2.0]]);
        let (beta1, mut st) = gk_init(&a, &[1.0, 1.0], ReorthMode::None, DEFAULT_REORTH_CAP).unwrap();
        assert!(close(beta1, 2.0_f64.sqrt(), 1e-15));
        assert!(close(st.alpha(), 2.5_f64.sqrt(), 1e-15));
        let s5 = 5.0_f64.sqrt();
        assert!(close(st.v()[0], 1.0 / s5, 1e-15) && close(st.v()[1], 2.0 / s5, 1e-15));
        let (beta2, _) = st.step(&a).unwrap();
        assert!(close(beta2, 3.0 / 10.0_f64.sqrt(), 1e-15));
    }

    #[test]
    fn reorthogonalize_examples() {
        let e1 = [1.0, 0.0, 0.0];
        assert_eq!(reorthogonalize(&[1.0, 1.0, 0.0], &[&e1], 2), [0.0, 1.0, 0.0]);
        let w = [0.0, 2.0, -3.0];
        assert_eq!(reorthogonalize(&w, &[&e1], 2), w);
    }

    #[test]
    fn local_window_is_bounded() {
        let a = DenseMatrix::from_row_major(
            6,
            5,
            (0..30).map(|i| ((i * 7 % 11) as f64) - 5.0 + if i % 6 == 0 { 4.0 } else { 0.0 }).collect(),
        );
        let b = [1.0, -2.0, 0.5, 3.0, -1.0, 2.0];
        let (_, mut st) = gk_init(&a, &b, ReorthMode::Local(2), DEFAULT_REORTH_CAP).unwrap();
        while st.is_active() && st.k() < 5 {
            st.step(&a).unwrap();
            assert!(st.stored_v().count() <= 2);
        }
        assert_eq!(st.stored_u().count(), 0);
    }

    #[test]
    fn memory_cap_is_enforced() {
        let a = DenseMatrix::from_rows(&[&[1.0, 0.0, 0.0], &[0.0, 2.0, 0.0], &[0.0, 0.0, 3.0], &[1.0, 1.0, 1.0]]);
        let b = [1.0, 1.0, 1.0, 0.5];
        // u₁ (4 floats) + v₁ (3 floats) fit in 7; the next u does not.
        let (_, mut st) = gk_init(&a, &b, ReorthMode::Both, 7).unwrap();
        assert_eq!(st.step(&a), Err(Error::ReorthMemoryCap { needed: 11, cap: 7 }));
    }
}
