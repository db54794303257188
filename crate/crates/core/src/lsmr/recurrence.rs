//! Scalar recurrences and the `x, h, h̄` vector updates of LSMR.
//!
//! One call to [`LsmrRecurrence::advance`] consumes `α_{k+1}`, `β_{k+1}` and
//! `v_{k+1}` from the bidiagonalization and performs, in order:
//!
//! 1. the main rotations `P̂_k` (damping), `P_k`, `P̄_k` and the vector updates;
//! 2. the residual-norm chain (`P̂_k`, `P_k` applied to the β-chain, then `P̃_{k−1}`);
//! 3. the `‖x_k‖` chain;
//! 4. the `‖A‖` and `cond(A)` estimates.

use alloc::vec;
use alloc::vec::Vec;

use super::sym_ortho;
use super::Estimates;
use crate::math::sqrt;
use crate::vecops::axpy;

/// Live scalars of the `‖x_k‖` estimate.
///
/// With `Q̃_k` the rotations of the residual chain and `R_k` the first
/// triangular factor, the LQ factorization `Q̃_k R_k = L_k Q̂_k` has lower
/// bidiagonal `L_k`, and `‖x_k‖ = ‖ẑ_k‖` where `L_k ẑ_k = t̃_k`. Going from
/// `k − 1` to `k` only rows `k−2..k` of `L` change, so a 3×3 window and a
/// running sum of squares of finalized `ẑ` entries suffice.
#[derive(Debug, Clone)]
struct XnormChain {
    // Row k−2 of L: final subdiagonal and provisional diagonal.
    e_km2: f64,
    d_km2: f64,
    // Row k−1 of L.
    e_km1: f64,
    d_km1: f64,
    zhat_km3: f64,
    sum_sq: f64,
    tau_km2: f64,
    // P̃_{k−2}.
    c_prev: f64,
    s_prev: f64,
    // Superdiagonal θ_k of R_k.
    theta_k: f64,
}

impl XnormChain {
    fn new() -> Self {
        Self {
            e_km2: 0.0,
            d_km2: 0.0,
            e_km1: 0.0,
            d_km1: 0.0,
            zhat_km3: 0.0,
            sum_sq: 0.0,
            tau_km2: 0.0,
            c_prev: 1.0,
            s_prev: 0.0,
            theta_k: 0.0,
        }
    }

    /// Takes `ρ_k`, `θ_{k+1}`, the rotation `P̃_{k−1}`, and the entries
    /// `τ̃_{k−1}`, `τ̇_k` of `t̃_k`. Returns the estimate of `‖x_k‖`.
    #[allow(clippy::too_many_arguments)]
    fn advance(
        &mut self,
        k: usize,
        rho: f64,
        theta_next: f64,
        ctilde: f64,
        stilde: f64,
        tau_km1: f64,
        taud: f64,
    ) -> f64 {
        // New column k of Q̃_{k−1} R_k: θ_k rotated by P̃_{k−2}.
        let g2 = self.s_prev * self.theta_k;
        let g1 = self.c_prev * self.theta_k;

        // Rows k−2..k, columns k−2..k, after applying P̃_{k−1}.
        let mut r1 = [self.d_km2, 0.0, g2];
        let mut r2 = [ctilde * self.e_km1, ctilde * self.d_km1, ctilde * g1 + stilde * rho];
        let mut r3 = [-stilde * self.e_km1, -stilde * self.d_km1, -stilde * g1 + ctilde * rho];

        // Column rotations restoring lower-bidiagonal form.
        let (c, s, r) = sym_ortho(r1[0], r1[2]);
        r1 = [r, 0.0, 0.0];
        for row in [&mut r2, &mut r3] {
            let (a, b) = (row[0], row[2]);
            row[0] = c * a + s * b;
            row[2] = -s * a + c * b;
        }
        let (c, s, r) = sym_ortho(r2[1], r2[2]);
        r2[1] = r;
        r2[2] = 0.0;
        let (a, b) = (r3[1], r3[2]);
        r3[1] = c * a + s * b;
        r3[2] = -s * a + c * b;
        // r3[0] vanishes in exact arithmetic since L_k is bidiagonal.

        let zhat_km2 = if k >= 3 { (self.tau_km2 - self.e_km2 * self.zhat_km3) / r1[0] } else { 0.0 };
        let zhat_km1 = if k >= 2 { (tau_km1 - r2[0] * zhat_km2) / r2[1] } else { 0.0 };
        let zhat_k = (taud - r3[1] * zhat_km1) / r3[2];
        let norm_x = sqrt(self.sum_sq + zhat_km2 * zhat_km2 + zhat_km1 * zhat_km1 + zhat_k * zhat_k);

        self.sum_sq += zhat_km2 * zhat_km2;
        self.zhat_km3 = zhat_km2;
        self.e_km2 = r2[0];
        self.d_km2 = r2[1];
        self.e_km1 = r3[1];
        self.d_km1 = r3[2];
        self.tau_km2 = tau_km1;
        self.c_prev = ctilde;
        self.s_prev = stilde;
        self.theta_k = theta_next;
        norm_x
    }
}

/// All LSMR state apart from the bidiagonalization: the Greek-letter scalars,
/// the iterate `x`, and the direction vectors `h`, `h̄`.
#[derive(Debug, Clone)]
pub struct LsmrRecurrence {
    lambda: f64,
    damped: bool,
    k: usize,

    // Main recurrence.
    alphabar: f64,
    rho: f64,
    rhobar: f64,
    cbar: f64,
    sbar: f64,
    theta: f64,
    thetabar: f64,
    zeta: f64,
    zetabar: f64,
    chat: f64,
    shat: f64,
    c: f64,
    s: f64,

    // Residual-norm chain.
    betadd: f64,
    betad: f64,
    rhod: f64,
    thetatilde: f64,
    tautilde: f64,
    taud: f64,
    d: f64,
    lemma_max: f64,

    xnorm: XnormChain,

    // ‖A‖ and cond(A).
    norm_a2: f64,
    max_rbar: f64,
    min_rbar: f64,

    est: Estimates,

    x: Vec<f64>,
    h: Vec<f64>,
    hbar: Vec<f64>,
}

impl LsmrRecurrence {
    /// Initial state from `β₁`, `α₁`, `v₁`. With `damped == false` the
    /// damping rotation `P̂_k` is skipped (only valid for `λ = 0`).
    pub fn new(beta1: f64, alpha1: f64, v1: &[f64], lambda: f64, damped: bool) -> Self {
        let n = v1.len();
        let est = Estimates {
            norm_r: beta1,
            norm_atr: alpha1 * beta1,
            norm_x: 0.0,
            norm_a: sqrt(alpha1 * alpha1 + lambda * lambda),
            cond: 1.0,
        };
        Self {
            lambda,
            damped,
            k: 0,
            alphabar: alpha1,
            rho: 1.0,
            rhobar: 1.0,
            cbar: 1.0,
            sbar: 0.0,
            theta: 0.0,
            thetabar: 0.0,
            zeta: 0.0,
            zetabar: alpha1 * beta1,
            chat: 1.0,
            shat: 0.0,
            c: 1.0,
            s: 0.0,
            betadd: beta1,
            betad: 0.0,
            rhod: 1.0,
            thetatilde: 0.0,
            tautilde: 0.0,
            taud: 0.0,
            d: 0.0,
            lemma_max: 0.0,
            xnorm: XnormChain::new(),
            norm_a2: alpha1 * alpha1 + lambda * lambda,
            max_rbar: 0.0,
            min_rbar: f64::INFINITY,
            est,
            x: vec![0.0; n],
            h: v1.to_vec(),
            hbar: vec![0.0; n],
        }
    }

    /// Performs iteration `k` given `α_{k+1}`, `β_{k+1}` and `v_{k+1}`.
    pub fn advance(&mut self, alpha_next: f64, beta_next: f64, v_next: &[f64]) -> &Estimates {
        self.k += 1;
        let rho_old = self.rho;
        let rhobar_old = self.rhobar;
        let zeta_old = self.zeta;
        let cbar_rho = self.step_main_recurrence(alpha_next, beta_next, v_next, rho_old, rhobar_old);
        let (ctilde, stilde) = self.step_residual_chain(zeta_old);
        self.est.norm_x = self.xnorm.advance(
            self.k,
            self.rho,
            self.theta,
            ctilde,
            stilde,
            self.tautilde,
            self.taud,
        );
        self.step_norm_cond_chain(alpha_next, beta_next, rhobar_old, cbar_rho);
        self.est.norm_atr = self.zetabar.abs();
        &self.est
    }

    /// Rotations `P̂_k`, `P_k`, `P̄_k` and the `h̄, x, h` updates.
    /// Returns the provisional QLP diagonal `c̄_{k−1} ρ_k`.
    fn step_main_recurrence(
        &mut self,
        alpha_next: f64,
        beta_next: f64,
        v_next: &[f64],
        rho_old: f64,
        rhobar_old: f64,
    ) -> f64 {
        let alphahat = if self.damped {
            let (chat, shat, alphahat) = sym_ortho(self.alphabar, self.lambda);
            self.chat = chat;
            self.shat = shat;
            alphahat
        } else {
            self.alphabar
        };

        let (c, s, rho) = sym_ortho(alphahat, beta_next);
        self.c = c;
        self.s = s;
        self.rho = rho;
        self.theta = s * alpha_next;
        self.alphabar = c * alpha_next;

        self.thetabar = self.sbar * rho;
        let cbar_rho = self.cbar * rho;
        let (cbar, sbar, rhobar) = sym_ortho(cbar_rho, self.theta);
        self.cbar = cbar;
        self.sbar = sbar;
        self.rhobar = rhobar;
        self.zeta = cbar * self.zetabar;
        self.zetabar *= -sbar;

        let hbar_coef = -(self.thetabar * rho / (rho_old * rhobar_old));
        for (hb, h) in self.hbar.iter_mut().zip(&self.h) {
            *hb = h + hbar_coef * *hb;
        }
        axpy(self.zeta / (rho * rhobar), &self.hbar, &mut self.x);
        let h_coef = -(self.theta / rho);
        for (h, v) in self.h.iter_mut().zip(v_next) {
            *h = v + h_coef * *h;
        }
        cbar_rho
    }

    /// Returns the rotation `P̃_{k−1}` as `(c̃, s̃)`.
    fn step_residual_chain(&mut self, zeta_old: f64) -> (f64, f64) {
        // P̂_k, then P_k, applied to the β-chain.
        let (betaacute, betacheck) = if self.damped {
            (self.chat * self.betadd, -self.shat * self.betadd)
        } else {
            (self.betadd, 0.0)
        };
        let betahat = self.c * betaacute;
        self.betadd = -self.s * betaacute;

        // P̃_{k−1}; at k = 1 this is the identity.
        let thetatilde_old = self.thetatilde;
        let (ctilde, stilde, rhotilde_old) = sym_ortho(self.rhod, self.thetabar);
        self.thetatilde = stilde * self.rhobar;
        self.rhod = ctilde * self.rhobar;
        let betatilde = ctilde * self.betad + stilde * betahat;
        self.betad = -stilde * self.betad + ctilde * betahat;

        // Forward substitution for τ̃_{k−1} and τ̇_k.
        self.tautilde = (zeta_old - thetatilde_old * self.tautilde) / rhotilde_old;
        self.taud = (self.zeta - self.thetatilde * self.tautilde) / self.rhod;

        if self.k >= 2 {
            self.lemma_max = self.lemma_max.max((self.tautilde - betatilde).abs());
        }

        if self.damped {
            self.d += betacheck * betacheck;
        }
        let gap = self.betad - self.taud;
        self.est.norm_r = sqrt(self.d + gap * gap + self.betadd * self.betadd);
        (ctilde, stilde)
    }

    fn step_norm_cond_chain(&mut self, alpha_next: f64, beta_next: f64, rhobar_old: f64, cbar_rho: f64) {
        self.norm_a2 += beta_next * beta_next;
        self.est.norm_a = sqrt(self.norm_a2);
        self.norm_a2 += alpha_next * alpha_next + self.lambda * self.lambda;

        if self.k > 1 {
            self.max_rbar = self.max_rbar.max(rhobar_old);
            self.min_rbar = self.min_rbar.min(rhobar_old);
        }
        self.est.cond = self.max_rbar.max(cbar_rho) / self.min_rbar.min(cbar_rho);
    }

    /// Current iteration index (0 before the first [`advance`](Self::advance)).
    pub fn k(&self) -> usize {
        self.k
    }

    pub fn estimates(&self) -> &Estimates {
        &self.est
    }

    /// `|ζ̄_{k+1}|`, the estimate of `‖Āᵀ r̄_k‖`.
    pub fn atr_norm(&self) -> f64 {
        self.zetabar.abs()
    }

    /// Largest `|τ̃ᵢ − β̃ᵢ|` over finalized indices so far (zero in exact arithmetic).
    pub fn lemma_residual(&self) -> f64 {
        self.lemma_max
    }

    /// Signed `ζ̄_{k+1}`.
    pub fn zetabar(&self) -> f64 {
        self.zetabar
    }

    pub fn x(&self) -> &[f64] {
        &self.x
    }

    pub fn into_x(self) -> Vec<f64> {
        self.x
    }

    /// Rotation pairs `(c, s)` last produced by `P_k`, `P̄_k` and `P̂_k`.
    pub fn rotations(&self) -> [(f64, f64); 3] {
        [(self.c, self.s), (self.cbar, self.sbar), (self.chat, self.shat)]
    }

    /// Positive diagonals `ρ_k`, `ρ̄_k`, `ρ̇_k`.
    pub fn diagonals(&self) -> [f64; 3] {
        [self.rho, self.rhobar, self.rhod]
    }

    /// The β-chain values `β̈_{k+1}`, `β̇_k` and the damping accumulator `d_k`.
    pub fn beta_chain(&self) -> [f64; 3] {
        [self.betadd, self.betad, self.d]
    }

    /// Whether every scalar of the state is finite.
    pub fn is_finite(&self) -> bool {
        [
            self.alphabar,
            self.rho,
            self.rhobar,
            self.zeta,
            self.zetabar,
            self.betad,
            self.betadd,
            self.rhod,
            self.tautilde,
            self.taud,
            self.est.norm_r,
            self.est.norm_x,
            self.est.norm_a,
            self.est.cond,
        ]
        .iter()
        .all(|v| v.is_finite())
    }

    /// Count of persistent n-vectors (`x`, `h`, `h̄`).
    pub(crate) fn n_vectors(&self) -> usize {
        [&self.x, &self.h, &self.hbar].iter().filter(|v| !v.is_empty()).count()
    }
}
