#pragma once

namespace dht {

/// Bivariate unit-variance Gaussian pair: correlation rho0 under the null,
/// rho1 under the alternative, rate in nats per symbol. Closed forms below
/// are stated (and enforced) on the region 0 <= rho1 < rho0 < 1; evaluation
/// outside it is rejected, not extrapolated.
struct GaussianScenario {
    double rho0;
    double rho1;
    double rate;

    GaussianScenario(double rho0_, double rho1_, double rate_);
};

enum class GaussianBranch { New, Rw };

struct GaussianBoundDetail {
    double rho;          // effective correlation after removing the common part
    double delta;        // low-rate attenuation factor in the new branch
    double sigma_hat_sq; // optimizing conditional variance of X given U
    double term_new;
    double term_rw;
    double value;        // min(term_new, term_rw), exactly
    GaussianBranch active_branch;
};

/// (rho0 - rho1) / (1 - rho1).
double effective_rho(double rho0, double rho1);

/// 0.5 ln( 1 / (1 - rho^2 + rho^2 e^{-2R}) ).
double rw_gaussian(const GaussianScenario& scn);

struct SigmaHat {
    double value;
    enum class Binding { Z, Y } binding; // which rate constraint pins sigma^2
};

/// max( (1-rho1)/(e^{2R}-rho1), (1-rho0^2)/(e^{2R}-rho0^2) ); at R=0 both
/// arguments equal 1 (not an error).
SigmaHat sigma_hat_sq(const GaussianScenario& scn);

/// 0.5 ln[ (rho1 s2 + 1 - rho1) / (rho^2 s2 + (1-rho^2)(rho1 s2 + 1 - rho1)) ]
/// for s2 in (0, 1]; decreasing in s2.
double exponent_from_sigma(const GaussianScenario& scn, double sigma_sq);

/// Full detail of the min-form bound; value equals exponent_from_sigma at
/// sigma_hat_sq (the two derivations coincide).
GaussianBoundDetail new_gaussian(const GaussianScenario& scn);

/// KL of the two bivariate Gaussians:
/// (1 - rho0 rho1)/(1 - rho1^2) - 1 + 0.5 ln((1 - rho1^2)/(1 - rho0^2)).
/// Defined for |rho_i| < 1 (no D1 restriction; it is not symmetric).
double centralized_gaussian(double rho0, double rho1);

struct RateMi {
    double i_xz; // 0.5 ln[(rho1 s2 + 1 - rho1)/s2]
    double i_xy; // 0.5 ln[(rho0^2 s2 + 1 - rho0^2)/s2]
};

/// The two rate-constraint mutual informations at conditional variance s2.
RateMi rate_mi_sigma(const GaussianScenario& scn, double sigma_sq);

} // namespace dht
