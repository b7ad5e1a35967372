#include "dht/gaussian.hpp"

#include <cmath>
#include <string>

#include "dht/errors.hpp"

namespace dht {

namespace {
void require_d1(double rho0, double rho1) {
    if (!(0.0 <= rho1 && rho1 < rho0 && rho0 < 1.0))
        throw InputError("Gaussian closed forms require 0 <= rho1 < rho0 < 1 (got rho0=" +
                         std::to_string(rho0) + ", rho1=" + std::to_string(rho1) + ")");
}

// 0.5 ln( 1 / (1 - rho^2 (1 - w)) ) for the attenuation w in (0,1];
// shared by both branches so equal inputs give bit-equal outputs.
double half_log_term(double rho, double w) {
    return -0.5 * std::log1p(-rho * rho * (1.0 - w));
}
} // namespace

GaussianScenario::GaussianScenario(double rho0_, double rho1_, double rate_)
    : rho0(rho0_), rho1(rho1_), rate(rate_) {
    require_d1(rho0, rho1);
    if (!(rate >= 0.0) || !std::isfinite(rate))
        throw InputError("GaussianScenario: rate must be a finite non-negative real");
}

double effective_rho(double rho0, double rho1) {
    require_d1(rho0, rho1);
    return (rho0 - rho1) / (1.0 - rho1);
}

double rw_gaussian(const GaussianScenario& scn) {
    double rho = effective_rho(scn.rho0, scn.rho1);
    return half_log_term(rho, std::exp(-2.0 * scn.rate));
}

SigmaHat sigma_hat_sq(const GaussianScenario& scn) {
    double e2r = std::exp(2.0 * scn.rate);
    double arg_z = (1.0 - scn.rho1) / (e2r - scn.rho1);
    double arg_y = (1.0 - scn.rho0 * scn.rho0) / (e2r - scn.rho0 * scn.rho0);
    if (arg_z >= arg_y) return {arg_z, SigmaHat::Binding::Z};
    return {arg_y, SigmaHat::Binding::Y};
}

double exponent_from_sigma(const GaussianScenario& scn, double sigma_sq) {
    if (!(sigma_sq > 0.0 && sigma_sq <= 1.0))
        throw InputError("exponent_from_sigma: sigma^2 must lie in (0,1]");
    double rho = effective_rho(scn.rho0, scn.rho1);
    double a = scn.rho1 * sigma_sq + 1.0 - scn.rho1; // Var of Z-side mixture
    return 0.5 * std::log(a / (rho * rho * sigma_sq + (1.0 - rho * rho) * a));
}

GaussianBoundDetail new_gaussian(const GaussianScenario& scn) {
    GaussianBoundDetail d{};
    d.rho = effective_rho(scn.rho0, scn.rho1);
    double em1 = std::expm1(2.0 * scn.rate);
    double c = (1.0 - d.rho) * (1.0 + scn.rho0);
    d.delta = c / (em1 + c);
    d.sigma_hat_sq = sigma_hat_sq(scn).value;
    d.term_new = half_log_term(d.rho, d.delta);
    d.term_rw = half_log_term(d.rho, std::exp(-2.0 * scn.rate));
    if (d.term_new < d.term_rw) {
        d.value = d.term_new;
        d.active_branch = GaussianBranch::New;
    } else {
        d.value = d.term_rw;
        d.active_branch = GaussianBranch::Rw;
    }
    return d;
}

double centralized_gaussian(double rho0, double rho1) {
    if (!(std::abs(rho0) < 1.0) || !(std::abs(rho1) < 1.0))
        throw InputError("centralized_gaussian: correlations must lie in (-1,1)");
    double d1 = 1.0 - rho1 * rho1;
    double d0 = 1.0 - rho0 * rho0;
    return (1.0 - rho0 * rho1) / d1 - 1.0 + 0.5 * std::log(d1 / d0);
}

RateMi rate_mi_sigma(const GaussianScenario& scn, double sigma_sq) {
    if (!(sigma_sq > 0.0 && sigma_sq <= 1.0))
        throw InputError("rate_mi_sigma: sigma^2 must lie in (0,1]");
    RateMi out{};
    out.i_xz = 0.5 * std::log((scn.rho1 * sigma_sq + 1.0 - scn.rho1) / sigma_sq);
    out.i_xy = 0.5 * std::log((scn.rho0 * scn.rho0 * sigma_sq + 1.0 - scn.rho0 * scn.rho0) /
                              sigma_sq);
    return out;
}

} // namespace dht
