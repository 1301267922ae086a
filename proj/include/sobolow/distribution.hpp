#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "sobolow/core.hpp"
#include "sobolow/errors.hpp"
#include "sobolow/quadrature.hpp"
#include "sobolow/special.hpp"

namespace sobolow {

enum class Family { Uniform, Normal, Triangular, Gumbel, Laplace, Cauchy, Beta, Gamma };

inline const char* family_name(Family f) {
    switch (f) {
        case Family::Uniform: return "uniform";
        case Family::Normal: return "normal";
        case Family::Triangular: return "triangular";
        case Family::Gumbel: return "gumbel";
        case Family::Laplace: return "laplace";
        case Family::Cauchy: return "cauchy";
        case Family::Beta: return "beta";
        case Family::Gamma: return "gamma";
    }
    return "?";
}

// One-dimensional absolutely continuous law, possibly truncated to an
// interval. Immutable value type: pdf/cdf/quantile, the potential derivative
// V' = -(log pdf)', the boundary-corrected score, Fisher information, and
// inverse-transform sampling. Conventions:
//  * beta(alpha, beta) lives on [-1,1] with density ~ (1-x)^(alpha-1)(1+x)^(beta-1),
//  * gamma(shape, rate) on (0, inf),
//  * normal(mean, sd), gumbel/laplace/cauchy(location, scale),
//  * at density kinks (triangular vertex, laplace center) one-sided
//    quantities use the left limit.
class Distribution1D {
public:
    static Distribution1D uniform(double a, double b) {
        require(b > a, "uniform: need a < b");
        return Distribution1D(Family::Uniform, {a, b}, a, b);
    }
    static Distribution1D normal(double mean, double sd) {
        require(sd > 0.0, "normal: need sd > 0");
        return Distribution1D(Family::Normal, {mean, sd}, -inf(), inf());
    }
    static Distribution1D triangular(double a, double mode, double b) {
        require(b > a && mode >= a && mode <= b, "triangular: need a <= mode <= b, a < b");
        return Distribution1D(Family::Triangular, {a, mode, b}, a, b);
    }
    static Distribution1D gumbel(double loc, double scale) {
        require(scale > 0.0, "gumbel: need scale > 0");
        return Distribution1D(Family::Gumbel, {loc, scale}, -inf(), inf());
    }
    static Distribution1D laplace(double loc, double scale) {
        require(scale > 0.0, "laplace: need scale > 0");
        return Distribution1D(Family::Laplace, {loc, scale}, -inf(), inf());
    }
    static Distribution1D cauchy(double loc, double scale) {
        require(scale > 0.0, "cauchy: need scale > 0");
        return Distribution1D(Family::Cauchy, {loc, scale}, -inf(), inf());
    }
    static Distribution1D beta(double alpha, double beta_) {
        require(alpha > 0.0 && beta_ > 0.0, "beta: need positive shape parameters");
        return Distribution1D(Family::Beta, {alpha, beta_}, -1.0, 1.0);
    }
    static Distribution1D gamma(double shape, double rate) {
        require(shape > 0.0 && rate > 0.0, "gamma: need positive shape and rate");
        return Distribution1D(Family::Gamma, {shape, rate}, 0.0, inf());
    }

    Family family() const { return fam_; }
    const std::vector<double>& params() const { return par_; }
    double support_lo() const { return lo_; }
    double support_hi() const { return hi_; }
    bool bounded() const { return std::isfinite(lo_) && std::isfinite(hi_); }
    bool truncated() const { return truncated_; }

    double pdf(double x) const {
        if (x < lo_ || x > hi_) return 0.0;
        return base_pdf(x) / mass_;
    }

    double cdf(double x) const {
        if (x <= lo_) return 0.0;
        if (x >= hi_) return 1.0;
        return (base_cdf(x) - cdf_lo_) / mass_;
    }

    double quantile(double u) const {
        if (!(u > 0.0 && u < 1.0)) throw std::invalid_argument("quantile: u must be in (0,1)");
        double ub = cdf_lo_ + u * mass_;
        if (has_closed_quantile()) return base_quantile(ub);
        return invert_cdf(u);
    }

    // V'(x) = -(log pdf)'(x); truncation rescales the density so V' does not
    // change. Left limit at kinks.
    double potential_deriv(double x) const {
        if (x < lo_ || x > hi_) throw OutsideSupport("potential_deriv: point outside support");
        switch (fam_) {
            case Family::Uniform: return 0.0;
            case Family::Normal: return (x - par_[0]) / (par_[1] * par_[1]);
            case Family::Triangular: {
                double a = par_[0], c = par_[1], b = par_[2];
                if (x <= c && c > a) return -1.0 / std::max(x - a, tiny());
                return 1.0 / std::max(b - x, tiny());
            }
            case Family::Gumbel: {
                double u = (x - par_[0]) / par_[1];
                return (1.0 - std::exp(-u)) / par_[1];
            }
            case Family::Laplace:
                return (x > par_[0] ? 1.0 : -1.0) / par_[1];
            case Family::Cauchy: {
                double z = x - par_[0];
                return 2.0 * z / (z * z + par_[1] * par_[1]);
            }
            case Family::Beta: {
                double a = par_[0], b = par_[1];
                return (a - 1.0) / std::max(1.0 - x, tiny()) - (b - 1.0) / std::max(1.0 + x, tiny());
            }
            case Family::Gamma:
                return par_[1] - (par_[0] - 1.0) / std::max(x, tiny());
        }
        return 0.0;
    }

    // Density value at the support edges (limit from inside; may be +inf for
    // beta/gamma shapes below one).
    double boundary_density_lo() const {
        if (!std::isfinite(lo_)) return 0.0;
        return edge_density(lo_, +1);
    }
    double boundary_density_hi() const {
        if (!std::isfinite(hi_)) return 0.0;
        return edge_density(hi_, -1);
    }
    bool pdf_vanishes_at_boundaries() const {
        return boundary_density_lo() == 0.0 && boundary_density_hi() == 0.0;
    }

    // Whether the boundary-corrected score exists and is square integrable.
    bool score_supported() const {
        switch (fam_) {
            case Family::Uniform: return false;
            case Family::Triangular:
                return boundary_density_lo() > 0.0 && boundary_density_hi() > 0.0;
            case Family::Beta: {
                bool lo_ok = lo_ > -1.0 || par_[1] > 2.0;
                bool hi_ok = hi_ < 1.0 || par_[0] > 2.0;
                return lo_ok && hi_ok;
            }
            case Family::Gamma:
                return lo_ > 0.0 || par_[0] > 2.0;
            default:
                return true;
        }
    }

    // Z(x) = (log p)'(x) - (p(b) - p(a)), the constant chosen so that Z
    // integrates to zero against p. Terms at infinite ends vanish.
    double score(double x) const {
        if (!score_supported())
            throw UnsupportedForBounds(std::string("score undefined for ") + describe());
        if (x < lo_ || x > hi_) throw OutsideSupport("score: point outside support");
        return -potential_deriv(x) - (boundary_density_hi() - boundary_density_lo());
    }

    double fisher_information() const {
        if (!score_supported())
            throw UnsupportedForBounds(std::string("fisher information undefined for ") + describe());
        if (!truncated_) {
            double s = 0.0;
            switch (fam_) {
                case Family::Normal: s = par_[1]; return 1.0 / (s * s);
                case Family::Laplace: s = par_[1]; return 1.0 / (s * s);
                case Family::Gumbel: s = par_[1]; return 1.0 / (s * s);
                case Family::Cauchy: s = par_[1]; return 0.5 / (s * s);
                default: break;
            }
        }
        double m1 = expectation([this](double x) { return score(x); }, 1e-12);
        double m2 = expectation([this](double x) { double z = score(x); return z * z; }, 1e-11);
        return m2 - m1 * m1;
    }

    // E[f(X)], adaptive quadrature. Bounded supports integrate f * pdf in x,
    // split at density kinks. Unbounded supports with a closed quantile
    // integrate f(Q(u)) over the unit interval so the tails are weighted
    // exactly; the remaining case (gamma) integrates in x between the 1e-14
    // and 1 - 1e-14 quantiles, leaving tail mass below any tolerance used
    // here.
    template <class F>
    double expectation(F&& f, double tol = 1e-10) const {
        if (bounded()) {
            std::vector<double> cuts{lo_};
            for (double k : kink_points())
                if (k > lo_ && k < hi_) cuts.push_back(k);
            cuts.push_back(hi_);
            double s = 0.0;
            for (std::size_t i = 0; i + 1 < cuts.size(); ++i)
                s += integrate([&](double x) { return f(x) * pdf(x); }, cuts[i], cuts[i + 1],
                               tol / static_cast<double>(cuts.size()));
            return s;
        }
        if (has_closed_quantile())
            return integrate([&](double u) { return f(quantile(u)); }, 0.0, 1.0, tol);
        double a = quantile(1e-14), b = quantile(1.0 - 1e-14);
        return integrate([&](double x) { return f(x) * pdf(x); }, a, b, tol);
    }

    double mean() const {
        return expectation([](double x) { return x; }, 1e-12);
    }
    double variance() const {
        double m = mean();
        return expectation([m](double x) { return (x - m) * (x - m); }, 1e-12);
    }

    // Inverse-transform sampling; one splitmix-derived stream per call.
    std::vector<double> sample(std::size_t n, std::uint64_t seed) const {
        std::mt19937_64 rng(seed);
        std::vector<double> out(n);
        for (auto& x : out) x = quantile(canonical_u01(rng));
        return out;
    }

    // Restrict to [a, b] (intersected with the current support) and
    // renormalize. Truncating a uniform law is again a plain uniform law.
    Distribution1D truncate(double a, double b) const {
        double lo = std::max(lo_, a), hi = std::min(hi_, b);
        if (!(lo < hi)) throw EmptyMass("truncate: empty interval");
        if (fam_ == Family::Uniform) return uniform(lo, hi);
        double clo = base_cdf(lo), chi = base_cdf(hi);
        double mass = chi - clo;
        if (!(mass > 1e-300)) throw EmptyMass("truncate: interval carries no mass");
        Distribution1D d = *this;
        d.lo_ = lo;
        d.hi_ = hi;
        d.truncated_ = true;
        d.cdf_lo_ = clo;
        d.mass_ = mass;
        return d;
    }

    // Interior points where the density is continuous but not smooth.
    std::vector<double> kink_points() const {
        switch (fam_) {
            case Family::Triangular: return {par_[1]};
            case Family::Laplace: return {par_[0]};
            default: return {};
        }
    }

    // Canonical description; doubles printed round-trip exact. Used for
    // cache keys and error messages.
    std::string describe() const {
        std::ostringstream os;
        os.precision(17);
        os << family_name(fam_) << '(';
        for (std::size_t i = 0; i < par_.size(); ++i) os << (i ? "," : "") << par_[i];
        os << ')';
        if (truncated_) os << "|trunc[" << lo_ << ',' << hi_ << ']';
        return os.str();
    }

private:
    Distribution1D(Family f, std::vector<double> p, double lo, double hi)
        : fam_(f), par_(std::move(p)), lo_(lo), hi_(hi) {}

    static void require(bool ok, const char* msg) {
        if (!ok) throw std::invalid_argument(msg);
    }
    static double inf() { return std::numeric_limits<double>::infinity(); }
    static double tiny() { return std::numeric_limits<double>::min(); }

    bool has_closed_quantile() const {
        return fam_ != Family::Beta && fam_ != Family::Gamma;
    }

    double base_pdf(double x) const {
        switch (fam_) {
            case Family::Uniform:
                return 1.0 / (par_[1] - par_[0]);
            case Family::Normal:
                return std_normal_pdf((x - par_[0]) / par_[1]) / par_[1];
            case Family::Triangular: {
                double a = par_[0], c = par_[1], b = par_[2];
                if (x < c) return 2.0 * (x - a) / ((b - a) * (c - a));
                if (x > c) return 2.0 * (b - x) / ((b - a) * (b - c));
                return 2.0 / (b - a);
            }
            case Family::Gumbel: {
                double u = (x - par_[0]) / par_[1];
                return std::exp(-u - std::exp(-u)) / par_[1];
            }
            case Family::Laplace:
                return std::exp(-std::fabs(x - par_[0]) / par_[1]) / (2.0 * par_[1]);
            case Family::Cauchy: {
                double z = (x - par_[0]) / par_[1];
                return 1.0 / (M_PI * par_[1] * (1.0 + z * z));
            }
            case Family::Beta: {
                double a = par_[0], b = par_[1];
                if (x <= -1.0 || x >= 1.0) {
                    // limits, used through edge_density
                    if (x <= -1.0) return b > 1.0 ? 0.0 : (b == 1.0 ? std::exp(-log_beta_norm()) : inf());
                    return a > 1.0 ? 0.0 : (a == 1.0 ? std::exp(-log_beta_norm()) : inf());
                }
                return std::exp((a - 1.0) * std::log(1.0 - x) + (b - 1.0) * std::log(1.0 + x) - log_beta_norm());
            }
            case Family::Gamma: {
                double k = par_[0], r = par_[1];
                if (x < 0.0) return 0.0;
                if (x == 0.0) return k > 1.0 ? 0.0 : (k == 1.0 ? r : inf());
                return std::exp(k * std::log(r) + (k - 1.0) * std::log(x) - r * x - std::lgamma(k));
            }
        }
        return 0.0;
    }

    double log_beta_norm() const {
        double a = par_[0], b = par_[1];
        return (a + b - 1.0) * std::log(2.0) + std::lgamma(a) + std::lgamma(b) - std::lgamma(a + b);
    }

    double base_cdf(double x) const {
        switch (fam_) {
            case Family::Uniform: {
                double a = par_[0], b = par_[1];
                return std::clamp((x - a) / (b - a), 0.0, 1.0);
            }
            case Family::Normal:
                return std_normal_cdf((x - par_[0]) / par_[1]);
            case Family::Triangular: {
                double a = par_[0], c = par_[1], b = par_[2];
                if (x <= a) return 0.0;
                if (x >= b) return 1.0;
                if (x <= c && c > a) return (x - a) * (x - a) / ((b - a) * (c - a));
                return 1.0 - (b - x) * (b - x) / ((b - a) * (b - c));
            }
            case Family::Gumbel:
                return std::exp(-std::exp(-(x - par_[0]) / par_[1]));
            case Family::Laplace: {
                double z = (x - par_[0]) / par_[1];
                return z < 0.0 ? 0.5 * std::exp(z) : 1.0 - 0.5 * std::exp(-z);
            }
            case Family::Cauchy:
                return 0.5 + std::atan((x - par_[0]) / par_[1]) / M_PI;
            case Family::Beta: {
                if (x <= -1.0) return 0.0;
                if (x >= 1.0) return 1.0;
                return betainc_reg(par_[1], par_[0], 0.5 * (1.0 + x));
            }
            case Family::Gamma:
                if (x <= 0.0) return 0.0;
                return gammainc_lower_reg(par_[0], par_[1] * x);
        }
        return 0.0;
    }

    double base_quantile(double u) const {
        u = std::clamp(u, 1e-300, 1.0 - 1e-16);
        switch (fam_) {
            case Family::Uniform:
                return par_[0] + u * (par_[1] - par_[0]);
            case Family::Normal:
                return par_[0] + par_[1] * std_normal_quantile(u);
            case Family::Triangular: {
                double a = par_[0], c = par_[1], b = par_[2];
                double fc = (b > a && c > a) ? (c - a) / (b - a) : 0.0;
                if (u <= fc) return a + std::sqrt(u * (b - a) * (c - a));
                return b - std::sqrt((1.0 - u) * (b - a) * (b - c));
            }
            case Family::Gumbel:
                return par_[0] - par_[1] * std::log(-std::log(u));
            case Family::Laplace:
                return u < 0.5 ? par_[0] + par_[1] * std::log(2.0 * u)
                               : par_[0] - par_[1] * std::log(2.0 * (1.0 - u));
            case Family::Cauchy:
                return par_[0] + par_[1] * std::tan(M_PI * (u - 0.5));
            default:
                throw std::logic_error("base_quantile: no closed form");
        }
    }

    // Safeguarded Newton on the truncated cdf (bisection fallback keeps the
    // bracket); only needed for beta and gamma.
    double invert_cdf(double u) const {
        double a = lo_, b = hi_;
        if (!std::isfinite(b)) {
            b = std::isfinite(a) ? std::max(a + 1.0, 1.0) : 1.0;
            while (cdf(b) < u) {
                b = a + (b - a) * 2.0 + 1.0;
                if (b > 1e300) break;
            }
        }
        double x = 0.5 * (a + b);
        for (int it = 0; it < 80; ++it) {
            double fx = cdf(x) - u;
            (fx < 0.0 ? a : b) = x;
            if (b - a <= 4e-16 * std::max(1.0, std::fabs(x))) break;
            double p = pdf(x);
            double xn = (p > 0.0 && std::isfinite(p)) ? x - fx / p : x;
            if (!(xn > a && xn < b)) xn = 0.5 * (a + b);
            if (std::fabs(xn - x) <= 2e-16 * std::max(1.0, std::fabs(x))) {
                x = xn;
                break;
            }
            x = xn;
        }
        return x;
    }

    // One-sided density limit at a support edge; dir = +1 means from above.
    double edge_density(double x, int dir) const {
        if (truncated_) return base_pdf(x) / mass_;
        switch (fam_) {
            case Family::Uniform: return base_pdf(x);
            case Family::Triangular: {
                double a = par_[0], c = par_[1], b = par_[2];
                if (dir > 0) return (c > a) ? 0.0 : 2.0 / (b - a);
                return (c < b) ? 0.0 : 2.0 / (b - a);
            }
            case Family::Beta: {
                double alpha = par_[0], beta_ = par_[1];
                double shape = dir > 0 ? beta_ : alpha;
                if (shape > 1.0) return 0.0;
                if (shape == 1.0) return base_pdf(dir > 0 ? -1.0 + 1e-14 : 1.0 - 1e-14);
                return inf();
            }
            case Family::Gamma: {
                double k = par_[0];
                if (dir > 0) return k > 1.0 ? 0.0 : (k == 1.0 ? par_[1] : inf());
                return 0.0;
            }
            default:
                return base_pdf(x) / mass_;
        }
    }

    Family fam_;
    std::vector<double> par_;
    double lo_, hi_;
    bool truncated_ = false;
    double mass_ = 1.0, cdf_lo_ = 0.0;
};

} // namespace sobolow
