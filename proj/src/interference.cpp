#include "repcov/interference.hpp"
#include "repcov/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <numbers>
#include <stdexcept>

namespace repcov {

namespace {

// Euler-summation inversion weights: 2M+1 contour nodes s_k = (shift + i pi k)/x
// with binomially tapered tail weights. Cached per depth.
struct EulerWeights {
    double shift;
    std::vector<double> w;
};

EulerWeights build_euler_weights(int m) {
    if (m < 1) throw std::invalid_argument("invert_cdf_transform: euler depth must be >= 1");
    EulerWeights ew;
    ew.shift = m * std::numbers::ln10 / 3.0;
    const double scale = std::pow(10.0, m / 3.0);

    // xi_k: 1/2, then 1 through k = M, then suffix sums of Binomial(M, 1/2).
    std::vector<double> xi(2 * m + 1, 1.0);
    xi[0] = 0.5;
    std::vector<double> binom(m + 1);
    binom[0] = std::pow(0.5, m);
    for (int k = 0; k < m; ++k) binom[k + 1] = binom[k] * (m - k) / (k + 1.0);
    double suffix = 0.0;
    for (int j = m; j >= 1; --j) {
        suffix += binom[j];
        xi[m + j] = suffix;
    }

    ew.w.resize(2 * m + 1);
    for (int k = 0; k <= 2 * m; ++k) ew.w[k] = (k % 2 == 0 ? scale : -scale) * xi[k];
    return ew;
}

const EulerWeights& euler_weights(int m) {
    static std::mutex mu;
    static std::map<int, EulerWeights> cache;
    std::lock_guard<std::mutex> lock(mu);
    auto it = cache.find(m);
    if (it == cache.end()) it = cache.emplace(m, build_euler_weights(m)).first;
    return it->second;
}

} // namespace

void LaplaceSpec::validate() const {
    cfg.validate();
    if (!(quad_tol > 0.0 && quad_tol <= 1e-3))
        throw std::invalid_argument("LaplaceSpec: quad_tol must be in (0, 1e-3]");
    if (channel != cfg.channel)
        throw std::invalid_argument("LaplaceSpec: channel must match cfg.channel");
}

std::complex<double> laplace_transform(std::complex<double> s, const LaplaceSpec& spec) {
    if (s.real() < 0.0)
        throw std::invalid_argument("laplace_transform: need Re(s) >= 0");
    if (s == std::complex<double>(0.0, 0.0)) return {1.0, 0.0};

    const std::complex<double> z = s * spec.cfg.P_t; // L_{P_t I}(s) = L_I(P_t s)
    const double alpha = spec.cfg.alpha;
    const auto& prof = spec.prof;

    std::function<std::complex<double>(double)> integrand;
    double lo = 0.0;
    if (spec.channel == Channel::PathLossOnly) {
        integrand = [&](double r) -> std::complex<double> {
            const double w = std::pow(r, -alpha);
            // exp(-z w) underflows once Re(z) w is large; the limit of the
            // bracket is 1, which also covers r -> 0.
            std::complex<double> bracket;
            if (!std::isfinite(w) || z.real() * w > 700.0)
                bracket = 1.0;
            else
                bracket = 1.0 - std::exp(-z * w);
            return bracket * (prof.duty_cycle(r) * r);
        };
        // The bracket oscillates without bound as r -> 0 when Im(z) != 0.
        // Truncate the core: |bracket| <= 2, so the dropped piece is at most
        // lo^2 = 1e-12 D_o R_c^2, i.e. <= 2e-12 of the whole integral.
        lo = 1e-6 * spec.cfg.R_c * std::sqrt(prof.base_duty());
    } else {
        integrand = [&](double r) -> std::complex<double> {
            const double ra = std::pow(r, alpha);
            return z / (z + ra) * (prof.duty_cycle(r) * r);
        };
    }

    QuadratureDiagnostics diag;
    const std::complex<double> radial =
        integrate_complex(integrand, lo, spec.cfg.R_c, spec.quad_tol, 1e-14, &diag);
    return std::exp(-2.0 * std::numbers::pi * spec.cfg.lambda_o * radial);
}

double interference_atom0(const LaplaceSpec& spec) {
    return std::exp(-spec.cfg.lambda_o * cell_constant(spec.prof, spec.cfg));
}

double invert_cdf_transform(const std::function<std::complex<double>(std::complex<double>)>& transform,
                            double x, int euler_depth) {
    if (!(x > 0.0)) throw std::invalid_argument("invert_cdf_transform: need x > 0");
    const EulerWeights& ew = euler_weights(euler_depth);
    double acc = 0.0;
    for (int k = 0; k < static_cast<int>(ew.w.size()); ++k) {
        const std::complex<double> s(ew.shift / x, std::numbers::pi * k / x);
        const std::complex<double> q = transform(s) / s; // (1/s) L(s)
        acc += ew.w[k] * q.real();
    }
    return acc / x;
}

InterferenceCdf::InterferenceCdf(LaplaceSpec spec, int euler_depth)
    : spec_(std::move(spec)),
      euler_depth_(euler_depth),
      overshoot_count_(std::make_shared<std::atomic<long>>(0)) {
    spec_.validate();
    if (euler_depth_ < 1) throw std::invalid_argument("InterferenceCdf: euler_depth must be >= 1");
    atom0_ = interference_atom0(spec_);
    x_eps_ = 1e-12 * spec_.cfg.P_t * std::pow(spec_.cfg.R_c, -spec_.cfg.alpha);
}

InterferenceCdf InterferenceCdf::with_cache(LaplaceSpec spec, int grid_size, int euler_depth) {
    InterferenceCdf cdf(std::move(spec), euler_depth);
    cdf.build_cache(grid_size);
    return cdf;
}

double InterferenceCdf::invert_at(double x) const {
    const auto transform = [this](std::complex<double> s) { return laplace_transform(s, spec_); };
    const double raw = invert_cdf_transform(transform, x, euler_depth_);
    if (raw < atom0_ - 0.01 || raw > 1.01) overshoot_count_->fetch_add(1);
    return std::clamp(raw, atom0_, 1.0);
}

double InterferenceCdf::direct_value(double x) const {
    if (x < 0.0) return 0.0;
    if (x <= x_eps_) return atom0_;
    return invert_at(x);
}

double InterferenceCdf::value(double x) const {
    if (x < 0.0) return 0.0;
    if (x <= x_eps_) return atom0_;
    if (cache_x_.empty()) return invert_at(x);
    if (x < cache_x_.front()) {
        // F sits in [atom0, atom0 + 1e-4] here; stitch monotonically
        const double u0 = std::log(x_eps_), u1 = std::log(cache_x_.front());
        const double t = (std::log(x) - u0) / (u1 - u0);
        return atom0_ + t * (cache_f_.front() - atom0_);
    }
    if (x > cache_x_.back()) return cache_f_.back(); // F in [1 - 2e-4, 1]
    return cache_eval(x);
}

double InterferenceCdf::cache_lo() const { return cache_x_.empty() ? 0.0 : cache_x_.front(); }
double InterferenceCdf::cache_hi() const { return cache_x_.empty() ? 0.0 : cache_x_.back(); }

namespace {

// Fritsch-Carlson monotone cubic slopes on (u, f); returns per-node slopes.
std::vector<double> pchip_slopes(const std::vector<double>& u, const std::vector<double>& f) {
    const std::size_t n = u.size();
    std::vector<double> h(n - 1), delta(n - 1), m(n, 0.0);
    for (std::size_t i = 0; i + 1 < n; ++i) {
        h[i] = u[i + 1] - u[i];
        delta[i] = (f[i + 1] - f[i]) / h[i];
    }
    if (n == 2) {
        m[0] = m[1] = delta[0];
        return m;
    }
    const auto end_slope = [](double hn, double hf, double dn, double df) {
        double s = ((2.0 * hn + hf) * dn - hn * df) / (hn + hf);
        if (s * dn <= 0.0) return 0.0;
        if (df * dn <= 0.0 && std::fabs(s) > 3.0 * std::fabs(dn)) return 3.0 * dn;
        return s;
    };
    m[0] = end_slope(h[0], h[1], delta[0], delta[1]);
    m[n - 1] = end_slope(h[n - 2], h[n - 3], delta[n - 2], delta[n - 3]);
    for (std::size_t i = 1; i + 1 < n; ++i) {
        if (delta[i - 1] * delta[i] <= 0.0) {
            m[i] = 0.0;
            continue;
        }
        const double w1 = 2.0 * h[i] + h[i - 1];
        const double w2 = h[i] + 2.0 * h[i - 1];
        m[i] = (w1 + w2) / (w1 / delta[i - 1] + w2 / delta[i]);
    }
    return m;
}

} // namespace

void InterferenceCdf::build_cache(int grid_size) {
    if (grid_size < 64) throw std::invalid_argument("InterferenceCdf: cache grid_size must be >= 64");

    // Nothing to resolve when the CDF is flat at ~1 already.
    if (atom0_ >= 1.0 - 2e-4) return;

    const double f_lo_target = atom0_ + 1e-4;
    const double f_hi_target = 1.0 - 1e-4;

    for (int attempt = 0; attempt < 3; ++attempt) {
        // Bracket the two crossings on a log-x axis, then bisect.
        double lo = spec_.cfg.P_t * std::pow(spec_.cfg.R_c, -spec_.cfg.alpha);
        int guard = 0;
        while (invert_at(lo) > f_lo_target && ++guard < 200) lo *= 0.125;
        double hi = lo;
        guard = 0;
        while (invert_at(hi) < f_hi_target && ++guard < 500) hi *= 8.0;

        const auto bisect = [this](double a, double b, double target, bool keep_below) {
            for (int it = 0; it < 60; ++it) {
                const double mid = std::sqrt(a * b);
                if (invert_at(mid) < target)
                    a = mid;
                else
                    b = mid;
            }
            return keep_below ? a : b;
        };
        const double x_lo = bisect(lo, hi, f_lo_target, true);
        const double x_hi = bisect(x_lo, hi, f_hi_target, false);

        std::vector<double> xs(grid_size), fs(grid_size);
        const double log_lo = std::log(x_lo), log_hi = std::log(x_hi);
        for (int i = 0; i < grid_size; ++i) {
            xs[i] = std::exp(log_lo + (log_hi - log_lo) * i / (grid_size - 1));
            fs[i] = invert_at(xs[i]);
        }
        xs.front() = x_lo;
        xs.back() = x_hi;

        double worst_violation = 0.0;
        for (int i = 0; i + 1 < grid_size; ++i)
            worst_violation = std::max(worst_violation, fs[i] - fs[i + 1]);
        if (worst_violation > 1e-6) {
            euler_depth_ *= 2; // ringing: deepen the series and rebuild
            continue;
        }
        for (int i = 0; i + 1 < grid_size; ++i) fs[i + 1] = std::max(fs[i + 1], fs[i]);

        cache_x_ = std::move(xs);
        cache_f_ = std::move(fs);
        std::vector<double> u(grid_size);
        for (int i = 0; i < grid_size; ++i) u[i] = std::log(cache_x_[i]);
        cache_slope_ = pchip_slopes(u, cache_f_);
        return;
    }
    throw std::runtime_error(
        "InterferenceCdf: cache nodes stayed non-monotone after 3 attempts "
        "(euler depth now " + std::to_string(euler_depth_) + ")");
}

double InterferenceCdf::cache_eval(double x) const {
    const double u = std::log(x);
    auto it = std::upper_bound(cache_x_.begin(), cache_x_.end(), x);
    std::size_t i = (it == cache_x_.begin()) ? 0 : (it - cache_x_.begin() - 1);
    if (i >= cache_x_.size() - 1) i = cache_x_.size() - 2;

    const double u0 = std::log(cache_x_[i]), u1 = std::log(cache_x_[i + 1]);
    const double h = u1 - u0;
    const double t = (u - u0) / h;
    const double f0 = cache_f_[i], f1 = cache_f_[i + 1];
    const double m0 = cache_slope_[i] * h, m1 = cache_slope_[i + 1] * h;
    const double t2 = t * t, t3 = t2 * t;
    const double val = (2 * t3 - 3 * t2 + 1) * f0 + (t3 - 2 * t2 + t) * m0 +
                       (-2 * t3 + 3 * t2) * f1 + (t3 - t2) * m1;
    return std::clamp(val, atom0_, 1.0);
}

} // namespace repcov
