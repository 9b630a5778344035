#include "repcov/quadrature.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <memory>
#include <mutex>
#include <numeric>
#include <queue>
#include <stdexcept>

namespace repcov {

namespace {

using Gk15 = boost::math::quadrature::gauss_kronrod<double, 15>;

inline double absval(double v) { return std::fabs(v); }
inline double absval(std::complex<double> v) { return std::abs(v); }

template <typename T>
struct PanelEval {
    T value;
    double resabs; // integral of |f|, for the round-off noise floor
};

template <typename T>
PanelEval<T> gk15_panel(const std::function<T(double)>& fn, double lo, double hi) {
    const auto& xs = Gk15::abscissa(); // non-negative half, xs[0] == 0
    const auto& ws = Gk15::weights();
    const double c = 0.5 * (lo + hi);
    const double h = 0.5 * (hi - lo);
    const T center = fn(c);
    T acc = ws[0] * center;
    double l1 = ws[0] * absval(center);
    for (std::size_t i = 1; i < xs.size(); ++i) {
        const T a = fn(c + h * xs[i]);
        const T b = fn(c - h * xs[i]);
        acc += ws[i] * (a + b);
        l1 += ws[i] * (absval(a) + absval(b));
    }
    return {acc * h, l1 * h};
}

template <typename T>
struct Panel {
    double lo, hi;
    T fine;     // left + right child panels
    T left, right;
    double resabs;
    double err; // |whole - fine|, zeroed once it reaches the noise floor
};

template <typename T>
struct PanelWorse {
    bool operator()(const Panel<T>& a, const Panel<T>& b) const {
        if (a.err != b.err) return a.err < b.err;
        return a.lo < b.lo; // deterministic tie-break
    }
};

template <typename T>
Panel<T> make_panel(const std::function<T(double)>& fn, double lo, double hi, T whole) {
    const double mid = 0.5 * (lo + hi);
    const PanelEval<T> left = gk15_panel(fn, lo, mid);
    const PanelEval<T> right = gk15_panel(fn, mid, hi);
    Panel<T> p;
    p.lo = lo;
    p.hi = hi;
    p.left = left.value;
    p.right = right.value;
    p.fine = left.value + right.value;
    p.resabs = left.resabs + right.resabs;
    p.err = absval(whole - p.fine);
    // estimates at the rounding scale of |f| carry no information; treating
    // them as converged stops the panel count from spiralling on flat pieces
    if (p.err <= 64.0 * std::numeric_limits<double>::epsilon() * p.resabs) p.err = 0.0;
    return p;
}

template <typename T>
T integrate_impl(const std::function<T(double)>& fn, double lo, double hi,
                 double rel_tol, double abs_floor, QuadratureDiagnostics* diag) {
    QuadratureDiagnostics local;
    QuadratureDiagnostics& d = diag ? *diag : local;
    d = QuadratureDiagnostics{};
    if (!(hi > lo)) {
        d.converged = true;
        return T{};
    }

    constexpr int kMaxPanels = 8000;
    std::priority_queue<Panel<T>, std::vector<Panel<T>>, PanelWorse<T>> queue;
    T whole = gk15_panel(fn, lo, hi).value;
    queue.push(make_panel(fn, lo, hi, whole));

    T total = queue.top().fine;
    double err_sum = queue.top().err;
    int panels = 1;

    const auto tolerance = [&] { return std::max(abs_floor, rel_tol * absval(total)); };

    while (err_sum > tolerance() && panels < kMaxPanels) {
        Panel<T> worst = queue.top();
        queue.pop();
        if (!std::isfinite(worst.err) || !std::isfinite(absval(worst.fine))) {
            d.worst_lo = worst.lo;
            d.worst_hi = worst.hi;
            d.worst_error = worst.err;
            d.achieved_abs_error = err_sum;
            d.panels = panels;
            throw QuadratureError("integrate: non-finite integrand", d);
        }
        const double mid = 0.5 * (worst.lo + worst.hi);
        if (mid <= worst.lo || mid >= worst.hi) {
            // interval at floating-point resolution; accept as-is
            queue.push(Panel<T>{worst.lo, worst.hi, worst.fine, worst.left, worst.right,
                                worst.resabs, 0.0});
            err_sum -= worst.err;
            continue;
        }
        Panel<T> a = make_panel(fn, worst.lo, mid, worst.left);
        Panel<T> b = make_panel(fn, mid, worst.hi, worst.right);
        total += (a.fine + b.fine) - worst.fine;
        err_sum += (a.err + b.err) - worst.err;
        queue.push(a);
        queue.push(b);
        ++panels;
    }

    d.achieved_abs_error = err_sum;
    d.panels = panels;
    if (!queue.empty()) {
        const Panel<T>& worst = queue.top();
        d.worst_lo = worst.lo;
        d.worst_hi = worst.hi;
        d.worst_error = worst.err;
    }
    d.converged = err_sum <= tolerance();
    if (!d.converged)
        throw QuadratureError("integrate: panel budget exhausted before tolerance", d);
    return total;
}

} // namespace

double integrate(const std::function<double(double)>& fn, double lo, double hi,
                 double rel_tol, double abs_floor, QuadratureDiagnostics* diag) {
    return integrate_impl<double>(fn, lo, hi, rel_tol, abs_floor, diag);
}

std::complex<double> integrate_complex(const std::function<std::complex<double>(double)>& fn,
                                        double lo, double hi, double rel_tol, double abs_floor,
                                        QuadratureDiagnostics* diag) {
    return integrate_impl<std::complex<double>>(fn, lo, hi, rel_tol, abs_floor, diag);
}

namespace {

// Symmetric tridiagonal QL with implicit shifts, rotating z alongside so that
// z ends up holding the first component of each eigenvector. d = diagonal,
// e = subdiagonal (e[n-1] scratch). Eigenvalues replace d.
void tridiag_ql(std::vector<double>& d, std::vector<double>& e, std::vector<double>& z) {
    const int n = static_cast<int>(d.size());
    if (n <= 1) return;
    e[n - 1] = 0.0;
    const double eps = std::numeric_limits<double>::epsilon();
    for (int l = 0; l < n; ++l) {
        int iter = 0;
        int m;
        do {
            for (m = l; m < n - 1; ++m) {
                const double dd = std::fabs(d[m]) + std::fabs(d[m + 1]);
                if (std::fabs(e[m]) <= eps * dd) break;
            }
            if (m != l) {
                if (iter++ == 50)
                    throw std::runtime_error("laguerre_rule: tridiagonal QL failed to converge");
                double g = (d[l + 1] - d[l]) / (2.0 * e[l]);
                double r = std::hypot(g, 1.0);
                g = d[m] - d[l] + e[l] / (g + std::copysign(r, g));
                double s = 1.0, c = 1.0, p = 0.0;
                int i;
                for (i = m - 1; i >= l; --i) {
                    double f = s * e[i];
                    const double b = c * e[i];
                    r = std::hypot(f, g);
                    e[i + 1] = r;
                    if (r == 0.0) {
                        d[i + 1] -= p;
                        e[m] = 0.0;
                        break;
                    }
                    s = f / r;
                    c = g / r;
                    g = d[i + 1] - p;
                    r = (d[i] - g) * s + 2.0 * c * b;
                    p = s * r;
                    d[i + 1] = g + p;
                    g = c * r - b;
                    f = z[i + 1];
                    z[i + 1] = s * z[i] + c * f;
                    z[i] = c * z[i] - s * f;
                }
                if (r == 0.0 && i >= l) continue;
                d[l] -= p;
                e[l] = g;
                e[m] = 0.0;
            }
        } while (m != l);
    }
}

LaguerreRule build_laguerre(int n, int alpha) {
    if (n < 1) throw std::invalid_argument("laguerre_rule: need n >= 1 nodes");
    if (alpha < 0) throw std::invalid_argument("laguerre_rule: alpha must be >= 0");
    std::vector<double> d(n), e(n), z(n, 0.0);
    for (int i = 0; i < n; ++i) d[i] = 2.0 * i + alpha + 1.0;
    for (int i = 0; i + 1 < n; ++i) e[i] = std::sqrt((i + 1.0) * (i + 1.0 + alpha));
    z[0] = 1.0;
    tridiag_ql(d, e, z);

    std::vector<int> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](int a, int b) { return d[a] < d[b]; });

    LaguerreRule rule;
    rule.nodes.resize(n);
    rule.weights.resize(n);
    for (int i = 0; i < n; ++i) {
        rule.nodes[i] = d[order[i]];
        rule.weights[i] = z[order[i]] * z[order[i]]; // already normalized: sum = 1
    }
    return rule;
}

} // namespace

double gk15_fixed(const std::function<double(double)>& fn, double lo, double hi) {
    return gk15_panel<double>(fn, lo, hi).value;
}

const LaguerreRule& laguerre_rule(int n, int alpha) {
    static std::mutex mu;
    static std::map<std::pair<int, int>, std::unique_ptr<LaguerreRule>> cache;
    std::lock_guard<std::mutex> lock(mu);
    auto& slot = cache[{n, alpha}];
    if (!slot) slot = std::make_unique<LaguerreRule>(build_laguerre(n, alpha));
    return *slot;
}

} // namespace repcov
