#pragma once

#include <cmath>
#include <map>
#include <mutex>
#include <stdexcept>
#include <utility>
#include <vector>

namespace dworklab {

// phi = c |g|^2 where g-hat(xi) = exp(-1 / (1 - 4 xi^2)) on (-1/2, 1/2), c chosen so phi(0) = 1.
// Then phi >= 0 and phi-hat = c (g-hat * g-hat) / (2 pi) lives in [-1, 1].
// Fourier convention: f-hat(xi) = int f(x) e^{-i x xi} dx.
class PhiProfile {
public:
    static constexpr std::size_t kSamples = std::size_t(1) << 14;
    static constexpr double kYMax = 256;  // phi < 1e-11 beyond 200

    static const PhiProfile& standard() {
        static const PhiProfile p;
        return p;
    }

    static double g_hat(double xi) {
        double u = 1 - 4 * xi * xi;
        return u > 0 ? std::exp(-1 / u) : 0.0;
    }

    double phi(double y) const { return interpolate(phi_, std::fabs(y) / hy_); }
    double phi_hat(double xi) const {
        xi = std::fabs(xi);
        return xi >= 1 ? 0.0 : interpolate(phi_hat_, xi / hxi_);
    }
    double norm_l2() const { return norm_; }
    // Normalizing constant c in phi = c g^2.
    double scale() const { return scale_; }

    // Largest d with phi(y) >= 1 - c0 / 2 on [0, d], by bisection on the interpolant.
    double delta0(double c0) const {
        if (!(c0 > 0 && c0 < 0.5)) throw std::invalid_argument("c0 must lie in (0, 1/2)");
        double target = 1 - c0 / 2;
        std::size_t i = 1;
        while (i < phi_.size() && phi_[i] >= target) ++i;
        if (i == phi_.size()) throw std::runtime_error("phi never drops below 1 - c0/2 on the table");
        double lo = (i - 1) * hy_, hi = i * hy_;
        for (int it = 0; it < 200 && hi - lo > 1e-15; ++it) {
            double mid = (lo + hi) / 2;
            (phi(mid) >= target ? lo : hi) = mid;
        }
        return lo;
    }

    const std::vector<double>& phi_table() const { return phi_; }
    const std::vector<double>& phi_hat_table() const { return phi_hat_; }
    double y_step() const { return hy_; }
    double xi_step() const { return hxi_; }

private:
    PhiProfile() {
        // g(y) = (1/pi) int_0^{1/2} g-hat(xi) cos(y xi) d xi; the integrand is flat at 1/2 so the
        // trapezoid rule is spectrally accurate. Phasors are advanced by rotation per node.
        const std::size_t nodes = 4096;
        const double h = 0.5 / nodes;
        hy_ = kYMax / kSamples;
        std::vector<double> g(kSamples + 1, 0.0);
        for (std::size_t k = 0; k <= nodes; ++k) {
            double xi = k * h;
            double w = g_hat(xi) * h * (k == 0 ? 0.5 : 1.0) / M_PI;
            if (w == 0) continue;
            double cr = std::cos(hy_ * xi), sr = std::sin(hy_ * xi);
            double c = 1, s = 0;
            for (std::size_t i = 0; i <= kSamples; ++i) {
                g[i] += w * c;
                double nc = c * cr - s * sr;
                s = s * cr + c * sr;
                c = nc;
                if ((i & 1023) == 1023) {  // resync to stop drift
                    c = std::cos((i + 1) * hy_ * xi);
                    s = std::sin((i + 1) * hy_ * xi);
                }
            }
        }
        scale_ = 1 / (g[0] * g[0]);
        phi_.resize(kSamples + 1);
        for (std::size_t i = 0; i <= kSamples; ++i) phi_[i] = g[i] * g[i] * scale_;

        // phi-hat on [0, 1] from the discrete autocorrelation of g-hat on a grid of step 1/kSamples.
        hxi_ = 1.0 / kSamples;
        std::size_t half = kSamples / 2;
        std::vector<double> gh(kSamples + 1);
        for (std::size_t j = 0; j <= kSamples; ++j) gh[j] = g_hat((static_cast<double>(j) - half) * hxi_);
        phi_hat_.assign(kSamples + 1, 0.0);
        for (std::size_t i = 0; i <= kSamples; ++i) {
            double acc = 0;
            for (std::size_t j = i; j <= kSamples; ++j) acc += gh[j] * gh[j - i];
            phi_hat_[i] = acc * hxi_ * scale_ / (2 * M_PI);
        }

        // ||phi||_2^2 = 2 int_0^Y phi^2, Simpson on the table.
        double acc = 0;
        for (std::size_t i = 0; i <= kSamples; ++i) {
            double w = (i == 0 || i == kSamples) ? 1 : (i % 2 ? 4 : 2);
            acc += w * phi_[i] * phi_[i];
        }
        norm_ = std::sqrt(2 * acc * hy_ / 3);
    }

    // Catmull-Rom cubic on an even table sampled at integers, argument in table units.
    static double interpolate(const std::vector<double>& t, double u) {
        std::size_t last = t.size() - 1;
        if (u >= static_cast<double>(last)) return 0.0;
        std::size_t i = static_cast<std::size_t>(u);
        double f = u - i;
        auto at = [&](long j) -> double {
            if (j < 0) j = -j;  // even extension
            if (j > static_cast<long>(last)) return 0.0;
            return t[static_cast<std::size_t>(j)];
        };
        double p0 = at(static_cast<long>(i) - 1), p1 = at(i), p2 = at(i + 1), p3 = at(i + 2);
        return p1 + 0.5 * f * (p2 - p0 + f * (2 * p0 - 5 * p1 + 4 * p2 - p3 + f * (3 * (p1 - p2) + p3 - p0)));
    }

    double hy_ = 0, hxi_ = 0, scale_ = 0, norm_ = 0;
    std::vector<double> phi_, phi_hat_;
};

// Gauss-Legendre nodes and weights on [-1, 1], cached per order.
inline const std::pair<std::vector<double>, std::vector<double>>& gauss_legendre(std::size_t n) {
    static std::mutex mu;
    static std::map<std::size_t, std::pair<std::vector<double>, std::vector<double>>> cache;
    std::lock_guard<std::mutex> lock(mu);
    auto it = cache.find(n);
    if (it != cache.end()) return it->second;
    std::vector<double> x(n), w(n);
    for (std::size_t i = 0; i < (n + 1) / 2; ++i) {
        long double z = std::cos(M_PI * (i + 0.75) / (n + 0.5L)), dp = 0;
        for (int it2 = 0; it2 < 100; ++it2) {
            long double p0 = 1, p1 = z;
            for (std::size_t k = 2; k <= n; ++k) {
                long double p2 = ((2 * k - 1) * z * p1 - (k - 1) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            if (n == 1) p0 = 1, p1 = z;
            dp = n * (z * p1 - p0) / (z * z - 1);
            long double dz = p1 / dp;
            z -= dz;
            if (std::fabs(static_cast<double>(dz)) < 1e-19) break;
        }
        x[i] = -static_cast<double>(z);
        x[n - 1 - i] = static_cast<double>(z);
        w[i] = w[n - 1 - i] = static_cast<double>(2 / ((1 - z * z) * dp * dp));
    }
    return cache.emplace(n, std::make_pair(std::move(x), std::move(w))).first->second;
}

}  // namespace dworklab
