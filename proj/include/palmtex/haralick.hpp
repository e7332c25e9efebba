#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <vector>

#include <Eigen/Eigenvalues>

#include "palmtex/glcm.hpp"

namespace palmtex {

inline constexpr int kFeatureCount = 14;

/// Terms shared by several textural features. Entropies use the natural
/// logarithm with the convention 0 * log(0) == 0. mu/sigma are mean and
/// standard deviation of the marginals taken over the 0-based level index
/// (the features that need 1-based indices shift where required).
/// q holds Q(i,j) = sum_k p(i,k) p(j,k) / (px(i) py(k)), summed only over k
/// with px(i) * py(k) > 0; rows with px(i) == 0 are left zero.
struct Intermediates {
    double mu_x = 0.0;
    double mu_y = 0.0;
    double sigma_x = 0.0;
    double sigma_y = 0.0;
    double hx = 0.0;
    double hy = 0.0;
    double hxy = 0.0;
    double hxy1 = 0.0;
    double hxy2 = 0.0;
    std::vector<double> q;  // levels x levels, row-major
};

/// The 14 textural features of one co-occurrence matrix, in canonical order.
struct FeatureVector {
    std::array<double, kFeatureCount> f{};  // f[0] is f1, ..., f[13] is f14

    double angular_second_moment() const { return f[0]; }
    double contrast() const { return f[1]; }
    double correlation() const { return f[2]; }
    double variance() const { return f[3]; }
    double inverse_difference_moment() const { return f[4]; }
    double sum_average() const { return f[5]; }
    double sum_variance() const { return f[6]; }
    double sum_entropy() const { return f[7]; }
    double entropy() const { return f[8]; }
    double difference_variance() const { return f[9]; }
    double difference_entropy() const { return f[10]; }
    double info_correlation_1() const { return f[11]; }
    double info_correlation_2() const { return f[12]; }
    double max_correlation_coeff() const { return f[13]; }

    double operator[](int i) const { return f[i]; }
};

namespace detail {

inline double entropy_of(const std::vector<double>& dist) {
    double h = 0.0;
    for (double v : dist)
        if (v > 0.0) h -= v * std::log(v);
    return h;
}

}  // namespace detail

inline Intermediates intermediates(const NormalizedCooccurrence& p, const Marginals& m) {
    const int ng = p.levels;
    Intermediates t;
    for (int i = 0; i < ng; ++i) {
        t.mu_x += i * m.px[i];
        t.mu_y += i * m.py[i];
    }
    double vx = 0.0, vy = 0.0;
    for (int i = 0; i < ng; ++i) {
        vx += (i - t.mu_x) * (i - t.mu_x) * m.px[i];
        vy += (i - t.mu_y) * (i - t.mu_y) * m.py[i];
    }
    t.sigma_x = std::sqrt(vx);
    t.sigma_y = std::sqrt(vy);
    t.hx = detail::entropy_of(m.px);
    t.hy = detail::entropy_of(m.py);

    for (int i = 0; i < ng; ++i) {
        for (int j = 0; j < ng; ++j) {
            const double v = p.at(i, j);
            if (v > 0.0) {
                t.hxy -= v * std::log(v);
                t.hxy1 -= v * std::log(m.px[i] * m.py[j]);
            }
            const double w = m.px[i] * m.py[j];
            if (w > 0.0) t.hxy2 -= w * std::log(w);
        }
    }

    t.q.assign(static_cast<std::size_t>(ng) * ng, 0.0);
    for (int i = 0; i < ng; ++i) {
        if (m.px[i] <= 0.0) continue;
        for (int j = 0; j < ng; ++j) {
            double s = 0.0;
            for (int k = 0; k < ng; ++k) {
                if (m.py[k] <= 0.0) continue;
                s += p.at(i, k) * p.at(j, k) / (m.px[i] * m.py[k]);
            }
            t.q[static_cast<std::size_t>(i) * ng + j] = s;
        }
    }
    return t;
}

namespace detail {

/// Square root of the second-largest-magnitude eigenvalue of Q restricted to
/// levels with nonzero px. The real part of that eigenvalue is clamped to
/// [0, 1] before the square root; fewer than two active levels gives 0.
inline double max_correlation_coeff(const Intermediates& t, const Marginals& m, int ng) {
    std::vector<int> active;
    for (int i = 0; i < ng; ++i)
        if (m.px[i] > 0.0) active.push_back(i);
    const int n = static_cast<int>(active.size());
    if (n < 2) return 0.0;

    Eigen::MatrixXd qr(n, n);
    for (int a = 0; a < n; ++a)
        for (int b = 0; b < n; ++b)
            qr(a, b) = t.q[static_cast<std::size_t>(active[a]) * ng + active[b]];

    Eigen::EigenSolver<Eigen::MatrixXd> solver(qr, /*computeEigenvectors=*/false);
    std::vector<std::complex<double>> ev(solver.eigenvalues().data(),
                                         solver.eigenvalues().data() + n);
    std::sort(ev.begin(), ev.end(), [](const auto& a, const auto& b) {
        const double ma = std::abs(a), mb = std::abs(b);
        if (ma != mb) return ma > mb;
        if (a.real() != b.real()) return a.real() > b.real();
        return a.imag() > b.imag();
    });
    const double second = std::clamp(ev[1].real(), 0.0, 1.0);
    return std::sqrt(second);
}

}  // namespace detail

/// Evaluates all 14 features. Level indices inside the moment formulas are
/// 1-based (i in 1..Ng, k in 2..2Ng for the sum marginal); degenerate inputs
/// produce sentinel values (correlation 0 when either marginal has fewer
/// than two active levels, info_correlation_1 0 when both marginal entropies vanish,
/// max_correlation_coeff 0 with fewer than two active levels) instead of
/// failing.
inline FeatureVector features(const NormalizedCooccurrence& p) {
    const int ng = p.levels;
    const Marginals m = marginals(p);
    const Intermediates t = intermediates(p, m);

    FeatureVector out;
    double asm_sum = 0.0, idm = 0.0, prod_moment = 0.0;
    for (int i = 0; i < ng; ++i) {
        for (int j = 0; j < ng; ++j) {
            const double v = p.at(i, j);
            asm_sum += v * v;
            idm += v / (1.0 + static_cast<double>(i - j) * (i - j));
            prod_moment += static_cast<double>(i + 1) * (j + 1) * v;
        }
    }
    out.f[0] = asm_sum;

    double contrast = 0.0;
    for (int k = 0; k < ng; ++k)
        contrast += static_cast<double>(k) * k * m.pdiff[k];
    out.f[1] = contrast;

    // A marginal concentrated on one level has zero variance mathematically,
    // but rounding can leave sigma a hair above zero when the matrix total is
    // not exactly 1. Gate on the active level count so the ratio never runs
    // on cancellation noise.
    int active_x = 0, active_y = 0;
    for (int i = 0; i < ng; ++i) {
        if (m.px[i] > 0.0) ++active_x;
        if (m.py[i] > 0.0) ++active_y;
    }
    const double sxy = t.sigma_x * t.sigma_y;
    out.f[2] = active_x > 1 && active_y > 1 && sxy > 0.0
                   ? (prod_moment - (t.mu_x + 1.0) * (t.mu_y + 1.0)) / sxy
                   : 0.0;

    out.f[3] = t.sigma_x * t.sigma_x;
    out.f[4] = idm;

    double sum_avg = 0.0;
    for (std::size_t s = 0; s < m.psum.size(); ++s)
        sum_avg += static_cast<double>(s + 2) * m.psum[s];
    out.f[5] = sum_avg;

    double sum_var = 0.0;
    for (std::size_t s = 0; s < m.psum.size(); ++s) {
        const double d = static_cast<double>(s + 2) - sum_avg;
        sum_var += d * d * m.psum[s];
    }
    out.f[6] = sum_var;

    out.f[7] = detail::entropy_of(m.psum);
    out.f[8] = t.hxy;

    double mu_d = 0.0;
    for (int k = 0; k < ng; ++k)
        mu_d += k * m.pdiff[k];
    double diff_var = 0.0;
    for (int k = 0; k < ng; ++k)
        diff_var += (k - mu_d) * (k - mu_d) * m.pdiff[k];
    out.f[9] = diff_var;

    out.f[10] = detail::entropy_of(m.pdiff);

    const double hmax = std::max(t.hx, t.hy);
    out.f[11] = hmax > 0.0 ? (t.hxy - t.hxy1) / hmax : 0.0;

    out.f[12] = std::sqrt(std::max(0.0, 1.0 - std::exp(-2.0 * (t.hxy2 - t.hxy))));

    out.f[13] = detail::max_correlation_coeff(t, m, ng);
    return out;
}

}  // namespace palmtex
