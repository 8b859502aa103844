#include "gcl/mean_estimators.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

namespace gcl {

namespace {

bool all_finite(std::span<const double> s) {
    for (double x : s)
        if (!std::isfinite(x)) return false;
    return true;
}

double median_inplace(std::vector<double>& v) {
    const std::size_t n = v.size();
    auto mid = v.begin() + static_cast<std::ptrdiff_t>(n / 2);
    std::nth_element(v.begin(), mid, v.end());
    if (n % 2 == 1) return *mid;
    const double hi = *mid;
    const double lo = *std::max_element(v.begin(), mid);
    return 0.5 * (lo + hi);
}

}  // namespace

int EstimatorSpec::block_count(std::size_t n) const {
    const int k = std::max(min_block,
                           static_cast<int>(std::ceil(8.0 * std::log(2.0 / delta))));
    return std::min<int>(k, static_cast<int>(n));
}

void EstimatorSpec::check_admissible(std::size_t n) const {
    if (n == 0) throw insufficient_samples("psi_delta: empty sample");
    if (!(delta > 0.0 && delta < 1.0))
        throw invalid_argument("psi_delta: delta must be in (0,1)");
    const double floor = 2.0 * std::exp(-c0_floor * static_cast<double>(n));
    if (delta < floor)
        throw invalid_argument("psi_delta: delta below the admissibility floor 2exp(-c0 N)");
    if (kind == EstimatorKind::MedianOfMeans) {
        const int k = static_cast<int>(std::ceil(8.0 * std::log(2.0 / delta)));
        if (static_cast<std::size_t>(std::max(min_block, k)) > n)
            throw insufficient_samples("insufficient samples for confidence");
    }
}

double median_of_means_k(std::span<const double> samples, int k) {
    const std::size_t n = samples.size();
    if (n == 0) throw insufficient_samples("median_of_means: empty sample");
    if (k < 1 || static_cast<std::size_t>(k) > n)
        throw insufficient_samples("insufficient samples for confidence");
    if (!all_finite(samples))
        throw invalid_argument("median_of_means: non-finite input");
    const std::size_t block = n / static_cast<std::size_t>(k);
    std::vector<double> means(static_cast<std::size_t>(k));
    for (int b = 0; b < k; ++b) {
        const std::size_t lo = static_cast<std::size_t>(b) * block;
        const std::size_t hi = (b == k - 1) ? n : lo + block;  // remainder in last
        double s = 0.0;
        for (std::size_t i = lo; i < hi; ++i) s += samples[i];
        means[static_cast<std::size_t>(b)] = s / static_cast<double>(hi - lo);
    }
    return median_inplace(means);
}

double median_of_means(std::span<const double> samples, double delta,
                       const EstimatorSpec& spec) {
    EstimatorSpec s = spec;
    s.delta = delta;
    s.check_admissible(samples.size());
    return median_of_means_k(samples, s.block_count(samples.size()));
}

double trimmed_mean(std::span<const double> samples, double delta,
                    const EstimatorSpec& spec) {
    EstimatorSpec s = spec;
    s.delta = delta;
    s.check_admissible(samples.size());
    if (!all_finite(samples))
        throw invalid_argument("trimmed_mean: non-finite input");
    const std::size_t n = samples.size();
    const std::size_t m =
        static_cast<std::size_t>(std::ceil(s.c_trim * std::log(2.0 / delta)));
    if (2 * m >= n)
        throw insufficient_samples("trimmed_mean: trimming removes all samples");
    std::vector<double> v(samples.begin(), samples.end());
    std::sort(v.begin(), v.end());
    double acc = 0.0;
    for (std::size_t i = m; i < n - m; ++i) acc += v[i];
    return acc / static_cast<double>(n - 2 * m);
}

double psi_delta(std::span<const double> samples, const EstimatorSpec& spec) {
    return psi_delta(samples, spec.delta, spec);
}

double psi_delta(std::span<const double> samples, double delta,
                 const EstimatorSpec& spec) {
    switch (spec.kind) {
        case EstimatorKind::MedianOfMeans:
            return median_of_means(samples, delta, spec);
        case EstimatorKind::TrimmedMean:
            return trimmed_mean(samples, delta, spec);
    }
    throw invalid_argument("psi_delta: unknown estimator kind");
}

}  // namespace gcl
