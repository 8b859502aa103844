#pragma once

#include <cstdint>
#include <span>

#include "gcl/common.hpp"

namespace gcl {

enum class EstimatorKind { MedianOfMeans, TrimmedMean };

// Configuration of the one-dimensional mean estimator psi_delta.
//
// delta is admissible for sample size N when delta >= 2*exp(-c0_floor*N);
// calls below the floor are rejected rather than silently degraded.
struct EstimatorSpec {
    EstimatorKind kind = EstimatorKind::MedianOfMeans;
    double delta = 0.01;
    int min_block = 1;
    double c0_floor = 0.2;   // admissibility constant in delta >= 2 exp(-c0 N)
    double c_trim = 2.0;     // trimmed-mean: remove ceil(c_trim ln(2/delta)) per side

    // k = max(min_block, ceil(8 ln(2/delta))), the standard median-of-means
    // block count.
    int block_count(std::size_t n) const;
    void check_admissible(std::size_t n) const;
};

// Median of block means over k contiguous blocks (the last block absorbs the
// remainder). The median of an even count is the average of the two middle
// values.
double median_of_means(std::span<const double> samples, double delta,
                       const EstimatorSpec& spec = {});

// Same, with the block count forced; used by tests and by chained estimators
// whose delta encodes the chain level.
double median_of_means_k(std::span<const double> samples, int k);

// Average after removing ceil(c_trim ln(2/delta)) largest and smallest order
// statistics.
double trimmed_mean(std::span<const double> samples, double delta,
                    const EstimatorSpec& spec = {});

// Dispatch on spec.kind with spec.delta.
double psi_delta(std::span<const double> samples, const EstimatorSpec& spec);

// psi_delta with an explicit delta (overrides spec.delta); this is the form
// the chained estimators use, with delta_s = 2 exp(-alpha 2^s).
double psi_delta(std::span<const double> samples, double delta,
                 const EstimatorSpec& spec);

}  // namespace gcl
