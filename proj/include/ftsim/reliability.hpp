#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace ftsim {

struct ReliabilityQuery {
    std::uint64_t n_lps = 1;
    double failure_rate = 0.0; // lambda, 1/seconds
    double horizon_s = 0.0;    // t, seconds
};

// R(N, t) = exp(-N * lambda * t): probability that none of N components,
// each failing at exponential rate lambda, has failed by time t.
double reliability(const ReliabilityQuery& q);

// CSV table (n,lambda,t_seconds,reliability) over the cross product.
std::string reliability_table(const std::vector<std::uint64_t>& ns,
                              double lambda, const std::vector<double>& ts);

} // namespace ftsim
