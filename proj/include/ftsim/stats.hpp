#pragma once

#include <cstddef>
#include <vector>

namespace ftsim {

double mean(const std::vector<double>& xs);

// Sample standard deviation (n-1 denominator); 0 for fewer than two values.
double sample_sd(const std::vector<double>& xs);

// Two-sided 99.5% Student-t critical value (quantile 0.9975) for the given
// degrees of freedom.
double t_crit_995(std::size_t df);

// Half-width of the 99.5% confidence interval for the mean of xs;
// exactly 0 for a single observation.
double ci995_halfwidth(const std::vector<double>& xs);

} // namespace ftsim
