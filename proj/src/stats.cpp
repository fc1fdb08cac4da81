#include "ftsim/stats.hpp"

#include <array>
#include <cmath>

namespace ftsim {

double mean(const std::vector<double>& xs) {
    if (xs.empty()) return 0.0;
    double sum = 0.0;
    for (double x : xs) sum += x;
    return sum / static_cast<double>(xs.size());
}

double sample_sd(const std::vector<double>& xs) {
    if (xs.size() < 2) return 0.0;
    const double m = mean(xs);
    double ss = 0.0;
    for (double x : xs) ss += (x - m) * (x - m);
    return std::sqrt(ss / static_cast<double>(xs.size() - 1));
}

namespace {

// Student-t inverse CDF at 0.9975 for df = 1..30.
constexpr std::array<double, 30> kT995 = {
    127.32133646887483, 14.089047275548754, 7.4533185051505395,
    5.5975683670754925, 4.773340604906959,  4.3168271036365935,
    4.029337177642779,  3.8325186853443887, 3.6896623923042484,
    3.58140620209067,   3.496614173253683,  3.4284442422922634,
    3.37246794101099,   3.3256958178380347, 3.2860385709462343,
    3.251992874382888,  3.222449911357473,  3.19657422225523,
    3.1737245308535464, 3.1534005328460344, 3.1352062453679883,
    3.118824206835994,  3.1039969631246,    3.090513548706097,
    3.078199460536119,  3.0669091164254536, 3.056520108852941,
    3.046928775050517,  3.0380467448473745, 3.0297982236469423,
};

} // namespace

double t_crit_995(std::size_t df) {
    if (df == 0) return 0.0;
    if (df <= 30) return kT995[df - 1];
    // Round df down to the nearest tabulated row (conservative: the
    // critical value shrinks as df grows).
    if (df < 40) return kT995[29];
    if (df < 60) return 2.9711712949059974;
    if (df < 120) return 2.914552575419506;
    return 2.8598648487612075;
}

double ci995_halfwidth(const std::vector<double>& xs) {
    if (xs.size() < 2) return 0.0;
    const double sd = sample_sd(xs);
    const double n = static_cast<double>(xs.size());
    return t_crit_995(xs.size() - 1) * sd / std::sqrt(n);
}

} // namespace ftsim
