#include "ftsim/reliability.hpp"

#include <cmath>
#include <cstdio>

#include "ftsim/errors.hpp"

namespace ftsim {

double reliability(const ReliabilityQuery& q) {
    if (q.n_lps < 1) throw ConfigError("reliability: N must be >= 1");
    if (!(q.failure_rate >= 0.0))
        throw ConfigError("reliability: lambda must be >= 0");
    if (!(q.horizon_s >= 0.0))
        throw ConfigError("reliability: t must be >= 0");
    return std::exp(-static_cast<double>(q.n_lps) * q.failure_rate *
                    q.horizon_s);
}

std::string reliability_table(const std::vector<std::uint64_t>& ns,
                              double lambda,
                              const std::vector<double>& ts) {
    std::string out = "n,lambda,t_seconds,reliability\r\n";
    char buf[128];
    for (std::uint64_t n : ns) {
        for (double t : ts) {
            const double r = reliability({n, lambda, t});
            std::snprintf(buf, sizeof buf, "%llu,%.17g,%.17g,%.17g\r\n",
                          static_cast<unsigned long long>(n), lambda, t, r);
            out += buf;
        }
    }
    return out;
}

} // namespace ftsim
