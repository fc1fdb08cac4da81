#include "ftsim/config.hpp"

#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "ftsim/errors.hpp"
#include "ftsim/replication.hpp"

namespace ftsim {

const char* to_string(FailureMode m) {
    switch (m) {
        case FailureMode::none: return "none";
        case FailureMode::crash: return "crash";
        case FailureMode::byzantine: return "byzantine";
    }
    return "?";
}

const char* to_string(CorruptionMode m) {
    switch (m) {
        case CorruptionMode::flip_payload: return "flip-payload";
        case CorruptionMode::drop_all: return "drop-all";
        case CorruptionMode::duplicate: return "duplicate";
        case CorruptionMode::garble_seq: return "garble-seq";
    }
    return "?";
}

CorruptionMode corruption_mode_from_string(const std::string& s) {
    if (s == "flip-payload") return CorruptionMode::flip_payload;
    if (s == "drop-all") return CorruptionMode::drop_all;
    if (s == "duplicate") return CorruptionMode::duplicate;
    if (s == "garble-seq") return CorruptionMode::garble_seq;
    throw ConfigError("unknown corruption mode: " + s);
}

const char* to_string(ExecMode m) {
    switch (m) {
        case ExecMode::single: return "single";
        case ExecMode::threads: return "threads";
        case ExecMode::processes: return "processes";
    }
    return "?";
}

ExecMode exec_mode_from_string(const std::string& s) {
    if (s == "single") return ExecMode::single;
    if (s == "threads") return ExecMode::threads;
    if (s == "processes") return ExecMode::processes;
    throw ConfigError("unknown exec mode: " + s);
}

std::uint32_t SimConfig::replication_degree() const {
    return required_instances(policy);
}

std::uint64_t SimConfig::instance_cap_effective() const {
    if (lp_instance_cap != 0) return lp_instance_cap;
    std::uint64_t total = num_entities * replication_degree();
    return (2 * total + num_lps - 1) / num_lps;
}

void validate(const SimConfig& cfg) {
    if (cfg.num_lps == 0) throw ConfigError("num-lps must be positive");
    if (cfg.num_entities == 0)
        throw ConfigError("num-entities must be positive");
    if (cfg.total_timesteps == 0)
        throw ConfigError("total-timesteps must be positive");
    if (cfg.policy.mode == FailureMode::none && cfg.policy.f != 0)
        throw ConfigError("f must be 0 when policy is none");
    const std::uint32_t m = cfg.replication_degree();
    if (m > cfg.num_lps)
        throw ConfigError(
            "replication degree exceeds num-lps; replicas cannot be placed "
            "on distinct LPs");
    if (cfg.migration_enabled && cfg.migration_period == 0)
        throw ConfigError("migration-period must be positive");
    if (cfg.migration_threshold < 0.0 || cfg.migration_threshold > 1.0)
        throw ConfigError("migration-threshold must be in [0,1]");
    if (cfg.lp_instance_cap != 0) {
        std::uint64_t total = cfg.num_entities * m;
        std::uint64_t min_cap = (total + cfg.num_lps - 1) / cfg.num_lps;
        if (cfg.lp_instance_cap < min_cap)
            throw ConfigError("lp-instance-cap too small to hold all instances");
    }
    if (cfg.p2p.out_degree == 0)
        throw ConfigError("out-degree must be positive");
    if (cfg.p2p.out_degree >= cfg.num_entities)
        throw ConfigError("out-degree must be below num-entities");
    if (cfg.p2p.ping_period == 0)
        throw ConfigError("ping-period must be positive");
    if (cfg.p2p.p_neighbor < 0.0 || cfg.p2p.p_neighbor > 1.0)
        throw ConfigError("p-neighbor must be in [0,1]");
    if (!(cfg.p2p.latency_sigma >= 0.0))
        throw ConfigError("latency-sigma must be non-negative");
    if (cfg.p2p.neighbor_update_period == 0)
        throw ConfigError("neighbor-update-period must be positive");
    for (const auto& c : cfg.faults.crashes) {
        if (c.lp < 0 || static_cast<std::uint32_t>(c.lp) >= cfg.num_lps)
            throw ConfigError("crash fault names unknown LP");
        if (c.at_step > cfg.total_timesteps)
            throw ConfigError("crash step beyond simulation end");
    }
    for (const auto& b : cfg.faults.byzantine) {
        if (b.lp < 0 || static_cast<std::uint32_t>(b.lp) >= cfg.num_lps)
            throw ConfigError("byzantine fault names unknown LP");
    }
    if (cfg.exec_mode == ExecMode::processes && !cfg.endpoints.empty() &&
        cfg.endpoints.size() != cfg.num_lps)
        throw ConfigError("endpoints list must name one address per LP");
}

namespace {

std::uint64_t parse_u64(const std::string& key, const std::string& v) {
    try {
        std::size_t pos = 0;
        unsigned long long x = std::stoull(v, &pos);
        if (pos != v.size()) throw std::invalid_argument(v);
        return x;
    } catch (const std::exception&) {
        throw ConfigError("bad integer for " + key + ": " + v);
    }
}

double parse_f64(const std::string& key, const std::string& v) {
    try {
        std::size_t pos = 0;
        double x = std::stod(v, &pos);
        if (pos != v.size()) throw std::invalid_argument(v);
        return x;
    } catch (const std::exception&) {
        throw ConfigError("bad number for " + key + ": " + v);
    }
}

bool parse_bool(const std::string& key, const std::string& v) {
    if (v == "true" || v == "1" || v == "on") return true;
    if (v == "false" || v == "0" || v == "off") return false;
    throw ConfigError("bad boolean for " + key + ": " + v);
}

CrashFault parse_crash(const std::string& v) {
    auto at = v.find('@');
    if (at == std::string::npos)
        throw ConfigError("crash fault must be LP@STEP: " + v);
    CrashFault c;
    c.lp = static_cast<LpId>(parse_u64("crash lp", v.substr(0, at)));
    c.at_step = parse_u64("crash step", v.substr(at + 1));
    return c;
}

ByzantineFault parse_byzantine(const std::string& v) {
    auto at = v.find('@');
    if (at == std::string::npos)
        throw ConfigError("byzantine fault must be LP@STEP:MODE: " + v);
    ByzantineFault b;
    b.lp = static_cast<LpId>(parse_u64("byzantine lp", v.substr(0, at)));
    std::string rest = v.substr(at + 1);
    auto colon = rest.find(':');
    if (colon == std::string::npos) {
        b.from_step = parse_u64("byzantine step", rest);
    } else {
        b.from_step = parse_u64("byzantine step", rest.substr(0, colon));
        b.mode = corruption_mode_from_string(rest.substr(colon + 1));
    }
    return b;
}

std::string trim(const std::string& s) {
    auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

} // namespace

void apply_key(SimConfig& cfg, const std::string& key,
               const std::string& value) {
    if (key == "num-lps")
        cfg.num_lps = static_cast<std::uint32_t>(parse_u64(key, value));
    else if (key == "num-entities")
        cfg.num_entities = parse_u64(key, value);
    else if (key == "policy") {
        if (value == "none") cfg.policy.mode = FailureMode::none;
        else if (value == "crash") cfg.policy.mode = FailureMode::crash;
        else if (value == "byzantine") cfg.policy.mode = FailureMode::byzantine;
        else throw ConfigError("unknown policy: " + value);
    } else if (key == "f")
        cfg.policy.f = static_cast<std::uint32_t>(parse_u64(key, value));
    else if (key == "total-timesteps")
        cfg.total_timesteps = parse_u64(key, value);
    else if (key == "seed")
        cfg.seed = parse_u64(key, value);
    else if (key == "exec-mode")
        cfg.exec_mode = exec_mode_from_string(value);
    else if (key == "migration-enabled")
        cfg.migration_enabled = parse_bool(key, value);
    else if (key == "migration-period")
        cfg.migration_period = parse_u64(key, value);
    else if (key == "migration-threshold")
        cfg.migration_threshold = parse_f64(key, value);
    else if (key == "lp-instance-cap")
        cfg.lp_instance_cap = parse_u64(key, value);
    else if (key == "quorum-grace")
        cfg.quorum_grace = parse_u64(key, value);
    else if (key == "out-degree")
        cfg.p2p.out_degree = static_cast<std::uint32_t>(parse_u64(key, value));
    else if (key == "ping-period")
        cfg.p2p.ping_period = parse_u64(key, value);
    else if (key == "p-neighbor")
        cfg.p2p.p_neighbor = parse_f64(key, value);
    else if (key == "latency-mu")
        cfg.p2p.latency_mu = parse_f64(key, value);
    else if (key == "latency-sigma")
        cfg.p2p.latency_sigma = parse_f64(key, value);
    else if (key == "neighbor-update-period")
        cfg.p2p.neighbor_update_period = parse_u64(key, value);
    else if (key == "crash")
        cfg.faults.crashes.push_back(parse_crash(value));
    else if (key == "byzantine")
        cfg.faults.byzantine.push_back(parse_byzantine(value));
    else if (key == "base-port")
        cfg.base_port = static_cast<std::uint16_t>(parse_u64(key, value));
    else if (key == "endpoints") {
        cfg.endpoints.clear();
        std::stringstream ss(value);
        std::string item;
        while (std::getline(ss, item, ',')) {
            item = trim(item);
            if (!item.empty()) cfg.endpoints.push_back(item);
        }
    } else if (key == "check-replica-consistency")
        cfg.check_replica_consistency = parse_bool(key, value);
    else if (key == "record-digest-streams")
        cfg.record_digest_streams = parse_bool(key, value);
    else
        throw ConfigError("unknown config key: " + key);
}

SimConfig parse_config(const std::string& text) {
    SimConfig cfg;
    std::stringstream ss(text);
    std::string line;
    int lineno = 0;
    while (std::getline(ss, line)) {
        ++lineno;
        auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError("line " + std::to_string(lineno) +
                              ": expected key=value");
        apply_key(cfg, trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
    }
    return cfg;
}

SimConfig parse_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file: " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str());
}

std::string serialize_config(const SimConfig& cfg) {
    std::ostringstream out;
    out << "num-lps=" << cfg.num_lps << '\n';
    out << "num-entities=" << cfg.num_entities << '\n';
    out << "policy=" << to_string(cfg.policy.mode) << '\n';
    out << "f=" << cfg.policy.f << '\n';
    out << "total-timesteps=" << cfg.total_timesteps << '\n';
    out << "seed=" << cfg.seed << '\n';
    out << "exec-mode=" << to_string(cfg.exec_mode) << '\n';
    out << "migration-enabled=" << (cfg.migration_enabled ? "true" : "false")
        << '\n';
    out << "migration-period=" << cfg.migration_period << '\n';
    out << "migration-threshold=" << cfg.migration_threshold << '\n';
    out << "lp-instance-cap=" << cfg.lp_instance_cap << '\n';
    out << "quorum-grace=" << cfg.quorum_grace << '\n';
    out << "out-degree=" << cfg.p2p.out_degree << '\n';
    out << "ping-period=" << cfg.p2p.ping_period << '\n';
    out << "p-neighbor=" << cfg.p2p.p_neighbor << '\n';
    out << "latency-mu=" << cfg.p2p.latency_mu << '\n';
    out << "latency-sigma=" << cfg.p2p.latency_sigma << '\n';
    out << "neighbor-update-period=" << cfg.p2p.neighbor_update_period << '\n';
    for (const auto& c : cfg.faults.crashes)
        out << "crash=" << c.lp << '@' << c.at_step << '\n';
    for (const auto& b : cfg.faults.byzantine)
        out << "byzantine=" << b.lp << '@' << b.from_step << ':'
            << to_string(b.mode) << '\n';
    if (cfg.base_port != 0) out << "base-port=" << cfg.base_port << '\n';
    if (!cfg.endpoints.empty()) {
        out << "endpoints=";
        for (std::size_t i = 0; i < cfg.endpoints.size(); ++i) {
            if (i) out << ',';
            out << cfg.endpoints[i];
        }
        out << '\n';
    }
    return out.str();
}

} // namespace ftsim
