#include "ftsim/report.hpp"

#include <algorithm>
#include <cinttypes>
#include <cstdio>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include "ftsim/digest.hpp"
#include "ftsim/errors.hpp"
#include "ftsim/stats.hpp"

namespace ftsim {

LpCounters& LpCounters::operator+=(const LpCounters& o) {
    sent += o.sent;
    received += o.received;
    delivered += o.delivered;
    dedup_dropped += o.dedup_dropped;
    equivocal_dropped += o.equivocal_dropped;
    quorum_held_peak += o.quorum_held_peak;
    quorum_expired += o.quorum_expired;
    quorum_residual += o.quorum_residual;
    inbox_pending += o.inbox_pending;
    lost_to_crash += o.lost_to_crash;
    suppressed_to_crashed += o.suppressed_to_crashed;
    corrupt_delivered += o.corrupt_delivered;
    unmatched_pong += o.unmatched_pong;
    return *this;
}

bool LpCounters::conserved() const {
    return received == delivered + dedup_dropped + equivocal_dropped +
                           quorum_expired + quorum_residual + lost_to_crash;
}

LpCounters SimReport::totals() const {
    LpCounters t;
    for (const auto& c : lps) t += c;
    return t;
}

std::uint64_t SimReport::digest() const {
    Fnv1a64 d;
    d.update_u64(seed);
    d.update_u64(placement_epochs);
    d.update_u64(lps.size());
    for (const auto& c : lps) {
        d.update_u64(c.sent);
        d.update_u64(c.received);
        d.update_u64(c.delivered);
        d.update_u64(c.dedup_dropped);
        d.update_u64(c.equivocal_dropped);
        d.update_u64(c.quorum_held_peak);
        d.update_u64(c.quorum_expired);
        d.update_u64(c.quorum_residual);
        d.update_u64(c.inbox_pending);
        d.update_u64(c.lost_to_crash);
        d.update_u64(c.suppressed_to_crashed);
        d.update_u64(c.corrupt_delivered);
        d.update_u64(c.unmatched_pong);
    }
    d.update_u64(entities.size());
    for (const auto& e : entities) {
        d.update_i64(e.id);
        d.update_u64(e.state_digest);
        d.update_u64(e.delivered_digest);
        d.update_u8(e.replicas_consistent ? 1 : 0);
        d.update_u32(e.live_replicas);
    }
    return d.value();
}

ReportDiff compare_reports(const SimReport& a, const SimReport& b) {
    ReportDiff diff;
    if (a.entities.size() != b.entities.size()) {
        diff.incompatible = true;
        return diff;
    }
    for (std::size_t i = 0; i < a.entities.size(); ++i) {
        const auto& ea = a.entities[i];
        const auto& eb = b.entities[i];
        if (ea.id != eb.id) {
            diff.incompatible = true;
            return diff;
        }
        if (ea.state_digest != eb.state_digest ||
            ea.delivered_digest != eb.delivered_digest)
            diff.differing_entities.push_back(ea.id);
    }
    if (a.lps.size() != b.lps.size()) {
        diff.counters_differ = true;
    } else {
        for (std::size_t i = 0; i < a.lps.size(); ++i)
            if (!(a.lps[i] == b.lps[i])) diff.counters_differ = true;
    }
    return diff;
}

const char* const kCsvHeader =
    "kind,run,seed,id,sent,received,delivered,dedup_dropped,"
    "equivocal_dropped,quorum_held_peak,quorum_expired,quorum_residual,"
    "inbox_pending,lost_to_crash,suppressed_to_crashed,corrupt_delivered,"
    "unmatched_pong,state_digest,delivered_digest,replicas_consistent,"
    "live_replicas,placement_epochs,wall_clock_s,report_digest,config";

namespace {

constexpr std::size_t kColumns = 25;

std::string csv_quote(const std::string& field) {
    if (field.find_first_of(",\"\r\n") == std::string::npos) return field;
    std::string out = "\"";
    for (char c : field) {
        if (c == '"') out += "\"\"";
        else out += c;
    }
    out += '"';
    return out;
}

std::string hex64(std::uint64_t v) {
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016" PRIx64, v);
    return buf;
}

std::string fmt_double(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

void emit_row(std::ostream& out, const std::vector<std::string>& fields) {
    for (std::size_t i = 0; i < fields.size(); ++i) {
        if (i) out << ',';
        out << csv_quote(fields[i]);
    }
    out << "\r\n";
}

std::vector<std::string> counters_fields(const LpCounters& c) {
    return {std::to_string(c.sent),
            std::to_string(c.received),
            std::to_string(c.delivered),
            std::to_string(c.dedup_dropped),
            std::to_string(c.equivocal_dropped),
            std::to_string(c.quorum_held_peak),
            std::to_string(c.quorum_expired),
            std::to_string(c.quorum_residual),
            std::to_string(c.inbox_pending),
            std::to_string(c.lost_to_crash),
            std::to_string(c.suppressed_to_crashed),
            std::to_string(c.corrupt_delivered),
            std::to_string(c.unmatched_pong)};
}

// Numeric view of a run row used by the mean/ci995 summary rows:
// the 13 counters, then placement_epochs, then wall_clock_s.
std::vector<double> run_numeric(const SimReport& r) {
    const LpCounters t = r.totals();
    return {static_cast<double>(t.sent),
            static_cast<double>(t.received),
            static_cast<double>(t.delivered),
            static_cast<double>(t.dedup_dropped),
            static_cast<double>(t.equivocal_dropped),
            static_cast<double>(t.quorum_held_peak),
            static_cast<double>(t.quorum_expired),
            static_cast<double>(t.quorum_residual),
            static_cast<double>(t.inbox_pending),
            static_cast<double>(t.lost_to_crash),
            static_cast<double>(t.suppressed_to_crashed),
            static_cast<double>(t.corrupt_delivered),
            static_cast<double>(t.unmatched_pong),
            static_cast<double>(r.placement_epochs),
            r.wall_clock_s};
}

} // namespace

void write_report_csv(std::ostream& out, const std::vector<SimReport>& runs,
                      bool summary) {
    out << kCsvHeader << "\r\n";
    for (std::size_t i = 0; i < runs.size(); ++i) {
        const SimReport& r = runs[i];
        const std::string run_idx = std::to_string(i);
        const std::string seed = std::to_string(r.seed);

        std::vector<std::string> row = {"run", run_idx, seed, ""};
        for (auto& f : counters_fields(r.totals())) row.push_back(f);
        row.push_back("");
        row.push_back("");
        row.push_back("");
        row.push_back("");
        row.push_back(std::to_string(r.placement_epochs));
        row.push_back(fmt_double(r.wall_clock_s));
        row.push_back(hex64(r.digest()));
        row.push_back(serialize_config(r.config));
        emit_row(out, row);

        for (std::size_t lp = 0; lp < r.lps.size(); ++lp) {
            std::vector<std::string> lp_row = {"lp", run_idx, seed,
                                               std::to_string(lp)};
            for (auto& f : counters_fields(r.lps[lp])) lp_row.push_back(f);
            lp_row.insert(lp_row.end(), {"", "", "", "", "", "", "", ""});
            emit_row(out, lp_row);
        }

        for (const auto& e : r.entities) {
            std::vector<std::string> e_row = {"entity", run_idx, seed,
                                              std::to_string(e.id)};
            e_row.insert(e_row.end(), 13, "");
            e_row.push_back(hex64(e.state_digest));
            e_row.push_back(hex64(e.delivered_digest));
            e_row.push_back(e.replicas_consistent ? "1" : "0");
            e_row.push_back(std::to_string(e.live_replicas));
            e_row.insert(e_row.end(), {"", "", "", ""});
            emit_row(out, e_row);
        }
    }

    if (summary && !runs.empty()) {
        std::vector<std::vector<double>> columns(run_numeric(runs[0]).size());
        for (const auto& r : runs) {
            auto vals = run_numeric(r);
            for (std::size_t c = 0; c < vals.size(); ++c)
                columns[c].push_back(vals[c]);
        }
        std::vector<std::string> mean_row = {"mean", "", "", ""};
        std::vector<std::string> ci_row = {"ci995", "", "", ""};
        for (std::size_t c = 0; c < 13; ++c) {
            mean_row.push_back(fmt_double(mean(columns[c])));
            ci_row.push_back(fmt_double(ci995_halfwidth(columns[c])));
        }
        mean_row.insert(mean_row.end(), {"", "", "", ""});
        ci_row.insert(ci_row.end(), {"", "", "", ""});
        mean_row.push_back(fmt_double(mean(columns[13])));
        ci_row.push_back(fmt_double(ci995_halfwidth(columns[13])));
        mean_row.push_back(fmt_double(mean(columns[14])));
        ci_row.push_back(fmt_double(ci995_halfwidth(columns[14])));
        mean_row.insert(mean_row.end(), {"", ""});
        ci_row.insert(ci_row.end(), {"", ""});
        emit_row(out, mean_row);
        emit_row(out, ci_row);
    }
}

std::string report_csv(const std::vector<SimReport>& runs, bool summary) {
    std::ostringstream ss;
    write_report_csv(ss, runs, summary);
    return ss.str();
}

std::vector<std::vector<std::string>> parse_csv(const std::string& text) {
    std::vector<std::vector<std::string>> rows;
    std::vector<std::string> row;
    std::string field;
    bool quoted = false;
    bool field_started = false;
    std::size_t i = 0;
    const std::size_t n = text.size();
    auto end_field = [&] {
        row.push_back(std::move(field));
        field.clear();
        field_started = false;
    };
    auto end_row = [&] {
        end_field();
        rows.push_back(std::move(row));
        row.clear();
    };
    while (i < n) {
        char c = text[i];
        if (quoted) {
            if (c == '"') {
                if (i + 1 < n && text[i + 1] == '"') {
                    field += '"';
                    i += 2;
                } else {
                    quoted = false;
                    ++i;
                }
            } else {
                field += c;
                ++i;
            }
            continue;
        }
        if (c == '"' && !field_started && field.empty()) {
            quoted = true;
            field_started = true;
            ++i;
        } else if (c == ',') {
            end_field();
            ++i;
        } else if (c == '\r' && i + 1 < n && text[i + 1] == '\n') {
            end_row();
            i += 2;
        } else if (c == '\n') {
            end_row();
            ++i;
        } else {
            field += c;
            field_started = true;
            ++i;
        }
    }
    if (field_started || !field.empty() || !row.empty()) end_row();
    return rows;
}

namespace {

std::uint64_t parse_hex64(const std::string& s) {
    return std::stoull(s, nullptr, 16);
}

} // namespace

std::vector<SimReport> load_report_csv(const std::string& text) {
    auto rows = parse_csv(text);
    if (rows.empty() || rows[0].empty() || rows[0][0] != "kind")
        throw ConfigError("not a report CSV: missing header");
    std::vector<SimReport> runs;
    for (std::size_t i = 1; i < rows.size(); ++i) {
        const auto& row = rows[i];
        if (row.size() != kColumns)
            throw ConfigError("report CSV row has wrong column count");
        const std::string& kind = row[0];
        if (kind == "mean" || kind == "ci995") continue;
        auto run_idx = static_cast<std::size_t>(std::stoull(row[1]));
        if (run_idx >= runs.size()) runs.resize(run_idx + 1);
        SimReport& r = runs[run_idx];
        if (kind == "run") {
            r.seed = std::stoull(row[2]);
            r.config = parse_config(row[24]);
            r.placement_epochs = std::stoull(row[21]);
            r.wall_clock_s = std::stod(row[22]);
        } else if (kind == "lp") {
            auto lp = static_cast<std::size_t>(std::stoull(row[3]));
            if (lp >= r.lps.size()) r.lps.resize(lp + 1);
            LpCounters& c = r.lps[lp];
            c.sent = std::stoull(row[4]);
            c.received = std::stoull(row[5]);
            c.delivered = std::stoull(row[6]);
            c.dedup_dropped = std::stoull(row[7]);
            c.equivocal_dropped = std::stoull(row[8]);
            c.quorum_held_peak = std::stoull(row[9]);
            c.quorum_expired = std::stoull(row[10]);
            c.quorum_residual = std::stoull(row[11]);
            c.inbox_pending = std::stoull(row[12]);
            c.lost_to_crash = std::stoull(row[13]);
            c.suppressed_to_crashed = std::stoull(row[14]);
            c.corrupt_delivered = std::stoull(row[15]);
            c.unmatched_pong = std::stoull(row[16]);
        } else if (kind == "entity") {
            EntityResult e;
            e.id = std::stoll(row[3]);
            e.state_digest = parse_hex64(row[17]);
            e.delivered_digest = parse_hex64(row[18]);
            e.replicas_consistent = row[19] == "1";
            e.live_replicas = static_cast<std::uint32_t>(std::stoul(row[20]));
            r.entities.push_back(e);
        } else {
            throw ConfigError("unknown report CSV row kind: " + kind);
        }
    }
    return runs;
}

} // namespace ftsim
