#include "report.hpp"

#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>

#include "config.hpp"

namespace qwave::cli {

void Table::add(std::vector<std::string> row) {
    if (row.size() != header.size()) throw std::logic_error("table row width does not match the header");
    rows.push_back(std::move(row));
}

std::string fmt(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[64];
    const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, ptr);
}

std::string fmt(int v) { return std::to_string(v); }
std::string fmt(bool v) { return v ? "true" : "false"; }

bool Outcome::passed() const {
    if (!complete) return false;
    for (const auto& c : checks)
        if (!c.passed) return false;
    return true;
}

std::string to_csv(const Table& t) {
    auto cell = [](const std::string& s) {
        if (s.find_first_of(",\"\n") == std::string::npos) return s;
        std::string q = "\"";
        for (char c : s) q += c == '"' ? std::string("\"\"") : std::string(1, c);
        return q + "\"";
    };
    std::string out;
    auto line = [&](const std::vector<std::string>& row) {
        for (std::size_t i = 0; i < row.size(); ++i) out += (i ? "," : "") + cell(row[i]);
        out += "\n";
    };
    line(t.header);
    for (const auto& r : t.rows) line(r);
    return out;
}

namespace {

void write_text(const std::filesystem::path& p, const std::string& text) {
    std::ofstream os(p, std::ios::binary | std::ios::trunc);
    if (!os) throw ConfigError("cannot write '" + p.string() + "'");
    os << text;
}

// Non-finite doubles are stored as strings so the JSON stays valid.
nlohmann::ordered_json number(double v) {
    if (std::isfinite(v)) return v;
    return fmt(v);
}

}  // namespace

void write_outputs(const std::string& out_dir, const std::string& command, const nlohmann::ordered_json& inputs,
                   const Outcome& o, double runtime_s) {
    const std::filesystem::path dir(out_dir);
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) throw ConfigError("cannot create output directory '" + out_dir + "': " + ec.message());

    write_text(dir / (command + ".csv"), to_csv(o.table));
    for (const auto& [name, t] : o.tables) write_text(dir / (command + "_" + name + ".csv"), to_csv(t));

    nlohmann::ordered_json summary;
    summary["command"] = command;
    summary["complete"] = o.complete;
    if (!o.complete) summary["error"] = o.error;
    summary["passed"] = o.passed();
    // the output location is not an input of the computation
    summary["inputs"] = inputs;
    if (summary["inputs"].contains("run")) summary["inputs"]["run"].erase("out");
    summary["checks"] = nlohmann::ordered_json::array();
    for (const auto& c : o.checks)
        summary["checks"].push_back({{"name", c.name}, {"passed", c.passed}, {"criterion", c.criterion},
                                     {"value", number(c.value)}});
    summary["results"] = o.results;
    write_text(dir / (command + ".json"), summary.dump(2) + "\n");

    nlohmann::ordered_json timing;
    timing["command"] = command;
    timing["out"] = out_dir;
    timing["runtime_s"] = runtime_s;
    timing["checks"] = nlohmann::ordered_json::array();
    for (const auto& c : o.checks) timing["checks"].push_back({{"name", c.name}, {"runtime_s", c.runtime_s}});
    write_text(dir / (command + ".timing.json"), timing.dump(2) + "\n");
}

}  // namespace qwave::cli
