#pragma once

#include <string>
#include <vector>

#include "json.hpp"

namespace qwave::cli {

struct Table {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;

    void add(std::vector<std::string> row);
};

/// Shortest round-trip decimal form, so equal doubles print equally.
std::string fmt(double v);
std::string fmt(int v);
std::string fmt(bool v);

struct Check {
    std::string name;
    bool passed = false;
    std::string criterion;
    double value = 0.0;
    double runtime_s = 0.0;
};

/// Everything a command produces. `tables` holds extra CSVs, written as
/// <command>_<name>.csv next to the main one.
struct Outcome {
    Table table;
    std::vector<std::pair<std::string, Table>> tables;
    std::vector<Check> checks;
    nlohmann::ordered_json results = nlohmann::ordered_json::object();
    bool complete = true;
    std::string error;

    bool passed() const;
};

std::string to_csv(const Table& t);

/**
 * Writes <out>/<command>.csv, the extra tables, <out>/<command>.json
 * (inputs, checks, results; no timings, so reruns are byte-identical) and
 * <out>/<command>.timing.json.
 */
void write_outputs(const std::string& out_dir, const std::string& command, const nlohmann::ordered_json& inputs,
                   const Outcome& o, double runtime_s);

}  // namespace qwave::cli
