#include "config.hpp"

#include <algorithm>
#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>
#include <charconv>
#include <climits>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

namespace qwave::cli {

namespace {

enum class Type { Number, Integer, Seed, Flag, Text, List, Vector, Choice };

// Default value for a group of commands.
struct Default {
    const char* commands;  // space separated
    const char* value;
};

struct KeySpec {
    const char* key;
    Type type;
    std::vector<Default> defaults;
    std::vector<std::string> choices{};
};

constexpr const char* kAll = "norms reduce lemma key sharpness lowfreq strichartz extremize solve lipschitz";
constexpr const char* kLadder = "lemma key sharpness strichartz extremize";
constexpr const char* kFlow = "solve lipschitz";

const std::vector<std::string> kFamilies{"gaussian-bump", "shell", "knapp-box", "random-bandlimited"};

const std::vector<KeySpec>& registry() {
    static const std::vector<KeySpec> keys{
        {"run.seed", Type::Seed, {{kAll, "1"}}},
        {"run.workers", Type::Integer, {{kAll, "1"}}},
        {"run.out", Type::Text, {{kAll, "qwave-out"}}},
        {"run.suite", Type::Choice, {{"lemma", "elliptic"}}, {"elliptic", "hyperbolic", "shell"}},
        {"run.input", Type::Text, {{"norms", ""}}},
        {"run.snapshot", Type::Text, {{"solve", ""}}},

        {"grid.n", Type::Integer, {{kLadder, "16"}, {"lowfreq", "16"}, {kFlow, "16"}}},
        {"grid.L", Type::Number, {{kLadder, "4"}, {"lowfreq", "12"}, {kFlow, "6.283185307179586"}}},
        {"grid.m", Type::Integer, {{kLadder, "32"}, {"lowfreq", "32"}, {kFlow, "64"}}},
        {"grid.T", Type::Number, {{kLadder, "2"}, {"lowfreq", "4"}, {kFlow, "1"}}},
        {"grid.window_support", Type::Number, {{kLadder, "1"}, {kFlow, "1"}, {"norms", "1"}}},
        {"grid.flat_fraction", Type::Number, {{kLadder, "0.5"}, {"lowfreq", "0.5"}, {kFlow, "0.5"}, {"norms", "0.5"}}},

        {"params.r", Type::Number, {{kLadder, "2"}, {"lowfreq norms", "2"}, {kFlow, "2"}}},
        {"params.sigma", Type::Number, {{"lemma key strichartz extremize lowfreq", "1.25"}, {"sharpness", "0.5"}}},
        {"params.b", Type::Number, {{"lemma key lowfreq norms", "0.55"}, {kFlow, "0.55"}}},
        {"params.signs", Type::Choice, {{"key sharpness extremize lowfreq", "++"}}, {"++", "+-", "-+", "--"}},
        {"params.s", Type::Number, {{"norms", "1.5"}, {kFlow, "1.5"}}},
        {"params.sign", Type::Choice, {{"norms", "+"}}, {"+", "-"}},
        {"params.delta", Type::Number, {{"norms", "0.25"}, {kFlow, "0.25"}}},
        {"params.k", Type::Integer, {{kFlow, "1"}}},
        {"params.derivative", Type::Choice, {{kFlow, "x1"}}, {"t", "x1", "x2", "x3"}},
        {"params.s1", Type::Number, {{"strichartz", "0.55"}}},
        {"params.s2", Type::Number, {{"strichartz", "0.55"}}},
        {"params.probe", Type::Flag, {{"strichartz", "false"}}},
        {"params.control", Type::Flag, {{"sharpness", "true"}}},
        {"params.control_sigma", Type::Number, {{"sharpness", "1.25"}}},

        {"family.u", Type::Choice, {{"lemma key sharpness strichartz solve", "gaussian-bump"}, {"lipschitz", "random-bandlimited"}}, kFamilies},
        {"family.u_xi0", Type::Vector, {{"lemma key sharpness strichartz", "1.2,0,0"}, {kFlow, "1,0,0"}}},
        {"family.u_width", Type::Number, {{"lemma key sharpness strichartz", "0.5"}, {kFlow, "0.7"}}},
        {"family.u_aniso", Type::Vector, {{"lemma key sharpness strichartz", "1,1,1"}, {kFlow, "1,1,1"}}},
        {"family.u_seed", Type::Seed, {{"lemma key sharpness strichartz", "1"}, {kFlow, "1"}}},
        {"family.v", Type::Choice, {{"lemma key sharpness strichartz solve", "gaussian-bump"}, {"lipschitz", "random-bandlimited"}}, kFamilies},
        {"family.v_xi0", Type::Vector, {{"lemma key sharpness strichartz", "0,1,0"}, {kFlow, "0,1,0"}}},
        {"family.v_width", Type::Number, {{"lemma key sharpness strichartz", "0.5"}, {kFlow, "0.7"}}},
        {"family.v_aniso", Type::Vector, {{"lemma key sharpness strichartz", "1,1,1"}, {kFlow, "1,1,1"}}},
        {"family.v_seed", Type::Seed, {{"lemma key sharpness strichartz", "2"}, {kFlow, "2"}}},
        {"family.amplitude", Type::Number, {{kFlow, "0.01"}}},
        {"family.velocity_amplitude", Type::Number, {{kFlow, "0.005"}}},
        {"family.band", Type::Number, {{kFlow, "2.5"}}},

        {"sweep.lambdas", Type::List, {{"lemma key sharpness strichartz", "2,4,8,16"}}},

        {"reduce.region", Type::Choice, {{"reduce", "elliptic"}}, {"elliptic", "hyperbolic-near", "hyperbolic-far"}},
        {"reduce.c1", Type::Number, {{"reduce", "2"}}},
        {"reduce.a", Type::List, {{"reduce", "1,2,10,100,1000"}}},
        {"reduce.p", Type::List, {{"reduce", "0"}}},
        {"reduce.q", Type::List, {{"reduce", "0"}}},
        {"reduce.r", Type::List, {{"reduce", ""}}},
        {"reduce.s1_fractions", Type::List, {{"reduce", "0.3,0.5,0.7"}}},

        {"shell.xi", Type::Vector, {{"lemma", "0,0,1000"}}},
        {"shell.tau", Type::Number, {{"lemma", "1002"}}},
        {"shell.h", Type::Number, {{"lemma", "0.1"}}},
        {"shell.shells", Type::List, {{"lemma", "2,3,4,5,6"}}},

        {"lowfreq.members", Type::Integer, {{"lowfreq", "8"}}},
        {"lowfreq.width", Type::Number, {{"lowfreq", "0.5"}}},
        {"lowfreq.band", Type::Number, {{"lowfreq", "1"}}},

        {"extremize.lambda", Type::Number, {{"extremize", "2"}}},
        {"extremize.evaluations", Type::Integer, {{"extremize", "150"}}},
        {"extremize.tolerance", Type::Number, {{"extremize", "1e-4"}}},
        {"extremize.kinds", Type::Text, {{"extremize", "gaussian-bump,shell,knapp-box,random-bandlimited"}}},

        {"solve.max_iterations", Type::Integer, {{kFlow, "60"}}},
        {"solve.tolerance", Type::Number, {{kFlow, "1e-10"}}},
        {"solve.auto_delta", Type::Flag, {{"solve", "false"}}},
        {"solve.rho_max", Type::Number, {{"solve", "0.9"}}},
        {"solve.delta_c", Type::Number, {{"solve", "0.5"}}},
        {"solve.u0", Type::Text, {{"solve", ""}}},
        {"solve.u1", Type::Text, {{"solve", ""}}},

        {"lipschitz.pairs", Type::Integer, {{"lipschitz", "8"}}},
        {"lipschitz.eps", Type::List, {{"lipschitz", "0.1,0.05"}}},
        {"lipschitz.amplitudes", Type::List, {{"lipschitz", "4,16,64"}}},
        {"lipschitz.rho_max", Type::Number, {{"lipschitz", "0.5"}}},
        {"lipschitz.delta_c", Type::Number, {{"lipschitz", "1e9"}}},
    };
    return keys;
}

bool lists_command(const char* commands, const std::string& command) {
    std::istringstream is(commands);
    std::string c;
    while (is >> c)
        if (c == command) return true;
    return false;
}

const char* default_for(const KeySpec& k, const std::string& command) {
    for (const auto& d : k.defaults)
        if (lists_command(d.commands, command)) return d.value;
    return nullptr;
}

const KeySpec* find_key(const std::string& key) {
    for (const auto& k : registry())
        if (key == k.key) return &k;
    return nullptr;
}

std::string trim(const std::string& s) {
    const auto a = s.find_first_not_of(" \t\r\n");
    if (a == std::string::npos) return "";
    const auto b = s.find_last_not_of(" \t\r\n");
    return s.substr(a, b - a + 1);
}

double parse_number(const std::string& key, const std::string& v) {
    const auto t = trim(v);
    double out = 0.0;
    const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), out);
    if (ec != std::errc() || ptr != t.data() + t.size() || t.empty() || !std::isfinite(out))
        throw ConfigError(key + ": expected a finite number, got '" + v + "'");
    return out;
}

long long parse_integer(const std::string& key, const std::string& v) {
    const auto t = trim(v);
    long long out = 0;
    const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), out);
    if (ec != std::errc() || ptr != t.data() + t.size() || t.empty())
        throw ConfigError(key + ": expected an integer, got '" + v + "'");
    return out;
}

std::vector<double> parse_list(const std::string& key, const std::string& v) {
    std::vector<double> out;
    if (trim(v).empty()) return out;
    std::istringstream is(v);
    std::string item;
    while (std::getline(is, item, ',')) out.push_back(parse_number(key, item));
    return out;
}

bool parse_flag(const std::string& key, const std::string& v) {
    const auto t = trim(v);
    if (t == "true" || t == "1" || t == "yes") return true;
    if (t == "false" || t == "0" || t == "no") return false;
    throw ConfigError(key + ": expected true or false, got '" + v + "'");
}

void check_value(const KeySpec& k, const std::string& v) {
    const std::string key = k.key;
    switch (k.type) {
        case Type::Number: parse_number(key, v); break;
        case Type::Integer: {
            const auto i = parse_integer(key, v);
            if (i < INT32_MIN || i > INT32_MAX) throw ConfigError(key + ": integer out of range");
            break;
        }
        case Type::Seed:
            if (parse_integer(key, v) < 0) throw ConfigError(key + ": seed must be nonnegative");
            break;
        case Type::Flag: parse_flag(key, v); break;
        case Type::Text: break;
        case Type::List: parse_list(key, v); break;
        case Type::Vector:
            if (parse_list(key, v).size() != 3) throw ConfigError(key + ": expected three comma-separated numbers");
            break;
        case Type::Choice:
            if (std::find(k.choices.begin(), k.choices.end(), trim(v)) == k.choices.end()) {
                std::string allowed;
                for (const auto& c : k.choices) allowed += (allowed.empty() ? "" : ", ") + c;
                throw ConfigError(key + ": '" + v + "' is not one of " + allowed);
            }
            break;
    }
}

}  // namespace

const std::vector<std::string>& command_names() {
    static const std::vector<std::string> names = [] {
        std::vector<std::string> out;
        std::istringstream is(kAll);
        std::string c;
        while (is >> c) out.push_back(c);
        return out;
    }();
    return names;
}

RunConfig RunConfig::load(const std::string& command, const std::optional<std::string>& path,
                          const std::vector<std::string>& overrides) {
    const auto& names = command_names();
    if (std::find(names.begin(), names.end(), command) == names.end())
        throw ConfigError("unknown command '" + command + "'");
    RunConfig cfg;
    cfg.command_ = command;
    for (const auto& k : registry())
        if (const char* d = default_for(k, command)) cfg.values_[k.key] = d;

    auto assign = [&](const std::string& key, const std::string& value, const std::string& origin) {
        const auto* spec = find_key(key);
        if (!spec) throw ConfigError(origin + ": unknown key '" + key + "'");
        if (!default_for(*spec, command))
            throw ConfigError(origin + ": key '" + key + "' does not apply to command '" + command + "'");
        check_value(*spec, value);
        cfg.values_[key] = trim(value);
    };

    if (path) {
        std::ifstream is(*path);
        if (!is) throw ConfigError("cannot open config file '" + *path + "'");
        boost::property_tree::ptree tree;
        try {
            boost::property_tree::ini_parser::read_ini(is, tree);
        } catch (const boost::property_tree::ini_parser_error& e) {
            throw ConfigError(*path + ": " + e.message() + " (line " + std::to_string(e.line()) + ")");
        }
        for (const auto& [section, body] : tree) {
            if (body.empty() && !body.data().empty())
                throw ConfigError(*path + ": key '" + section + "' outside a [section]");
            for (const auto& [name, value] : body) assign(section + "." + name, value.data(), *path);
        }
    }
    for (const auto& o : overrides) {
        const auto eq = o.find('=');
        if (eq == std::string::npos) throw ConfigError("override '" + o + "': expected section.key=value");
        assign(trim(o.substr(0, eq)), o.substr(eq + 1), "override");
    }
    if (cfg.integer("run.workers") < 1) throw ConfigError("run.workers: must be at least 1");
    if (cfg.text("run.out").empty()) throw ConfigError("run.out: must not be empty");
    return cfg;
}

const std::string& RunConfig::raw(const std::string& key) const {
    const auto it = values_.find(key);
    if (it == values_.end()) throw ConfigError("key '" + key + "' is not defined for command '" + command_ + "'");
    return it->second;
}

double RunConfig::number(const std::string& key) const { return parse_number(key, raw(key)); }
int RunConfig::integer(const std::string& key) const { return static_cast<int>(parse_integer(key, raw(key))); }
std::uint64_t RunConfig::seed(const std::string& key) const {
    return static_cast<std::uint64_t>(parse_integer(key, raw(key)));
}
bool RunConfig::flag(const std::string& key) const { return parse_flag(key, raw(key)); }
const std::string& RunConfig::text(const std::string& key) const { return raw(key); }
std::vector<double> RunConfig::list(const std::string& key) const { return parse_list(key, raw(key)); }

Vec3 RunConfig::vec3(const std::string& key) const {
    const auto v = parse_list(key, raw(key));
    return {v.at(0), v.at(1), v.at(2)};
}

nlohmann::ordered_json RunConfig::echo() const {
    nlohmann::ordered_json out = nlohmann::ordered_json::object();
    for (const auto& k : registry()) {
        const auto it = values_.find(k.key);
        if (it == values_.end()) continue;
        const std::string key = k.key;
        const auto dot = key.find('.');
        auto& section = out[key.substr(0, dot)];
        const auto name = key.substr(dot + 1);
        switch (k.type) {
            case Type::Number: section[name] = number(key); break;
            case Type::Integer: section[name] = integer(key); break;
            case Type::Seed: section[name] = seed(key); break;
            case Type::Flag: section[name] = flag(key); break;
            case Type::List:
            case Type::Vector: section[name] = list(key); break;
            case Type::Text:
            case Type::Choice: section[name] = it->second; break;
        }
    }
    return out;
}

}  // namespace qwave::cli
