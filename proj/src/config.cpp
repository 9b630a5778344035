#include "repcov/config.hpp"
#include "repcov/units.hpp"

#include <cctype>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <vector>

namespace repcov {

namespace {

struct RawVal {
    std::string text;
    int line = 0;
};
using RawSection = std::map<std::string, RawVal>;
using RawConfig = std::map<std::string, RawSection>;

std::string trim(const std::string& s) {
    std::size_t b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    std::size_t e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

// strips a trailing comment that is not inside a quoted string
std::string strip_comment(const std::string& s) {
    bool quoted = false;
    for (std::size_t i = 0; i < s.size(); ++i) {
        if (s[i] == '"') quoted = !quoted;
        if (s[i] == '#' && !quoted) return s.substr(0, i);
    }
    return s;
}

RawConfig parse_raw(const std::string& text) {
    RawConfig out;
    std::string section;
    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const std::string body = trim(strip_comment(line));
        if (body.empty()) continue;
        if (body.front() == '[') {
            if (body.back() != ']')
                throw ConfigError("config line " + std::to_string(lineno) + ": malformed section header");
            section = trim(body.substr(1, body.size() - 2));
            if (section.empty())
                throw ConfigError("config line " + std::to_string(lineno) + ": empty section name");
            out[section]; // section may legitimately be empty
            continue;
        }
        const std::size_t eq = body.find('=');
        if (eq == std::string::npos)
            throw ConfigError("config line " + std::to_string(lineno) + ": expected key = value");
        if (section.empty())
            throw ConfigError("config line " + std::to_string(lineno) + ": key outside any [section]");
        const std::string key = trim(body.substr(0, eq));
        const std::string value = trim(body.substr(eq + 1));
        if (key.empty() || value.empty())
            throw ConfigError("config line " + std::to_string(lineno) + ": empty key or value");
        if (out[section].count(key))
            throw ConfigError("config line " + std::to_string(lineno) + ": duplicate key [" +
                              section + "] " + key);
        out[section][key] = RawVal{value, lineno};
    }
    return out;
}

class Mapper {
public:
    explicit Mapper(RawConfig raw) : raw_(std::move(raw)) {}

    const RawVal& get(const std::string& sec, const std::string& key) {
        auto s = raw_.find(sec);
        if (s == raw_.end()) throw ConfigError("config: missing section [" + sec + "]");
        auto k = s->second.find(key);
        if (k == s->second.end())
            throw ConfigError("config: missing field [" + sec + "] " + key);
        consumed_.insert(sec + "." + key);
        return k->second;
    }

    bool has(const std::string& sec, const std::string& key) const {
        auto s = raw_.find(sec);
        return s != raw_.end() && s->second.count(key) > 0;
    }

    std::string str(const std::string& sec, const std::string& key) {
        const RawVal& v = get(sec, key);
        if (v.text.size() < 2 || v.text.front() != '"' || v.text.back() != '"')
            throw ConfigError(field(sec, key, v) + ": expected a quoted string");
        return v.text.substr(1, v.text.size() - 2);
    }

    double number(const std::string& sec, const std::string& key) {
        const RawVal& v = get(sec, key);
        return to_number(v.text, field(sec, key, v));
    }

    long long integer(const std::string& sec, const std::string& key) {
        const RawVal& v = get(sec, key);
        char* end = nullptr;
        const long long n = std::strtoll(v.text.c_str(), &end, 10);
        if (end == v.text.c_str() || *end != '\0')
            throw ConfigError(field(sec, key, v) + ": expected an integer");
        return n;
    }

    std::uint64_t uinteger(const std::string& sec, const std::string& key) {
        const RawVal& v = get(sec, key);
        if (!v.text.empty() && v.text[0] == '-')
            throw ConfigError(field(sec, key, v) + ": expected a nonnegative integer");
        char* end = nullptr;
        const std::uint64_t n = std::strtoull(v.text.c_str(), &end, 10);
        if (end == v.text.c_str() || *end != '\0')
            throw ConfigError(field(sec, key, v) + ": expected a nonnegative integer");
        return n;
    }

    // "NUMBER UNIT" with the unit mandatory
    double quantity(const std::string& sec, const std::string& key,
                    const std::map<std::string, double>& scales, const std::string& unit_hint,
                    bool* was_db = nullptr) {
        const std::string s = str(sec, key);
        const RawVal& v = raw_.at(sec).at(key);
        const std::size_t sp = s.find_last_of(" \t");
        if (sp == std::string::npos)
            throw ConfigError(field(sec, key, v) + ": unit required (" + unit_hint + ")");
        const std::string num = trim(s.substr(0, sp));
        const std::string unit = trim(s.substr(sp + 1));
        const auto it = scales.find(unit);
        if (it == scales.end())
            throw ConfigError(field(sec, key, v) + ": unknown unit '" + unit + "' (" + unit_hint + ")");
        const double value = to_number(num, field(sec, key, v));
        if (was_db) *was_db = (unit == "dB" || unit == "dBm");
        if (unit == "dBm") return dbm_to_watt(value);
        if (unit == "dB") return db_to_linear(value);
        return value * it->second;
    }

    void check_consumed() const {
        for (const auto& [sec, keys] : raw_)
            for (const auto& [key, v] : keys)
                if (!consumed_.count(sec + "." + key))
                    throw ConfigError("config line " + std::to_string(v.line) + ": unknown field [" +
                                      sec + "] " + key);
    }

private:
    static std::string field(const std::string& sec, const std::string& key, const RawVal& v) {
        return "config line " + std::to_string(v.line) + ": [" + sec + "] " + key;
    }
    static double to_number(const std::string& s, const std::string& where) {
        char* end = nullptr;
        const double d = std::strtod(s.c_str(), &end);
        if (end == s.c_str() || *end != '\0')
            throw ConfigError(where + ": expected a number, got '" + s + "'");
        return d;
    }

    RawConfig raw_;
    std::set<std::string> consumed_;
};

const std::map<std::string, double> kLength{{"m", 1.0}, {"km", 1000.0}};
const std::map<std::string, double> kPower{{"W", 1.0}, {"mW", 1e-3}, {"dBm", 0.0}};
const std::map<std::string, double> kRatio{{"linear", 1.0}, {"dB", 0.0}};
const std::map<std::string, double> kDensity{{"per_m2", 1.0}, {"per_km2", 1e-6}};
const std::map<std::string, double> kTime{{"s", 1.0}, {"ms", 1e-3}};
const std::map<std::string, double> kFreq{{"Hz", 1.0}, {"kHz", 1e3}, {"MHz", 1e6}};

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

} // namespace

std::string combiner_name(CombinerKind c) {
    switch (c) {
        case CombinerKind::NoRepetition: return "norep";
        case CombinerKind::SelectionCombining: return "sc";
        case CombinerKind::MaximalRatioCombining: return "mrc";
    }
    return "?";
}

CombinerKind combiner_from_name(const std::string& name) {
    if (name == "norep") return CombinerKind::NoRepetition;
    if (name == "sc") return CombinerKind::SelectionCombining;
    if (name == "mrc") return CombinerKind::MaximalRatioCombining;
    throw ConfigError("unknown combiner '" + name + "' (norep, sc, mrc)");
}

std::string channel_name(Channel ch) {
    return ch == Channel::PathLossOnly ? "pathloss" : "fading";
}

Channel channel_from_name(const std::string& name) {
    if (name == "pathloss") return Channel::PathLossOnly;
    if (name == "fading") return Channel::RayleighFading;
    throw ConfigError("unknown channel '" + name + "' (pathloss, fading)");
}

ExperimentConfig parse_config_text(const std::string& text) {
    Mapper m(parse_raw(text));
    ExperimentConfig cfg;

    cfg.cell.lambda_o = m.quantity("cell", "lambda_o", kDensity, "per_m2 or per_km2");
    cfg.cell.R_c = m.quantity("cell", "R_c", kLength, "m or km");
    cfg.cell.alpha = m.number("cell", "alpha");
    cfg.cell.P_t = m.quantity("cell", "P_t", kPower, "W, mW or dBm");
    const bool has_sigma = m.has("cell", "sigma2");
    const bool has_nf = m.has("cell", "bandwidth") || m.has("cell", "noise_figure");
    if (has_sigma && has_nf)
        throw ConfigError("config: [cell] give either sigma2 or bandwidth+noise_figure, not both");
    if (has_sigma) {
        cfg.cell.sigma2 = m.quantity("cell", "sigma2", kPower, "W, mW or dBm");
    } else if (has_nf) {
        const double bw = m.quantity("cell", "bandwidth", kFreq, "Hz, kHz or MHz");
        const double nf_linear = m.quantity("cell", "noise_figure", kRatio, "dB or linear");
        cfg.cell.sigma2 = noise_power(bw, linear_to_db(nf_linear));
    } else {
        throw ConfigError("config: [cell] needs sigma2 or bandwidth+noise_figure");
    }
    cfg.cell.theta = m.quantity("cell", "theta", kRatio, "dB or linear");
    cfg.cell.channel = channel_from_name(m.str("cell", "channel"));

    cfg.prof_a = m.quantity("profile", "a", kLength, "m or km");
    cfg.prof_b = m.quantity("profile", "b", kLength, "m or km");
    cfg.prof_d0 = m.number("profile", "D_o");

    cfg.energy.eta_eps = m.number("energy", "eta_eps");
    cfg.energy.P_t = cfg.cell.P_t;
    cfg.energy.P_O = m.quantity("energy", "P_O", kPower, "W, mW or dBm");
    cfg.energy.T_m = m.quantity("energy", "T_m", kTime, "s or ms");

    cfg.mc_trials = static_cast<long>(m.integer("mc", "trials"));
    cfg.mc_seed = m.uinteger("mc", "seed");

    cfg.sweep.axis = m.str("sweep", "axis");
    cfg.sweep.start = m.quantity("sweep", "start", kLength, "m or km");
    cfg.sweep.stop = m.quantity("sweep", "stop", kLength, "m or km");
    cfg.sweep.count = static_cast<int>(m.integer("sweep", "count"));
    const std::string scale = m.str("sweep", "scale");
    if (scale != "linear" && scale != "log")
        throw ConfigError("config: [sweep] scale must be linear or log");
    cfg.sweep.log_scale = scale == "log";

    cfg.out_path = m.str("output", "path");
    const std::string format = m.str("output", "format");
    if (format != "csv" && format != "json")
        throw ConfigError("config: [output] format must be csv or json");
    cfg.format = format == "json" ? OutputFormat::Json : OutputFormat::Csv;

    m.check_consumed();

    try {
        cfg.cell.validate();
        cfg.profile(); // validates a, b, D_o
        cfg.energy.validate();
    } catch (const std::invalid_argument& e) {
        throw ConfigError(std::string("config: ") + e.what());
    }
    if (cfg.mc_trials < 1) throw ConfigError("config: [mc] trials must be >= 1");
    if (cfg.sweep.axis != "r" && cfg.sweep.axis != "b")
        throw ConfigError("config: [sweep] axis must be r or b");
    if (cfg.sweep.count < 1) throw ConfigError("config: [sweep] count must be >= 1");
    if (!(cfg.sweep.start > 0.0) || !(cfg.sweep.stop >= cfg.sweep.start))
        throw ConfigError("config: [sweep] needs 0 < start <= stop");
    if (cfg.out_path.empty()) throw ConfigError("config: [output] path must not be empty");
    return cfg;
}

ExperimentConfig parse_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("config: cannot open '" + path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_config_text(buf.str());
}

std::string canonical_config_text(const ExperimentConfig& c) {
    std::ostringstream o;
    o << "[cell]\n";
    o << "lambda_o = \"" << fmt(c.cell.lambda_o) << " per_m2\"\n";
    o << "R_c = \"" << fmt(c.cell.R_c) << " m\"\n";
    o << "alpha = " << fmt(c.cell.alpha) << "\n";
    o << "P_t = \"" << fmt(c.cell.P_t) << " W\"\n";
    o << "sigma2 = \"" << fmt(c.cell.sigma2) << " W\"\n";
    o << "theta = \"" << fmt(c.cell.theta) << " linear\"\n";
    o << "channel = \"" << channel_name(c.cell.channel) << "\"\n";
    o << "[profile]\n";
    o << "a = \"" << fmt(c.prof_a) << " m\"\n";
    o << "b = \"" << fmt(c.prof_b) << " m\"\n";
    o << "D_o = " << fmt(c.prof_d0) << "\n";
    o << "[energy]\n";
    o << "eta_eps = " << fmt(c.energy.eta_eps) << "\n";
    o << "P_O = \"" << fmt(c.energy.P_O) << " W\"\n";
    o << "T_m = \"" << fmt(c.energy.T_m) << " s\"\n";
    o << "[mc]\n";
    o << "trials = " << c.mc_trials << "\n";
    o << "seed = " << c.mc_seed << "\n";
    o << "[sweep]\n";
    o << "axis = \"" << c.sweep.axis << "\"\n";
    o << "start = \"" << fmt(c.sweep.start) << " m\"\n";
    o << "stop = \"" << fmt(c.sweep.stop) << " m\"\n";
    o << "count = " << c.sweep.count << "\n";
    o << "scale = \"" << (c.sweep.log_scale ? "log" : "linear") << "\"\n";
    o << "[output]\n";
    o << "path = \"" << c.out_path << "\"\n";
    o << "format = \"" << (c.format == OutputFormat::Json ? "json" : "csv") << "\"\n";
    return o.str();
}

ExperimentConfig parse_embedded_config(const std::string& output_file_text) {
    std::istringstream in(output_file_text);
    std::string line;
    std::ostringstream block;
    bool seen = false;
    while (std::getline(in, line)) {
        if (line.rfind("# ", 0) == 0) {
            block << line.substr(2) << "\n";
            seen = true;
        } else if (seen) {
            break; // first comment block only
        }
    }
    if (!seen) throw ConfigError("no embedded '# ' config block found");
    return parse_config_text(block.str());
}

SweepSpec parse_sweep_flag(const std::string& flag) {
    std::vector<std::string> parts;
    std::string cur;
    for (char ch : flag) {
        if (ch == ':') {
            parts.push_back(cur);
            cur.clear();
        } else {
            cur += ch;
        }
    }
    parts.push_back(cur);
    if (parts.size() != 4 && parts.size() != 5)
        throw ConfigError("--sweep expects AXIS:START:STOP:COUNT[:log]");
    SweepSpec s;
    s.axis = parts[0];
    try {
        s.start = std::stod(parts[1]);
        s.stop = std::stod(parts[2]);
        s.count = std::stoi(parts[3]);
    } catch (const std::exception&) {
        throw ConfigError("--sweep: START/STOP/COUNT must be numeric (meters)");
    }
    if (parts.size() == 5) {
        if (parts[4] != "log") throw ConfigError("--sweep: trailing token must be 'log'");
        s.log_scale = true;
    }
    if (s.axis != "r" && s.axis != "b") throw ConfigError("--sweep: axis must be r or b");
    if (s.count < 1 || !(s.start > 0.0) || !(s.stop >= s.start))
        throw ConfigError("--sweep: needs 0 < start <= stop and count >= 1");
    return s;
}

} // namespace repcov
