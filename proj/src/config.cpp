#include "betactl/config.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <map>
#include <set>
#include <sstream>
#include <variant>

namespace betactl {

namespace {

struct Value {
    std::variant<double, bool, std::string> data;
    std::string text;  // raw token, for integer parsing
};

[[noreturn]] void fail_line(std::size_t line, const std::string& what) {
    throw ConfigError("line " + std::to_string(line) + ": " + what);
}

[[noreturn]] void fail_key(const std::string& key, const std::string& what) {
    throw ConfigError("invalid value for " + key + ": " + what);
}

std::string_view trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string_view::npos) return {};
    const auto last = s.find_last_not_of(" \t\r");
    return s.substr(first, last - first + 1);
}

bool valid_key(std::string_view key) {
    if (key.empty() || key.front() == '.' || key.back() == '.') return false;
    char prev = 0;
    for (char c : key) {
        const bool ok = std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '-' || c == '.';
        if (!ok || (c == '.' && prev == '.')) return false;
        prev = c;
    }
    return true;
}

// Drops a trailing comment that is not inside a string.
std::string_view strip_comment(std::string_view line) {
    bool in_string = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        const char c = line[i];
        if (in_string && c == '\\') {
            ++i;
        } else if (c == '"') {
            in_string = !in_string;
        } else if (c == '#' && !in_string) {
            return line.substr(0, i);
        }
    }
    return line;
}

Value parse_value(std::string_view tok, std::size_t line) {
    Value v;
    v.text = std::string(tok);
    if (tok.empty()) fail_line(line, "missing value");
    if (tok.front() == '"') {
        if (tok.size() < 2 || tok.back() != '"') fail_line(line, "unterminated string");
        std::string out;
        for (std::size_t i = 1; i + 1 < tok.size(); ++i) {
            char c = tok[i];
            if (c == '\\') {
                if (i + 2 >= tok.size()) fail_line(line, "bad escape in string");
                c = tok[++i];
                if (c == 'n') c = '\n';
                else if (c == 't') c = '\t';
                else if (c != '\\' && c != '"') fail_line(line, "bad escape in string");
            } else if (c == '"') {
                fail_line(line, "unexpected quote in string");
            }
            out.push_back(c);
        }
        v.data = std::move(out);
        return v;
    }
    if (tok == "true" || tok == "false") {
        v.data = tok == "true";
        return v;
    }
    std::string digits;
    for (char c : tok) {
        if (c != '_') digits.push_back(c);
    }
    const char* first = digits.data();
    const char* last = digits.data() + digits.size();
    if (first != last && *first == '+') ++first;
    double d = 0.0;
    const auto [ptr, ec] = std::from_chars(first, last, d);
    if (ec != std::errc{} || ptr != last || !std::isfinite(d)) {
        fail_line(line, "cannot parse value '" + std::string(tok) + "'");
    }
    v.data = d;
    v.text = digits;
    return v;
}

double as_number(const std::string& key, const Value& v) {
    if (const double* d = std::get_if<double>(&v.data)) return *d;
    fail_key(key, "expected a number");
}

bool as_bool(const std::string& key, const Value& v) {
    if (const bool* b = std::get_if<bool>(&v.data)) return *b;
    fail_key(key, "expected true or false");
}

const std::string& as_string(const std::string& key, const Value& v) {
    if (const std::string* s = std::get_if<std::string>(&v.data)) return *s;
    fail_key(key, "expected a quoted string");
}

std::int64_t as_integer(const std::string& key, const Value& v) {
    const double d = as_number(key, v);
    if (d != std::floor(d) || std::abs(d) > 9.0e15) fail_key(key, "expected an integer");
    return static_cast<std::int64_t>(d);
}

std::uint64_t as_seed(const std::string& key, const Value& v) {
    as_number(key, v);
    std::uint64_t seed = 0;
    const char* first = v.text.data();
    const char* last = first + v.text.size();
    if (first != last && *first == '+') ++first;
    const auto [ptr, ec] = std::from_chars(first, last, seed);
    if (ec != std::errc{} || ptr != last) fail_key(key, "seed must be a non-negative integer");
    return seed;
}

using Setter = std::function<void(const std::string&, const Value&, RunConfig&)>;

Setter positive(double PlantParams::*field) {
    return [field](const std::string& k, const Value& v, RunConfig& c) {
        const double d = as_number(k, v);
        if (!(d > 0.0)) fail_key(k, "must be positive");
        c.sim.plant.*field = d;
    };
}

Setter non_negative(double PlantParams::*field) {
    return [field](const std::string& k, const Value& v, RunConfig& c) {
        const double d = as_number(k, v);
        if (!(d >= 0.0)) fail_key(k, "must be non-negative");
        c.sim.plant.*field = d;
    };
}

const std::map<std::string, Setter>& setters() {
    static const std::map<std::string, Setter> table = [] {
        std::map<std::string, Setter> m;
        for (auto [name, field] : {std::pair{"c11", &PlantParams::c11}, {"c12", &PlantParams::c12},
                                   {"c21", &PlantParams::c21}, {"c22", &PlantParams::c22},
                                   {"b1", &PlantParams::b1}, {"b2", &PlantParams::b2},
                                   {"d11", &PlantParams::d11}, {"d12", &PlantParams::d12},
                                   {"d21", &PlantParams::d21}, {"d22", &PlantParams::d22}}) {
            m[std::string("plant.") + name] = non_negative(field);
        }
        for (auto [name, field] : {std::pair{"tau1", &PlantParams::tau1}, {"tau2", &PlantParams::tau2},
                                   {"m1", &PlantParams::m1}, {"m2", &PlantParams::m2},
                                   {"B1", &PlantParams::B1}, {"B2", &PlantParams::B2}}) {
            m[std::string("plant.") + name] = positive(field);
        }
        m["plant.u2_sign"] = [](const std::string& k, const Value& v, RunConfig& c) {
            const double d = as_number(k, v);
            if (d != 1.0 && d != -1.0) fail_key(k, "must be 1 or -1");
            c.sim.plant.u2_sign = d;
        };

        m["dsp.f_lo"] = [](const std::string& k, const Value& v, RunConfig& c) {
            const double d = as_number(k, v);
            if (!(d > 0.0)) fail_key(k, "must be positive");
            c.sim.dsp.f_lo = d;
        };
        m["dsp.f_hi"] = [](const std::string& k, const Value& v, RunConfig& c) {
            const double d = as_number(k, v);
            if (!(d > 0.0)) fail_key(k, "must be positive");
            c.sim.dsp.f_hi = d;
        };
        m["dsp.taps"] = [](const std::string& k, const Value& v, RunConfig& c) {
            const auto n = as_integer(k, v);
            if (n < 3 || n % 2 == 0) fail_key(k, "tap count must be odd and at least 3");
            c.sim.dsp.taps = static_cast<std::size_t>(n);
        };
        m["dsp.compensation_hz"] = [](const std::string& k, const Value& v, RunConfig& c) {
            const double d = as_number(k, v);
            if (!(d > 0.0)) fail_key(k, "must be positive");
            c.sim.dsp.compensation_hz = d;
        };

        m["control.alpha"] = [](const std::string& k, const Value& v, RunConfig& c) {
            const double d = as_number(k, v);
            if (d == 0.0) fail_key(k, "alpha must be nonzero");
            c.sim.control.alpha = d;
        };
        m["control.K"] = [](const std::string& k, const Value& v, RunConfig& c) {
            const double d = as_number(k, v);
            if (!(d > 0.0)) fail_key(k, "K must be positive");
            c.sim.control.K = d;
        };
        m["control.y_star"] = [](const std::string& k, const Value& v, RunConfig& c) {
            c.y_star = as_number(k, v);
        };
        m["control.u_min"] = [](const std::string& k, const Value& v, RunConfig& c) {
            c.sim.control.u_min = as_number(k, v);
        };
        m["control.u_max"] = [](const std::string& k, const Value& v, RunConfig& c) {
            c.sim.control.u_max = as_number(k, v);
        };
        m["control.t_on"] = [](const std::string& k, const Value& v, RunConfig& c) {
            const double d = as_number(k, v);
            if (!(d >= 0.0)) fail_key(k, "must be non-negative");
            c.sim.control.t_on = d;
        };
        m["control.estimator"] = [](const std::string& k, const Value& v, RunConfig& c) {
            const std::string& s = as_string(k, v);
            if (s == "filtered") c.sim.estimator.variant = EstimatorVariant::filtered;
            else if (s == "windowed") c.sim.estimator.variant = EstimatorVariant::windowed;
            else fail_key(k, "expected \"filtered\" or \"windowed\"");
        };
        m["control.discretization"] = [](const std::string& k, const Value& v, RunConfig& c) {
            const std::string& s = as_string(k, v);
            if (s == "forward_euler") c.sim.estimator.discretization = Discretization::forward_euler;
            else if (s == "exact") c.sim.estimator.discretization = Discretization::exact;
            else fail_key(k, "expected \"forward_euler\" or \"exact\"");
        };
        m["control.tau_f"] = [](const std::string& k, const Value& v, RunConfig& c) {
            const double d = as_number(k, v);
            if (!(d > 0.0)) fail_key(k, "must be positive");
            c.sim.estimator.tau_f = d;
        };
        m["control.tau_w"] = [](const std::string& k, const Value& v, RunConfig& c) {
            const double d = as_number(k, v);
            if (!(d > 0.0)) fail_key(k, "must be positive");
            c.sim.estimator.tau_w = d;
        };

        m["sim.h"] = [](const std::string& k, const Value& v, RunConfig& c) {
            const double d = as_number(k, v);
            if (!(d > 0.0)) fail_key(k, "must be positive");
            c.sim.h = d;
        };
        m["sim.prehistory_p"] = [](const std::string& k, const Value& v, RunConfig& c) {
            c.sim.prehistory_p = as_number(k, v);
        };
        m["sim.prehistory_offset_x1"] = [](const std::string& k, const Value& v, RunConfig& c) {
            c.sim.prehistory_offset_x1 = as_number(k, v);
        };
        m["sim.prehistory_offset_x2"] = [](const std::string& k, const Value& v, RunConfig& c) {
            c.sim.prehistory_offset_x2 = as_number(k, v);
        };

        m["scenario.id"] = [](const std::string& k, const Value& v, RunConfig& c) {
            const auto id = as_integer(k, v);
            if (id < 1 || id > 3) fail_key(k, "scenario id must be 1, 2 or 3");
            c.scenario_id = static_cast<int>(id);
        };
        m["scenario.seed"] = [](const std::string& k, const Value& v, RunConfig& c) {
            c.seed = as_seed(k, v);
        };
        m["scenario.duration_s"] = [](const std::string& k, const Value& v, RunConfig& c) {
            const double d = as_number(k, v);
            if (!(d > 0.0)) fail_key(k, "must be positive");
            c.duration = d;
        };
        m["mode"] = [](const std::string& k, const Value& v, RunConfig& c) {
            try {
                c.mode = parse_loop_mode(as_string(k, v));
            } catch (const ConfigError&) {
                throw;
            } catch (const Error& e) {
                fail_key(k, e.what());
            }
        };

        m["output.dir"] = [](const std::string& k, const Value& v, RunConfig& c) {
            c.out_dir = as_string(k, v);
            if (c.out_dir.empty()) fail_key(k, "must not be empty");
        };
        m["output.csv"] = [](const std::string& k, const Value& v, RunConfig& c) { c.write_csv = as_bool(k, v); };
        m["output.svg"] = [](const std::string& k, const Value& v, RunConfig& c) { c.write_svg = as_bool(k, v); };
        m["output.metrics"] = [](const std::string& k, const Value& v, RunConfig& c) {
            c.write_metrics = as_bool(k, v);
        };
        return m;
    }();
    return table;
}

void validate(const RunConfig& c) {
    const auto& s = c.sim;
    const double nyquist = 0.5 / s.h;
    if (!(s.dsp.f_lo < s.dsp.f_hi)) throw ConfigError("dsp.f_lo must be below dsp.f_hi");
    if (!(s.dsp.f_hi < nyquist)) throw ConfigError("dsp.f_hi must be below the Nyquist rate 1/(2 sim.h)");
    if (!(s.control.u_min < s.control.u_max)) throw ConfigError("control.u_min must be below control.u_max");
    if (!(s.plant.B1 < s.plant.m1)) throw ConfigError("plant.B1 must be below plant.m1");
    if (!(s.plant.B2 < s.plant.m2)) throw ConfigError("plant.B2 must be below plant.m2");
    if (s.estimator.variant == EstimatorVariant::windowed && s.estimator.tau_w < s.h) {
        throw ConfigError("control.tau_w must be at least sim.h");
    }
    for (double d : {s.plant.d11, s.plant.d12, s.plant.d21, s.plant.d22}) {
        if (d != 0.0 && d < s.h) throw ConfigError("nonzero plant delays must be at least sim.h");
    }
}

}  // namespace

Scenario RunConfig::scenario(int id) const {
    Scenario sc = scenario_by_id(id);
    sc.seed = seed;
    if (duration) sc.duration = *duration;
    if (y_star) sc.y_star = *y_star;
    return sc;
}

RunConfig parse_config_text(std::string_view text) {
    RunConfig cfg;
    std::string table;
    std::set<std::string> seen;
    std::size_t line_no = 0;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        const auto eol = text.find('\n', pos);
        const std::string_view raw = text.substr(pos, eol == std::string_view::npos ? text.size() - pos : eol - pos);
        pos = eol == std::string_view::npos ? text.size() + 1 : eol + 1;
        ++line_no;

        const std::string_view line = trim(strip_comment(raw));
        if (line.empty()) continue;
        if (line.front() == '[') {
            if (line.back() != ']') fail_line(line_no, "unterminated table header");
            const std::string_view name = trim(line.substr(1, line.size() - 2));
            if (!valid_key(name)) fail_line(line_no, "bad table name '" + std::string(name) + "'");
            table = std::string(name);
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string_view::npos) fail_line(line_no, "expected 'key = value'");
        const std::string_view key = trim(line.substr(0, eq));
        if (!valid_key(key)) fail_line(line_no, "bad key '" + std::string(key) + "'");
        const Value value = parse_value(trim(line.substr(eq + 1)), line_no);

        const std::string full = table.empty() ? std::string(key) : table + "." + std::string(key);
        const auto it = setters().find(full);
        if (it == setters().end()) throw ConfigError("unknown key '" + full + "' (line " + std::to_string(line_no) + ")");
        if (!seen.insert(full).second) fail_line(line_no, "duplicate key '" + full + "'");
        it->second(full, value, cfg);
    }
    validate(cfg);
    return cfg;
}

RunConfig parse_config(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("cannot open config file '" + path.string() + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    try {
        return parse_config_text(ss.str());
    } catch (const ConfigError& e) {
        throw ConfigError(path.string() + ": " + e.what());
    }
}

}  // namespace betactl
