// config.hpp: job configuration: schema, INI-style parser, serializer, hash.
//
// The document is flat `key = value` lines with one level of `[section]`
// headers. `job` and `model` live before the first section. Comments start
// with '#' or ';' at the beginning of a line or after whitespace.

#pragma once

#include "../errors.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace cqed::cli {

enum class JobKind { spectrum, vacuum, gauge, steady, gap, regime, evolve };

inline constexpr JobKind kAllJobs[] = {JobKind::spectrum, JobKind::vacuum, JobKind::gauge, JobKind::steady,
                                       JobKind::gap,      JobKind::regime, JobKind::evolve};

inline const char* job_name(JobKind j) {
    switch (j) {
    case JobKind::spectrum: return "spectrum";
    case JobKind::vacuum: return "vacuum";
    case JobKind::gauge: return "gauge";
    case JobKind::steady: return "steady";
    case JobKind::gap: return "gap";
    case JobKind::regime: return "regime";
    case JobKind::evolve: return "evolve";
    }
    return "?";
}

inline std::optional<JobKind> find_job(std::string_view s) {
    for (JobKind j : kAllJobs)
        if (s == job_name(j)) return j;
    return std::nullopt;
}

inline bool is_open_system(JobKind j) {
    return j == JobKind::steady || j == JobKind::gap || j == JobKind::evolve;
}

struct JobConfig {
    JobKind job = JobKind::spectrum;
    std::string model = "rabi";

    // [physics]
    double omega_c = 1.0;
    double omega_eg = 1.0;
    double epsilon = 0.0;
    double coupling = 0.1;
    int n_spins = 1;
    bool bosonized = false;

    // [sweep]
    double start = 0.0;
    double stop = 1.5;
    int count = 151;

    // [numerics]
    int n_fock = 40;
    int levels = 6;
    int n_points = 1024;
    double tolerance = 1e-6;
    bool compare_jcm = false;
    bool fast = false;

    // [bath]
    double gamma_cavity = 1e-3;
    double gamma_atom = 1e-3;
    double temperature_cavity = 0.0;
    double temperature_atom = 0.05;
    std::string spectral_density = "flat";
    std::vector<std::string> kinds{"standard", "dressed", "generalized"};
    std::string kind = "dressed";

    // [matter]
    double quartic = 50.0;
    double anharmonicity = 45.0;
    double mass = 1.0;
    int matter_levels = 8;
    int gap_levels = 4;

    // [evolve]
    double t_final = 1000.0;
    int steps = 11;
    int initial_photons = 1;
    int initial_excited = 0;

    // [output]
    std::string path;

    bool operator==(const JobConfig&) const = default;
};

// Per-job starting point before the file and flags are applied.
inline JobConfig defaults(JobKind j) {
    JobConfig c;
    c.job = j;
    switch (j) {
    case JobKind::spectrum: break;
    case JobKind::vacuum:
        c.stop = 2.0;
        c.count = 101;
        c.n_fock = 60;
        break;
    case JobKind::gauge:
        c.stop = 0.5;
        c.count = 26;
        c.n_fock = 40;
        break;
    case JobKind::steady:
        c.stop = 2.5;
        c.count = 26;
        break;
    case JobKind::gap:
        c.start = 1.0;
        c.stop = 2.5;
        c.count = 16;
        c.spectral_density = "ohmic";
        c.temperature_atom = 0.0;
        break;
    case JobKind::regime: break;
    case JobKind::evolve:
        c.n_fock = 20;
        c.temperature_atom = 0.0;
        break;
    }
    return c;
}

// Reduced-accuracy preset.
inline void apply_fast(JobConfig& c) {
    c.fast = true;
    c.n_fock = std::min(c.n_fock, is_open_system(c.job) ? 20 : 30);
    c.count = std::min(c.count, 11);
}

// --------------------------------------------------------------------------
// Schema
// --------------------------------------------------------------------------

using Member = std::variant<double JobConfig::*, int JobConfig::*, bool JobConfig::*, std::string JobConfig::*,
                            std::vector<std::string> JobConfig::*>;

struct KeySpec {
    const char* section; // "" for the top level
    const char* name;
    Member member;
};

inline const std::vector<KeySpec>& schema() {
    static const std::vector<KeySpec> keys = {
        {"", "model", &JobConfig::model},
        {"physics", "omega_c", &JobConfig::omega_c},
        {"physics", "omega_eg", &JobConfig::omega_eg},
        {"physics", "epsilon", &JobConfig::epsilon},
        {"physics", "coupling", &JobConfig::coupling},
        {"physics", "n_spins", &JobConfig::n_spins},
        {"physics", "bosonized", &JobConfig::bosonized},
        {"sweep", "start", &JobConfig::start},
        {"sweep", "stop", &JobConfig::stop},
        {"sweep", "count", &JobConfig::count},
        {"numerics", "n_fock", &JobConfig::n_fock},
        {"numerics", "levels", &JobConfig::levels},
        {"numerics", "n_points", &JobConfig::n_points},
        {"numerics", "tolerance", &JobConfig::tolerance},
        {"numerics", "compare_jcm", &JobConfig::compare_jcm},
        {"numerics", "fast", &JobConfig::fast},
        {"bath", "gamma_cavity", &JobConfig::gamma_cavity},
        {"bath", "gamma_atom", &JobConfig::gamma_atom},
        {"bath", "temperature_cavity", &JobConfig::temperature_cavity},
        {"bath", "temperature_atom", &JobConfig::temperature_atom},
        {"bath", "spectral_density", &JobConfig::spectral_density},
        {"bath", "kinds", &JobConfig::kinds},
        {"bath", "kind", &JobConfig::kind},
        {"matter", "quartic", &JobConfig::quartic},
        {"matter", "anharmonicity", &JobConfig::anharmonicity},
        {"matter", "mass", &JobConfig::mass},
        {"matter", "matter_levels", &JobConfig::matter_levels},
        {"matter", "gap_levels", &JobConfig::gap_levels},
        {"evolve", "t_final", &JobConfig::t_final},
        {"evolve", "steps", &JobConfig::steps},
        {"evolve", "initial_photons", &JobConfig::initial_photons},
        {"evolve", "initial_excited", &JobConfig::initial_excited},
        {"output", "path", &JobConfig::path},
    };
    return keys;
}

inline const std::vector<std::string>& sections() {
    static const std::vector<std::string> s = {"physics", "sweep", "numerics", "bath", "matter", "evolve", "output"};
    return s;
}

inline const KeySpec* find_key(std::string_view section, std::string_view name) {
    for (const KeySpec& k : schema())
        if (section == k.section && name == k.name) return &k;
    return nullptr;
}

// Key names are unique across sections, so flags need no section prefix.
inline const KeySpec* find_key_anywhere(std::string_view name) {
    for (const KeySpec& k : schema())
        if (name == k.name) return &k;
    return nullptr;
}

inline std::string valid_keys(std::string_view section) {
    std::string out;
    if (section.empty()) out = "job";
    for (const KeySpec& k : schema()) {
        if (section != k.section) continue;
        if (!out.empty()) out += ", ";
        out += k.name;
    }
    return out;
}

// --------------------------------------------------------------------------
// Values
// --------------------------------------------------------------------------

inline std::string format_real(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

namespace detail {

// Thrown by the value converters; the caller attaches a location.
struct BadValue {
    std::string what;
};

inline double parse_real(std::string_view s) {
    if (s == "inf" || s == "+inf") return HUGE_VAL;
    if (s == "-inf") return -HUGE_VAL;
    double v = 0.0;
    const char* b = s.data();
    if (!s.empty() && s.front() == '+') ++b;
    const auto [p, ec] = std::from_chars(b, s.data() + s.size(), v);
    if (s.empty() || ec != std::errc() || p != s.data() + s.size() || std::isnan(v)) {
        throw BadValue{"expected a real number, got '" + std::string(s) + "'"};
    }
    return v;
}

inline int parse_int(std::string_view s) {
    int v = 0;
    const char* b = s.data();
    if (!s.empty() && s.front() == '+') ++b;
    const auto [p, ec] = std::from_chars(b, s.data() + s.size(), v);
    if (s.empty() || ec != std::errc() || p != s.data() + s.size()) {
        throw BadValue{"expected an integer, got '" + std::string(s) + "'"};
    }
    return v;
}

inline bool parse_bool(std::string_view s) {
    if (s == "true" || s == "yes" || s == "on" || s == "1") return true;
    if (s == "false" || s == "no" || s == "off" || s == "0") return false;
    throw BadValue{"expected true or false, got '" + std::string(s) + "'"};
}

inline std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
    return s;
}

inline std::vector<std::string> parse_list(std::string_view s) {
    std::vector<std::string> out;
    while (true) {
        const auto comma = s.find(',');
        const std::string_view item = trim(s.substr(0, comma));
        if (item.empty()) throw BadValue{"empty item in list"};
        out.emplace_back(item);
        if (comma == std::string_view::npos) break;
        s.remove_prefix(comma + 1);
    }
    return out;
}

} // namespace detail

inline void set_value(JobConfig& c, const KeySpec& k, std::string_view text) {
    std::visit(
        [&](auto m) {
            using T = std::remove_reference_t<decltype(c.*m)>;
            if constexpr (std::is_same_v<T, double>) c.*m = detail::parse_real(text);
            else if constexpr (std::is_same_v<T, int>) c.*m = detail::parse_int(text);
            else if constexpr (std::is_same_v<T, bool>) c.*m = detail::parse_bool(text);
            else if constexpr (std::is_same_v<T, std::string>) c.*m = std::string(text);
            else c.*m = detail::parse_list(text);
        },
        k.member);
}

inline std::string get_value(const JobConfig& c, const KeySpec& k) {
    return std::visit(
        [&](auto m) -> std::string {
            const auto& v = c.*m;
            using T = std::remove_cvref_t<decltype(v)>;
            if constexpr (std::is_same_v<T, double>) return format_real(v);
            else if constexpr (std::is_same_v<T, int>) return std::to_string(v);
            else if constexpr (std::is_same_v<T, bool>) return v ? "true" : "false";
            else if constexpr (std::is_same_v<T, std::string>) return v;
            else {
                std::string out;
                for (std::size_t i = 0; i < v.size(); ++i) out += (i ? "," : "") + v[i];
                return out;
            }
        },
        k.member);
}

// --------------------------------------------------------------------------
// Validation
// --------------------------------------------------------------------------

namespace detail {

[[noreturn]] inline void reject(const char* field, const std::string& constraint) {
    throw InvalidArgument(std::string(field) + ": " + constraint);
}

inline void require(bool ok, const char* field, const std::string& constraint) {
    if (!ok) reject(field, constraint);
}

inline std::string got(double v) { return " (got " + format_real(v) + ")"; }
inline std::string got(int v) { return " (got " + std::to_string(v) + ")"; }

} // namespace detail

inline const std::vector<std::string>& master_equation_kinds() {
    static const std::vector<std::string> k = {"standard", "dressed", "generalized"};
    return k;
}

inline void validate(const JobConfig& c) {
    using detail::got;
    using detail::require;
    const bool spectrum_models = c.model == "rabi" || c.model == "jcm" || c.model == "polaron" || c.model == "dicke";
    if (c.job == JobKind::spectrum) {
        require(spectrum_models, "model", "must be one of rabi, jcm, polaron, dicke for spectrum jobs (got '" + c.model + "')");
    } else {
        require(c.model == "rabi", "model", std::string("must be rabi for ") + job_name(c.job) + " jobs (got '" + c.model + "')");
    }
    require(c.omega_c > 0.0, "omega_c", "must be > 0" + got(c.omega_c));
    require(c.omega_eg >= 0.0, "omega_eg", "must be >= 0" + got(c.omega_eg));
    require(std::isfinite(c.epsilon), "epsilon", "must be finite");
    require(c.coupling >= 0.0 && std::isfinite(c.coupling), "coupling", "must be finite and >= 0" + got(c.coupling));
    require(c.n_spins >= 1, "n_spins", "must be >= 1" + got(c.n_spins));
    require(c.count >= 2, "count", "must be >= 2" + got(c.count));
    require(std::isfinite(c.start) && std::isfinite(c.stop), "start", "sweep bounds must be finite");
    require(c.start >= 0.0, "start", "must be >= 0" + got(c.start));
    require(c.stop > c.start, "stop", "must be > start" + got(c.stop));
    require(c.n_fock >= 2, "n_fock", "must be >= 2" + got(c.n_fock));
    require(c.levels >= 1, "levels", "must be >= 1" + got(c.levels));
    require(c.n_points >= 64, "n_points", "must be >= 64" + got(c.n_points));
    require(c.tolerance > 0.0 && c.tolerance < 1.0, "tolerance", "must lie in (0, 1)" + got(c.tolerance));
    require(c.gamma_cavity >= 0.0, "gamma_cavity", "must be >= 0" + got(c.gamma_cavity));
    require(c.gamma_atom >= 0.0, "gamma_atom", "must be >= 0" + got(c.gamma_atom));
    require(c.temperature_cavity >= 0.0, "temperature_cavity", "must be >= 0" + got(c.temperature_cavity));
    require(c.temperature_atom >= 0.0, "temperature_atom", "must be >= 0" + got(c.temperature_atom));
    require(c.spectral_density == "flat" || c.spectral_density == "ohmic", "spectral_density",
            "must be flat or ohmic (got '" + c.spectral_density + "')");
    const auto& mk = master_equation_kinds();
    require(std::find(mk.begin(), mk.end(), c.kind) != mk.end(), "kind",
            "must be standard, dressed or generalized (got '" + c.kind + "')");
    require(!c.kinds.empty(), "kinds", "must name at least one kind");
    std::set<std::string> seen;
    for (const std::string& k : c.kinds) {
        require(std::find(mk.begin(), mk.end(), k) != mk.end(), "kinds",
                "entries must be standard, dressed or generalized (got '" + k + "')");
        require(seen.insert(k).second, "kinds", "duplicate entry '" + k + "'");
    }
    require(c.quartic > 0.0, "quartic", "must be > 0" + got(c.quartic));
    require(c.anharmonicity > 0.0, "anharmonicity", "must be > 0" + got(c.anharmonicity));
    require(c.mass > 0.0, "mass", "must be > 0" + got(c.mass));
    require(c.matter_levels >= 2, "matter_levels", "must be >= 2" + got(c.matter_levels));
    require(c.gap_levels >= 1, "gap_levels", "must be >= 1" + got(c.gap_levels));
    require(c.t_final > 0.0, "t_final", "must be > 0" + got(c.t_final));
    require(c.steps >= 2, "steps", "must be >= 2" + got(c.steps));
    require(c.initial_photons >= 0 && c.initial_photons < c.n_fock, "initial_photons",
            "must lie in [0, n_fock)" + got(c.initial_photons));
    require(c.initial_excited == 0 || c.initial_excited == 1, "initial_excited", "must be 0 or 1" + got(c.initial_excited));
    if (c.job == JobKind::spectrum) {
        require(c.levels <= 2 * c.n_fock, "levels", "exceeds the Hilbert-space dimension" + got(c.levels));
    }
    if (c.job == JobKind::gauge) {
        require(c.gap_levels < 2 * c.n_fock, "gap_levels", "exceeds the two-level dimension" + got(c.gap_levels));
    }
    if (c.compare_jcm) {
        require(c.job == JobKind::spectrum && c.model == "rabi", "compare_jcm", "only applies to spectrum jobs with model = rabi");
    }
}

// --------------------------------------------------------------------------
// Parsing and serialization
// --------------------------------------------------------------------------

struct ParsedLine {
    std::size_t line;
    std::size_t value_column;
    const KeySpec* key;
    std::string value;
};

namespace detail {

inline bool is_key_char(char ch) {
    return (ch >= 'a' && ch <= 'z') || (ch >= 'A' && ch <= 'Z') || (ch >= '0' && ch <= '9') || ch == '_';
}

// Strips a trailing comment introduced by whitespace + '#' or ';'.
inline std::string_view strip_comment(std::string_view s) {
    for (std::size_t i = 0; i < s.size(); ++i) {
        if ((s[i] == '#' || s[i] == ';') && (i == 0 || s[i - 1] == ' ' || s[i - 1] == '\t')) return s.substr(0, i);
    }
    return s;
}

} // namespace detail

// Parses a document into a validated config. `job_hint` comes from the
// subcommand; a `job` key in the document must agree with it.
inline JobConfig parse_config(std::string_view text, std::optional<JobKind> job_hint = std::nullopt) {
    std::vector<ParsedLine> entries;
    std::optional<JobKind> job_key;
    std::size_t job_line = 0;
    std::string section;
    std::set<std::string> seen;

    std::size_t line_no = 0;
    for (std::size_t pos = 0; pos <= text.size();) {
        ++line_no;
        const auto nl = text.find('\n', pos);
        const std::string_view raw = text.substr(pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos);
        pos = nl == std::string_view::npos ? text.size() + 1 : nl + 1;

        const std::string_view body = detail::trim(detail::strip_comment(raw));
        if (body.empty()) continue;
        const std::size_t col0 = static_cast<std::size_t>(body.data() - raw.data()) + 1;

        if (body.front() == '[') {
            if (body.back() != ']') throw ParseError(line_no, col0 + body.size(), "expected ']' to close section header");
            const std::string name(detail::trim(body.substr(1, body.size() - 2)));
            if (std::find(sections().begin(), sections().end(), name) == sections().end()) {
                std::string all;
                for (const auto& s : sections()) all += (all.empty() ? "" : ", ") + s;
                throw ParseError(line_no, col0 + 1, "unknown section '" + name + "'; valid sections: " + all);
            }
            section = name;
            continue;
        }

        std::size_t k = 0;
        while (k < body.size() && detail::is_key_char(body[k])) ++k;
        if (k == 0) throw ParseError(line_no, col0, "expected a key");
        const std::string key(body.substr(0, k));
        std::size_t eq = k;
        while (eq < body.size() && (body[eq] == ' ' || body[eq] == '\t')) ++eq;
        if (eq >= body.size() || body[eq] != '=') throw ParseError(line_no, col0 + eq, "expected '=' after key '" + key + "'");
        const std::string_view value = detail::trim(body.substr(eq + 1));
        const std::size_t value_col = value.empty() ? col0 + eq + 1 : static_cast<std::size_t>(value.data() - raw.data()) + 1;

        const std::string qualified = section + "." + key;
        if (!seen.insert(qualified).second) throw ParseError(line_no, col0, "duplicate key '" + key + "'");

        if (section.empty() && key == "job") {
            job_key = find_job(value);
            if (!job_key) {
                throw ParseError(line_no, value_col,
                                 "unknown job '" + std::string(value) +
                                     "'; valid jobs: spectrum, vacuum, gauge, steady, gap, regime, evolve");
            }
            job_line = line_no;
            continue;
        }
        const KeySpec* spec = find_key(section, key);
        if (!spec) {
            const std::string where = section.empty() ? "top level" : "section [" + section + "]";
            throw ParseError(line_no, col0, "unknown key '" + key + "' in " + where + "; valid keys: " + valid_keys(section));
        }
        entries.push_back({line_no, value_col, spec, std::string(value)});
    }

    if (job_key && job_hint && *job_key != *job_hint) {
        throw ParseError(job_line, 1, std::string("config declares job '") + job_name(*job_key) +
                                          "' but the command requests '" + job_name(*job_hint) + "'");
    }
    const std::optional<JobKind> job = job_key ? job_key : job_hint;
    if (!job) throw InvalidArgument("job: not given (set `job = ...` or use a subcommand)");

    JobConfig cfg = defaults(*job);
    for (const ParsedLine& e : entries) {
        if (e.value.empty() && !std::holds_alternative<std::string JobConfig::*>(e.key->member)) {
            throw ParseError(e.line, e.value_column, std::string("missing value for '") + e.key->name + "'");
        }
        try {
            set_value(cfg, *e.key, e.value);
        } catch (const detail::BadValue& b) {
            throw ParseError(e.line, e.value_column, std::string(e.key->name) + ": " + b.what);
        }
    }
    validate(cfg);
    return cfg;
}

// Canonical document: every key, fixed order, 17-digit reals.
inline std::string serialize(const JobConfig& c) {
    std::ostringstream os;
    os << "job = " << job_name(c.job) << "\n";
    for (const KeySpec& k : schema())
        if (std::string_view(k.section).empty()) os << k.name << " = " << get_value(c, k) << "\n";
    for (const std::string& s : sections()) {
        os << "\n[" << s << "]\n";
        for (const KeySpec& k : schema())
            if (s == k.section) os << k.name << " = " << get_value(c, k) << "\n";
    }
    return os.str();
}

inline std::uint64_t fnv1a64(std::string_view s) {
    std::uint64_t h = 0xcbf29ce484222325ull;
    for (const unsigned char ch : s) {
        h ^= ch;
        h *= 0x100000001b3ull;
    }
    return h;
}

// Hash of the canonical document without the [output] section, so the same
// physics written to two places carries the same hash.
inline std::string config_hash(const JobConfig& c) {
    JobConfig physics = c;
    physics.path.clear();
    char buf[24];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(fnv1a64(serialize(physics))));
    return buf;
}

// Command-line override of one key, addressed by its bare name.
inline void apply_override(JobConfig& c, std::string_view name, std::string_view value) {
    const KeySpec* k = find_key_anywhere(name);
    if (!k) throw InvalidArgument("--" + std::string(name) + ": unknown option");
    try {
        set_value(c, *k, detail::trim(value));
    } catch (const detail::BadValue& b) {
        throw InvalidArgument("--" + std::string(name) + ": " + b.what);
    }
}

} // namespace cqed::cli
