// Command-line front end.  Five subcommands: `rootsys` inspects restricted
// root systems (cascade, decay weight, dominance), `analyze-flow` reduces a
// generator matrix to its Jordan type, `classify` turns a group spec into a
// summable-decay verdict, `simulate` runs the Monte Carlo experiments from a
// config file into an output directory with a manifest, and `report` digests
// such a directory and re-verifies its config hash.
//
// Exit codes double as a machine API: 0 success (for classify: verdict
// "yes"), 1/2 the other classify verdicts, 64 usage errors, 65 malformed
// configs or input data, 74 I/O failures.

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <cctype>
#include <cinttypes>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "homflow/experiments.hpp"
#include "homflow/liealg.hpp"
#include "homflow/modsurface.hpp"
#include "homflow/rootsys.hpp"
#include "homflow/sdclassify.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr const char* kToolVersion = "1.0.0";

constexpr int kExitUsage = 64;   // bad flags or flag values
constexpr int kExitConfig = 65;  // malformed config file or input data
constexpr int kExitIo = 74;      // filesystem failures

// Thrown from anywhere below; main() prints the message and exits with code.
struct ExitWith {
    int code;
    std::string message;
};

[[noreturn]] void fail(int code, const std::string& message) { throw ExitWith{code, message}; }

// ------------------------------------------------------------- small utils

std::string read_file(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    if (!in) fail(kExitIo, "cannot open " + p.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    if (in.bad()) fail(kExitIo, "cannot read " + p.string());
    return ss.str();
}

void write_file(const fs::path& p, const std::string& bytes) {
    std::ofstream out(p, std::ios::binary | std::ios::trunc);
    if (!out) fail(kExitIo, "cannot open " + p.string() + " for writing");
    out.write(bytes.data(), std::streamsize(bytes.size()));
    out.flush();
    if (!out) fail(kExitIo, "cannot write " + p.string());
}

std::string trim(const std::string& s) {
    std::size_t a = 0, b = s.size();
    while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
    while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
    return s.substr(a, b - a);
}

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::string cur;
    for (char ch : s) {
        if (ch == sep) {
            out.push_back(cur);
            cur.clear();
        } else {
            cur += ch;
        }
    }
    out.push_back(cur);
    return out;
}

std::string timestamp_utc() {
    std::time_t now = std::time(nullptr);
    char buf[32];
    std::tm tm_utc{};
    gmtime_r(&now, &tm_utc);
    std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm_utc);
    return buf;
}

std::string hash_hex(std::uint64_t h) {
    char buf[24];
    std::snprintf(buf, sizeof(buf), "%016" PRIx64, h);
    return buf;
}

// Flag values that may be inline JSON or a path to a file holding it.
std::string inline_or_file(const std::string& value, char json_open) {
    const std::string t = trim(value);
    if (!t.empty() && t[0] == json_open) return t;
    return read_file(t);
}

// ------------------------------------------------- typed config-value parsing

long long parse_int_value(const std::string& key, const std::string& raw) {
    const std::string t = trim(raw);
    try {
        std::size_t pos = 0;
        const long long v = std::stoll(t, &pos);
        if (pos != t.size()) throw std::invalid_argument("trailing characters");
        return v;
    } catch (const std::exception&) {
        fail(kExitConfig, "invalid value for config key '" + key + "': expected an integer, got '" + t + "'");
    }
}

std::uint64_t parse_seed_value(const std::string& key, const std::string& raw) {
    const std::string t = trim(raw);
    try {
        std::size_t pos = 0;
        const unsigned long long v = std::stoull(t, &pos);
        if (pos != t.size() || t.empty() || t[0] == '-') throw std::invalid_argument("not a seed");
        return v;
    } catch (const std::exception&) {
        fail(kExitConfig, "invalid value for config key '" + key + "': expected a nonnegative integer, got '" + t + "'");
    }
}

double parse_real_value(const std::string& key, const std::string& raw) {
    const std::string t = trim(raw);
    try {
        std::size_t pos = 0;
        const double v = std::stod(t, &pos);
        if (pos != t.size()) throw std::invalid_argument("trailing characters");
        return v;
    } catch (const std::exception&) {
        fail(kExitConfig, "invalid value for config key '" + key + "': expected a number, got '" + t + "'");
    }
}

// Comma-separated list, with optional surrounding [ ] so JSON arrays land here
// unchanged.
std::vector<std::string> list_items(const std::string& key, const std::string& raw) {
    std::string t = trim(raw);
    if (!t.empty() && t.front() == '[') {
        if (t.back() != ']') fail(kExitConfig, "invalid value for config key '" + key + "': unbalanced brackets");
        t = t.substr(1, t.size() - 2);
    }
    std::vector<std::string> items;
    for (const std::string& piece : split(t, ',')) {
        const std::string p = trim(piece);
        if (!p.empty()) items.push_back(p);
    }
    if (items.empty()) fail(kExitConfig, "invalid value for config key '" + key + "': empty list");
    return items;
}

std::vector<double> parse_real_list(const std::string& key, const std::string& raw) {
    std::vector<double> out;
    for (const std::string& item : list_items(key, raw)) out.push_back(parse_real_value(key, item));
    return out;
}

std::vector<long long> parse_int_list(const std::string& key, const std::string& raw) {
    std::vector<long long> out;
    for (const std::string& item : list_items(key, raw)) out.push_back(parse_int_value(key, item));
    return out;
}

// --------------------------------------------------------- config key table

struct KeyDoc {
    const char* key;
    const char* doc;
};

// The complete config vocabulary.  Keys outside this table are hard errors,
// as are table keys used with an experiment they do not apply to.
const KeyDoc kKeyDocs[] = {
    {"experiment", "hitting | loglaw | sbc | eah | mean_ergodic | matrix_decay | haar (required)"},
    {"flow", "horocycle | geodesic | custom (default horocycle)"},
    {"generator", "trace-free 2x2 matrix as a JSON array of rows; required iff flow = custom"},
    {"target", "hitting only: cusp | ball (default cusp)"},
    {"ball_center", "hitting only, target = ball: center as re,im (default 0,1.5)"},
    {"n_points", "number of Haar-random start points (default 100)"},
    {"m_max", "orbit step budget per point (default 100000)"},
    {"seed", "RNG seed; --seed overrides, HOMFLOW_SEED is the fallback (default 0)"},
    {"workers", "worker threads; --workers overrides (default 1)"},
    {"mu_schedule", "hitting: comma list of target measures in (0, 0.5) (default 1e-2,1e-3,1e-4)"},
    {"hit_index", "hitting: which hit to time, >= 1 (default 1)"},
    {"schedule", "sbc: harmonic | power | constant (default harmonic)"},
    {"c", "sbc (power/constant schedules) and eah: schedule coefficient (default 1)"},
    {"eta", "sbc power schedule (required there) and eah: exponent of mu_m = c m^-eta (eah default 0.5; 0 = constant)"},
    {"sbc_envelope_c", "sbc: Schmidt envelope constant (default 10)"},
    {"sbc_min_expected", "sbc: smallest admissible E_{m_max} (default 10)"},
    {"mu_f", "mean_ergodic: measure of the cusp indicator observable (default 0.1)"},
    {"mu_phi", "matrix_decay: measure of the first indicator (default 0.1)"},
    {"mu_psi", "matrix_decay: measure of the second indicator (default 0.1)"},
    {"t_grid", "matrix_decay: comma list of integer lags in [1, 1000] (default geometric grid)"},
    {"thresholds", "haar: comma list of height cutoffs >= 1 (default 1.5,2,4)"},
};

const std::set<std::string> kCommonKeys = {"experiment", "flow", "generator", "n_points",
                                           "m_max",      "seed", "workers"};

const std::map<std::string, std::set<std::string>> kExperimentKeys = {
    {"hitting", {"target", "ball_center", "mu_schedule", "hit_index"}},
    {"loglaw", {}},
    {"sbc", {"schedule", "c", "eta", "sbc_envelope_c", "sbc_min_expected"}},
    {"eah", {"c", "eta"}},
    {"mean_ergodic", {"mu_f"}},
    {"matrix_decay", {"mu_phi", "mu_psi", "t_grid"}},
    {"haar", {"thresholds"}},
};

std::string config_key_help() {
    std::ostringstream ss;
    ss << "Config keys (flat key=value lines with # comments, or a JSON object):\n";
    for (const KeyDoc& kd : kKeyDocs) ss << "  " << kd.key << "\n      " << kd.doc << "\n";
    return ss.str();
}

bool known_key(const std::string& key) {
    for (const KeyDoc& kd : kKeyDocs)
        if (key == kd.key) return true;
    return false;
}

// ------------------------------------------------------------ config parsing

using ConfigMap = std::map<std::string, std::string>;

ConfigMap parse_flat_config(const std::string& text) {
    ConfigMap kv;
    int lineno = 0;
    std::istringstream in(text);
    std::string line;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        const std::size_t hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        const std::size_t eq = line.find('=');
        if (eq == std::string::npos)
            fail(kExitConfig, "config line " + std::to_string(lineno) + ": expected key = value");
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (key.empty()) fail(kExitConfig, "config line " + std::to_string(lineno) + ": empty key");
        if (kv.count(key)) fail(kExitConfig, "duplicate config key '" + key + "'");
        kv[key] = value;
    }
    return kv;
}

// JSON values flatten to the same strings the flat format uses; the generator
// matrix stays as JSON text (it is re-parsed as such), lists join with commas.
std::string flatten_json_value(const std::string& key, const json& v) {
    if (v.is_string()) return v.get<std::string>();
    if (v.is_boolean() || v.is_number()) return v.dump();
    if (v.is_array()) return v.dump();
    fail(kExitConfig, "config key '" + key + "' has an unsupported JSON value type");
}

ConfigMap parse_config(const std::string& text) {
    const std::string t = trim(text);
    if (!t.empty() && t[0] == '{') {
        json j;
        try {
            j = json::parse(t);
        } catch (const json::exception& e) {
            fail(kExitConfig, std::string("config is not valid JSON: ") + e.what());
        }
        if (!j.is_object()) fail(kExitConfig, "JSON config must be an object");
        ConfigMap kv;
        for (const auto& [key, value] : j.items()) kv[key] = flatten_json_value(key, value);
        return kv;
    }
    return parse_flat_config(text);
}

// Rejects unknown keys and keys that do not apply to the chosen experiment.
std::string validate_config_keys(const ConfigMap& kv) {
    const auto exp_it = kv.find("experiment");
    if (exp_it == kv.end()) fail(kExitConfig, "missing config key 'experiment'");
    const std::string experiment = exp_it->second;
    const auto allowed_it = kExperimentKeys.find(experiment);
    if (allowed_it == kExperimentKeys.end()) {
        std::string names;
        for (const auto& [name, keys] : kExperimentKeys) names += (names.empty() ? "" : ", ") + name;
        fail(kExitConfig, "unknown experiment '" + experiment + "' (one of: " + names + ")");
    }
    for (const auto& [key, value] : kv) {
        if (kCommonKeys.count(key) || allowed_it->second.count(key)) continue;
        if (known_key(key))
            fail(kExitConfig,
                 "config key '" + key + "' does not apply to experiment '" + experiment + "'");
        fail(kExitConfig, "unknown config key '" + key + "'");
    }
    return experiment;
}

// --------------------------------------------------------------- subcommands

struct CommonFlags {
    std::optional<std::uint64_t> seed;
    std::optional<int> workers;
    std::string out;  // empty = no directory output
};

// Attach --seed/--workers/--out uniformly; every subcommand takes them.
void add_common_flags(CLI::App* cmd, CommonFlags& flags) {
    cmd->add_option_function<std::uint64_t>(
        "--seed", [&flags](const std::uint64_t& v) { flags.seed = v; },
        "RNG seed (overrides the config file; HOMFLOW_SEED is the fallback)");
    cmd->add_option_function<int>(
           "--workers", [&flags](const int& v) { flags.workers = v; },
           "worker threads (overrides the config file)")
        ->check(CLI::Range(1, 256));
    cmd->add_option("--out", flags.out, "output directory (created if absent)");
}

// Emit a subcommand's JSON to stdout and, when --out was given, to a file.
void emit_json(const std::string& text, const CommonFlags& flags, const char* filename) {
    std::cout << text;
    if (text.empty() || text.back() != '\n') std::cout << "\n";
    if (!flags.out.empty()) {
        std::error_code ec;
        fs::create_directories(flags.out, ec);
        if (ec) fail(kExitIo, "cannot create output directory " + flags.out + ": " + ec.message());
        write_file(fs::path(flags.out) / filename, text.back() == '\n' ? text : text + "\n");
    }
}

// ---- rootsys

struct RootsysArgs {
    std::string type;
    int rank = 0;
    std::string show = "cascade,xi,lambda1,dominance";
    CommonFlags common;
};

int run_rootsys(const RootsysArgs& a) {
    using namespace homflow;
    RootSystemType t{};
    const std::string ts = trim(a.type);
    if (ts.size() == 1) {
        const char f = char(std::toupper(static_cast<unsigned char>(ts[0])));
        if (f < 'A' || f > 'G') fail(kExitUsage, "unknown root-system family '" + ts + "' (A..G)");
        t = RootSystemType{RootFamily{f}, a.rank};
    } else {
        try {
            t = parse_type(ts);
        } catch (const std::exception& e) {
            fail(kExitUsage, std::string("bad --type: ") + e.what());
        }
        if (a.rank != 0 && a.rank != t.rank)
            fail(kExitUsage, "--rank " + std::to_string(a.rank) + " contradicts --type " + ts);
    }
    if (!admissible_type(t))
        fail(kExitUsage, "no irreducible root system " + std::string(1, char(t.family)) +
                             std::to_string(t.rank) + "; pass an admissible --type/--rank");

    std::set<std::string> show;
    for (const std::string& piece : split(a.show, ',')) {
        const std::string p = trim(piece);
        if (p.empty()) continue;
        if (p != "cascade" && p != "xi" && p != "lambda1" && p != "dominance")
            fail(kExitUsage, "unknown --show facet '" + p +
                                 "' (cascade, xi, lambda1, dominance)");
        show.insert(p);
    }
    if (show.empty()) fail(kExitUsage, "--show selects no facets");

    const RootSystem rs = build_root_system(t);
    json j;
    j["type"] = type_name(t);
    j["rank"] = t.rank;
    j["positive_roots"] = int(rs.positive.size());
    if (show.count("cascade")) {
        json cj = json::array();
        for (int idx : dominant_strong_orthogonal_system(rs)) cj.push_back(rs.positive[idx]);
        j["cascade"] = cj;
    }
    if (show.count("xi")) {
        json xj = json::array();
        for (const Rat& c : spherical_decay_weight(rs)) xj.push_back(c.str());
        j["xi"] = xj;
    }
    if (show.count("lambda1")) j["lambda1"] = highest_root(rs);
    if (show.count("dominance")) {
        j["dominance"] =
            dominates_on_chamber(spherical_decay_weight(rs), to_weight(highest_root(rs)));
        j["good_type"] = strong_decay_type(t);
    }
    emit_json(j.dump(2), a.common, "rootsys.json");
    return 0;
}

// ---- analyze-flow

struct AnalyzeArgs {
    std::string generator;
    CommonFlags common;
};

int run_analyze_flow(const AnalyzeArgs& a) {
    using namespace homflow;
    const std::string text = inline_or_file(a.generator, '[');
    FlowDescriptor fd;
    try {
        const Mat m = parse_matrix_json(text);
        fd = classify_flow(make_sl(int(m.rows()), m));
    } catch (const std::exception& e) {
        fail(kExitConfig, std::string("bad generator matrix: ") + e.what());
    }
    json j;
    j["n"] = fd.generator.n;
    json rows = json::array();
    for (int r = 0; r < fd.generator.n; ++r) {
        json row = json::array();
        for (int c = 0; c < fd.generator.n; ++c) row.push_back(fd.generator.entries(r, c));
        rows.push_back(row);
    }
    j["generator"] = rows;
    j["kind"] = flow_kind_name(fd.kind);
    if (fd.kind == FlowKind::QuasiUnipotent) j["l"] = fd.l;
    emit_json(j.dump(2), a.common, "analyze-flow.json");
    return 0;
}

// ---- classify

struct ClassifyArgs {
    std::string spec;
    CommonFlags common;
};

int run_classify(const ClassifyArgs& a) {
    using namespace homflow;
    const std::string text = inline_or_file(a.spec, '{');
    SDVerdict v;
    try {
        v = classify_semisimple(parse_group_spec_json(text));
    } catch (const std::exception& e) {
        fail(kExitConfig, std::string("bad group spec: ") + e.what());
    }
    emit_json(verdict_to_json(v), a.common, "classify.json");
    return verdict_exit_code(v);
}

// ---- simulate

struct SimulateArgs {
    std::string config_path;
    CommonFlags common;
};

struct RunOutput {
    std::vector<homflow::ResultRow> rows;
    json summary;
};

homflow::FlowSpec flow_from_config(const ConfigMap& kv) {
    using namespace homflow;
    const std::string flow = kv.count("flow") ? kv.at("flow") : "horocycle";
    if (flow == "custom") {
        if (!kv.count("generator")) fail(kExitConfig, "missing config key 'generator' (flow = custom)");
        try {
            return FlowSpec::custom(parse_matrix_json(kv.at("generator")));
        } catch (const std::exception& e) {
            fail(kExitConfig, std::string("invalid value for config key 'generator': ") + e.what());
        }
    }
    if (kv.count("generator"))
        fail(kExitConfig, "config key 'generator' requires flow = custom, not '" + flow + "'");
    if (flow == "horocycle") return FlowSpec::horocycle();
    if (flow == "geodesic") return FlowSpec::geodesic();
    fail(kExitConfig, "invalid value for config key 'flow': '" + flow +
                          "' (horocycle, geodesic, custom)");
}

homflow::TargetFamily target_from_config(const ConfigMap& kv) {
    using namespace homflow;
    const std::string target = kv.count("target") ? kv.at("target") : "cusp";
    if (target == "cusp") {
        if (kv.count("ball_center"))
            fail(kExitConfig, "config key 'ball_center' requires target = ball");
        return TargetFamily::cusp();
    }
    if (target != "ball")
        fail(kExitConfig, "invalid value for config key 'target': '" + target + "' (cusp, ball)");
    Cplx center(0.0, 1.5);
    if (kv.count("ball_center")) {
        const std::vector<double> c = parse_real_list("ball_center", kv.at("ball_center"));
        if (c.size() != 2) fail(kExitConfig, "invalid value for config key 'ball_center': expected re,im");
        center = Cplx(c[0], c[1]);
    }
    try {
        return TargetFamily::ball(center);
    } catch (const std::exception& e) {
        fail(kExitConfig, std::string("invalid value for config key 'ball_center': ") + e.what());
    }
}

RunOutput dispatch_experiment(const std::string& experiment, const ConfigMap& kv,
                              const homflow::ExperimentConfig& cfg) {
    using namespace homflow;
    if (experiment == "hitting") {
        HittingTimeParams p;
        if (kv.count("mu_schedule")) p.mu_schedule = parse_real_list("mu_schedule", kv.at("mu_schedule"));
        if (kv.count("hit_index")) p.hit_index = parse_int_value("hit_index", kv.at("hit_index"));
        const auto r = run_hitting_time_law(cfg, p);
        return {r.rows(), r.summary()};
    }
    if (experiment == "loglaw") {
        const auto r = run_cusp_loglaw(cfg);
        return {r.rows(), r.summary()};
    }
    if (experiment == "sbc") {
        const std::string name = kv.count("schedule") ? kv.at("schedule") : "harmonic";
        MeasureSchedule sched = MeasureSchedule::harmonic();
        if (name == "harmonic") {
            for (const char* k : {"c", "eta"})
                if (kv.count(k))
                    fail(kExitConfig, std::string("config key '") + k +
                                          "' does not apply to schedule 'harmonic'");
        } else if (name == "power") {
            if (!kv.count("eta")) fail(kExitConfig, "missing config key 'eta' (schedule = power)");
            sched = MeasureSchedule::power(kv.count("c") ? parse_real_value("c", kv.at("c")) : 1.0,
                                           parse_real_value("eta", kv.at("eta")));
        } else if (name == "constant") {
            if (kv.count("eta"))
                fail(kExitConfig, "config key 'eta' does not apply to schedule 'constant'");
            sched = MeasureSchedule::constant(kv.count("c") ? parse_real_value("c", kv.at("c")) : 1.0);
        } else {
            fail(kExitConfig, "invalid value for config key 'schedule': '" + name +
                                  "' (harmonic, power, constant)");
        }
        const double env = kv.count("sbc_envelope_c")
                               ? parse_real_value("sbc_envelope_c", kv.at("sbc_envelope_c"))
                               : 10.0;
        const double min_exp = kv.count("sbc_min_expected")
                                   ? parse_real_value("sbc_min_expected", kv.at("sbc_min_expected"))
                                   : 10.0;
        const auto r = run_sbc(cfg, sched, env, min_exp);
        return {r.rows(), r.summary()};
    }
    if (experiment == "eah") {
        const double c = kv.count("c") ? parse_real_value("c", kv.at("c")) : 1.0;
        const double eta = kv.count("eta") ? parse_real_value("eta", kv.at("eta")) : 0.5;
        const auto r = run_eah(cfg, c, eta);
        return {r.rows(), r.summary()};
    }
    if (experiment == "mean_ergodic") {
        const double mu_f = kv.count("mu_f") ? parse_real_value("mu_f", kv.at("mu_f")) : 0.1;
        const auto r = run_mean_ergodic(cfg, mu_f);
        return {r.rows(), r.summary()};
    }
    if (experiment == "matrix_decay") {
        const double mu_phi = kv.count("mu_phi") ? parse_real_value("mu_phi", kv.at("mu_phi")) : 0.1;
        const double mu_psi = kv.count("mu_psi") ? parse_real_value("mu_psi", kv.at("mu_psi")) : 0.1;
        std::vector<long long> grid;
        if (kv.count("t_grid")) grid = parse_int_list("t_grid", kv.at("t_grid"));
        const auto r = run_matrix_decay(cfg, mu_phi, mu_psi, grid);
        return {r.rows(), r.summary()};
    }
    if (experiment == "haar") {
        std::vector<double> thresholds = {1.5, 2.0, 4.0};
        if (kv.count("thresholds")) thresholds = parse_real_list("thresholds", kv.at("thresholds"));
        const auto r = run_haar_check(cfg, thresholds);
        return {r.rows(), r.summary()};
    }
    fail(kExitConfig, "unknown experiment '" + experiment + "'");
}

json make_manifest(const std::string& experiment, std::uint64_t config_hash, std::uint64_t seed,
                   int workers, const std::string& started, bool complete,
                   const std::string& finished) {
    json m;
    m["schema"] = 1;
    m["tool_version"] = kToolVersion;
    m["experiment"] = experiment;
    m["config_hash"] = hash_hex(config_hash);
    m["seed"] = seed;
    m["workers"] = workers;
    m["started"] = started;
    if (!finished.empty()) m["finished"] = finished;
    m["complete"] = complete;
    m["outputs"] = json::array({"config.snapshot", "results.csv", "summary.json"});
    return m;
}

int run_simulate(const SimulateArgs& a) {
    using namespace homflow;
    const std::string config_bytes = read_file(a.config_path);
    const std::uint64_t config_hash = fnv1a64(config_bytes);
    const ConfigMap kv = parse_config(config_bytes);
    const std::string experiment = validate_config_keys(kv);

    ExperimentConfig cfg;
    cfg.flow = flow_from_config(kv);
    if (experiment == "hitting") cfg.target = target_from_config(kv);
    if (kv.count("n_points")) cfg.n_points = parse_int_value("n_points", kv.at("n_points"));
    if (kv.count("m_max")) cfg.m_max = parse_int_value("m_max", kv.at("m_max"));

    // Seed precedence: --seed flag, config key, HOMFLOW_SEED, 0.
    if (a.common.seed) {
        cfg.seed = *a.common.seed;
    } else if (kv.count("seed")) {
        cfg.seed = parse_seed_value("seed", kv.at("seed"));
    } else if (const char* env = std::getenv("HOMFLOW_SEED")) {
        cfg.seed = parse_seed_value("HOMFLOW_SEED", env);
    }
    if (a.common.workers) {
        cfg.workers = *a.common.workers;
    } else if (kv.count("workers")) {
        cfg.workers = int(parse_int_value("workers", kv.at("workers")));
    }

    const std::string out_dir = a.common.out.empty() ? std::string("out") : a.common.out;
    std::error_code ec;
    fs::create_directories(out_dir, ec);
    if (ec) fail(kExitIo, "cannot create output directory " + out_dir + ": " + ec.message());
    const fs::path out(out_dir);

    // The manifest lands before any computation, marked incomplete; a run cut
    // down mid-flight leaves it behind as the interrupt record.  Success
    // rewrites it with complete = true and the finish timestamp.
    const std::string started = timestamp_utc();
    write_file(out / "config.snapshot", config_bytes);
    write_file(out / "manifest.json",
               make_manifest(experiment, config_hash, cfg.seed, cfg.workers, started, false, "")
                       .dump(2) +
                   "\n");

    RunOutput result;
    try {
        result = dispatch_experiment(experiment, kv, cfg);
    } catch (const std::invalid_argument& e) {
        fail(kExitConfig, std::string("config rejected: ") + e.what());
    } catch (const std::domain_error& e) {
        fail(kExitConfig, std::string("config rejected: ") + e.what());
    }

    write_file(out / "results.csv", rows_to_csv(result.rows, config_hash, cfg.seed));
    json summary;
    summary["experiment"] = experiment;
    summary["config_hash"] = hash_hex(config_hash);
    summary["seed"] = cfg.seed;
    summary["summary"] = result.summary;
    write_file(out / "summary.json", summary.dump(2) + "\n");
    write_file(out / "manifest.json",
               make_manifest(experiment, config_hash, cfg.seed, cfg.workers, started, true,
                             timestamp_utc())
                       .dump(2) +
                   "\n");

    json digest;
    digest["experiment"] = experiment;
    digest["config_hash"] = hash_hex(config_hash);
    digest["seed"] = cfg.seed;
    digest["out"] = out_dir;
    digest["rows"] = result.rows.size();
    digest["complete"] = true;
    std::cout << digest.dump() << "\n";
    return 0;
}

// ---- report

struct ReportArgs {
    CommonFlags common;
};

int run_report(const ReportArgs& a) {
    using namespace homflow;
    if (a.common.out.empty()) fail(kExitUsage, "report needs --out pointing at a simulate directory");
    const fs::path dir(a.common.out);

    json manifest;
    try {
        manifest = json::parse(read_file(dir / "manifest.json"));
    } catch (const json::exception& e) {
        fail(kExitConfig, std::string("manifest.json is not valid JSON: ") + e.what());
    }

    const std::string snapshot = read_file(dir / "config.snapshot");
    const std::string recomputed = hash_hex(fnv1a64(snapshot));
    const std::string declared = manifest.value("config_hash", "");
    if (recomputed != declared)
        fail(kExitConfig, "config hash mismatch: manifest declares " + declared +
                              " but config.snapshot hashes to " + recomputed);

    const std::string csv = read_file(dir / "results.csv");
    unsigned long long csv_hash = 0, csv_seed = 0;
    if (std::sscanf(csv.c_str(), "# schema=1 config_hash=%llx seed=%llu", &csv_hash, &csv_seed) != 2)
        fail(kExitConfig, "results.csv does not start with the schema comment line");
    if (hash_hex(csv_hash) != declared)
        fail(kExitConfig, "config hash mismatch: results.csv header carries " + hash_hex(csv_hash) +
                              " but the manifest declares " + declared);
    if (manifest.contains("seed") && manifest["seed"].get<unsigned long long>() != csv_seed)
        fail(kExitConfig, "seed mismatch between manifest.json and results.csv");
    long long data_rows = -2;  // subtract the schema and header lines
    for (char ch : csv)
        if (ch == '\n') ++data_rows;

    json summary;
    try {
        summary = json::parse(read_file(dir / "summary.json"));
    } catch (const json::exception& e) {
        fail(kExitConfig, std::string("summary.json is not valid JSON: ") + e.what());
    }
    if (summary.value("config_hash", "") != declared)
        fail(kExitConfig, "config hash mismatch between manifest.json and summary.json");

    json digest;
    digest["experiment"] = manifest.value("experiment", "");
    digest["config_hash"] = declared;
    digest["seed"] = csv_seed;
    digest["workers"] = manifest.value("workers", 0);
    digest["complete"] = manifest.value("complete", false);
    digest["started"] = manifest.value("started", "");
    if (manifest.contains("finished")) digest["finished"] = manifest["finished"];
    digest["rows"] = data_rows;
    digest["outputs"] = manifest.value("outputs", json::array());
    digest["summary"] = summary.value("summary", json::object());
    std::cout << digest.dump(2) << "\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"homogeneous-flow laboratory: summable-decay classification and "
                 "shrinking-target Monte Carlo on the modular surface"};
    app.set_version_flag("--version", kToolVersion);
    app.require_subcommand(1);

    RootsysArgs rootsys_args;
    CLI::App* rootsys = app.add_subcommand(
        "rootsys", "inspect a restricted root system: cascade, xi, lambda1, dominance");
    rootsys->add_option("--type", rootsys_args.type, "family letter A..G, or a full name like F4")
        ->required();
    rootsys->add_option("--rank", rootsys_args.rank, "rank of the root system");
    rootsys->add_option("--show", rootsys_args.show,
                        "comma list of facets: cascade, xi, lambda1, dominance (default all)");
    add_common_flags(rootsys, rootsys_args.common);

    AnalyzeArgs analyze_args;
    CLI::App* analyze = app.add_subcommand(
        "analyze-flow", "classify a flow generator: quasi-unipotent (with degree), "
                        "quasi-diagonalizable, or bounded");
    analyze->add_option("--generator", analyze_args.generator,
                        "trace-free square matrix: inline JSON rows or a file path")
        ->required();
    add_common_flags(analyze, analyze_args.common);

    ClassifyArgs classify_args;
    CLI::App* classify = app.add_subcommand(
        "classify", "summable-decay verdict for a group spec (exit 0 yes / 1 no / 2 conditional)");
    classify->add_option("--spec", classify_args.spec,
                         "group spec: inline JSON object or a file path")
        ->required();
    add_common_flags(classify, classify_args.common);

    SimulateArgs simulate_args;
    CLI::App* simulate = app.add_subcommand(
        "simulate", "run a Monte Carlo experiment from a config file into --out "
                    "(config.snapshot, results.csv, summary.json, manifest.json)");
    simulate->add_option("--config", simulate_args.config_path, "config file path")->required();
    add_common_flags(simulate, simulate_args.common);
    simulate->footer(config_key_help());

    ReportArgs report_args;
    CLI::App* report = app.add_subcommand(
        "report", "digest a simulate output directory and re-verify its config hash");
    add_common_flags(report, report_args.common);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitUsage;
    }

    try {
        if (rootsys->parsed()) return run_rootsys(rootsys_args);
        if (analyze->parsed()) return run_analyze_flow(analyze_args);
        if (classify->parsed()) return run_classify(classify_args);
        if (simulate->parsed()) return run_simulate(simulate_args);
        if (report->parsed()) return run_report(report_args);
    } catch (const ExitWith& e) {
        std::cerr << "error: " << e.message << "\n";
        return e.code;
    } catch (const fs::filesystem_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitIo;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitConfig;
    }
    return kExitUsage;
}
