#pragma once

// Command-line front end: config ingestion, run records, CSV export and the
// benchmark reproductions. Depends on nlohmann::json (vendor/json.hpp).

#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "moboga/engine.hpp"
#include "moboga/errors.hpp"
#include "moboga/problems.hpp"

namespace moboga::cli {

using json = nlohmann::ordered_json;

inline constexpr int kFormatVersion = 1;

enum ExitCode : int { kOk = 0, kConfigError = 2, kRuntimeError = 3, kNoFeasible = 4, kVerifyFailed = 5 };

// Malformed run record.
class RecordError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

struct RunConfig {
    std::string problem_name;
    Problem problem;
    EngineConfig engine;
    json constraint_overrides = json::object(); // as given, replayed into snapshots
};

// ---------------------------------------------------------------------------
// number formatting

// Shortest representation that reads back to the same double.
inline std::string fmt_double(double v)
{
    char buf[64];
    auto const r = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, r.ptr);
}

namespace detail {

inline std::string utc_timestamp()
{
    using namespace std::chrono;
    auto const now = system_clock::now();
    auto const t = system_clock::to_time_t(now);
    auto const ms = duration_cast<milliseconds>(now.time_since_epoch()).count() % 1000;
    std::tm tm{};
    gmtime_r(&t, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%S", &tm);
    std::ostringstream os;
    os << buf << '.' << std::setw(3) << std::setfill('0') << ms << 'Z';
    return os.str();
}

inline std::string csv_field(std::string const& s)
{
    if (s.find_first_of(",\"\n") == std::string::npos) {
        return s;
    }
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') {
            out += '"';
        }
        out += c;
    }
    return out + '"';
}

inline std::string value_text(ParamValue const& v)
{
    if (auto const* d = std::get_if<double>(&v)) {
        return fmt_double(*d);
    }
    return std::get<std::string>(v);
}

// Config accessors that report the dotted key path on failure.
inline void check_keys(json const& obj, std::string const& where, std::initializer_list<char const*> allowed)
{
    if (!obj.is_object()) {
        throw ConfigError("'" + where + "' must be an object");
    }
    for (auto const& [k, v] : obj.items()) {
        bool ok = false;
        for (auto const* a : allowed) {
            ok = ok || k == a;
        }
        if (!ok) {
            throw ConfigError("unknown key '" + (where.empty() ? k : where + "." + k) + "'");
        }
    }
}

inline double get_number(json const& v, std::string const& key)
{
    if (!v.is_number()) {
        throw ConfigError("'" + key + "' must be a number");
    }
    return v.get<double>();
}

inline std::size_t get_count(json const& v, std::string const& key)
{
    if (!v.is_number_integer() || v.get<std::int64_t>() < 0) {
        throw ConfigError("'" + key + "' must be a non-negative integer");
    }
    return v.get<std::size_t>();
}

inline std::string get_string(json const& v, std::string const& key)
{
    if (!v.is_string()) {
        throw ConfigError("'" + key + "' must be a string");
    }
    return v.get<std::string>();
}

inline json param_to_json(ParamSpec const& p)
{
    json j;
    j["name"] = p.name;
    std::visit(
        [&](auto const& kind) {
            using K = std::decay_t<decltype(kind)>;
            if constexpr (std::is_same_v<K, Continuous>) {
                j["type"] = "continuous";
                j["range"] = {kind.lo, kind.hi};
            } else if constexpr (std::is_same_v<K, Discrete>) {
                j["type"] = "discrete";
                j["values"] = kind.values;
            } else {
                j["type"] = "categorical";
                j["labels"] = kind.labels;
            }
        },
        p.kind);
    return j;
}

inline ParamSpec param_from_json(json const& j, std::string const& where)
{
    check_keys(j, where, {"name", "type", "range", "values", "labels"});
    if (!j.contains("name")) {
        throw ConfigError("'" + where + ".name' is required");
    }
    if (!j.contains("type")) {
        throw ConfigError("'" + where + ".type' is required");
    }
    auto const name = get_string(j["name"], where + ".name");
    auto const type = get_string(j["type"], where + ".type");
    if (type == "continuous") {
        if (!j.contains("range") || !j["range"].is_array() || j["range"].size() != 2) {
            throw ConfigError("'" + where + ".range' must be [lo, hi]");
        }
        return ParamSpec::continuous(name, get_number(j["range"][0], where + ".range"), get_number(j["range"][1], where + ".range"));
    }
    if (type == "discrete") {
        if (!j.contains("values") || !j["values"].is_array()) {
            throw ConfigError("'" + where + ".values' must be a list of numbers");
        }
        std::vector<double> values;
        for (auto const& v : j["values"]) {
            values.push_back(get_number(v, where + ".values"));
        }
        return ParamSpec::discrete(name, std::move(values));
    }
    if (type == "categorical") {
        if (!j.contains("labels") || !j["labels"].is_array()) {
            throw ConfigError("'" + where + ".labels' must be a list of strings");
        }
        std::vector<std::string> labels;
        for (auto const& v : j["labels"]) {
            labels.push_back(get_string(v, where + ".labels"));
        }
        return ParamSpec::categorical(name, std::move(labels));
    }
    throw ConfigError("'" + where + ".type' must be continuous, discrete or categorical");
}

inline json candidate_to_json(SearchSpace const& space, Candidate const& c)
{
    json j = json::object();
    for (std::size_t i = 0; i < space.size(); ++i) {
        if (auto const* d = std::get_if<double>(&c.values[i])) {
            j[space.params()[i].name] = *d;
        } else {
            j[space.params()[i].name] = std::get<std::string>(c.values[i]);
        }
    }
    return j;
}

// Reads {name: value} in space order. Throws ValidationError.
inline Candidate candidate_from_json(SearchSpace const& space, json const& j)
{
    if (!j.is_object()) {
        throw ValidationError("candidate must be an object of parameter values");
    }
    Candidate c;
    for (auto const& p : space.params()) {
        if (!j.contains(p.name)) {
            throw ValidationError("missing value for parameter '" + p.name + "'");
        }
        auto const& v = j[p.name];
        if (v.is_number()) {
            c.values.emplace_back(v.get<double>());
        } else if (v.is_string()) {
            c.values.emplace_back(v.get<std::string>());
        } else {
            throw ValidationError("parameter '" + p.name + "' must be a number or a label");
        }
    }
    if (j.size() != space.size()) {
        throw ValidationError("candidate names a parameter outside the space");
    }
    space.validate(c);
    return c;
}

inline std::string next_pick_name(NextPick p)
{
    switch (p) {
    case NextPick::Topsis:
        return "topsis";
    case NextPick::All:
        return "all";
    case NextPick::UserRule:
        return "user";
    }
    return "topsis";
}

} // namespace detail

// ---------------------------------------------------------------------------
// configuration

// Built-in problem plus the overrides of a config document. Throws ConfigError
// naming the offending key.
inline RunConfig parse_config(json const& doc)
{
    detail::check_keys(doc, "", {"format_version", "problem", "parameters", "objectives", "constraints", "engine", "weights", "seed"});
    if (doc.contains("format_version") && detail::get_count(doc["format_version"], "format_version") != kFormatVersion) {
        throw ConfigError("'format_version' " + doc["format_version"].dump() + " is not supported");
    }
    if (!doc.contains("problem")) {
        throw ConfigError("'problem' is required");
    }
    RunConfig rc;
    rc.problem_name = detail::get_string(doc["problem"], "problem");
    rc.problem = builtin_problem(rc.problem_name).problem;
    auto& problem = rc.problem;

    if (doc.contains("parameters")) {
        auto const& ps = doc["parameters"];
        if (!ps.is_array() || ps.size() != problem.space.size()) {
            throw ConfigError("'parameters' must list the " + std::to_string(problem.space.size()) + " parameters of " + rc.problem_name);
        }
        std::vector<ParamSpec> specs;
        for (std::size_t i = 0; i < ps.size(); ++i) {
            auto const where = "parameters[" + std::to_string(i) + "]";
            auto spec = detail::param_from_json(ps[i], where);
            auto const& builtin = problem.space.params()[i];
            if (spec.name != builtin.name) {
                throw ConfigError("'" + where + ".name' must be '" + builtin.name + "'");
            }
            if (spec.kind.index() != builtin.kind.index()) {
                throw ConfigError("'" + where + ".type' does not match the problem's parameter type");
            }
            specs.push_back(std::move(spec));
        }
        try {
            problem.space = SearchSpace(std::move(specs));
        } catch (ValidationError const& e) {
            throw ConfigError(std::string("'parameters': ") + e.what());
        }
    }

    if (doc.contains("objectives")) {
        auto const& os = doc["objectives"];
        if (!os.is_array() || os.size() != problem.num_objectives()) {
            throw ConfigError("'objectives' must name the " + std::to_string(problem.num_objectives()) + " objectives");
        }
        for (std::size_t i = 0; i < os.size(); ++i) {
            problem.objectives[i] = detail::get_string(os[i], "objectives[" + std::to_string(i) + "]");
        }
    }

    if (doc.contains("constraints")) {
        auto const& cs = doc["constraints"];
        if (!cs.is_object()) {
            throw ConfigError("'constraints' must be an object of name: mode");
        }
        for (auto const& [name, mode] : cs.items()) {
            auto const where = "constraints." + name;
            auto it = std::find_if(problem.constraints.begin(), problem.constraints.end(), [&](auto const& c) { return c.name == name; });
            if (it == problem.constraints.end()) {
                throw ConfigError("unknown key '" + where + "'");
            }
            std::string m;
            std::optional<double> beta;
            if (mode.is_string()) {
                m = mode.get<std::string>();
            } else {
                detail::check_keys(mode, where, {"mode", "beta"});
                if (!mode.contains("mode")) {
                    throw ConfigError("'" + where + ".mode' is required");
                }
                m = detail::get_string(mode["mode"], where + ".mode");
                if (mode.contains("beta")) {
                    beta = detail::get_number(mode["beta"], where + ".beta");
                }
            }
            if (m == "hard") {
                if (beta) {
                    throw ConfigError("'" + where + ".beta' only applies to soft constraints");
                }
                it->mode = Hard{};
            } else if (m == "soft") {
                if (beta) {
                    if (!(*beta >= 0.0 && *beta < 1.0)) {
                        throw ConfigError("'" + where + ".beta' must lie in [0, 1)");
                    }
                    it->mode = constant_beta(*beta);
                } else if (!std::holds_alternative<Soft>(it->mode)) {
                    throw ConfigError("'" + where + ".beta' is required to make a hard constraint soft");
                }
            } else {
                throw ConfigError("'" + where + "' must be hard or soft");
            }
            rc.constraint_overrides[name] = mode;
        }
    }

    auto& eng = rc.engine;
    if (doc.contains("engine")) {
        auto const& e = doc["engine"];
        detail::check_keys(e, "engine", {"n_initial", "max_iterations", "delta", "next_pick", "initial_points", "parallel_evaluation", "ga"});
        if (e.contains("n_initial")) {
            eng.n_initial = detail::get_count(e["n_initial"], "engine.n_initial");
        }
        if (e.contains("max_iterations")) {
            eng.max_iterations = detail::get_count(e["max_iterations"], "engine.max_iterations");
        }
        if (e.contains("delta")) {
            eng.delta = detail::get_number(e["delta"], "engine.delta");
        }
        if (e.contains("next_pick")) {
            auto const p = detail::get_string(e["next_pick"], "engine.next_pick");
            if (p == "topsis") {
                eng.next_pick = NextPick::Topsis;
            } else if (p == "all") {
                eng.next_pick = NextPick::All;
            } else {
                throw ConfigError("'engine.next_pick' must be topsis or all");
            }
        }
        if (e.contains("parallel_evaluation")) {
            if (!e["parallel_evaluation"].is_boolean()) {
                throw ConfigError("'engine.parallel_evaluation' must be true or false");
            }
            eng.parallel_evaluation = e["parallel_evaluation"].get<bool>();
        }
        if (e.contains("initial_points")) {
            if (!e["initial_points"].is_array()) {
                throw ConfigError("'engine.initial_points' must be a list");
            }
            for (std::size_t i = 0; i < e["initial_points"].size(); ++i) {
                try {
                    eng.initial_points.push_back(detail::candidate_from_json(problem.space, e["initial_points"][i]));
                } catch (ValidationError const& err) {
                    throw ConfigError("'engine.initial_points[" + std::to_string(i) + "]': " + err.what());
                }
            }
        }
        if (e.contains("ga")) {
            auto const& g = e["ga"];
            detail::check_keys(g, "engine.ga", {"population_size", "generations", "crossover_prob", "mutation_prob", "sbx_eta", "pm_eta"});
            if (g.contains("population_size")) {
                eng.ga.population_size = detail::get_count(g["population_size"], "engine.ga.population_size");
            }
            if (g.contains("generations")) {
                eng.ga.generations = detail::get_count(g["generations"], "engine.ga.generations");
            }
            if (g.contains("crossover_prob")) {
                eng.ga.crossover_prob = detail::get_number(g["crossover_prob"], "engine.ga.crossover_prob");
            }
            if (g.contains("mutation_prob") && !g["mutation_prob"].is_null()) {
                eng.ga.mutation_prob = detail::get_number(g["mutation_prob"], "engine.ga.mutation_prob");
            }
            if (g.contains("sbx_eta")) {
                eng.ga.sbx_eta = detail::get_number(g["sbx_eta"], "engine.ga.sbx_eta");
            }
            if (g.contains("pm_eta")) {
                eng.ga.pm_eta = detail::get_number(g["pm_eta"], "engine.ga.pm_eta");
            }
        }
    }
    if (doc.contains("weights")) {
        if (!doc["weights"].is_array()) {
            throw ConfigError("'weights' must be a list of numbers");
        }
        for (auto const& w : doc["weights"]) {
            eng.weights.push_back(detail::get_number(w, "weights"));
        }
    }
    if (doc.contains("seed")) {
        auto const& sd = doc["seed"];
        if (!sd.is_number_unsigned() && !(sd.is_number_integer() && sd.get<std::int64_t>() >= 0)) {
            throw ConfigError("'seed' must be a non-negative integer");
        }
        eng.seed = doc["seed"].get<std::uint64_t>();
    }
    return rc;
}

// Fully resolved config document; parse_config(config_to_json(rc)) reproduces rc.
inline json config_to_json(RunConfig const& rc)
{
    json doc;
    doc["format_version"] = kFormatVersion;
    doc["problem"] = rc.problem_name;
    doc["parameters"] = json::array();
    for (auto const& p : rc.problem.space.params()) {
        doc["parameters"].push_back(detail::param_to_json(p));
    }
    doc["objectives"] = rc.problem.objectives;
    doc["constraints"] = json::object();
    for (auto const& c : rc.problem.constraints) {
        if (rc.constraint_overrides.contains(c.name)) {
            doc["constraints"][c.name] = rc.constraint_overrides[c.name];
        } else {
            doc["constraints"][c.name] = std::holds_alternative<Hard>(c.mode) ? "hard" : "soft";
        }
    }
    auto const& e = rc.engine;
    json eng;
    eng["n_initial"] = e.n_initial;
    eng["max_iterations"] = e.max_iterations;
    eng["delta"] = e.delta;
    eng["next_pick"] = detail::next_pick_name(e.next_pick);
    eng["parallel_evaluation"] = e.parallel_evaluation;
    eng["initial_points"] = json::array();
    for (auto const& c : e.initial_points) {
        eng["initial_points"].push_back(detail::candidate_to_json(rc.problem.space, c));
    }
    json ga;
    ga["population_size"] = e.ga.population_size;
    ga["generations"] = e.ga.generations;
    ga["crossover_prob"] = e.ga.crossover_prob;
    ga["mutation_prob"] = e.ga.mutation_prob ? json(*e.ga.mutation_prob) : json(nullptr);
    ga["sbx_eta"] = e.ga.sbx_eta;
    ga["pm_eta"] = e.ga.pm_eta;
    eng["ga"] = ga;
    doc["engine"] = eng;
    doc["weights"] = e.weights;
    doc["seed"] = e.seed;
    return doc;
}

inline json read_json_file(std::string const& path)
{
    std::ifstream in(path);
    if (!in) {
        throw ConfigError("cannot read config file '" + path + "'");
    }
    try {
        return json::parse(in);
    } catch (json::parse_error const& e) {
        throw ConfigError("config file '" + path + "' is not valid JSON: " + e.what());
    }
}

// MOBOGA_SEED, when set, replaces the config seed.
inline std::optional<std::uint64_t> env_seed()
{
    char const* s = std::getenv("MOBOGA_SEED");
    if (!s || !*s) {
        return std::nullopt;
    }
    std::uint64_t v = 0;
    std::string const text(s);
    auto const r = std::from_chars(text.data(), text.data() + text.size(), v);
    if (r.ec != std::errc{} || r.ptr != text.data() + text.size()) {
        throw ConfigError("MOBOGA_SEED must be a non-negative integer, got '" + text + "'");
    }
    return v;
}

// ---------------------------------------------------------------------------
// run records

inline json observation_to_json(SearchSpace const& space, Observation const& o)
{
    json j;
    j["iteration"] = o.iteration;
    j["values"] = detail::candidate_to_json(space, o.candidate);
    j["encoded"] = o.encoded;
    j["objectives"] = o.objectives;
    j["feasible"] = o.feasible;
    j["timestamp"] = detail::utc_timestamp();
    return j;
}

// Writes the record after every observation. Each write goes to a temporary
// file renamed over the target, so the file on disk is always a complete
// document whose observation list is a prefix of the run.
class RecordWriter {
  public:
    RecordWriter(std::string path, RunConfig const& rc) : path_(std::move(path)), space_(rc.problem.space)
    {
        doc_["format_version"] = kFormatVersion;
        doc_["status"] = "running";
        doc_["seed"] = rc.engine.seed;
        doc_["config"] = config_to_json(rc);
        doc_["observations"] = json::array();
        flush();
    }

    void observe(Archive const& archive)
    {
        auto& obs = doc_["observations"];
        for (std::size_t i = obs.size(); i < archive.size(); ++i) {
            obs.push_back(observation_to_json(space_, archive[i]));
        }
        flush();
    }

    void finish(RunResult const& r)
    {
        observe(r.archive);
        doc_["status"] = "complete";
        doc_["pof"] = r.pof;
        doc_["best_index"] = r.best_index;
        doc_["closeness"] = r.closeness;
        doc_["stop_reason"] = to_string(r.stop_reason);
        doc_["iterations_used"] = r.iterations_used;
        flush();
    }

    void fail(std::string const& status, std::string const& message)
    {
        doc_["status"] = status;
        doc_["error"] = message;
        flush();
    }

    json const& document() const { return doc_; }

  private:
    void flush()
    {
        if (path_.empty()) {
            return;
        }
        auto const tmp = path_ + ".tmp";
        {
            std::ofstream out(tmp, std::ios::trunc);
            if (!out) {
                throw std::runtime_error("cannot write run record '" + tmp + "'");
            }
            out << doc_.dump(2) << '\n';
            if (!out) {
                throw std::runtime_error("failed writing run record '" + tmp + "'");
            }
        }
        std::filesystem::rename(tmp, path_);
    }

    std::string path_;
    SearchSpace space_;
    json doc_;
};

struct LoadedRecord {
    RunConfig config;
    Archive archive;
    std::string status;
    std::optional<RunResult> result; // present for complete records
};

// Rebuilds the run from a record. Throws RecordError when malformed.
inline LoadedRecord load_record(json const& doc)
{
    try {
        if (!doc.is_object() || !doc.contains("format_version") || doc["format_version"] != kFormatVersion) {
            throw RecordError("missing or unsupported format_version");
        }
        if (!doc.contains("config") || !doc.contains("observations") || !doc["observations"].is_array()) {
            throw RecordError("record lacks config or observations");
        }
        LoadedRecord rec;
        rec.config = parse_config(doc["config"]);
        rec.status = doc.value("status", "");
        auto const& space = rec.config.problem.space;
        auto const k = rec.config.problem.num_objectives();
        for (std::size_t i = 0; i < doc["observations"].size(); ++i) {
            auto const& j = doc["observations"][i];
            Observation o;
            o.candidate = detail::candidate_from_json(space, j.at("values"));
            o.encoded = j.at("encoded").get<std::vector<double>>();
            o.objectives = j.at("objectives").get<std::vector<double>>();
            o.feasible = j.at("feasible").get<bool>();
            o.iteration = j.at("iteration").get<std::size_t>();
            if (o.objectives.size() != k || o.encoded != space.encode(o.candidate)) {
                throw RecordError("observation " + std::to_string(i) + " is inconsistent with the config");
            }
            rec.archive.add(std::move(o));
        }
        if (rec.status == "complete") {
            RunResult r;
            r.pof = doc.at("pof").get<std::vector<std::size_t>>();
            r.best_index = doc.at("best_index").get<std::size_t>();
            r.closeness = doc.at("closeness").get<std::vector<double>>();
            r.iterations_used = doc.at("iterations_used").get<std::size_t>();
            r.stop_reason = doc.at("stop_reason").get<std::string>() == "StopThreshold" ? StopReason::StopThreshold : StopReason::MaxIterations;
            bool ok = !r.pof.empty() && r.closeness.size() == r.pof.size()
                      && std::find(r.pof.begin(), r.pof.end(), r.best_index) != r.pof.end();
            for (auto id : r.pof) {
                ok = ok && id < rec.archive.size() && rec.archive[id].feasible;
            }
            if (!ok) {
                throw RecordError("final front of the record is inconsistent with its observations");
            }
            r.archive = rec.archive;
            rec.result = std::move(r);
        }
        return rec;
    } catch (RecordError const&) {
        throw;
    } catch (std::exception const& e) {
        throw RecordError(std::string("malformed run record: ") + e.what());
    }
}

inline LoadedRecord load_record_file(std::string const& path)
{
    std::ifstream in(path);
    if (!in) {
        throw RecordError("cannot read run record '" + path + "'");
    }
    json doc;
    try {
        doc = json::parse(in);
    } catch (json::parse_error const& e) {
        throw RecordError("run record '" + path + "' is not valid JSON: " + e.what());
    }
    return load_record(doc);
}

// One row per observation: candidate_id,<params>,<objectives>,on_front,is_best,closeness.
inline void write_front_csv(std::ostream& out, Problem const& problem, RunResult const& r)
{
    out << "candidate_id";
    for (auto const& p : problem.space.params()) {
        out << ',' << detail::csv_field(p.name);
    }
    for (auto const& o : problem.objectives) {
        out << ',' << detail::csv_field(o);
    }
    out << ",on_front,is_best,closeness\n";
    for (std::size_t i = 0; i < r.archive.size(); ++i) {
        auto const& o = r.archive[i];
        out << i;
        for (auto const& v : o.candidate.values) {
            out << ',' << detail::csv_field(detail::value_text(v));
        }
        for (double q : o.objectives) {
            out << ',' << fmt_double(q);
        }
        auto const pos = std::find(r.pof.begin(), r.pof.end(), i);
        bool const on_front = pos != r.pof.end();
        out << ',' << (on_front ? "true" : "false") << ',' << (i == r.best_index ? "true" : "false") << ',';
        if (on_front) {
            out << fmt_double(r.closeness[static_cast<std::size_t>(pos - r.pof.begin())]);
        }
        out << '\n';
    }
}

// ---------------------------------------------------------------------------
// benchmark reproductions

inline std::vector<std::string> verification_names() { return {"binh-korn", "constr-ex", "sinusoid-1d"}; }

// The fixed configuration each reproduction runs with (also shipped under configs/).
inline json verification_config(std::string const& which)
{
    json doc;
    doc["format_version"] = kFormatVersion;
    doc["problem"] = which;
    if (which == "binh-korn" || which == "constr-ex") {
        // 8 initial points + 50 proposals
        doc["engine"] = {{"n_initial", 8}, {"max_iterations", 58}, {"delta", 1e-3}};
        doc["seed"] = 7;
    } else if (which == "sinusoid-1d") {
        // start from x = 0.1, one extra random point, then 15 proposals
        doc["engine"] = {{"n_initial", 2}, {"max_iterations", 17}, {"delta", 1e-3}, {"initial_points", json::array({{{"x", 0.1}}})}};
        doc["seed"] = 1;
    } else {
        throw ConfigError("unknown verification '" + which + "'; expected binh-korn, constr-ex or sinusoid-1d");
    }
    return doc;
}

struct VerifyThresholds {
    double gd_fraction = 0.05;     // GD / oracle diagonal
    double max_seconds = 120.0;
    std::size_t grid_2d = 400;
    std::size_t grid_1d = 10000;
    double basin_x = 0.08;         // best feasible q must not exceed q(basin_x)
    double oracle_match = 0.05;
};

struct VerifyReport {
    std::string name;
    RunConfig config;
    RunResult run;
    json metrics;
    std::vector<std::string> failures;
    std::vector<ObjectiveVector> oracle_front;             // 2-D benchmarks
    std::vector<std::pair<double, double>> oracle_curve;   // sinusoid: (x, q) over the feasible grid

    bool passed() const { return failures.empty(); }
};

inline VerifyReport verify_benchmark(std::string const& which, VerifyThresholds const& th = {}, ObservationHook hook = {})
{
    VerifyReport rep;
    rep.name = which;
    rep.config = parse_config(verification_config(which));
    auto const& problem = rep.config.problem;

    auto const t0 = std::chrono::steady_clock::now();
    rep.run = run(problem, rep.config.engine, std::move(hook));
    double const seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

    std::size_t hard_violations = 0;
    for (auto const& o : rep.run.archive) {
        hard_violations += hard_satisfied(problem.constraints, o.candidate) ? 0 : 1;
    }

    auto& m = rep.metrics;
    m["problem"] = which;
    m["seed"] = rep.config.engine.seed;
    m["evaluations"] = rep.run.iterations_used;
    m["archive_size"] = rep.run.archive.size();
    m["stop_reason"] = to_string(rep.run.stop_reason);
    m["hard_violations"] = hard_violations;
    m["runtime_seconds"] = seconds;

    if (hard_violations != 0) {
        rep.failures.push_back("hard_violations = " + std::to_string(hard_violations) + " (expected 0)");
    }
    if (seconds > th.max_seconds) {
        rep.failures.push_back("runtime " + fmt_double(seconds) + " s exceeds " + fmt_double(th.max_seconds) + " s");
    }

    if (which == "sinusoid-1d") {
        std::size_t in_band = 0, soft_queries = 0, soft_proposals = 0;
        double best = std::numeric_limits<double>::infinity();
        for (auto const& o : rep.run.archive) {
            double const x = o.candidate.real(0);
            in_band += (x >= 0.2 && x <= 0.6) ? 1 : 0;
            if (x > 0.6) {
                ++soft_queries;
                soft_proposals += o.iteration > 0 ? 1 : 0;
            }
            if (o.feasible) {
                best = std::min(best, o.objectives[0]);
            }
        }
        double oracle = std::numeric_limits<double>::infinity();
        for (std::size_t i = 0; i < th.grid_1d; ++i) {
            Candidate c;
            c.values = {1.2 * static_cast<double>(i) / static_cast<double>(th.grid_1d - 1)};
            if (all_satisfied(problem.constraints, c)) {
                double const q = sinusoid_1d(c.real(0));
                rep.oracle_curve.emplace_back(c.real(0), q);
                oracle = std::min(oracle, q);
            }
        }
        double const basin = sinusoid_1d(th.basin_x);
        m["points_in_hard_region"] = in_band;
        m["soft_region_queries"] = soft_queries;
        m["soft_region_proposals"] = soft_proposals;
        m["best_feasible_q"] = best;
        m["basin_q"] = basin;
        m["oracle_min_q"] = oracle;
        if (in_band != 0) {
            rep.failures.push_back("points_in_hard_region = " + std::to_string(in_band) + " (expected 0)");
        }
        if (soft_proposals == 0) {
            rep.failures.push_back("no proposal queried the soft region x > 0.6");
        }
        if (!(best <= basin)) {
            rep.failures.push_back("best feasible q " + fmt_double(best) + " exceeds q(" + fmt_double(th.basin_x) + ") = " + fmt_double(basin));
        }
        if (!(std::abs(best - oracle) <= th.oracle_match)) {
            rep.failures.push_back("best feasible q " + fmt_double(best) + " differs from the grid minimum " + fmt_double(oracle)
                                   + " by more than " + fmt_double(th.oracle_match));
        }
    } else {
        rep.oracle_front = grid_reference_front(problem, th.grid_2d);
        std::vector<ObjectiveVector> front;
        for (auto id : rep.run.pof) {
            front.push_back(rep.run.archive[id].objectives);
        }
        double const gd = generational_distance(front, rep.oracle_front);
        double const diag = objective_diagonal(rep.oracle_front);
        m["front_size"] = front.size();
        m["oracle_front_size"] = rep.oracle_front.size();
        m["generational_distance"] = gd;
        m["oracle_diagonal"] = diag;
        m["gd_fraction"] = gd / diag;
        m["gd_threshold"] = th.gd_fraction;
        if (!(gd <= th.gd_fraction * diag)) {
            rep.failures.push_back("generational distance " + fmt_double(gd) + " exceeds " + fmt_double(th.gd_fraction) + " x diagonal "
                                   + fmt_double(diag));
        }
    }
    m["passed"] = rep.passed();
    m["failures"] = rep.failures;
    return rep;
}

// ---------------------------------------------------------------------------
// commands

struct RunOptions {
    std::optional<std::string> config_path;
    std::optional<std::string> problem;
    std::optional<std::size_t> iters; // evaluation budget, initial design included
    std::optional<std::size_t> n_initial;
    std::optional<double> delta;
    std::optional<std::uint64_t> seed;
    std::string out_path = "run.json";
    bool quiet = false;
};

namespace detail {

// Maps exceptions onto exit codes, printing the message to err.
template <class F>
int guarded(std::ostream& err, F&& f)
{
    try {
        return f();
    } catch (ConfigError const& e) {
        err << "config error: " << e.what() << '\n';
        return kConfigError;
    } catch (NoFeasibleError const& e) {
        err << "no feasible result: " << e.what() << '\n';
        return kNoFeasible;
    } catch (std::exception const& e) {
        err << "error: " << e.what() << '\n';
        return kRuntimeError;
    }
}

inline void print_progress(std::ostream& out, Problem const& problem, Archive const& archive)
{
    auto const& o = archive[archive.size() - 1];
    out << '[' << archive.size() << "] it " << o.iteration << "  " << problem.space.describe(o.candidate) << "  ->";
    for (double q : o.objectives) {
        out << ' ' << fmt_double(q);
    }
    out << (o.feasible ? "" : "  (infeasible)") << std::endl;
}

inline void print_summary(std::ostream& out, Problem const& problem, RunResult const& r)
{
    out << "stop: " << to_string(r.stop_reason) << " after " << r.iterations_used << " evaluations\n";
    out << "Pareto-optimal front (" << r.pof.size() << " of " << r.archive.size() << " observations):\n";
    out << std::setw(6) << "id";
    for (auto const& p : problem.space.params()) {
        out << std::setw(14) << p.name;
    }
    for (auto const& name : problem.objectives) {
        out << std::setw(14) << name;
    }
    out << std::setw(12) << "closeness" << '\n';
    for (std::size_t i = 0; i < r.pof.size(); ++i) {
        auto const& o = r.archive[r.pof[i]];
        out << std::setw(6) << r.pof[i];
        for (auto const& v : o.candidate.values) {
            out << std::setw(14) << value_text(v).substr(0, 13);
        }
        for (double q : o.objectives) {
            out << std::setw(14) << std::setprecision(6) << q;
        }
        out << std::setw(12) << std::setprecision(4) << r.closeness[i] << (r.pof[i] == r.best_index ? "  *" : "") << '\n';
    }
    auto const& b = r.archive[r.best_index];
    out << "best (TOPSIS): #" << r.best_index << "  " << problem.space.describe(b.candidate) << "  ->";
    for (double q : b.objectives) {
        out << ' ' << fmt_double(q);
    }
    out << '\n';
}

} // namespace detail

inline int cmd_run(RunOptions const& opt, std::ostream& out = std::cout, std::ostream& err = std::cerr)
{
    return detail::guarded(err, [&] {
        json doc = json::object();
        if (opt.config_path) {
            doc = read_json_file(*opt.config_path);
            if (!doc.is_object()) {
                throw ConfigError("config file '" + *opt.config_path + "' must hold an object");
            }
        }
        if (opt.problem) {
            if (doc.contains("problem") && doc["problem"] != *opt.problem) {
                // a different problem invalidates problem-specific sections
                for (auto const* key : {"parameters", "objectives", "constraints"}) {
                    doc.erase(key);
                }
            }
            doc["problem"] = *opt.problem;
        }
        if (!doc.contains("problem")) {
            throw ConfigError("no problem given; pass a config file or --problem");
        }
        if (opt.iters) {
            doc["engine"]["max_iterations"] = *opt.iters;
        }
        if (opt.n_initial) {
            doc["engine"]["n_initial"] = *opt.n_initial;
        }
        if (opt.delta) {
            doc["engine"]["delta"] = *opt.delta;
        }
        if (auto s = env_seed()) {
            doc["seed"] = *s;
        }
        if (opt.seed) {
            doc["seed"] = *opt.seed;
        }
        auto rc = parse_config(doc);
        validate_problem(rc.problem);
        rc.engine.validate(rc.problem);

        RecordWriter record(opt.out_path, rc);
        ObservationHook hook = [&](Archive const& a) {
            record.observe(a);
            if (!opt.quiet) {
                detail::print_progress(out, rc.problem, a);
            }
        };
        RunResult r;
        try {
            r = run(rc.problem, rc.engine, hook);
        } catch (NoFeasibleError const& e) {
            record.fail("no_feasible", e.what());
            throw;
        } catch (std::exception const& e) {
            record.fail("failed", e.what());
            throw;
        }
        record.finish(r);
        detail::print_summary(out, rc.problem, r);
        out << "record written to " << opt.out_path << '\n';
        return static_cast<int>(kOk);
    });
}

// csv_out "-" writes to out.
inline int cmd_front(std::string const& record_path, std::string const& csv_out, std::ostream& out = std::cout,
                     std::ostream& err = std::cerr)
{
    return detail::guarded(err, [&] {
        LoadedRecord rec;
        try {
            rec = load_record_file(record_path);
        } catch (ConfigError const& e) {
            throw RecordError(std::string("malformed run record: ") + e.what());
        }
        RunResult r = rec.result ? *rec.result : exploit(rec.archive, rec.config.engine.weights);
        if (csv_out == "-") {
            write_front_csv(out, rec.config.problem, r);
        } else {
            std::ofstream f(csv_out, std::ios::trunc);
            if (!f) {
                throw std::runtime_error("cannot write '" + csv_out + "'");
            }
            write_front_csv(f, rec.config.problem, r);
        }
        return static_cast<int>(kOk);
    });
}

inline int cmd_verify(std::string const& which, std::string const& out_dir, std::ostream& out = std::cout,
                      std::ostream& err = std::cerr)
{
    return detail::guarded(err, [&]() -> int {
        auto const names = verification_names();
        if (std::find(names.begin(), names.end(), which) == names.end()) {
            throw ConfigError("unknown verification '" + which + "'; expected binh-korn, constr-ex or sinusoid-1d");
        }
        std::filesystem::create_directories(out_dir);
        auto const base = (std::filesystem::path(out_dir) / which).string();

        auto const rc = parse_config(verification_config(which));
        RecordWriter record(base + "-run.json", rc);
        auto rep = verify_benchmark(which, {}, [&](Archive const& a) { record.observe(a); });
        record.finish(rep.run);

        {
            std::ofstream f(base + "-moboga.csv");
            write_front_csv(f, rep.config.problem, rep.run);
        }
        {
            std::ofstream f(base + "-oracle.csv");
            if (which == "sinusoid-1d") {
                f << "x,q\n";
                for (auto const& [x, q] : rep.oracle_curve) {
                    f << fmt_double(x) << ',' << fmt_double(q) << '\n';
                }
            } else {
                f << rep.config.problem.objectives[0] << ',' << rep.config.problem.objectives[1] << '\n';
                for (auto const& q : rep.oracle_front) {
                    f << fmt_double(q[0]) << ',' << fmt_double(q[1]) << '\n';
                }
            }
        }
        {
            std::ofstream f(base + "-metrics.json");
            f << rep.metrics.dump(2) << '\n';
        }
        out << rep.metrics.dump(2) << '\n';
        if (!rep.passed()) {
            for (auto const& msg : rep.failures) {
                err << "threshold failed: " << msg << '\n';
            }
            return kVerifyFailed;
        }
        out << which << ": all thresholds met\n";
        return kOk;
    });
}

inline int cmd_problems(std::ostream& out = std::cout)
{
    for (auto const& name : builtin_problem_names()) {
        auto const b = builtin_problem(name);
        out << name << "  (" << b.problem.space.size() << " parameters, " << b.problem.num_objectives() << " objectives, "
            << b.problem.constraints.size() << " constraints)\n";
        for (auto const& p : b.problem.space.params()) {
            out << "    " << detail::param_to_json(p).dump() << '\n';
        }
        for (auto const& c : b.problem.constraints) {
            out << "    constraint " << c.name << ": " << (std::holds_alternative<Hard>(c.mode) ? "hard" : "soft") << '\n';
        }
    }
    return kOk;
}

} // namespace moboga::cli
