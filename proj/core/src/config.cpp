#include "fkpp/config.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <map>
#include <set>
#include <sstream>

#include <yaml-cpp/yaml.h>

namespace fkpp {

ConfigError::ConfigError(const std::string& message, std::string key_path, int line, int column)
    : Error(key_path.empty() ? message
                             : key_path + ": " + message +
                                   (line > 0 ? " (line " + std::to_string(line) + ", column " +
                                                   std::to_string(column) + ")"
                                             : std::string())),
      key_path_(std::move(key_path)),
      line_(line),
      column_(column) {}

namespace {

// ---------------------------------------------------------------------------
// Reading

class Reader {
public:
    Reader(const YAML::Node& node, std::string path) : node_(node), path_(std::move(path)) {}

    [[noreturn]] void error(const std::string& message) const { error_at(node_, path_, message); }

    [[noreturn]] static void error_at(const YAML::Node& n, const std::string& path,
                                      const std::string& message) {
        const auto mark = n.Mark();
        const bool known = mark.line >= 0;
        throw ConfigError(message, path, known ? mark.line + 1 : 0, known ? mark.column + 1 : 0);
    }

    void expect_map(std::set<std::string> allowed) const {
        if (!node_.IsMap()) error("expected a mapping");
        for (const auto& kv : node_) {
            const auto key = kv.first.as<std::string>();
            if (!allowed.count(key)) error_at(kv.first, child_path(key), "unknown key '" + key + "'");
        }
    }

    bool has(const std::string& key) const { return node_[key].IsDefined() && !node_[key].IsNull(); }

    Reader child(const std::string& key) const { return {node_[key], child_path(key)}; }

    double number(const std::string& key, double fallback) const {
        return has(key) ? child(key).as_number() : fallback;
    }
    int integer(const std::string& key, int fallback) const {
        if (!has(key)) return fallback;
        const double v = child(key).as_number();
        if (v != std::floor(v) || std::abs(v) > 1e9) child(key).error("expected an integer");
        return static_cast<int>(v);
    }
    bool boolean(const std::string& key, bool fallback) const {
        if (!has(key)) return fallback;
        const Reader c = child(key);
        try {
            return c.node_.as<bool>();
        } catch (const YAML::Exception&) {
            c.error("expected true or false");
        }
    }
    std::string text(const std::string& key, const std::string& fallback) const {
        if (!has(key)) return fallback;
        const Reader c = child(key);
        if (!c.node_.IsScalar()) c.error("expected a string");
        return c.node_.as<std::string>();
    }

    double as_number() const {
        if (!node_.IsScalar()) error("expected a number");
        const std::string s = node_.as<std::string>();
        if (s == ".inf" || s == "+.inf") return std::numeric_limits<double>::infinity();
        if (s == "-.inf") return -std::numeric_limits<double>::infinity();
        if (s == ".nan") return std::numeric_limits<double>::quiet_NaN();
        char* end = nullptr;
        const double v = std::strtod(s.c_str(), &end);
        if (s.empty() || end != s.c_str() + s.size()) error("expected a number, got '" + s + "'");
        return v;
    }

    std::vector<double> numbers() const {
        if (!node_.IsSequence()) error("expected a list of numbers");
        std::vector<double> out;
        for (std::size_t i = 0; i < node_.size(); ++i) out.push_back(item(i).as_number());
        return out;
    }

    std::map<std::string, double> number_map() const {
        if (!node_.IsMap()) error("expected a mapping of numbers");
        std::map<std::string, double> out;
        for (const auto& kv : node_) {
            const auto key = kv.first.as<std::string>();
            out[key] = Reader(kv.second, child_path(key)).as_number();
        }
        return out;
    }

    std::string as_text() const {
        if (!node_.IsScalar()) error("expected a string");
        return node_.as<std::string>();
    }

    std::size_t size() const { return node_.size(); }
    bool is_sequence() const { return node_.IsSequence(); }
    Reader item(std::size_t i) const { return {node_[i], path_ + "[" + std::to_string(i) + "]"}; }
    const std::string& path() const { return path_; }

    // Runs f and turns library errors into a ConfigError at this node.
    template <class F>
    auto guard(F&& f) const {
        try {
            return f();
        } catch (const ConfigError&) {
            throw;
        } catch (const Error& e) {
            error(e.what());
        }
    }

private:
    std::string child_path(const std::string& key) const {
        return path_.empty() ? key : path_ + "." + key;
    }

    YAML::Node node_;
    std::string path_;
};

Tolerances read_tolerances(const Reader& r, Tolerances t) {
    r.expect_map({"eps_mono", "tol_scaling", "tol_seq", "tol_shift", "delta", "eps_ext", "eps_per",
                  "tail_fraction", "bound_tol", "tol_rate"});
    t.eps_mono = r.number("eps_mono", t.eps_mono);
    t.tol_scaling = r.number("tol_scaling", t.tol_scaling);
    t.tol_seq = r.number("tol_seq", t.tol_seq);
    t.tol_shift = r.number("tol_shift", t.tol_shift);
    t.delta = r.number("delta", t.delta);
    t.eps_ext = r.number("eps_ext", t.eps_ext);
    t.eps_per = r.number("eps_per", t.eps_per);
    t.tail_fraction = r.number("tail_fraction", t.tail_fraction);
    t.bound_tol = r.number("bound_tol", t.bound_tol);
    t.tol_rate = r.number("tol_rate", t.tol_rate);
    return t;
}

Axis read_axis(const Reader& r) {
    r.expect_map({"length", "points", "bc", "origin"});
    Axis a;
    a.length = r.number("length", a.length);
    a.points = r.integer("points", a.points);
    a.bc = r.guard([&] { return boundary_from_string(r.text("bc", "Neumann")); });
    a.origin = r.number("origin", a.origin);
    r.guard([&] {
        a.validate();
        return 0;
    });
    return a;
}

LandscapePreset read_landscape(const Reader& r) {
    r.expect_map({"kind", "params", "space_dim", "pheno_dim"});
    LandscapePreset p;
    if (!r.has("kind")) r.error("missing key 'kind'");
    const Reader kind = r.child("kind");
    p.kind = kind.guard([&] { return preset_kind_from_string(r.text("kind", "")); });
    if (r.has("params")) p.params = r.child("params").number_map();
    p.space_dim = static_cast<std::size_t>(r.integer("space_dim", 1));
    p.pheno_dim = static_cast<std::size_t>(r.integer("pheno_dim", 1));
    r.guard([&] { return make_preset(p).sup_r(); });
    return p;
}

GridPolicy read_grid(const Reader& r) {
    r.expect_map({"space_points", "pheno", "pheno_points", "diffusivity", "spacing",
                  "truncation_kinds", "node_scaling"});
    GridPolicy g;
    g.space_points = r.integer("space_points", g.space_points);
    if (r.has("pheno")) {
        const Reader list = r.child("pheno");
        if (!list.is_sequence()) list.error("expected a list of axes");
        for (std::size_t i = 0; i < list.size(); ++i) g.pheno.push_back(read_axis(list.item(i)));
    }
    g.pheno_points = r.integer("pheno_points", g.pheno_points);
    g.diffusivity = r.number("diffusivity", g.diffusivity);
    g.spacing = r.number("spacing", g.spacing);
    if (r.has("truncation_kinds")) {
        const Reader list = r.child("truncation_kinds");
        if (!list.is_sequence()) list.error("expected a list of problem kinds");
        g.truncation_kinds.clear();
        for (std::size_t i = 0; i < list.size(); ++i) {
            const Reader it = list.item(i);
            g.truncation_kinds.push_back(it.guard([&] { return problem_kind_from_string(it.as_text()); }));
        }
    }
    const std::string scaling = r.text("node_scaling", "ScaleWithPeriod");
    if (scaling == "ScaleWithPeriod")
        g.node_scaling = NodeScaling::ScaleWithPeriod;
    else if (scaling == "Fixed")
        g.node_scaling = NodeScaling::Fixed;
    else
        r.child("node_scaling").error("expected ScaleWithPeriod or Fixed");
    return g;
}

SweepSpec read_sweep(const Reader& r) {
    r.expect_map({"kind", "values", "relative"});
    SweepSpec s;
    s.kind = r.child("kind").guard([&] { return sweep_kind_from_string(r.text("kind", "None")); });
    if (r.has("values")) s.values = r.child("values").numbers();
    s.relative = r.boolean("relative", false);
    return s;
}

InitialDatum read_initial(const Reader& r) {
    r.expect_map({"kind", "params"});
    InitialDatum d;
    d.kind = r.child("kind").guard(
        [&] { return initial_kind_from_string(r.text("kind", "ConstantPatch")); });
    if (d.kind == InitialKind::Custom)
        r.child("kind").error("Custom initial data cannot be given in a config file");
    if (r.has("params")) d.params = r.child("params").number_map();
    return d;
}

ExperimentSpec read_experiment(const Reader& r, const Tolerances& global) {
    r.expect_map({"name", "landscape", "grid", "sweep", "simulate", "horizon", "dt", "initial",
                  "coth_tau", "tolerances"});
    ExperimentSpec e;
    if (!r.has("name")) r.error("missing key 'name'");
    e.name = r.text("name", "");
    if (!r.has("landscape")) r.error("missing key 'landscape'");
    e.landscape = read_landscape(r.child("landscape"));
    if (r.has("grid")) e.grid = read_grid(r.child("grid"));
    if (r.has("sweep")) e.sweep = read_sweep(r.child("sweep"));
    e.simulate = r.boolean("simulate", false);
    e.horizon = r.number("horizon", 0.0);
    e.dt = r.number("dt", 0.0);
    if (r.has("initial")) e.initial = read_initial(r.child("initial"));
    e.coth_tau = r.number("coth_tau", e.coth_tau);
    e.tolerances = r.has("tolerances") ? read_tolerances(r.child("tolerances"), global) : global;
    r.guard([&] {
        validate(e);
        return 0;
    });
    return e;
}

// ---------------------------------------------------------------------------
// Writing

std::string num(double v) {
    if (std::isnan(v)) return ".nan";
    if (std::isinf(v)) return v > 0 ? ".inf" : "-.inf";
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string quoted(const std::string& s) {
    std::string out = "\"";
    for (char c : s) {
        if (c == '"' || c == '\\') out += '\\';
        if (c == '\n') {
            out += "\\n";
            continue;
        }
        out += c;
    }
    return out + "\"";
}

std::string number_map(const std::map<std::string, double>& m) {
    std::string out = "{";
    bool first = true;
    for (const auto& [k, v] : m) {
        out += (first ? "" : ", ") + quoted(k) + ": " + num(v);
        first = false;
    }
    return out + "}";
}

void write_tolerances(std::ostream& os, const Tolerances& t, const std::string& indent) {
    os << indent << "eps_mono: " << num(t.eps_mono) << "\n"
       << indent << "tol_scaling: " << num(t.tol_scaling) << "\n"
       << indent << "tol_seq: " << num(t.tol_seq) << "\n"
       << indent << "tol_shift: " << num(t.tol_shift) << "\n"
       << indent << "delta: " << num(t.delta) << "\n"
       << indent << "eps_ext: " << num(t.eps_ext) << "\n"
       << indent << "eps_per: " << num(t.eps_per) << "\n"
       << indent << "tail_fraction: " << num(t.tail_fraction) << "\n"
       << indent << "bound_tol: " << num(t.bound_tol) << "\n"
       << indent << "tol_rate: " << num(t.tol_rate) << "\n";
}

}  // namespace

Config parse_config(const std::string& text) {
    YAML::Node root;
    try {
        root = YAML::Load(text);
    } catch (const YAML::ParserException& e) {
        throw ConfigError("syntax error: " + e.msg, "", e.mark.line + 1, e.mark.column + 1);
    }
    if (!root.IsMap()) throw ConfigError("the config must be a mapping", "", 1, 1);
    const Reader r(root, "");
    r.expect_map({"experiments", "output_dir", "tolerances", "threads"});

    Config cfg;
    cfg.output_dir = r.text("output_dir", cfg.output_dir);
    const int threads = r.integer("threads", 1);
    if (threads < 1) r.child("threads").error("threads must be at least 1");
    cfg.threads = static_cast<unsigned>(threads);
    if (r.has("tolerances")) cfg.tolerances = read_tolerances(r.child("tolerances"), {});
    if (!r.has("experiments")) r.error("missing key 'experiments'");
    const Reader list = r.child("experiments");
    if (!list.is_sequence() || list.size() == 0) list.error("expected a non-empty list");
    std::set<std::string> names;
    for (std::size_t i = 0; i < list.size(); ++i) {
        cfg.experiments.push_back(read_experiment(list.item(i), cfg.tolerances));
        if (!names.insert(cfg.experiments.back().name).second)
            list.item(i).error("duplicate experiment name '" + cfg.experiments.back().name + "'");
    }
    return cfg;
}

Config load_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file " + path.string(), "", 0, 0);
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str());
}

std::string serialize_config(const Config& cfg) {
    std::ostringstream os;
    os << "output_dir: " << quoted(cfg.output_dir) << "\n";
    os << "threads: " << cfg.threads << "\n";
    os << "tolerances:\n";
    write_tolerances(os, cfg.tolerances, "  ");
    os << "experiments:\n";
    for (const auto& e : cfg.experiments) {
        os << "  - name: " << quoted(e.name) << "\n";
        os << "    landscape:\n"
           << "      kind: " << to_string(e.landscape.kind) << "\n"
           << "      space_dim: " << e.landscape.space_dim << "\n"
           << "      pheno_dim: " << e.landscape.pheno_dim << "\n"
           << "      params: " << number_map(e.landscape.params) << "\n";
        const auto& g = e.grid;
        os << "    grid:\n"
           << "      space_points: " << g.space_points << "\n"
           << "      pheno_points: " << g.pheno_points << "\n";
        if (!g.pheno.empty()) {
            os << "      pheno:\n";
            for (const auto& a : g.pheno)
                os << "        - {length: " << num(a.length) << ", points: " << a.points
                   << ", bc: " << to_string(a.bc) << ", origin: " << num(a.origin) << "}\n";
        }
        os << "      diffusivity: " << num(g.diffusivity) << "\n"
           << "      spacing: " << num(g.spacing) << "\n"
           << "      truncation_kinds: [";
        for (std::size_t i = 0; i < g.truncation_kinds.size(); ++i)
            os << (i ? ", " : "") << to_string(g.truncation_kinds[i]);
        os << "]\n"
           << "      node_scaling: "
           << (g.node_scaling == NodeScaling::Fixed ? "Fixed" : "ScaleWithPeriod") << "\n";
        os << "    sweep:\n"
           << "      kind: " << to_string(e.sweep.kind) << "\n"
           << "      values: [";
        for (std::size_t i = 0; i < e.sweep.values.size(); ++i)
            os << (i ? ", " : "") << num(e.sweep.values[i]);
        os << "]\n"
           << "      relative: " << (e.sweep.relative ? "true" : "false") << "\n";
        os << "    simulate: " << (e.simulate ? "true" : "false") << "\n"
           << "    horizon: " << num(e.horizon) << "\n"
           << "    dt: " << num(e.dt) << "\n"
           << "    initial:\n"
           << "      kind: " << to_string(e.initial.kind) << "\n"
           << "      params: " << number_map(e.initial.params) << "\n"
           << "    coth_tau: " << num(e.coth_tau) << "\n"
           << "    tolerances:\n";
        write_tolerances(os, e.tolerances, "      ");
    }
    return os.str();
}

}  // namespace fkpp
