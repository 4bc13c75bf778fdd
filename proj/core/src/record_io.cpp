#include "fkpp/record_io.hpp"

#include <cctype>
#include <cstdio>
#include <fstream>

#include <nlohmann/json.hpp>

#include "fkpp/error.hpp"

namespace fkpp {

using nlohmann::json;

namespace {

Classification classification_from_string(const std::string& s) {
    for (auto c : {Classification::Persist, Classification::Extinct, Classification::Undecided})
        if (to_string(c) == s) return c;
    throw InvalidArgument("unknown classification '" + s + "'");
}

json monitors_json(const BoundMonitors& m) {
    return {{"max_rho_sup", m.max_rho_sup},         {"apriori_A", m.apriori_A},
            {"worst_bound_ratio", m.worst_bound_ratio}, {"bound_violations", m.bound_violations},
            {"dt_halvings", m.dt_halvings},          {"coth_checks", m.coth_checks},
            {"coth_violations", m.coth_violations},  {"coth_worst_ratio", m.coth_worst_ratio}};
}

BoundMonitors monitors_from(const json& j) {
    BoundMonitors m;
    m.max_rho_sup = j.at("max_rho_sup").get<double>();
    m.apriori_A = j.at("apriori_A").get<double>();
    m.worst_bound_ratio = j.at("worst_bound_ratio").get<double>();
    m.bound_violations = j.at("bound_violations").get<long>();
    m.dt_halvings = j.at("dt_halvings").get<long>();
    m.coth_checks = j.at("coth_checks").get<long>();
    m.coth_violations = j.at("coth_violations").get<long>();
    m.coth_worst_ratio = j.at("coth_worst_ratio").get<double>();
    return m;
}

json point_json(const PointResult& p) {
    json j = {{"parameter", p.parameter}, {"lambda", p.lambda},         {"residual", p.residual},
              {"iterations", p.iterations}, {"nodes", p.nodes}, {"wall_seconds", p.wall_seconds}};
    if (p.lambda_scaled) j["lambda_scaled"] = *p.lambda_scaled;
    if (p.shift_error) j["shift_error"] = *p.shift_error;
    if (p.classification) j["classification"] = std::string(to_string(*p.classification));
    if (p.expected) j["expected"] = std::string(to_string(*p.expected));
    if (p.decay_rate) j["decay_rate"] = *p.decay_rate;
    if (p.monitors) j["monitors"] = monitors_json(*p.monitors);
    return j;
}

PointResult point_from(const json& j) {
    PointResult p;
    p.parameter = j.at("parameter").get<double>();
    p.lambda = j.at("lambda").get<double>();
    p.residual = j.at("residual").get<double>();
    p.iterations = j.at("iterations").get<long>();
    p.nodes = j.at("nodes").get<std::size_t>();
    p.wall_seconds = j.at("wall_seconds").get<double>();
    if (j.contains("lambda_scaled")) p.lambda_scaled = j["lambda_scaled"].get<double>();
    if (j.contains("shift_error")) p.shift_error = j["shift_error"].get<double>();
    if (j.contains("classification"))
        p.classification = classification_from_string(j["classification"].get<std::string>());
    if (j.contains("expected"))
        p.expected = classification_from_string(j["expected"].get<std::string>());
    if (j.contains("decay_rate")) p.decay_rate = j["decay_rate"].get<double>();
    if (j.contains("monitors")) p.monitors = monitors_from(j["monitors"]);
    return p;
}

std::string sanitize(const std::string& s) {
    std::string out = s;
    for (char& c : out)
        if (!std::isalnum(static_cast<unsigned char>(c)) && c != '-' && c != '_') c = '_';
    return out;
}

}  // namespace

std::string record_to_json(const RunRecord& r, int indent) {
    json curves = json::array();
    for (const auto& c : r.curves) {
        json pts = json::array();
        for (const auto& p : c.points) pts.push_back(point_json(p));
        json jc = {{"label", c.label},         {"monotone", c.monotone}, {"converged", c.converged},
                   {"warnings", c.warnings}, {"points", pts}};
        if (c.reference_lambda) jc["reference_lambda"] = *c.reference_lambda;
        curves.push_back(jc);
    }
    json j = {{"experiment", r.experiment},
              {"runner", r.runner},
              {"spec_hash", r.spec_hash},
              {"version", r.version},
              {"canonical_spec", r.canonical_spec},
              {"passed", r.passed},
              {"failures", r.failures},
              {"wall_seconds", r.wall_seconds},
              {"curves", curves}};
    return j.dump(indent);
}

RunRecord record_from_json(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        throw InvalidArgument(std::string("run record is not valid JSON: ") + e.what());
    }
    try {
        RunRecord r;
        r.experiment = j.at("experiment").get<std::string>();
        r.runner = j.at("runner").get<std::string>();
        r.spec_hash = j.at("spec_hash").get<std::string>();
        r.version = j.at("version").get<std::string>();
        r.canonical_spec = j.at("canonical_spec").get<std::string>();
        r.passed = j.at("passed").get<bool>();
        r.failures = j.at("failures").get<std::vector<std::string>>();
        r.wall_seconds = j.at("wall_seconds").get<double>();
        for (const auto& jc : j.at("curves")) {
            CurveResult c;
            c.label = jc.at("label").get<std::string>();
            c.monotone = jc.at("monotone").get<bool>();
            c.converged = jc.at("converged").get<bool>();
            c.warnings = jc.at("warnings").get<std::vector<std::string>>();
            if (jc.contains("reference_lambda"))
                c.reference_lambda = jc["reference_lambda"].get<double>();
            for (const auto& jp : jc.at("points")) c.points.push_back(point_from(jp));
            r.curves.push_back(std::move(c));
        }
        return r;
    } catch (const json::exception& e) {
        throw InvalidArgument(std::string("malformed run record: ") + e.what());
    }
}

void write_curve_csv(std::ostream& os, const CurveResult& curve) {
    os << "parameter,lambda,residual,iterations,nodes\n";
    char buf[128];
    for (const auto& p : curve.points) {
        std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g,%ld,%zu\n", p.parameter, p.lambda,
                      p.residual, p.iterations, p.nodes);
        os << buf;
    }
}

void write_record_files(const std::filesystem::path& dir, const RunRecord& record) {
    std::filesystem::create_directories(dir);
    const std::string stem = sanitize(record.experiment);
    {
        std::ofstream out(dir / (stem + ".json"));
        if (!out) throw Error("cannot write " + (dir / (stem + ".json")).string());
        out << record_to_json(record) << '\n';
    }
    for (const auto& c : record.curves) {
        const auto path = dir / (stem + "_" + sanitize(c.label) + ".csv");
        std::ofstream out(path);
        if (!out) throw Error("cannot write " + path.string());
        write_curve_csv(out, c);
    }
}

std::string error_json(const std::string& kind, const std::string& message, int exit_code) {
    json j = {{"error", {{"kind", kind}, {"message", message}, {"exit_code", exit_code}}}};
    return j.dump(2);
}

}  // namespace fkpp
