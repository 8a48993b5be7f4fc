#include "config.hpp"

#include <fstream>
#include <set>

#include <json.hpp>

namespace wsturm::cli {

namespace {

using nlohmann::json;

void require_keys(const json& object, const std::set<std::string>& known,
                  const std::string& where) {
    for (const auto& [key, value] : object.items())
        if (!known.count(key))
            throw config_error("unknown key '" + key + "' in " + where);
}

FieldSpec parse_field(const json& value, const std::string& where) {
    FieldSpec spec;
    if (value.is_string()) {
        spec.source = value.get<std::string>();
        try {
            spec.parsed = expr::parse(spec.source);
        } catch (const expr::parse_error& e) {
            throw config_error(where + ": expression error at offset " +
                               std::to_string(e.position()) + ": " + e.what());
        }
        return spec;
    }
    if (value.is_object()) {
        require_keys(value, {"file"}, where);
        if (!value.contains("file") || !value["file"].is_string())
            throw config_error(where + ": nodal field object needs a 'file' string");
        spec.file = value["file"].get<std::string>();
        return spec;
    }
    throw config_error(where + ": expected an expression string or {\"file\": ...}");
}

std::vector<FieldSpec> parse_field_list(const json& value, const std::string& where) {
    if (!value.is_array())
        throw config_error(where + ": expected an array of expressions");
    std::vector<FieldSpec> out;
    for (std::size_t i = 0; i < value.size(); ++i)
        out.push_back(parse_field(value[i], where + "[" + std::to_string(i) + "]"));
    return out;
}

DomainSpec parse_domain(const json& value) {
    if (!value.is_object())
        throw config_error("domain: expected {\"interval\": [a,b]} or {\"rectangle\": [...]}");
    require_keys(value, {"interval", "rectangle"}, "domain");
    DomainSpec domain;
    if (value.contains("interval")) {
        const auto& iv = value["interval"];
        if (!iv.is_array() || iv.size() != 2)
            throw config_error("domain.interval: expected [a, b]");
        domain.dim = 1;
        domain.x0 = iv[0].get<double>();
        domain.x1 = iv[1].get<double>();
        return domain;
    }
    if (value.contains("rectangle")) {
        const auto& rect = value["rectangle"];
        if (!rect.is_array() || rect.size() != 4)
            throw config_error("domain.rectangle: expected [x0, x1, y0, y1]");
        domain.dim = 2;
        domain.x0 = rect[0].get<double>();
        domain.x1 = rect[1].get<double>();
        domain.y0 = rect[2].get<double>();
        domain.y1 = rect[3].get<double>();
        return domain;
    }
    throw config_error("domain: needs 'interval' or 'rectangle'");
}

MeshSpec parse_mesh(const json& value, int dim) {
    if (!value.is_object()) throw config_error("mesh: expected an object");
    require_keys(value, {"elements", "refinements"}, "mesh");
    if (!value.contains("elements")) throw config_error("mesh: missing 'elements'");
    const auto& elems = value["elements"];
    MeshSpec mesh;
    if (!elems.is_array() || elems.empty() || static_cast<int>(elems.size()) != dim)
        throw config_error("mesh.elements: expected " + std::to_string(dim) +
                           " element count(s) for this domain");
    mesh.mx = elems[0].get<int>();
    if (dim == 2) mesh.my = elems[1].get<int>();
    if (mesh.mx < 1 || (dim == 2 && mesh.my < 1))
        throw config_error("mesh.elements: counts must be >= 1");
    if (value.contains("refinements")) {
        mesh.refinements = value["refinements"].get<int>();
        if (mesh.refinements < 0 || mesh.refinements > 12)
            throw config_error("mesh.refinements: expected 0..12");
    }
    return mesh;
}

std::vector<SliceSpec> parse_slices(const json& value) {
    std::vector<SliceSpec> slices;
    if (value.is_object()) {
        require_keys(value, {"start", "step", "count"}, "slices");
        for (const char* key : {"start", "step", "count"})
            if (!value.contains(key))
                throw config_error(std::string("slices: missing '") + key + "'");
        double start = value["start"].get<double>();
        double step = value["step"].get<double>();
        int count = value["count"].get<int>();
        if (count < 1) throw config_error("slices.count: must be >= 1");
        if (!(step > 0.0)) throw config_error("slices.step: must be positive");
        for (int i = 0; i < count; ++i) {
            SliceSpec slice;
            slice.t = start + i * step;
            slices.push_back(std::move(slice));
        }
        return slices;
    }
    if (value.is_array()) {
        for (std::size_t i = 0; i < value.size(); ++i) {
            const auto& entry = value[i];
            std::string where = "slices[" + std::to_string(i) + "]";
            if (!entry.is_object()) throw config_error(where + ": expected an object");
            require_keys(entry, {"t", "weight", "rhs", "current", "internal_force"}, where);
            if (!entry.contains("t")) throw config_error(where + ": missing 't'");
            SliceSpec slice;
            slice.t = entry["t"].get<double>();
            if (entry.contains("weight"))
                slice.weight = parse_field(entry["weight"], where + ".weight");
            if (entry.contains("rhs")) slice.rhs = parse_field(entry["rhs"], where + ".rhs");
            if (entry.contains("current"))
                slice.current = parse_field_list(entry["current"], where + ".current");
            if (entry.contains("internal_force"))
                slice.internal_force =
                    parse_field(entry["internal_force"], where + ".internal_force");
            slices.push_back(std::move(slice));
        }
        return slices;
    }
    throw config_error("slices: expected a {start, step, count} grid or an array");
}

} // namespace

RunConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw config_error("cannot open config file '" + path + "'");

    json root;
    try {
        root = json::parse(in);
    } catch (const json::exception& e) {
        throw config_error(std::string("config is not valid JSON: ") + e.what());
    }
    if (!root.is_object()) throw config_error("config root must be an object");

    static const std::set<std::string> known = {
        "command",      "domain",         "mesh",          "weight",
        "rhs",          "exact",          "current",       "internal_force",
        "eigen_count",  "poincare_q",     "slices",        "output_prefix",
        "quadrature_degree", "threads"};
    require_keys(root, known, "config");

    RunConfig config;
    if (!root.contains("command") || !root["command"].is_string())
        throw config_error("config: missing 'command'");
    config.command = root["command"].get<std::string>();
    static const std::set<std::string> commands = {"solve",   "eigen",       "constants",
                                                   "certify", "convergence", "timeseries"};
    if (!commands.count(config.command))
        throw config_error("config: unknown command '" + config.command + "'");

    if (!root.contains("domain")) throw config_error("config: missing 'domain'");
    config.domain = parse_domain(root["domain"]);
    if (!(config.domain.x0 < config.domain.x1) ||
        (config.domain.dim == 2 && !(config.domain.y0 < config.domain.y1)))
        throw config_error("domain: degenerate range");

    if (!root.contains("mesh")) throw config_error("config: missing 'mesh'");
    config.mesh = parse_mesh(root["mesh"], config.domain.dim);

    if (root.contains("weight")) config.weight = parse_field(root["weight"], "weight");
    if (root.contains("rhs")) config.rhs = parse_field(root["rhs"], "rhs");
    if (root.contains("exact")) config.exact = parse_field(root["exact"], "exact");
    if (root.contains("internal_force"))
        config.internal_force = parse_field(root["internal_force"], "internal_force");
    if (root.contains("current")) config.current = parse_field_list(root["current"], "current");

    if (root.contains("eigen_count")) {
        config.eigen_count = root["eigen_count"].get<int>();
        if (config.eigen_count < 1) throw config_error("eigen_count: must be >= 1");
    }
    if (root.contains("poincare_q")) {
        if (root["poincare_q"].is_string()) {
            std::string text = root["poincare_q"].get<std::string>();
            if (text == "4/3")
                config.poincare_q = 4.0 / 3.0;
            else if (text == "2")
                config.poincare_q = 2.0;
            else
                throw config_error("poincare_q: expected 2 or \"4/3\"");
        } else {
            config.poincare_q = root["poincare_q"].get<double>();
        }
        if (std::abs(config.poincare_q - 2.0) > 1e-9 &&
            std::abs(config.poincare_q - 4.0 / 3.0) > 1e-9)
            throw config_error("poincare_q: the supported exponents are 2 and 4/3");
    }
    if (root.contains("slices")) config.slices = parse_slices(root["slices"]);
    if (root.contains("output_prefix")) {
        if (!root["output_prefix"].is_string())
            throw config_error("output_prefix: expected a string");
        config.output_prefix = root["output_prefix"].get<std::string>();
    }
    if (root.contains("quadrature_degree")) {
        config.quadrature_degree = root["quadrature_degree"].get<int>();
        if (config.quadrature_degree < 1 || config.quadrature_degree > 20)
            throw config_error("quadrature_degree: expected 1..20");
    }
    if (root.contains("threads")) {
        config.threads = root["threads"].get<int>();
        if (config.threads < 1) throw config_error("threads: must be >= 1");
    }

    // Per-command requirements, checked before any computation starts.
    auto need = [&](const FieldSpec& spec, const char* key) {
        if (!spec.present())
            throw config_error("command '" + config.command + "' requires '" + key + "'");
    };
    if (config.command == "solve" || config.command == "convergence") {
        need(config.weight, "weight");
        need(config.rhs, "rhs");
    }
    if (config.command == "convergence") {
        need(config.exact, "exact");
        if (config.mesh.refinements < 1)
            throw config_error("convergence: needs mesh.refinements >= 1");
    }
    if (config.command == "eigen" || config.command == "constants" ||
        config.command == "certify")
        need(config.weight, "weight");
    if (config.command == "timeseries") {
        if (config.slices.empty()) throw config_error("timeseries: needs 'slices'");
        for (std::size_t i = 0; i < config.slices.size(); ++i) {
            if (!config.slices[i].weight.present() && !config.weight.present())
                throw config_error("timeseries: slice " + std::to_string(i) +
                                   " has no weight and no top-level default");
            if (!config.slices[i].rhs.present() && !config.rhs.present())
                throw config_error("timeseries: slice " + std::to_string(i) +
                                   " has no rhs and no top-level default");
        }
    }
    return config;
}

} // namespace wsturm::cli
