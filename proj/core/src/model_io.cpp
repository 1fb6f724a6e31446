#include "elliptail/model_io.hpp"

#include <fstream>
#include <sstream>

#include <json.hpp>

#include "elliptail/error.hpp"

namespace elliptail {

namespace {

using nlohmann::json;

json to_json(const RadialModel& model);

struct DescriptorWriter {
    json operator()(const KotzParams& p) const {
        json j = {{"family", "kotz"}, {"C", p.C}, {"N", p.N}, {"c", p.c}, {"delta", p.delta}, {"kappa", p.kappa}};
        if (p.validity_radius) j["validity_radius"] = *p.validity_radius;
        j["label"] = p.label;
        return j;
    }
    json operator()(const TailEquivalentSpec& s) const {
        json j = {{"family", "tail_equiv"}, {"base", to_json(s.base)}, {"a", s.a},
                  {"gamma", s.gamma},       {"tau", s.tau},           {"kappa", s.kappa}};
        if (s.validity_radius) j["validity_radius"] = *s.validity_radius;
        j["label"] = s.label;
        return j;
    }
    json operator()(const MixtureParams& p) const {
        json components = json::array();
        for (const auto& c : p.components) components.push_back({{"weight", c.weight}, {"model", to_json(c.model)}});
        return {{"family", "mixture"}, {"components", components}, {"label", p.label}};
    }
    json operator()(const CustomModelSpec& s) const {
        throw ModelError("model '" + s.label + "' is a custom model and has no JSON descriptor");
    }
};

json to_json(const RadialModel& model) { return std::visit(DescriptorWriter{}, model.parameters()); }

double number(const json& j, const char* key) {
    if (!j.contains(key)) throw ModelError(std::string("model descriptor: missing field '") + key + "'");
    if (!j.at(key).is_number()) throw ModelError(std::string("model descriptor: field '") + key + "' must be a number");
    return j.at(key).get<double>();
}

double number_or(const json& j, const char* key, double fallback) { return j.contains(key) ? number(j, key) : fallback; }

std::optional<double> optional_number(const json& j, const char* key) {
    if (!j.contains(key) || j.at(key).is_null()) return std::nullopt;
    return number(j, key);
}

std::string label_of(const json& j) {
    if (!j.contains("label")) return {};
    if (!j.at("label").is_string()) throw ModelError("model descriptor: 'label' must be a string");
    return j.at("label").get<std::string>();
}

RadialModel from_json(const json& j) {
    if (!j.is_object()) throw ModelError("model descriptor: expected a JSON object");
    if (!j.contains("family") || !j.at("family").is_string())
        throw ModelError("model descriptor: missing string field 'family'");
    const auto family = j.at("family").get<std::string>();
    if (family == "kotz") {
        KotzParams p;
        p.C = number(j, "C");
        p.N = number(j, "N");
        p.c = number(j, "c");
        p.delta = number(j, "delta");
        p.kappa = number_or(j, "kappa", 1.0);
        p.validity_radius = optional_number(j, "validity_radius");
        p.label = label_of(j);
        return make_kotz(p);
    }
    if (family == "tail_equiv") {
        if (!j.contains("base")) throw ModelError("model descriptor: tail_equiv requires 'base'");
        TailEquivalentSpec s{.base = from_json(j.at("base"))};
        s.a = number(j, "a");
        s.gamma = number(j, "gamma");
        s.tau = number(j, "tau");
        s.kappa = number_or(j, "kappa", 1.0);
        s.validity_radius = optional_number(j, "validity_radius");
        s.label = label_of(j);
        return make_tail_equivalent(s);
    }
    if (family == "mixture") {
        if (!j.contains("components") || !j.at("components").is_array())
            throw ModelError("model descriptor: mixture requires a 'components' array");
        MixtureParams p;
        for (const auto& c : j.at("components")) {
            if (!c.contains("model")) throw ModelError("model descriptor: mixture component requires 'model'");
            p.components.push_back({number(c, "weight"), from_json(c.at("model"))});
        }
        p.label = label_of(j);
        return make_mixture(p);
    }
    throw ModelError("model descriptor: unknown family '" + family + "' (expected kotz, tail_equiv or mixture)");
}

}  // namespace

std::string model_to_json(const RadialModel& model, int indent) { return to_json(model).dump(indent); }

RadialModel model_from_json(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ModelError(std::string("model descriptor: ") + e.what());
    }
    return from_json(j);
}

RadialModel load_model(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open model file '" + path.string() + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return model_from_json(buf.str());
}

void save_model(const std::filesystem::path& path, const RadialModel& model) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot write model file '" + path.string() + "'");
    out << model_to_json(model) << '\n';
}

}  // namespace elliptail
