#include "smpr/model_file.hpp"

#include <cmath>
#include <fstream>

namespace smpr {

using nlohmann::json;

json read_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw validation_error("cannot open file: " + path);
    json j;
    try {
        in >> j;
    } catch (const json::parse_error& e) {
        throw validation_error("malformed JSON in " + path + ": " + e.what());
    }
    return j;
}

MarginalSpec spec_from_json(const json& j) {
    if (!j.is_object() || !j.contains("family"))
        throw validation_error("spec must be an object with a \"family\" field");
    const Family family = family_from_name(j.at("family").get<std::string>());
    const json params = j.value("params", json::object());
    const auto param = [&](const char* name, std::optional<double> fallback) {
        if (params.contains(name)) return params.at(name).get<double>();
        if (fallback) return *fallback;
        throw validation_error(std::string("missing required parameter \"") + name + "\"");
    };
    MarginalSpec spec = MarginalSpec::gaussian();
    switch (family) {
        case Family::Gaussian: spec = MarginalSpec::gaussian(); break;
        case Family::Gamma: spec = MarginalSpec::gamma(param("beta", std::nullopt)); break;
        case Family::Laplace: spec = MarginalSpec::laplace(); break;
        case Family::Arcsine: spec = MarginalSpec::arcsine(); break;
        case Family::Semicircle: spec = MarginalSpec::semicircle(param("radius", 1.0)); break;
        case Family::QNormal: spec = MarginalSpec::q_normal(param("q", std::nullopt)); break;
    }
    spec.validate();
    return spec;
}

json spec_to_json(const MarginalSpec& spec) {
    json j;
    j["family"] = family_name(spec.family());
    switch (spec.family()) {
        case Family::Gamma: j["params"]["beta"] = spec.shape(); break;
        case Family::Semicircle: j["params"]["radius"] = spec.radius(); break;
        case Family::QNormal: j["params"]["q"] = spec.q(); break;
        default: break;
    }
    return j;
}

namespace {

RatioLaw law_from_name(const std::string& name) {
    if (name == "n") return RatioLaw::Linear;
    if (name == "n^2") return RatioLaw::Quadratic;
    if (name == "n(n+2)/3") return RatioLaw::SemicircleLaw;
    throw validation_error("unknown rate law '" + name + "' (expected n | n^2 | n(n+2)/3)");
}

}  // namespace

AlphaSequence alpha_from_json(const json& j, const MarginalSpec& spec, AlphaSource& source,
                              std::optional<int>& solved_k) {
    solved_k.reset();
    if (j.is_string()) {
        source = AlphaSource::NamedLaw;
        return AlphaSequence::from_law(law_from_name(j.get<std::string>()));
    }
    if (j.is_array()) {
        source = AlphaSource::ExplicitRatios;
        return AlphaSequence::from_ratios(j.get<std::vector<double>>());
    }
    if (!j.is_object()) throw validation_error("alpha must be a string, array, or object");

    const int sources = static_cast<int>(j.contains("law")) +
                        static_cast<int>(j.contains("ratios")) +
                        static_cast<int>(j.contains("solve"));
    if (sources != 1)
        throw validation_error("alpha must carry exactly one of \"law\", \"ratios\", \"solve\"");
    const double scale = j.value("scale", 1.0);

    if (j.contains("law")) {
        source = AlphaSource::NamedLaw;
        return AlphaSequence::from_law(law_from_name(j.at("law").get<std::string>()), scale);
    }
    if (j.contains("ratios")) {
        source = AlphaSource::ExplicitRatios;
        return AlphaSequence::from_ratios(j.at("ratios").get<std::vector<double>>(), scale);
    }
    const int k = j.at("solve").get<int>();
    source = AlphaSource::Solved;
    solved_k = k;
    const CoeffMatrix c = basis_from_moments(spec, 2 * k);
    const ContinuityReport report = solve_alpha(c, k);
    return AlphaSequence::from_ratios(report.ratios, scale);
}

ResolvedModel load_model(const json& j) {
    if (!j.is_object()) throw validation_error("model file must be a JSON object");
    ResolvedModel model;
    model.spec = spec_from_json(j.at("spec"));
    if (!j.contains("alpha")) throw validation_error("model file needs an \"alpha\" entry");
    model.alpha = alpha_from_json(j.at("alpha"), model.spec, model.alpha_source, model.solved_k);

    if (j.contains("truncation")) {
        const json& t = j.at("truncation");
        model.truncation.max_terms = t.value("max_terms", model.truncation.max_terms);
        model.truncation.tail_tol = t.value("tail_tol", model.truncation.tail_tol);
    }
    if (j.value("closed_form", false)) model.mode = KernelMode::ClosedForm;

    // cross-check declared rates against the continuity module on load:
    // an alpha list long enough to pin rho_2 must be consistent with C
    if (model.alpha_source != AlphaSource::Solved && model.alpha.max_index() >= 2) {
        const double c2 = continuity_coefficient(moment_summary(model.spec));
        const double rho2 = model.alpha.ratio(2);
        if (std::abs(rho2 - c2) > 1e-6 * std::max(1.0, std::abs(c2)) && j.value("strict", false))
            throw validation_error("alpha rho_2 = " + std::to_string(rho2) +
                                   " is inconsistent with the continuity coefficient " +
                                   std::to_string(c2));
    }
    return model;
}

ResolvedModel load_model_file(const std::string& path) { return load_model(read_json_file(path)); }

MarginalSpec load_spec_file(const std::string& path) {
    return spec_from_json(read_json_file(path));
}

AlphaSequence load_alpha_file(const std::string& path, const MarginalSpec& spec) {
    AlphaSource source;
    std::optional<int> solved_k;
    return alpha_from_json(read_json_file(path), spec, source, solved_k);
}

}  // namespace smpr
