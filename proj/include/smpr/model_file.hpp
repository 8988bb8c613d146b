#pragma once

#include <optional>
#include <string>

#include <json.hpp>

#include "smpr/continuity.hpp"
#include "smpr/kernels.hpp"

namespace smpr {

/// How a model file's alpha entry was resolved.
enum class AlphaSource { ExplicitRatios, NamedLaw, Solved };

struct ResolvedModel {
    MarginalSpec spec = MarginalSpec::gaussian();
    AlphaSequence alpha = AlphaSequence::from_law(RatioLaw::Linear);
    TruncationPolicy truncation;
    AlphaSource alpha_source = AlphaSource::NamedLaw;
    std::optional<int> solved_k;
    KernelMode mode = KernelMode::Series;

    TransitionKernel make_kernel() const { return {spec, alpha, truncation, mode}; }
};

/// {"family": "...", "params": {...}}
MarginalSpec spec_from_json(const nlohmann::json& j);
nlohmann::json spec_to_json(const MarginalSpec& spec);

/// Accepts "n" | "n^2" | "n(n+2)/3", [1, rho_2, ...],
/// {"law": ..., "scale": s}, {"ratios": [...], "scale": s} or {"solve": k}.
/// Solving needs the marginal, hence the spec argument.
AlphaSequence alpha_from_json(const nlohmann::json& j, const MarginalSpec& spec,
                              AlphaSource& source, std::optional<int>& solved_k);

/// Full model document: spec + alpha (exactly one source) + optional
/// truncation/mode overrides.
ResolvedModel load_model(const nlohmann::json& j);
ResolvedModel load_model_file(const std::string& path);

MarginalSpec load_spec_file(const std::string& path);
AlphaSequence load_alpha_file(const std::string& path, const MarginalSpec& spec);

nlohmann::json read_json_file(const std::string& path);

}  // namespace smpr
