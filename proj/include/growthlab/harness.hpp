#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "growthlab/expr.hpp"
#include "growthlab/geometry.hpp"
#include "growthlab/indices.hpp"
#include "growthlab/polynomial.hpp"

namespace growthlab::harness {

inline constexpr const char* kToolVersion = "0.1.0";

/// Config/usage errors map to process exit code 2.
struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Tolerances for prediction-vs-measurement comparisons.  They live in the
/// config (profile name + overrides), not in code paths, so every comparison
/// a manifest reports is visible in its inputs.
struct ToleranceProfile {
    std::string name = "default";
    double index_g = 0.05;       // |g_hat - g_pred|
    double decay_delta = 0.05;   // |delta_hat - delta_pred|
    double surface_delta = 0.03;
    double theta_slack = 0.05;   // theta_hat <= theta_pred + slack
    double ibp_exponent = 1.9;   // remainder decay at least this
    double slope_slack = 0.05;   // VdC scaling-law slopes

    static ToleranceProfile by_name(const std::string& name);
};

/// Declarative experiment description.  Wraps the parsed JSON document; the
/// document (with sorted keys) is the canonical serialization, so
/// parse(serialize(c)) == c and the config hash ignores key order.
class ExperimentConfig {
public:
    static ExperimentConfig parse(const std::string& text);
    static ExperimentConfig load(const std::filesystem::path& file);

    std::string serialize() const { return doc_.dump(2); }
    const nlohmann::json& doc() const { return doc_; }
    nlohmann::json& doc() { return doc_; }

    std::string kind() const;
    std::uint64_t seed() const;
    int workers() const;
    std::string out_dir() const;
    ToleranceProfile tolerances() const;

    /// Hash of the canonical dump with run-irrelevant fields (out, workers)
    /// removed; stable under field reordering.
    std::uint64_t hash() const;

    /// Throws ConfigError listing every violated field.
    void validate() const;

private:
    nlohmann::json doc_;
};

struct ResultRecord {
    std::string kind;
    std::uint64_t config_hash = 0;
    std::string tool_version = kToolVersion;
    double wall_ms = 0.0;
    std::vector<std::string> files;  // relative to out_dir
    nlohmann::json prediction;       // null when not decidable/available
    nlohmann::json measured;
    nlohmann::json tolerances;       // profile the pass verdict used
    std::optional<bool> pass;        // empty when no prediction to check
    nlohmann::json manifest() const;
};

/// Dispatches to the matching module pipeline, writes CSV/plot/manifest files
/// under config.out_dir(), and returns the record.  Rerunning an identical
/// config reproduces byte-identical CSV bodies for any worker count.
ResultRecord run(const ExperimentConfig& config);

struct ReportOutcome {
    std::string table;   // markdown table, one row per manifest
    int failures = 0;
    int missing = 0;
};

ReportOutcome report(const std::vector<std::filesystem::path>& manifests);

// JSON codecs for the domain description types (field names fixed here).
nlohmann::json domain_to_json(const geometry::DomainSpec& spec);
geometry::DomainSpec domain_from_json(const nlohmann::json& j);
nlohmann::json polynomial_to_json(const Polynomial& p);
Polynomial polynomial_from_json(const nlohmann::json& j);
nlohmann::json expr_to_json(const Expr& e);
Expr expr_from_json(const nlohmann::json& j);
nlohmann::json growth_index_to_json(const indices::GrowthIndex& g);
indices::GrowthIndex growth_index_from_json(const nlohmann::json& j);

/// "%.17g" formatting shared by every CSV/plot writer (byte determinism).
std::string format_double(double v);

}  // namespace growthlab::harness
