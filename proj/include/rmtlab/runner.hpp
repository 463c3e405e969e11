#pragma once

#include "rmtlab/common.hpp"
#include "rmtlab/ensembles.hpp"

#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include <json.hpp>

namespace rmtlab {

/// One experiment = one config document.  CLI flags override fields and the
/// overrides are recorded in the manifest.
struct ExperimentConfig {
    nlohmann::json doc;
    std::vector<std::string> overrides;

    static ExperimentConfig load(const std::filesystem::path& file);
    static ExperimentConfig from_json(nlohmann::json doc);

    std::string kind() const { return doc.value("kind", ""); }
    std::uint64_t seed() const { return doc.value("seed", std::uint64_t{0}); }
    std::filesystem::path out_dir() const {
        return doc.value("out", std::string("runs/") + kind());
    }
    int threads() const { return doc.value("threads", 0); }

    void override_field(const std::string& key, const nlohmann::json& value);
    /// Cross-field validation; throws ConfigInvalid with a field message.
    void validate() const;
    std::uint64_t digest() const;

    SpectralMeasure measure() const;
    EnsembleSpec ensemble(const SpectralMeasure& nu) const;
};

struct RunManifest {
    std::uint64_t config_digest = 0;
    std::string code_version;
    double wall_seconds = 0.0;
    std::map<std::string, std::uint64_t> stage_seeds;
    std::vector<std::string> outputs;
    std::map<std::string, bool> checks;
    std::vector<std::string> overrides;

    bool all_pass() const;
    nlohmann::json to_json() const;
};

/// Executes the configured experiment, writes outputs + manifest.json into
/// the output directory, and returns the manifest.
RunManifest run(const ExperimentConfig& cfg);

/// Canned experiment batteries: "quick" exercises every subsystem in about a
/// minute; "full" runs the complete verification battery.
nlohmann::json suite(const std::string& name, int threads = 0);

} // namespace rmtlab
