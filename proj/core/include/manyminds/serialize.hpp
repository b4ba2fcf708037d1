#pragma once

#include "manyminds/apriori.hpp"
#include "manyminds/causal.hpp"
#include "manyminds/geometry.hpp"
#include "manyminds/process.hpp"
#include "manyminds/quantum.hpp"
#include "manyminds/scenarios.hpp"
#include "manyminds/structures.hpp"

#include <string>

// JSON wire formats.  Regions carry a shape tag and coordinate arrays;
// dockets and structures carry the relation matrix as a string grid
// ('P', 'S', 'F', '.' on the diagonal); matrices are arrays of [re, im]
// pairs under a mandatory factor-dimension header.  All emitters are
// deterministic: identical values produce identical bytes.

namespace mm::serialize {

class ParseError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

std::string to_json(const causal::Region& region, int indent = -1);
causal::Region region_from_json(const std::string& text);

std::string to_json(const causal::Docket& docket, int indent = -1);
causal::Docket docket_from_json(const std::string& text);

std::string to_json(const structures::SwitchingStructure& s, int indent = -1);
structures::SwitchingStructure structure_from_json(const std::string& text);

std::string to_json(const structures::ValidationReport& report, int indent = -1);

std::string to_json(const quantum::Matrix& matrix, const quantum::TensorSpace& space,
                    int indent = -1);
std::pair<quantum::Matrix, quantum::TensorSpace> matrix_from_json(const std::string& text);

std::string to_json(const geometry::Manifestation& m, int indent = -1);
geometry::Manifestation manifestation_from_json(const std::string& text);

std::string to_json(const geometry::ManifestationReport& report, int indent = -1);

std::string to_json(const apriori::JumpDistribution& jd, int indent = -1);
apriori::JumpDistribution jump_distribution_from_json(const std::string& text);

std::string to_json(const process::EnsembleStats& stats, int indent = -1);

std::string to_json(const scenarios::ScenarioReport& report, int indent = -1);

// Per-trajectory CSV: step, node, chosen successor, probability.
std::string trajectories_to_csv(const std::vector<process::Trajectory>& trajectories);

} // namespace mm::serialize
