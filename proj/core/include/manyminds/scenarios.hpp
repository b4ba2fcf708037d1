#pragma once

#include "manyminds/apriori.hpp"
#include "manyminds/process.hpp"
#include "manyminds/quantum.hpp"

#include <cstdint>
#include <functional>
#include <map>
#include <string>
#include <vector>

// Executable reconstructions of the worked models: branch restriction and
// branch probabilities for product-state observers, nested decoherent
// multistep trees with their jump/extinction bookkeeping, history
// consistency functionals, the relative-frequency law of large numbers,
// the glance model separating quantum weights from path counting, the
// three-state caricature, and the fixed-versus-free initial state
// demonstration.  Every suite reports (computed, expected, tolerance, pass)
// per identity.

namespace mm::scenarios {

using quantum::AlgebraState;
using quantum::Matrix;
using quantum::Tolerances;

struct IdentityCheck {
    std::string key;
    double computed = 0;
    double expected = 0;
    double tolerance = 0;
    bool pass = false;
    std::string note;
};

struct ScenarioReport {
    std::string name;
    std::vector<IdentityCheck> checks;
    bool pass = true;

    void check(const std::string& key, double computed, double expected, double tolerance,
               const std::string& note = "");
    void require(const std::string& key, bool condition, const std::string& note = "");
};

// ---------------------------------------------------------------------------
// Branching observer with system and environment records.

struct EverettModel {
    std::vector<double> probabilities; // branch weights, sum 1
    quantum::TensorSpace space;        // observer x system x environment
    quantum::Vector psi;               // global wave function

    static EverettModel make(std::vector<double> probabilities);
    int branches() const { return static_cast<int>(probabilities.size()); }
};

ScenarioReport everett_restriction_suite(const EverettModel& model, const Tolerances& tol = {});

// ---------------------------------------------------------------------------
// Nested decoherent multistep tree.  Outcome 0 at each level is the
// extinction remainder; outcomes 1..R are successors.

struct MultistepModel {
    std::vector<int> outcomes;                              // R_m per level
    std::map<std::vector<int>, std::vector<double>> probs;  // prefix -> distribution over 0..R_m

    static MultistepModel uniform_binary(int levels);       // p = 1/2 each, no extinction mass
    static MultistepModel make(std::vector<int> outcomes,
                               std::map<std::vector<int>, std::vector<double>> probs);

    quantum::TensorSpace space() const;
    // Conditional probability vector at a prefix (history entries in 1..R).
    const std::vector<double>& distribution(const std::vector<int>& prefix) const;
    // Joint probability of a history.
    double history_probability(const std::vector<int>& history) const;
    // The state of the observer after the given history: pure on decided
    // levels, the conditional diagonal mixture on the rest.
    AlgebraState history_state(const std::vector<int>& history) const;
    // Projection selecting the history on the decided levels.
    Matrix history_projection(const std::vector<int>& history) const;
};

// Perturbation used by the approximate-decoherence checks: the history state
// leaks `delta` of its weight onto the extinction branch at its last level.
AlgebraState perturbed_history_state(const MultistepModel& model,
                                     const std::vector<int>& history, double delta);

ScenarioReport multistep_suite(const MultistepModel& model, const Tolerances& tol = {});

// ---------------------------------------------------------------------------
// History consistency functionals.

struct ConsistencyResult {
    double max_off_diagonal = 0;                 // worst |T(r,s)| with r != s
    std::vector<std::pair<std::vector<int>, std::vector<int>>> violations;
    bool consistent = true;
};

// Evaluates omega(P^1_{r1} ... P^M_{rM} P^M_{sM} ... P^1_{s1}) and flags
// off-diagonal mass above the tolerance.  Each family must sum to 1.
ConsistencyResult consistency_check(const std::vector<std::vector<Matrix>>& families,
                                    const AlgebraState& omega, double tolerance = 1e-9);

// ---------------------------------------------------------------------------
// Relative-frequency model over independent copies.

struct FrequencyModel {
    Matrix rho;   // single-copy density
    Matrix proj;  // single-copy projection
    double p = 0; // rho(proj)

    static FrequencyModel make(Matrix rho, Matrix proj, const Tolerances& tol = {});
    static FrequencyModel qubit(double p); // diagonal single-qubit model

    // Expectation of the projection onto strings with exactly hits copies
    // showing the projected outcome, over n copies.
    double string_count_expectation(int n, int hits) const;
    // Mean and variance of the relative-frequency operator over n copies.
    double frequency_mean(int n) const;
    double frequency_variance(int n) const;
    // Expectation of the window projection |hits - p n| <= delta n^eta.
    double window_expectation(int n, double delta, double eta) const;
    // Dense relative-frequency operator on the n-copy space (small n only).
    Matrix frequency_operator_dense(int n) const;
};

struct FrequencySuiteOptions {
    int max_copies = 10;
    double window_delta = 0.9;
    double window_eta = 0.75;
};

ScenarioReport frequency_suite(const FrequencyModel& model, const FrequencySuiteOptions& opts = {},
                               const Tolerances& tol = {});

// ---------------------------------------------------------------------------
// Glance model: a chain of commuting relevant projections whose last link
// records the outcome, with path-class multiplicities for the counting side.

struct GlanceModel {
    AlgebraState rho;                  // initial state, outcome factor first
    std::vector<Matrix> relevant_a;    // P^1..P^S driving the a-chain
    std::vector<Matrix> relevant_b;    // mirror chain for outcome b
    Matrix outcome_a, outcome_b;       // P_a + P_b = 1
    std::uint64_t multiplicity_a = 1;  // path classes leading to a
    std::uint64_t multiplicity_b = 1;

    // p_a: outcome weight; gammas: per-step acceptance of the processing
    // chain (shared by both outcomes).  The last chain link records the
    // outcome itself.
    static GlanceModel make(double p_a, const std::vector<double>& gammas,
                            std::uint64_t multiplicity_a = 1, std::uint64_t multiplicity_b = 1);
};

struct GlanceOutcome {
    double pr_a = 0;
    double pr_b = 0;
    ScenarioReport report;
};

GlanceOutcome glance_suite(const GlanceModel& model, const Tolerances& tol = {});

// ---------------------------------------------------------------------------
// Fixed versus free initial state.

struct CosmologyOutcome {
    double prob_a = 0;
    double prob_b = 0;
    ScenarioReport report;
};

// With a fixed product-mixture initial state the next-outcome distribution is
// (p, 1-p); with the initial state free over matching product pure states
// every history is equally likely and the distribution is (1/2, 1/2).
CosmologyOutcome cosmology_demo(double p, int observations, bool free_omega,
                                const Tolerances& tol = {});

// ---------------------------------------------------------------------------
// Registry for the command line driver.

struct ScenarioParams {
    std::map<std::string, double> numbers;
    std::map<std::string, std::string> strings;
    std::vector<double> p_list;
    std::uint64_t seed = 1;
    std::uint64_t trials = 1000000;
    Tolerances tol;
};

using ScenarioFn = std::function<ScenarioReport(const ScenarioParams&)>;

const std::map<std::string, ScenarioFn>& scenario_registry();
std::vector<std::string> scenario_names();

} // namespace mm::scenarios
