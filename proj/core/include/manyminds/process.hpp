#pragma once

#include "manyminds/apriori.hpp"

#include <cstdint>
#include <functional>
#include <map>
#include <string>
#include <vector>

// The discrete Markov engine over structure ids: seeded, order-independent
// trajectory sampling against a caller-supplied jump-table evaluator, plus
// the three-state caricature (two absorbing outcomes and a delaying state)
// with its closed-form hitting probabilities.

namespace mm::process {

// Counter-based generator: every draw is a pure hash of
// (seed, stream, counter), so parallel trajectory order cannot change the
// numbers drawn.
class CounterRng {
public:
    CounterRng(std::uint64_t seed, std::uint64_t stream) : seed_(seed), stream_(stream) {}

    double next_double(); // uniform in [0, 1)
    std::uint64_t next_u64();

private:
    std::uint64_t seed_;
    std::uint64_t stream_;
    std::uint64_t counter_ = 0;
};

enum class Terminal { Alive, Extinct, StepLimit, Absorbed };

std::string terminal_name(Terminal t);

struct TrajectoryStep {
    std::string node;
    std::string chosen;
    double probability = 0;
};

struct Trajectory {
    std::vector<TrajectoryStep> steps;
    Terminal terminal = Terminal::Alive;
    std::string final_node;
    double weight = 1.0;     // product of the recorded step probabilities
    std::uint64_t seed = 0;  // master seed of the stream that produced this walk
    std::uint64_t index = 0; // stream index within the ensemble
};

struct JumpTable {
    apriori::JumpDistribution distribution;
    bool absorbing = false; // a sink: the trajectory ends here, alive
};

using JumpEvaluator = std::function<JumpTable(const std::string& node)>;

struct EnsembleStats {
    std::map<std::string, std::uint64_t> terminal_counts; // final node -> count
    std::map<std::string, std::uint64_t> visit_counts;    // node -> trajectories visiting it
    std::uint64_t extinct = 0;
    std::uint64_t step_limited = 0;
    std::uint64_t absorbed = 0;
    double mean_steps = 0;
    double mean_weight = 0;
    std::uint64_t count = 0;
    std::uint64_t seed = 0;

    double terminal_frequency(const std::string& node) const;
    double extinction_rate() const { return count ? static_cast<double>(extinct) / count : 0.0; }
};

struct RunOptions {
    std::uint64_t trajectories = 1000;
    std::uint64_t max_steps = 10000;
    std::uint64_t seed = 1;
    bool keep_trajectories = false; // retain full paths in the result
};

struct EnsembleResult {
    EnsembleStats stats;
    std::vector<Trajectory> trajectories; // only when requested
};

Trajectory run_single(const std::string& initial, const JumpEvaluator& evaluator,
                      std::uint64_t max_steps, std::uint64_t seed, std::uint64_t index);

EnsembleResult run_trajectories(const std::string& initial, const JumpEvaluator& evaluator,
                                const RunOptions& opts);

// Three-state chain: from the delaying state o, move to an absorbing outcome
// with rate p (a) or q (b), or stay with rate x.  Variant A has one a-sink,
// variant B two a-sinks of equal rate, variant C arbitrary per-sink weights.
struct CaricatureSpec {
    double p = 0;
    double q = 0;
    double x = 0;
    char variant = 'A'; // 'A', 'B', or 'C'
    std::vector<double> weights_a; // variant C
    std::vector<double> weights_b; // variant C

    void validate() const;
};

struct CaricatureClosedForm {
    double f_a = 0; // net probability of absorbing at outcome a
    double f_b = 0;
    // Probability of terminating at a at exactly the n-th step (variant A).
    std::function<double(int)> f_n_a;
};

CaricatureClosedForm caricature_closed_form(const CaricatureSpec& spec);

struct CaricatureEmpirical {
    double f_a = 0;
    double f_b = 0;
    double stderr_a = 0;
    double stderr_b = 0;
    std::uint64_t unresolved = 0; // trajectories that hit the step limit
    std::uint64_t count = 0;
};

CaricatureEmpirical caricature_simulate(const CaricatureSpec& spec, std::uint64_t count,
                                        std::uint64_t seed, std::uint64_t max_steps = 10000);

} // namespace mm::process
