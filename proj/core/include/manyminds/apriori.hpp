#pragma once

#include "manyminds/quantum.hpp"
#include "manyminds/structures.hpp"

#include <map>
#include <string>
#include <vector>

// The probability calculus over state sequences: sequence a priori
// probability as a product of stepwise app factors, the prefix-constrained
// inductive optimum over finite candidate menus, the structure-level
// supremum over relabelings, the jump/extinction rule of the discrete
// Markov process, and the constants-free variant maximized over a class of
// theory points.

namespace mm::apriori {

using quantum::AlgebraState;
using quantum::Tolerances;

struct StateSequence {
    std::vector<AlgebraState> states; // sigma_1 .. sigma_M on a common algebra
    AlgebraState omega;               // sigma_0

    void validate() const;
};

// Product over steps of app(sigma_m | sigma_{m-1}); zero short-circuits.
double seq_app(const StateSequence& seq, const Tolerances& tol = {});

// Prefix values app(sigma_1..sigma_k | omega) for k = 1..M.
std::vector<double> seq_app_prefixes(const StateSequence& seq, const Tolerances& tol = {});

struct ManifestationMenu {
    std::vector<StateSequence> candidates; // finite stand-in for the set of state sequences
    std::string label;                     // bookkeeping only
};

struct InductiveResult {
    double value = 0;
    std::size_t witness = 0; // index of one surviving candidate
};

struct InductiveOptions {
    double stage_tolerance = 1e-9; // relative slack for "attaining" a stage maximum
};

// Stage-wise constrained maximization: at each prefix length only the
// candidates within tolerance of the running stage maximum survive; the
// final value is the best full-sequence probability among survivors.
InductiveResult inductive_app(const ManifestationMenu& menu, const InductiveOptions& opts = {},
                              const Tolerances& tol = {});

// Menus keyed by relabeling representative; the structure value is the
// maximum of the inductive values over every menu supplied.
using LabeledMenus = std::map<std::string, std::vector<ManifestationMenu>>;

struct StructureAppResult {
    double value = 0;
    std::string labeling;
    std::size_t menu_index = 0;
    std::size_t witness = 0;
};

StructureAppResult structure_app(const structures::SwitchingStructure& s, const LabeledMenus& menus,
                                 const InductiveOptions& opts = {}, const Tolerances& tol = {});

struct JumpDistribution {
    std::map<std::string, double> jump; // successor id -> probability
    double extinction = 0;
    double xi = 0; // sum of successor a priori probabilities

    double total() const;
};

// The jump rule: with xi the sum of successor values, jump probabilities are
// value/xi and extinction 0 when xi >= parent; otherwise value/parent with
// extinction 1 - xi/parent.
JumpDistribution jump_distribution(double parent_app,
                                   const std::map<std::string, double>& successor_apps);

struct TheoryPoint {
    std::string label;
    std::vector<double> parameters;       // coupling constants and the like
    std::vector<AlgebraState> omegas;     // candidate initial states
};

struct VariantResult {
    StructureAppResult best;
    std::size_t theory_index = 0;
    std::size_t omega_index = 0;
};

// Maximizes structure_app over the supplied theory points, substituting each
// candidate initial state into every menu sequence.  With a single theory
// point carrying the menus' own omega this reduces to structure_app.
VariantResult structure_app_variant(const structures::SwitchingStructure& s,
                                    const LabeledMenus& menus,
                                    const std::vector<TheoryPoint>& theory_points,
                                    const InductiveOptions& opts = {},
                                    const Tolerances& tol = {});

} // namespace mm::apriori
