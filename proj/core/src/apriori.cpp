#include "manyminds/apriori.hpp"

#include <algorithm>
#include <cmath>

namespace mm::apriori {

void StateSequence::validate() const {
    if (states.empty()) throw std::invalid_argument("state sequence must be nonempty");
    for (const AlgebraState& s : states)
        if (!(s.algebra == omega.algebra))
            throw quantum::AlgebraError("sequence states must share the initial state's algebra");
}

double seq_app(const StateSequence& seq, const Tolerances& tol) {
    seq.validate();
    double value = 1.0;
    const AlgebraState* prev = &seq.omega;
    for (const AlgebraState& s : seq.states) {
        double factor = quantum::app(s, *prev, tol);
        value *= factor;
        if (value == 0.0) return 0.0;
        prev = &s;
    }
    return value;
}

std::vector<double> seq_app_prefixes(const StateSequence& seq, const Tolerances& tol) {
    seq.validate();
    std::vector<double> out;
    out.reserve(seq.states.size());
    double value = 1.0;
    const AlgebraState* prev = &seq.omega;
    for (const AlgebraState& s : seq.states) {
        value *= quantum::app(s, *prev, tol);
        out.push_back(value);
        prev = &s;
    }
    return out;
}

InductiveResult inductive_app(const ManifestationMenu& menu, const InductiveOptions& opts,
                              const Tolerances& tol) {
    if (menu.candidates.empty()) throw std::invalid_argument("menu must be nonempty");
    const std::size_t steps = menu.candidates.front().states.size();
    for (const StateSequence& c : menu.candidates)
        if (c.states.size() != steps)
            throw std::invalid_argument("menu candidates must have equal length");

    std::vector<std::vector<double>> prefixes;
    prefixes.reserve(menu.candidates.size());
    for (const StateSequence& c : menu.candidates) prefixes.push_back(seq_app_prefixes(c, tol));

    std::vector<std::size_t> survivors(menu.candidates.size());
    for (std::size_t i = 0; i < survivors.size(); ++i) survivors[i] = i;

    for (std::size_t k = 0; k < steps; ++k) {
        double stage_max = 0;
        for (std::size_t i : survivors) stage_max = std::max(stage_max, prefixes[i][k]);
        std::vector<std::size_t> next;
        for (std::size_t i : survivors)
            if (prefixes[i][k] >= stage_max * (1.0 - opts.stage_tolerance)) next.push_back(i);
        survivors = std::move(next);
    }

    InductiveResult result;
    for (std::size_t i : survivors) {
        double v = prefixes[i][steps - 1];
        if (v > result.value) {
            result.value = v;
            result.witness = i;
        }
    }
    if (survivors.size() == 1 || result.value == 0.0) result.witness = survivors.front();
    return result;
}

StructureAppResult structure_app(const structures::SwitchingStructure& s, const LabeledMenus& menus,
                                 const InductiveOptions& opts, const Tolerances& tol) {
    (void)s;
    if (menus.empty()) throw std::invalid_argument("no menus supplied");
    StructureAppResult best;
    bool first = true;
    for (const auto& [labeling, menu_list] : menus) {
        for (std::size_t i = 0; i < menu_list.size(); ++i) {
            InductiveResult r = inductive_app(menu_list[i], opts, tol);
            if (first || r.value > best.value) {
                best.value = r.value;
                best.labeling = labeling;
                best.menu_index = i;
                best.witness = r.witness;
                first = false;
            }
        }
    }
    if (first) throw std::invalid_argument("no menus supplied");
    return best;
}

double JumpDistribution::total() const {
    double t = extinction;
    for (const auto& [id, p] : jump) t += p;
    return t;
}

JumpDistribution jump_distribution(double parent_app,
                                   const std::map<std::string, double>& successor_apps) {
    if (!(parent_app > 0)) throw std::invalid_argument("parent a priori probability must be positive");
    for (const auto& [id, v] : successor_apps)
        if (v < 0) throw std::invalid_argument("successor a priori probabilities must be nonnegative");

    JumpDistribution out;
    double xi = 0;
    for (const auto& [id, v] : successor_apps) xi += v;
    out.xi = xi;
    if (xi >= parent_app) {
        for (const auto& [id, v] : successor_apps) out.jump[id] = v / xi;
        out.extinction = 0.0;
    } else {
        double assigned = 0;
        for (const auto& [id, v] : successor_apps) {
            double p = v / parent_app;
            out.jump[id] = p;
            assigned += p;
        }
        out.extinction = std::max(0.0, 1.0 - assigned);
    }
    return out;
}

VariantResult structure_app_variant(const structures::SwitchingStructure& s,
                                    const LabeledMenus& menus,
                                    const std::vector<TheoryPoint>& theory_points,
                                    const InductiveOptions& opts, const Tolerances& tol) {
    if (theory_points.empty()) throw std::invalid_argument("the theory class must be nonempty");
    VariantResult best;
    bool first = true;
    for (std::size_t ti = 0; ti < theory_points.size(); ++ti) {
        const TheoryPoint& tp = theory_points[ti];
        if (tp.omegas.empty()) throw std::invalid_argument("theory point carries no initial state");
        for (std::size_t oi = 0; oi < tp.omegas.size(); ++oi) {
            LabeledMenus substituted = menus;
            for (auto& [labeling, menu_list] : substituted)
                for (ManifestationMenu& menu : menu_list)
                    for (StateSequence& c : menu.candidates) c.omega = tp.omegas[oi];
            StructureAppResult r = structure_app(s, substituted, opts, tol);
            if (first || r.value > best.best.value) {
                best.best = r;
                best.theory_index = ti;
                best.omega_index = oi;
                first = false;
            }
        }
    }
    return best;
}

} // namespace mm::apriori
