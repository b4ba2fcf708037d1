#include "manyminds/process.hpp"

#include <cmath>

namespace mm::process {

namespace {

std::uint64_t mix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ull;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
    return x ^ (x >> 31);
}

} // namespace

std::uint64_t CounterRng::next_u64() {
    std::uint64_t h = mix64(seed_);
    h = mix64(h ^ stream_);
    h = mix64(h ^ counter_++);
    return h;
}

double CounterRng::next_double() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

std::string terminal_name(Terminal t) {
    switch (t) {
        case Terminal::Alive: return "alive";
        case Terminal::Extinct: return "extinct";
        case Terminal::StepLimit: return "step-limit";
        case Terminal::Absorbed: return "absorbed";
    }
    return "?";
}

Trajectory run_single(const std::string& initial, const JumpEvaluator& evaluator,
                      std::uint64_t max_steps, std::uint64_t seed, std::uint64_t index) {
    CounterRng rng(seed, index);
    Trajectory traj;
    traj.seed = seed;
    traj.index = index;
    std::string node = initial;
    for (std::uint64_t step = 0; step < max_steps; ++step) {
        JumpTable table = evaluator(node);
        if (table.absorbing) {
            traj.terminal = Terminal::Absorbed;
            traj.final_node = node;
            return traj;
        }
        double u = rng.next_double();
        double acc = 0;
        const std::string* chosen = nullptr;
        double chosen_p = 0;
        for (const auto& [succ, p] : table.distribution.jump) {
            acc += p;
            if (u < acc) {
                chosen = &succ;
                chosen_p = p;
                break;
            }
        }
        if (chosen == nullptr && table.distribution.extinction <= 0.0 &&
            !table.distribution.jump.empty()) {
            // Rounding pushed u past the cumulative sum; take the last entry.
            const auto& last = *table.distribution.jump.rbegin();
            chosen = &last.first;
            chosen_p = last.second;
        }
        if (chosen == nullptr) {
            // The remaining mass is extinction.
            traj.steps.push_back({node, "", table.distribution.extinction});
            traj.weight *= table.distribution.extinction;
            traj.terminal = Terminal::Extinct;
            traj.final_node = node;
            return traj;
        }
        traj.steps.push_back({node, *chosen, chosen_p});
        traj.weight *= chosen_p;
        node = *chosen;
    }
    traj.terminal = Terminal::StepLimit;
    traj.final_node = node;
    return traj;
}

double EnsembleStats::terminal_frequency(const std::string& node) const {
    auto it = terminal_counts.find(node);
    if (it == terminal_counts.end() || count == 0) return 0.0;
    return static_cast<double>(it->second) / static_cast<double>(count);
}

EnsembleResult run_trajectories(const std::string& initial, const JumpEvaluator& evaluator,
                                const RunOptions& opts) {
    EnsembleResult result;
    EnsembleStats& stats = result.stats;
    stats.count = opts.trajectories;
    stats.seed = opts.seed;
    double total_steps = 0;
    double total_weight = 0;
    for (std::uint64_t i = 0; i < opts.trajectories; ++i) {
        Trajectory traj = run_single(initial, evaluator, opts.max_steps, opts.seed, i);
        total_steps += static_cast<double>(traj.steps.size());
        total_weight += traj.weight;
        ++stats.terminal_counts[traj.final_node];
        switch (traj.terminal) {
            case Terminal::Extinct: ++stats.extinct; break;
            case Terminal::StepLimit: ++stats.step_limited; break;
            case Terminal::Absorbed: ++stats.absorbed; break;
            case Terminal::Alive: break;
        }
        ++stats.visit_counts[initial];
        for (const TrajectoryStep& s : traj.steps)
            if (!s.chosen.empty()) ++stats.visit_counts[s.chosen];
        if (opts.keep_trajectories) result.trajectories.push_back(std::move(traj));
    }
    if (opts.trajectories > 0) {
        stats.mean_steps = total_steps / static_cast<double>(opts.trajectories);
        stats.mean_weight = total_weight / static_cast<double>(opts.trajectories);
    }
    return result;
}

void CaricatureSpec::validate() const {
    if (p < 0 || q < 0 || x < 0) throw std::invalid_argument("rates must be nonnegative");
    if (!(p + q > 0)) throw std::invalid_argument("p + q must be positive");
    if (variant != 'A' && variant != 'B' && variant != 'C')
        throw std::invalid_argument("variant must be A, B, or C");
    if (variant == 'C') {
        if (weights_a.empty() || weights_b.empty())
            throw std::invalid_argument("variant C needs weights for both outcomes");
        for (double w : weights_a)
            if (w < 0) throw std::invalid_argument("weights must be nonnegative");
        for (double w : weights_b)
            if (w < 0) throw std::invalid_argument("weights must be nonnegative");
    }
}

CaricatureClosedForm caricature_closed_form(const CaricatureSpec& spec) {
    spec.validate();
    CaricatureClosedForm out;
    const double p = spec.p, q = spec.q, x = spec.x;
    switch (spec.variant) {
        case 'A': {
            out.f_a = p / (p + q);
            out.f_b = q / (p + q);
            out.f_n_a = [p, q, x](int n) {
                double z = p + q + x;
                return (p / z) * std::pow(x / z, n - 1);
            };
            break;
        }
        case 'B': {
            out.f_a = 2 * p / (2 * p + q);
            out.f_b = q / (2 * p + q);
            out.f_n_a = [p, q, x](int n) {
                double z = 2 * p + q + x;
                return (2 * p / z) * std::pow(x / z, n - 1);
            };
            break;
        }
        case 'C': {
            double wa = 0, wb = 0;
            for (double w : spec.weights_a) wa += w;
            for (double w : spec.weights_b) wb += w;
            double denom = wa * p + wb * q;
            if (!(denom > 0)) throw std::invalid_argument("variant C has no absorbing mass");
            out.f_a = wa * p / denom;
            out.f_b = wb * q / denom;
            out.f_n_a = [wa, wb, p, q, x](int n) {
                double z = wa * p + wb * q + x;
                return (wa * p / z) * std::pow(x / z, n - 1);
            };
            break;
        }
    }
    return out;
}

CaricatureEmpirical caricature_simulate(const CaricatureSpec& spec, std::uint64_t count,
                                        std::uint64_t seed, std::uint64_t max_steps) {
    spec.validate();
    double rate_a = 0, rate_b = 0;
    switch (spec.variant) {
        case 'A': rate_a = spec.p; rate_b = spec.q; break;
        case 'B': rate_a = 2 * spec.p; rate_b = spec.q; break;
        case 'C': {
            for (double w : spec.weights_a) rate_a += w * spec.p;
            for (double w : spec.weights_b) rate_b += w * spec.q;
            break;
        }
    }
    const double z = rate_a + rate_b + spec.x;
    const double pa = rate_a / z;
    const double pb = rate_b / z;

    CaricatureEmpirical out;
    out.count = count;
    std::uint64_t hits_a = 0, hits_b = 0;
    for (std::uint64_t i = 0; i < count; ++i) {
        CounterRng rng(seed, i);
        bool resolved = false;
        for (std::uint64_t step = 0; step < max_steps; ++step) {
            double u = rng.next_double();
            if (u < pa) { ++hits_a; resolved = true; break; }
            if (u < pa + pb) { ++hits_b; resolved = true; break; }
        }
        if (!resolved) ++out.unresolved;
    }
    if (count > 0) {
        out.f_a = static_cast<double>(hits_a) / static_cast<double>(count);
        out.f_b = static_cast<double>(hits_b) / static_cast<double>(count);
        out.stderr_a = std::sqrt(std::max(out.f_a * (1 - out.f_a), 0.0) / static_cast<double>(count));
        out.stderr_b = std::sqrt(std::max(out.f_b * (1 - out.f_b), 0.0) / static_cast<double>(count));
    }
    return out;
}

} // namespace mm::process
