#include "manyminds/scenarios.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace mm::scenarios {

using quantum::AlgebraSpec;
using quantum::TensorSpace;

void ScenarioReport::check(const std::string& key, double computed, double expected,
                           double tolerance, const std::string& note) {
    IdentityCheck c;
    c.key = key;
    c.computed = computed;
    c.expected = expected;
    c.tolerance = tolerance;
    c.pass = std::abs(computed - expected) <= tolerance;
    c.note = note;
    pass = pass && c.pass;
    checks.push_back(std::move(c));
}

void ScenarioReport::require(const std::string& key, bool condition, const std::string& note) {
    IdentityCheck c;
    c.key = key;
    c.computed = condition ? 1.0 : 0.0;
    c.expected = 1.0;
    c.tolerance = 0.0;
    c.pass = condition;
    c.note = note;
    pass = pass && condition;
    checks.push_back(std::move(c));
}

// ---------------------------------------------------------------------------
// Everett-style branching observer

EverettModel EverettModel::make(std::vector<double> probabilities) {
    if (probabilities.empty()) throw std::invalid_argument("at least one branch is required");
    double sum = 0;
    for (double p : probabilities) {
        if (p < 0) throw std::invalid_argument("branch weights must be nonnegative");
        sum += p;
    }
    if (std::abs(sum - 1.0) > 1e-12)
        throw std::invalid_argument("branch weights must sum to 1");
    EverettModel m;
    const int r = static_cast<int>(probabilities.size());
    m.probabilities = std::move(probabilities);
    m.space = TensorSpace({r, r, r});
    m.psi = quantum::Vector::Zero(m.space.dim());
    for (int i = 0; i < r; ++i) {
        int index = (i * r + i) * r + i;
        m.psi[index] = std::sqrt(m.probabilities[static_cast<std::size_t>(i)]);
    }
    return m;
}

ScenarioReport everett_restriction_suite(const EverettModel& model, const Tolerances& tol) {
    ScenarioReport report;
    report.name = "everett";
    const int r = model.branches();
    const TensorSpace& space = model.space;

    quantum::Matrix omega_rho = model.psi * model.psi.adjoint();
    AlgebraState omega(omega_rho, AlgebraSpec::full(space), tol);

    // Restriction to the observer factor reproduces the branch mixture.
    {
        quantum::Matrix reduced = quantum::partial_trace(omega_rho, space, {0});
        quantum::Matrix expected = quantum::Matrix::Zero(r, r);
        for (int i = 0; i < r; ++i)
            expected(i, i) = model.probabilities[static_cast<std::size_t>(i)];
        report.check("observer_restriction_residual", (reduced - expected).norm(), 0.0, 1e-10);

        Eigen::SelfAdjointEigenSolver<quantum::Matrix> es(reduced, Eigen::EigenvaluesOnly);
        std::vector<double> eigs(es.eigenvalues().data(), es.eigenvalues().data() + r);
        std::vector<double> probs = model.probabilities;
        std::sort(eigs.begin(), eigs.end());
        std::sort(probs.begin(), probs.end());
        double worst = 0;
        for (int i = 0; i < r; ++i)
            worst = std::max(worst, std::abs(eigs[static_cast<std::size_t>(i)] -
                                             probs[static_cast<std::size_t>(i)]));
        report.check("observer_restriction_spectrum", worst, 0.0, 1e-10);
    }

    // Restriction keeping the observed system preserves the correlations.
    {
        quantum::Matrix reduced = quantum::partial_trace(omega_rho, space, {0, 1});
        quantum::Matrix expected = quantum::Matrix::Zero(r * r, r * r);
        for (int i = 0; i < r; ++i)
            expected(i * r + i, i * r + i) = model.probabilities[static_cast<std::size_t>(i)];
        report.check("correlated_restriction_residual", (reduced - expected).norm(), 0.0, 1e-10);
    }

    AlgebraSpec observer_algebra = AlgebraSpec::full_on_factors(space, {0});
    AlgebraSpec pair_algebra = AlgebraSpec::full_on_factors(space, {0, 1});

    double app_sum = 0;
    for (int i = 0; i < r; ++i) {
        double p = model.probabilities[static_cast<std::size_t>(i)];
        quantum::Vector branch = quantum::Vector::Zero(space.dim());
        branch[(i * r + i) * r + i] = 1.0;
        AlgebraState sigma(branch * branch.adjoint(), AlgebraSpec::full(space), tol);

        double a = quantum::app(sigma, omega, observer_algebra, tol);
        app_sum += a;
        report.check("branch_app_" + std::to_string(i + 1), a, p, 1e-10);

        // Disjointness of the branch projections.
        for (int j = 0; j < r; ++j) {
            quantum::Matrix unit = quantum::Matrix::Zero(r, r);
            unit(j, j) = 1.0;
            double v = sigma.expectation(quantum::embed(unit, space, {0}));
            if (std::abs(v - (i == j ? 1.0 : 0.0)) > 1e-10) {
                report.require("branch_disjointness", false,
                               "branch " + std::to_string(i + 1) + " overlaps projection " +
                                   std::to_string(j + 1));
                break;
            }
        }

        // The branch is a decoherent part of omega on the observer-system
        // algebra, with coefficient p.
        if (p > 0) {
            quantum::Matrix unit = quantum::Matrix::Zero(r * r, r * r);
            unit(i * r + i, i * r + i) = 1.0;
            quantum::Matrix q = quantum::embed(unit, space, {0, 1});
            auto dec = quantum::is_decoherent(omega, sigma, q, pair_algebra, tol);
            report.require("branch_decoherent_" + std::to_string(i + 1), dec.decoherent);
            report.check("branch_weight_" + std::to_string(i + 1), dec.p, p, 1e-10);
        }
    }
    report.check("branch_app_sum", app_sum, 1.0, 1e-10);
    return report;
}

// ---------------------------------------------------------------------------
// Multistep tree

MultistepModel MultistepModel::uniform_binary(int levels) {
    if (levels < 1) throw std::invalid_argument("at least one level is required");
    std::map<std::vector<int>, std::vector<double>> probs;
    std::vector<std::vector<int>> prefixes = {{}};
    for (int level = 0; level < levels; ++level) {
        std::vector<std::vector<int>> next;
        for (const auto& prefix : prefixes) {
            probs[prefix] = {0.0, 0.5, 0.5};
            for (int r = 1; r <= 2; ++r) {
                std::vector<int> extended = prefix;
                extended.push_back(r);
                next.push_back(std::move(extended));
            }
        }
        prefixes = std::move(next);
    }
    return make(std::vector<int>(static_cast<std::size_t>(levels), 2), std::move(probs));
}

MultistepModel MultistepModel::make(std::vector<int> outcomes,
                                    std::map<std::vector<int>, std::vector<double>> probs) {
    MultistepModel m;
    m.outcomes = std::move(outcomes);
    m.probs = std::move(probs);
    for (const auto& [prefix, dist] : m.probs) {
        if (prefix.size() >= m.outcomes.size())
            throw std::invalid_argument("distribution prefix longer than the level count");
        int r = m.outcomes[prefix.size()];
        if (static_cast<int>(dist.size()) != r + 1)
            throw std::invalid_argument("distribution size must be outcomes + 1");
        double sum = 0;
        for (double v : dist) {
            if (v < 0) throw std::invalid_argument("probabilities must be nonnegative");
            sum += v;
        }
        if (std::abs(sum - 1.0) > 1e-12)
            throw std::invalid_argument("conditional distribution must sum to 1");
    }
    return m;
}

TensorSpace MultistepModel::space() const {
    std::vector<int> dims;
    dims.reserve(outcomes.size());
    for (int r : outcomes) dims.push_back(r + 1);
    return TensorSpace(dims);
}

const std::vector<double>& MultistepModel::distribution(const std::vector<int>& prefix) const {
    auto it = probs.find(prefix);
    if (it == probs.end()) throw std::invalid_argument("no distribution for the given prefix");
    return it->second;
}

double MultistepModel::history_probability(const std::vector<int>& history) const {
    double p = 1.0;
    std::vector<int> prefix;
    for (int r : history) {
        p *= distribution(prefix)[static_cast<std::size_t>(r)];
        prefix.push_back(r);
    }
    return p;
}

namespace {

// Weight of the undecided coordinates given a decided prefix; extinction at
// any level pins every later coordinate to the extinction direction.
double tail_weight(const MultistepModel& model, std::vector<int>& prefix,
                   const std::vector<int>& coords, std::size_t level) {
    if (level == model.outcomes.size()) return 1.0;
    int c = coords[level];
    double p = model.distribution(prefix)[static_cast<std::size_t>(c)];
    if (p == 0.0) return 0.0;
    if (c == 0) {
        for (std::size_t l = level + 1; l < coords.size(); ++l)
            if (coords[l] != 0) return 0.0;
        return p;
    }
    prefix.push_back(c);
    double rest = tail_weight(model, prefix, coords, level + 1);
    prefix.pop_back();
    return p * rest;
}

} // namespace

AlgebraState MultistepModel::history_state(const std::vector<int>& history) const {
    TensorSpace sp = space();
    const int dim = sp.dim();
    const std::size_t levels = outcomes.size();
    if (history.size() > levels) throw std::invalid_argument("history longer than the level count");

    Eigen::VectorXd diag = Eigen::VectorXd::Zero(dim);
    std::vector<int> coords(levels, 0);
    for (int idx = 0; idx < dim; ++idx) {
        int rem = idx;
        for (std::size_t l = levels; l-- > 0;) {
            coords[l] = rem % sp.dims[l];
            rem /= sp.dims[l];
        }
        bool matches = true;
        for (std::size_t l = 0; l < history.size(); ++l)
            if (coords[l] != history[l]) { matches = false; break; }
        if (!matches) continue;
        std::vector<int> prefix = history;
        std::vector<int> remaining(coords.begin(), coords.end());
        diag[idx] = tail_weight(*this, prefix, remaining, history.size());
    }
    double total = diag.sum();
    if (total <= 0) throw std::invalid_argument("history has zero probability");
    diag /= total;
    quantum::Matrix rho = diag.cast<quantum::Complex>().asDiagonal();
    return AlgebraState(rho, AlgebraSpec::full(sp));
}

quantum::Matrix MultistepModel::history_projection(const std::vector<int>& history) const {
    TensorSpace sp = space();
    const int dim = sp.dim();
    const std::size_t levels = outcomes.size();
    Eigen::VectorXd diag = Eigen::VectorXd::Zero(dim);
    std::vector<int> coords(levels, 0);
    for (int idx = 0; idx < dim; ++idx) {
        int rem = idx;
        for (std::size_t l = levels; l-- > 0;) {
            coords[l] = rem % sp.dims[l];
            rem /= sp.dims[l];
        }
        bool matches = true;
        for (std::size_t l = 0; l < history.size(); ++l)
            if (coords[l] != history[l]) { matches = false; break; }
        if (matches) diag[idx] = 1.0;
    }
    return diag.cast<quantum::Complex>().asDiagonal();
}

AlgebraState perturbed_history_state(const MultistepModel& model,
                                     const std::vector<int>& history, double delta) {
    if (history.empty()) throw std::invalid_argument("a nonempty history is required");
    std::vector<int> leaked = history;
    leaked.back() = 0;
    AlgebraState pure = model.history_state(history);
    AlgebraState tail = model.history_state(leaked);
    quantum::Matrix rho = (1.0 - delta) * pure.rho + delta * tail.rho;
    return AlgebraState(rho, pure.algebra);
}

namespace {

void enumerate_histories(const MultistepModel& model, std::vector<int>& prefix,
                         std::vector<std::vector<int>>& out) {
    if (prefix.size() == model.outcomes.size()) {
        out.push_back(prefix);
        return;
    }
    int r = model.outcomes[prefix.size()];
    const auto& dist = model.distribution(prefix);
    for (int c = 1; c <= r; ++c) {
        if (dist[static_cast<std::size_t>(c)] <= 0) continue;
        prefix.push_back(c);
        enumerate_histories(model, prefix, out);
        prefix.pop_back();
    }
}

} // namespace

ScenarioReport multistep_suite(const MultistepModel& model, const Tolerances& tol) {
    ScenarioReport report;
    report.name = "multistep";

    AlgebraState omega = model.history_state({});
    std::vector<std::vector<int>> histories;
    {
        std::vector<int> prefix;
        enumerate_histories(model, prefix, histories);
    }
    if (histories.empty()) throw std::invalid_argument("the model admits no full history");

    double worst_step = 0, worst_seq = 0, worst_single = 0, worst_weight = 0;
    bool all_decoherent = true;
    for (const std::vector<int>& h : histories) {
        apriori::StateSequence seq;
        seq.omega = omega;
        seq.states.reserve(h.size());
        std::vector<int> prefix;
        const AlgebraState* prev = &omega;
        for (std::size_t l = 0; l < h.size(); ++l) {
            double conditional = model.distribution(prefix)[static_cast<std::size_t>(h[l])];
            prefix.push_back(h[l]);
            seq.states.push_back(model.history_state(prefix));
            const AlgebraState& current = seq.states.back();

            double a = quantum::app(current, *prev, tol);
            worst_step = std::max(worst_step, std::abs(a - conditional));

            quantum::Matrix q = model.history_projection(prefix);
            auto dec = quantum::is_decoherent(*prev, current, q, omega.algebra, tol);
            all_decoherent = all_decoherent && dec.decoherent;
            worst_weight = std::max(worst_weight, std::abs(dec.p - conditional));
            prev = &current;
        }
        double joint = model.history_probability(h);
        worst_seq = std::max(worst_seq, std::abs(apriori::seq_app(seq, tol) - joint));

        // Single-shot decomposition: the full-history state is reached from
        // omega with the joint weight.
        double single = quantum::app(seq.states.back(), omega, tol);
        worst_single = std::max(worst_single, std::abs(single - joint));
        double q_weight = omega.expectation(model.history_projection(h));
        worst_single = std::max(worst_single, std::abs(q_weight - joint));
    }
    report.check("stepwise_app_vs_conditional", worst_step, 0.0, 1e-10);
    report.check("telescoping_product", worst_seq, 0.0, 1e-10);
    report.check("history_decomposition", worst_single, 0.0, 1e-10);
    report.require("stepwise_decoherence", all_decoherent);
    report.check("decohering_weight", worst_weight, 0.0, 1e-10);

    // Jump rule at the root: successor values are the extended sequence
    // probabilities; the leftover mass is the extinction probability.
    {
        const auto& dist = model.distribution({});
        std::map<std::string, double> successor_apps;
        for (int r = 1; r <= model.outcomes[0]; ++r) {
            apriori::StateSequence seq;
            seq.omega = omega;
            seq.states.push_back(model.history_state({r}));
            successor_apps[std::to_string(r)] = apriori::seq_app(seq, tol);
        }
        apriori::JumpDistribution jd = apriori::jump_distribution(1.0, successor_apps);
        double worst_jump = 0;
        for (int r = 1; r <= model.outcomes[0]; ++r)
            worst_jump = std::max(worst_jump, std::abs(jd.jump[std::to_string(r)] -
                                                       dist[static_cast<std::size_t>(r)]));
        report.check("jump_probabilities", worst_jump, 0.0, 1e-10);
        report.check("extinction_probability", jd.extinction, dist[0], 1e-10);
        report.check("jump_total", jd.total(), 1.0, 1e-12);
    }

    // Approximate decoherence: leaking delta of the final state's weight
    // stays within the square-root band around the exact coefficient.
    if (model.distribution({})[0] > 0) {
        const double delta = 1e-3;
        const std::vector<int>& h = histories.front();
        std::vector<int> parent_h(h.begin(), h.end() - 1);
        AlgebraState parent = model.history_state(parent_h);
        AlgebraState leaked = perturbed_history_state(model, h, delta);
        double conditional = model.distribution(parent_h)[static_cast<std::size_t>(h.back())];
        double a = quantum::app(leaked, parent, tol);
        report.check("approximate_app_band", a, conditional, 4.0 * std::sqrt(delta),
                     "leak delta = 1e-3");
        auto dec = quantum::is_decoherent(parent, leaked, model.history_projection(h),
                                          omega.algebra, 5e-3, tol);
        report.require("approximate_decoherence", dec.decoherent, "soft tolerance 5e-3");
    }
    return report;
}

// ---------------------------------------------------------------------------
// Consistency functionals

ConsistencyResult consistency_check(const std::vector<std::vector<Matrix>>& families,
                                    const AlgebraState& omega, double tolerance) {
    const int dim = omega.dim();
    for (const auto& family : families) {
        Matrix sum = Matrix::Zero(dim, dim);
        for (const Matrix& p : family) sum += p;
        if ((sum - Matrix::Identity(dim, dim)).norm() > 1e-9)
            throw std::invalid_argument("every family must be a resolution of the identity");
    }

    ConsistencyResult result;
    std::vector<std::size_t> sizes;
    for (const auto& family : families) sizes.push_back(family.size());
    std::vector<std::size_t> r(families.size(), 0), s(families.size(), 0);

    auto advance = [&sizes](std::vector<std::size_t>& idx) {
        std::size_t k = 0;
        while (k < idx.size() && ++idx[k] == sizes[k]) idx[k++] = 0;
        return k < idx.size();
    };

    bool more_r = true;
    while (more_r) {
        std::vector<std::size_t> s_idx(families.size(), 0);
        bool more_s = true;
        while (more_s) {
            if (r != s_idx) {
                Matrix chain = Matrix::Identity(dim, dim);
                for (std::size_t m = 0; m < families.size(); ++m)
                    chain = chain * families[m][r[m]];
                for (std::size_t m = families.size(); m-- > 0;)
                    chain = chain * families[m][s_idx[m]];
                double value = std::abs((omega.rho * chain).trace());
                if (value > tolerance) {
                    result.consistent = false;
                    result.violations.emplace_back(std::vector<int>(r.begin(), r.end()),
                                                   std::vector<int>(s_idx.begin(), s_idx.end()));
                }
                result.max_off_diagonal = std::max(result.max_off_diagonal, value);
            }
            more_s = advance(s_idx);
        }
        more_r = advance(r);
    }
    (void)s;
    return result;
}

// ---------------------------------------------------------------------------
// Relative-frequency model

FrequencyModel FrequencyModel::make(Matrix rho, Matrix proj, const Tolerances& tol) {
    if (!quantum::is_projection(proj, tol.projection))
        throw std::invalid_argument("the outcome operator must be a projection");
    FrequencyModel m;
    AlgebraState check(rho, AlgebraSpec::full(TensorSpace({static_cast<int>(rho.rows())})), tol);
    m.rho = std::move(rho);
    m.proj = std::move(proj);
    m.p = (m.rho * m.proj).trace().real();
    return m;
}

FrequencyModel FrequencyModel::qubit(double p) {
    if (p < 0 || p > 1) throw std::invalid_argument("p must lie in [0, 1]");
    Matrix rho = Matrix::Zero(2, 2);
    rho(0, 0) = p;
    rho(1, 1) = 1 - p;
    Matrix proj = Matrix::Zero(2, 2);
    proj(0, 0) = 1.0;
    return make(std::move(rho), std::move(proj));
}

namespace {

// Distribution of the number of projected outcomes across n independent
// copies, from the diagonal masses in the projection eigenbasis.
std::vector<double> count_distribution(const FrequencyModel& model, int n) {
    Eigen::SelfAdjointEigenSolver<Matrix> es(model.proj);
    // Hit mass: total weight of rho on the projection's range.
    double hit = 0;
    for (int i = 0; i < model.proj.rows(); ++i) {
        if (es.eigenvalues()[i] < 0.5) continue;
        quantum::Vector v = es.eigenvectors().col(i);
        hit += std::real(quantum::Complex(v.adjoint() * model.rho * v));
    }
    double miss = 1.0 - hit;
    std::vector<double> dist = {1.0};
    for (int copy = 0; copy < n; ++copy) {
        std::vector<double> next(dist.size() + 1, 0.0);
        for (std::size_t k = 0; k < dist.size(); ++k) {
            next[k] += dist[k] * miss;
            next[k + 1] += dist[k] * hit;
        }
        dist = std::move(next);
    }
    return dist;
}

double binomial_coefficient(int n, int k) {
    double v = 1.0;
    for (int i = 1; i <= k; ++i) v = v * static_cast<double>(n - k + i) / static_cast<double>(i);
    return v;
}

} // namespace

double FrequencyModel::string_count_expectation(int n, int hits) const {
    if (hits < 0 || hits > n) return 0.0;
    return count_distribution(*this, n)[static_cast<std::size_t>(hits)];
}

double FrequencyModel::frequency_mean(int n) const {
    std::vector<double> dist = count_distribution(*this, n);
    double mean = 0;
    for (int k = 0; k <= n; ++k)
        mean += (static_cast<double>(k) / n) * dist[static_cast<std::size_t>(k)];
    return mean;
}

double FrequencyModel::frequency_variance(int n) const {
    std::vector<double> dist = count_distribution(*this, n);
    double var = 0;
    for (int k = 0; k <= n; ++k) {
        double d = static_cast<double>(k) / n - p;
        var += d * d * dist[static_cast<std::size_t>(k)];
    }
    return var;
}

double FrequencyModel::window_expectation(int n, double delta, double eta) const {
    std::vector<double> dist = count_distribution(*this, n);
    double window = delta * std::pow(static_cast<double>(n), eta);
    double total = 0;
    for (int k = 0; k <= n; ++k)
        if (std::abs(static_cast<double>(k) - p * n) <= window)
            total += dist[static_cast<std::size_t>(k)];
    return total;
}

Matrix FrequencyModel::frequency_operator_dense(int n) const {
    const int d = static_cast<int>(proj.rows());
    double size = std::pow(static_cast<double>(d), n);
    if (size > 4097) throw std::invalid_argument("dense frequency operator limited to small copy counts");
    Matrix q = Matrix::Identity(d, d) - proj;
    Matrix out = Matrix::Zero(static_cast<int>(size), static_cast<int>(size));
    for (int mask = 0; mask < (1 << n); ++mask) {
        int hits = 0;
        Matrix term = Matrix::Identity(1, 1);
        for (int copy = 0; copy < n; ++copy) {
            bool hit = (mask >> copy) & 1;
            if (hit) ++hits;
            term = quantum::kron(term, hit ? proj : q);
        }
        out += (static_cast<double>(hits) / n) * term;
    }
    return out;
}

ScenarioReport frequency_suite(const FrequencyModel& model, const FrequencySuiteOptions& opts,
                               const Tolerances& tol) {
    (void)tol;
    ScenarioReport report;
    report.name = "frequency";
    const double p = model.p;

    double worst_mean = 0, worst_var = 0, worst_binom = 0;
    bool bound_ok = true;
    double prev_window = 0;
    bool monotone = true;
    for (int n = 1; n <= opts.max_copies; ++n) {
        worst_mean = std::max(worst_mean, std::abs(model.frequency_mean(n) - p));
        worst_var = std::max(worst_var, std::abs(model.frequency_variance(n) - p * (1 - p) / n));
        for (int hits = 0; hits <= n; ++hits) {
            double expected = binomial_coefficient(n, hits) * std::pow(p, hits) *
                              std::pow(1 - p, n - hits);
            worst_binom = std::max(worst_binom,
                                   std::abs(model.string_count_expectation(n, hits) - expected));
        }
        double window = model.window_expectation(n, opts.window_delta, opts.window_eta);
        double bound = 1.0 - p * (1 - p) *
                                 std::pow(static_cast<double>(n), 1.0 - 2.0 * opts.window_eta) /
                                 (opts.window_delta * opts.window_delta);
        if (window < bound - 1e-12) bound_ok = false;
        if (n > 1 && window < prev_window - 1e-12) monotone = false;
        prev_window = window;
    }
    report.check("frequency_mean", worst_mean, 0.0, 1e-10);
    report.check("frequency_variance", worst_var, 0.0, 1e-10);
    report.check("string_count_vs_binomial", worst_binom, 0.0, 1e-10);
    report.require("window_bound", bound_ok, "second-moment tail bound");
    // The window expectation tends to 1 but need not do so monotonically for
    // small copy counts; recorded without gating.
    report.require("window_monotone_info", true,
                   monotone ? "window expectation nondecreasing over the range"
                            : "window expectation not monotone over the range");

    // Dense cross-check on a small copy count: the operator is Hermitian with
    // spectrum in {k/n} and reproduces the mean.
    {
        const int n = std::min(4, opts.max_copies);
        Matrix f = model.frequency_operator_dense(n);
        report.check("dense_hermitian_residual", (f - Matrix(f.adjoint())).norm(), 0.0, 1e-10);
        Matrix rho_n = Matrix::Identity(1, 1);
        for (int i = 0; i < n; ++i) rho_n = quantum::kron(rho_n, model.rho);
        report.check("dense_mean", (rho_n * f).trace().real(), model.frequency_mean(n), 1e-10);
        Eigen::SelfAdjointEigenSolver<Matrix> es(f, Eigen::EigenvaluesOnly);
        double worst_spec = 0;
        for (int i = 0; i < f.rows(); ++i) {
            double best = 1;
            for (int k = 0; k <= n; ++k)
                best = std::min(best, std::abs(es.eigenvalues()[i] - static_cast<double>(k) / n));
            worst_spec = std::max(worst_spec, best);
        }
        report.check("dense_spectrum", worst_spec, 0.0, 1e-9);
    }
    return report;
}

// ---------------------------------------------------------------------------
// Glance model

GlanceModel GlanceModel::make(double p_a, const std::vector<double>& gammas,
                              std::uint64_t multiplicity_a, std::uint64_t multiplicity_b) {
    if (p_a < 0 || p_a > 1) throw std::invalid_argument("the outcome weight must lie in [0, 1]");
    for (double g : gammas)
        if (g <= 0 || g > 1) throw std::invalid_argument("chain acceptances must lie in (0, 1]");

    const int s = static_cast<int>(gammas.size());
    std::vector<int> dims(static_cast<std::size_t>(s) + 1, 2);
    TensorSpace space(dims);
    const int dim = space.dim();

    // Diagonal initial state: outcome weight times independent per-step
    // acceptance weights, identical under both outcomes.
    Eigen::VectorXd diag = Eigen::VectorXd::Zero(dim);
    for (int idx = 0; idx < dim; ++idx) {
        int rem = idx;
        std::vector<int> bits(static_cast<std::size_t>(s) + 1, 0);
        for (int l = s; l >= 0; --l) {
            bits[static_cast<std::size_t>(l)] = rem % 2;
            rem /= 2;
        }
        double w = bits[0] == 0 ? p_a : 1 - p_a;
        for (int l = 1; l <= s; ++l) {
            double g = gammas[static_cast<std::size_t>(l - 1)];
            w *= bits[static_cast<std::size_t>(l)] == 0 ? g : 1 - g;
        }
        diag[idx] = w;
    }

    GlanceModel m;
    quantum::Matrix rho = diag.cast<quantum::Complex>().asDiagonal();
    m.rho = AlgebraState(rho, AlgebraSpec::full(space));

    quantum::Matrix accept = quantum::Matrix::Zero(2, 2);
    accept(0, 0) = 1.0;
    for (int l = 1; l <= s; ++l) {
        m.relevant_a.push_back(quantum::embed(accept, space, {l}));
        m.relevant_b.push_back(quantum::embed(accept, space, {l}));
    }
    m.outcome_a = quantum::embed(accept, space, {0});
    m.outcome_b = quantum::Matrix::Identity(dim, dim) - m.outcome_a;
    // The recording step: the last piece of relevant information is the
    // outcome itself.
    m.relevant_a.push_back(m.outcome_a);
    m.relevant_b.push_back(m.outcome_b);
    m.multiplicity_a = multiplicity_a;
    m.multiplicity_b = multiplicity_b;
    return m;
}

GlanceOutcome glance_suite(const GlanceModel& model, const Tolerances& tol) {
    GlanceOutcome outcome;
    ScenarioReport& report = outcome.report;
    report.name = "glance";

    const int dim = model.rho.dim();
    std::vector<Matrix> all = model.relevant_a;
    all.insert(all.end(), model.relevant_b.begin(), model.relevant_b.end());
    all.push_back(model.outcome_a);
    all.push_back(model.outcome_b);
    for (std::size_t i = 0; i < all.size(); ++i)
        for (std::size_t j = i + 1; j < all.size(); ++j)
            if ((all[i] * all[j] - all[j] * all[i]).norm() > 1e-9)
                throw std::invalid_argument("relevant projections must commute");
    report.check("outcome_completeness",
                 (model.outcome_a + model.outcome_b - Matrix::Identity(dim, dim)).norm(), 0.0,
                 1e-12);

    auto run_chain = [&](const std::vector<Matrix>& chain, const Matrix& outcome_proj,
                         const char* label) {
        AlgebraState current = model.rho;
        Matrix product = Matrix::Identity(dim, dim);
        double app_product = 1.0;
        double expectation_product = 1.0;
        double worst_step = 0;
        bool all_dec = true;
        for (std::size_t s = 0; s < chain.size(); ++s) {
            const Matrix& proj = chain[s];
            double weight = current.expectation(proj);
            product = product * proj;
            expectation_product *= weight;
            Matrix next_rho = proj * current.rho * proj / weight;
            AlgebraState next(next_rho, current.algebra, tol);
            double a = quantum::app(next, current, tol);
            worst_step = std::max(worst_step, std::abs(a - weight));
            auto dec = quantum::is_decoherent(current, next, proj, current.algebra, tol);
            all_dec = all_dec && dec.decoherent;
            app_product *= a;
            current = std::move(next);
        }
        // The chain product is a projection because the links commute.
        report.check(std::string("chain_projection_") + label,
                     (product * product - product).norm(), 0.0, 1e-10);
        double chain_weight = model.rho.expectation(product);
        report.check(std::string("stepwise_app_") + label, worst_step, 0.0, 1e-9);
        report.require(std::string("stepwise_decoherence_") + label, all_dec);
        report.check(std::string("telescoping_") + label, expectation_product, chain_weight, 1e-12);
        report.check(std::string("app_product_identity_") + label, app_product, chain_weight, 1e-9);
        // Subprojection: the accumulated information pins the outcome.
        report.check(std::string("subprojection_") + label,
                     (outcome_proj * product - product).norm(), 0.0, 1e-10);
        return chain_weight;
    };

    double weight_a = run_chain(model.relevant_a, model.outcome_a, "a");
    double weight_b = run_chain(model.relevant_b, model.outcome_b, "b");

    double pa = model.rho.expectation(model.outcome_a);
    double pb = model.rho.expectation(model.outcome_b);

    // The residual processing factor is outcome independent.
    report.check("processing_factor_indifference", weight_a / pa, weight_b / pb, 1e-12);

    const double ma = static_cast<double>(model.multiplicity_a);
    const double mb = static_cast<double>(model.multiplicity_b);
    outcome.pr_a = ma * weight_a / (ma * weight_a + mb * weight_b);
    outcome.pr_b = mb * weight_b / (ma * weight_a + mb * weight_b);
    report.check("outcome_total", outcome.pr_a + outcome.pr_b, 1.0, 1e-12);
    if (model.multiplicity_a == model.multiplicity_b) {
        report.check("private_equals_expected_a", outcome.pr_a, pa, 1e-9);
        report.check("private_equals_expected_b", outcome.pr_b, pb, 1e-9);
    } else {
        report.check("biased_ratio", outcome.pr_a / outcome.pr_b, (ma / mb) * pa / pb, 1e-9);
    }
    return outcome;
}

// ---------------------------------------------------------------------------
// Fixed versus free initial state

namespace {

std::vector<int> demo_history(double p, int observations) {
    int heads = static_cast<int>(std::lround(p * observations));
    std::vector<int> h(static_cast<std::size_t>(observations), 1); // 1 = outcome b index
    for (int i = 0; i < heads && i < observations; ++i) h[static_cast<std::size_t>(i)] = 0;
    return h;
}

} // namespace

CosmologyOutcome cosmology_demo(double p, int observations, bool free_omega,
                                const Tolerances& tol) {
    if (observations < 1) throw std::invalid_argument("at least one prior observation is required");
    if (p < 0 || p > 1) throw std::invalid_argument("p must lie in [0, 1]");

    CosmologyOutcome out;
    ScenarioReport& report = out.report;
    report.name = "cosmology";

    const int slots = observations + 1;
    TensorSpace space(std::vector<int>(static_cast<std::size_t>(slots), 2));
    const int dim = space.dim();
    std::vector<int> history = demo_history(p, observations);

    auto pure_product = [&](const std::vector<int>& bits) {
        Eigen::VectorXd diag = Eigen::VectorXd::Zero(dim);
        int idx = 0;
        for (int b : bits) idx = idx * 2 + b;
        for (std::size_t extra = bits.size(); extra < static_cast<std::size_t>(slots); ++extra)
            idx = idx * 2; // remaining slots pinned to outcome a by convention
        diag[idx] = 1.0;
        quantum::Matrix rho = diag.cast<quantum::Complex>().asDiagonal();
        return AlgebraState(rho, AlgebraSpec::full(space));
    };

    if (!free_omega) {
        // Initial state: independent identical mixtures on every slot.
        Eigen::VectorXd omega_diag = Eigen::VectorXd::Ones(dim);
        for (int idx = 0; idx < dim; ++idx) {
            int rem = idx;
            for (int l = slots - 1; l >= 0; --l) {
                int bit = rem % 2;
                rem /= 2;
                omega_diag[idx] *= bit == 0 ? p : 1 - p;
            }
        }
        quantum::Matrix omega_rho = omega_diag.cast<quantum::Complex>().asDiagonal();
        AlgebraState omega(omega_rho, AlgebraSpec::full(space));

        // State after t observations: pure on the decided slots, the
        // identical mixture on the rest.
        auto observed_state = [&](const std::vector<int>& bits) {
            Eigen::VectorXd diag = Eigen::VectorXd::Zero(dim);
            for (int idx = 0; idx < dim; ++idx) {
                int rem = idx;
                std::vector<int> slot_bits(static_cast<std::size_t>(slots), 0);
                for (int l = slots - 1; l >= 0; --l) {
                    slot_bits[static_cast<std::size_t>(l)] = rem % 2;
                    rem /= 2;
                }
                bool match = true;
                for (std::size_t l = 0; l < bits.size(); ++l)
                    if (slot_bits[l] != bits[l]) { match = false; break; }
                if (!match) continue;
                double w = 1.0;
                for (std::size_t l = bits.size(); l < static_cast<std::size_t>(slots); ++l)
                    w *= slot_bits[l] == 0 ? p : 1 - p;
                diag[idx] = w;
            }
            quantum::Matrix rho = diag.cast<quantum::Complex>().asDiagonal();
            return AlgebraState(rho, AlgebraSpec::full(space));
        };

        // Stepwise conditionals are history independent.
        double worst_step = 0;
        std::vector<int> prefix;
        AlgebraState current = omega;
        for (int t = 0; t < observations; ++t) {
            prefix.push_back(history[static_cast<std::size_t>(t)]);
            AlgebraState next = observed_state(prefix);
            double expected = history[static_cast<std::size_t>(t)] == 0 ? p : 1 - p;
            if (expected > 0) {
                double a = quantum::app(next, current, tol);
                worst_step = std::max(worst_step, std::abs(a - expected));
            }
            current = std::move(next);
        }
        report.check("stepwise_conditional", worst_step, 0.0, 1e-9);

        // Next-outcome distribution via the decohering projections of the
        // final state.
        std::vector<int> next_a = history, next_b = history;
        next_a.push_back(0);
        next_b.push_back(1);
        AlgebraState final_state = observed_state(history);
        Matrix q_a = Matrix::Zero(2, 2), q_b = Matrix::Zero(2, 2);
        q_a(0, 0) = 1.0;
        q_b(1, 1) = 1.0;
        double value_a = final_state.expectation(quantum::embed(q_a, space, {slots - 1}));
        double value_b = final_state.expectation(quantum::embed(q_b, space, {slots - 1}));
        apriori::JumpDistribution jd =
            apriori::jump_distribution(1.0, {{"a", value_a}, {"b", value_b}});
        out.prob_a = jd.jump["a"];
        out.prob_b = jd.jump["b"];
        report.check("next_outcome_a", out.prob_a, p, 0.0, "exact");
        report.check("next_outcome_b", out.prob_b, 1.0 - p, 0.0, "exact");
        report.check("extinction", jd.extinction, 0.0, 0.0);
        // Cross-check against the entropy route.
        if (p > 0 && p < 1) {
            double a_ent = quantum::app(observed_state(next_a), final_state, tol);
            report.check("entropy_route_a", a_ent, p, 1e-9);
        }
    } else {
        // Free initial state over matching product pure states: every
        // continuation attains value 1, so the next outcome is uniform.
        std::vector<int> next_a = history, next_b = history;
        next_a.push_back(0);
        next_b.push_back(1);

        apriori::TheoryPoint tp;
        tp.label = "product-pure";
        tp.omegas = {pure_product(next_a), pure_product(next_b)};

        structures::SwitchingStructure carrier = structures::minimal_structure();
        auto successor_value = [&](const std::vector<int>& bits) {
            apriori::ManifestationMenu menu;
            apriori::StateSequence seq;
            seq.omega = tp.omegas.front();
            seq.states.push_back(pure_product(bits));
            menu.candidates.push_back(std::move(seq));
            apriori::LabeledMenus menus;
            menus["identity"] = {menu};
            apriori::VariantResult r = apriori::structure_app_variant(carrier, menus, {tp}, {}, tol);
            return r.best.value;
        };
        double value_a = successor_value(next_a);
        double value_b = successor_value(next_b);
        double parent = std::max(successor_value(history), 1e-300);
        report.check("free_omega_parent", parent, 1.0, 0.0, "the matching product state is exact");
        report.check("free_omega_successor_a", value_a, 1.0, 0.0);
        report.check("free_omega_successor_b", value_b, 1.0, 0.0);
        apriori::JumpDistribution jd =
            apriori::jump_distribution(parent, {{"a", value_a}, {"b", value_b}});
        out.prob_a = jd.jump["a"];
        out.prob_b = jd.jump["b"];
        report.check("next_outcome_a", out.prob_a, 0.5, 0.0, "exact");
        report.check("next_outcome_b", out.prob_b, 0.5, 0.0, "exact");
        report.check("extinction", jd.extinction, 0.0, 0.0);
    }
    return out;
}

// ---------------------------------------------------------------------------
// Registry

namespace {

ScenarioReport run_caricature(const ScenarioParams& params) {
    process::CaricatureSpec spec;
    auto get = [&params](const std::string& key, double fallback) {
        auto it = params.numbers.find(key);
        return it == params.numbers.end() ? fallback : it->second;
    };
    spec.p = get("p", 0.2);
    spec.q = get("q", 0.8);
    spec.x = get("x", 10.0);
    auto vit = params.strings.find("variant");
    spec.variant = vit == params.strings.end() ? 'A' : vit->second.empty() ? 'A' : vit->second[0];
    if (spec.variant == 'C' && spec.weights_a.empty()) {
        spec.weights_a = {1.0, 2.0};
        spec.weights_b = {1.5};
    }

    ScenarioReport report;
    report.name = "caricature";
    process::CaricatureClosedForm closed = process::caricature_closed_form(spec);
    report.check("closed_form_total", closed.f_a + closed.f_b, 1.0, 1e-12);
    if (spec.variant == 'A') {
        report.check("closed_form_a", closed.f_a, spec.p / (spec.p + spec.q), 0.0);
        process::CaricatureSpec alt = spec;
        double reference = closed.f_a;
        for (double x : {0.0, 1.0, 100.0}) {
            alt.x = x;
            report.check("delay_independence_x_" + std::to_string(static_cast<int>(x)),
                         process::caricature_closed_form(alt).f_a, reference, 0.0);
        }
    } else if (spec.variant == 'B') {
        report.check("closed_form_a", closed.f_a, 2 * spec.p / (2 * spec.p + spec.q), 0.0);
    }

    process::CaricatureEmpirical emp =
        process::caricature_simulate(spec, params.trials, params.seed);
    double sigma = std::sqrt(std::max(closed.f_a * (1 - closed.f_a), 1e-300) /
                             static_cast<double>(params.trials));
    report.check("empirical_a", emp.f_a, closed.f_a, 3.0 * sigma, "three binomial deviations");
    report.check("empirical_b", emp.f_b, closed.f_b, 3.0 * sigma, "three binomial deviations");
    report.require("all_resolved", emp.unresolved == 0);
    return report;
}

ScenarioReport run_everett(const ScenarioParams& params) {
    std::vector<double> p = params.p_list;
    if (p.empty()) p = {0.3, 0.7};
    return everett_restriction_suite(EverettModel::make(std::move(p)), params.tol);
}

ScenarioReport run_multistep(const ScenarioParams& params) {
    auto get = [&params](const std::string& key, double fallback) {
        auto it = params.numbers.find(key);
        return it == params.numbers.end() ? fallback : it->second;
    };
    int levels = static_cast<int>(get("levels", 2));
    double extinction = get("extinction", 0.1);
    double p = get("p", 0.3);

    std::map<std::vector<int>, std::vector<double>> probs;
    std::vector<std::vector<int>> prefixes = {{}};
    for (int level = 0; level < levels; ++level) {
        std::vector<std::vector<int>> next;
        for (const auto& prefix : prefixes) {
            probs[prefix] = {extinction, (1 - extinction) * p, (1 - extinction) * (1 - p)};
            for (int r = 1; r <= 2; ++r) {
                std::vector<int> e = prefix;
                e.push_back(r);
                next.push_back(std::move(e));
            }
        }
        prefixes = std::move(next);
    }
    MultistepModel model =
        MultistepModel::make(std::vector<int>(static_cast<std::size_t>(levels), 2), std::move(probs));
    return multistep_suite(model, params.tol);
}

ScenarioReport run_consistency(const ScenarioParams&) {
    ScenarioReport report;
    report.name = "consistency";

    // Commuting diagonal families are consistent.
    {
        MultistepModel model = MultistepModel::uniform_binary(2);
        AlgebraState omega = model.history_state({});
        std::vector<std::vector<Matrix>> families;
        TensorSpace sp = model.space();
        for (int level = 0; level < 2; ++level) {
            std::vector<Matrix> family;
            for (int c = 0; c < 3; ++c) {
                Matrix unit = Matrix::Zero(3, 3);
                unit(c, c) = 1.0;
                family.push_back(quantum::embed(unit, sp, {level}));
            }
            families.push_back(std::move(family));
        }
        ConsistencyResult r = consistency_check(families, omega);
        report.require("diagonal_families_consistent", r.consistent);
        report.check("diagonal_max_off_diagonal", r.max_off_diagonal, 0.0, 1e-12);
    }

    // A rotated family on a pure qubit state violates consistency.
    {
        TensorSpace sp({2});
        quantum::Vector plus(2);
        plus << 1.0 / std::sqrt(2.0), 1.0 / std::sqrt(2.0);
        AlgebraState omega(plus * plus.adjoint(), AlgebraSpec::full(sp));
        Matrix z0 = Matrix::Zero(2, 2), z1 = Matrix::Zero(2, 2);
        z0(0, 0) = 1.0;
        z1(1, 1) = 1.0;
        quantum::Vector d0(2), d1(2);
        double c = std::cos(0.3), s = std::sin(0.3);
        d0 << c, s;
        d1 << -s, c;
        std::vector<std::vector<Matrix>> families = {
            {z0, z1}, {d0 * d0.adjoint(), d1 * d1.adjoint()}};
        ConsistencyResult r = consistency_check(families, omega);
        report.require("rotated_family_flagged", !r.consistent);
    }
    return report;
}

ScenarioReport run_frequency(const ScenarioParams& params) {
    auto it = params.numbers.find("p");
    double p = it == params.numbers.end() ? 0.5 : it->second;
    FrequencySuiteOptions opts;
    auto nit = params.numbers.find("copies");
    if (nit != params.numbers.end()) opts.max_copies = static_cast<int>(nit->second);
    return frequency_suite(FrequencyModel::qubit(p), opts, params.tol);
}

ScenarioReport run_glance(const ScenarioParams& params) {
    auto get = [&params](const std::string& key, double fallback) {
        auto it = params.numbers.find(key);
        return it == params.numbers.end() ? fallback : it->second;
    };
    double p = get("p", 0.3);
    int steps = static_cast<int>(get("steps", 2));
    std::uint64_t ma = static_cast<std::uint64_t>(get("multiplicity_a", 1));
    std::uint64_t mb = static_cast<std::uint64_t>(get("multiplicity_b", 1));
    std::vector<double> gammas(static_cast<std::size_t>(steps), 0.8);
    GlanceOutcome out = glance_suite(GlanceModel::make(p, gammas, ma, mb), params.tol);
    return out.report;
}

ScenarioReport run_cosmology(const ScenarioParams& params) {
    auto get = [&params](const std::string& key, double fallback) {
        auto it = params.numbers.find(key);
        return it == params.numbers.end() ? fallback : it->second;
    };
    double p = get("p", 0.2);
    int observations = static_cast<int>(get("observations", 5));

    ScenarioReport report;
    report.name = "cosmology";
    CosmologyOutcome fixed = cosmology_demo(p, observations, false, params.tol);
    CosmologyOutcome free_run = cosmology_demo(p, observations, true, params.tol);
    for (IdentityCheck& c : fixed.report.checks) {
        c.key = "fixed_" + c.key;
        report.pass = report.pass && c.pass;
        report.checks.push_back(std::move(c));
    }
    for (IdentityCheck& c : free_run.report.checks) {
        c.key = "free_" + c.key;
        report.pass = report.pass && c.pass;
        report.checks.push_back(std::move(c));
    }
    return report;
}

} // namespace

const std::map<std::string, ScenarioFn>& scenario_registry() {
    static const std::map<std::string, ScenarioFn> registry = {
        {"everett", run_everett},
        {"multistep", run_multistep},
        {"consistency", run_consistency},
        {"frequency", run_frequency},
        {"glance", run_glance},
        {"caricature", run_caricature},
        {"cosmology", run_cosmology},
    };
    return registry;
}

std::vector<std::string> scenario_names() {
    std::vector<std::string> names;
    for (const auto& [name, fn] : scenario_registry()) names.push_back(name);
    return names;
}

} // namespace mm::scenarios
