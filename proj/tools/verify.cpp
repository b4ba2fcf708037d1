#include "verify.hpp"

#include "manyminds/apriori.hpp"
#include "manyminds/causal.hpp"
#include "manyminds/geometry.hpp"
#include "manyminds/process.hpp"
#include "manyminds/scenarios.hpp"
#include "manyminds/serialize.hpp"
#include "manyminds/structures.hpp"

#include <cmath>
#include <functional>
#include <sstream>

namespace mmsim {

namespace {

using mm::causal::Docket;
using mm::causal::Event;
using mm::causal::Region;
using mm::causal::Relation;
using mm::process::CounterRng;
using mm::quantum::AlgebraSpec;
using mm::quantum::AlgebraState;
using mm::quantum::Matrix;
using mm::quantum::TensorSpace;
using mm::structures::SwitchingStructure;

double gaussian(CounterRng& rng) {
    double u1 = std::max(rng.next_double(), 1e-15);
    double u2 = rng.next_double();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
}

Matrix random_density(int dim, CounterRng& rng) {
    Matrix g(dim, dim);
    for (int i = 0; i < dim; ++i)
        for (int j = 0; j < dim; ++j)
            g(i, j) = mm::quantum::Complex(gaussian(rng), gaussian(rng));
    Matrix rho = g * g.adjoint();
    rho /= rho.trace().real();
    return 0.5 * (rho + Matrix(rho.adjoint()));
}

Matrix random_rank_one_projection(int dim, CounterRng& rng) {
    mm::quantum::Vector v(dim);
    for (int i = 0; i < dim; ++i) v[i] = mm::quantum::Complex(gaussian(rng), gaussian(rng));
    v.normalize();
    return v * v.adjoint();
}

Region random_region(CounterRng& rng, int dim) {
    Event c(dim);
    for (int i = 0; i < dim; ++i) c[i] = (rng.next_double() - 0.5) * 6.0;
    if (rng.next_double() < 0.5) {
        Event half(dim);
        for (int i = 0; i < dim; ++i) half[i] = 0.05 + rng.next_double() * 0.8;
        return Region::box(c - half, c + half);
    }
    return Region::ball(c, 0.05 + rng.next_double() * 0.8);
}

void sample_points(const Region& r, CounterRng& rng, std::vector<Event>& out) {
    const int d = r.dimension();
    if (r.kind == Region::Kind::Box) {
        for (int mask = 0; mask < (1 << d); ++mask) {
            Event p(d);
            for (int i = 0; i < d; ++i) p[i] = ((mask >> i) & 1) ? r.hi[i] : r.lo[i];
            out.push_back(std::move(p));
        }
    } else {
        out.push_back(r.center);
        for (int i = 0; i < d; ++i) {
            Event p = r.center;
            p[i] += r.radius;
            out.push_back(p);
            p[i] -= 2 * r.radius;
            out.push_back(p);
        }
        // Time-space diagonal boundary probes.
        for (int probe = 0; probe < 6; ++probe) {
            Event dir = Event::Zero(d);
            double norm = 0;
            for (int i = 1; i < d; ++i) {
                dir[i] = gaussian(rng);
                norm += dir[i] * dir[i];
            }
            dir /= std::sqrt(std::max(norm, 1e-12));
            double h = r.radius / std::sqrt(2.0);
            for (double st : {-1.0, 1.0})
                for (double sr : {-1.0, 1.0}) {
                    Event p = r.center + sr * h * dir;
                    p[0] += st * h;
                    out.push_back(p);
                }
        }
    }
    for (int k = 0; k < 12; ++k) {
        std::vector<double> u(static_cast<std::size_t>(d) + 1);
        for (double& v : u) v = rng.next_double();
        out.push_back(r.sample(u));
    }
}

// No sampled point pair may contradict a uniform closed-form relation.
bool points_consistent(Relation claimed, const Region& a, const Region& b, CounterRng& rng) {
    std::vector<Event> pa, pb;
    sample_points(a, rng, pa);
    sample_points(b, rng, pb);
    for (const Event& x : pa)
        for (const Event& y : pb) {
            double dt = y[0] - x[0];
            double dist = 0;
            for (int i = 1; i < x.size(); ++i) dist += (y[i] - x[i]) * (y[i] - x[i]);
            dist = std::sqrt(dist);
            bool before = dt > 0 && dt >= dist;
            bool after = dt < 0 && -dt >= dist;
            bool spacelike = dist > std::abs(dt);
            if (claimed == Relation::Past && !before) return false;
            if (claimed == Relation::Future && !after) return false;
            if (claimed == Relation::Spacelike && !spacelike) return false;
        }
    return true;
}

SwitchingStructure random_structure(int n, int k, CounterRng& rng) {
    const std::size_t m = static_cast<std::size_t>(n) * static_cast<std::size_t>(k);
    SwitchingStructure s;
    while (true) {
        std::vector<int> owners;
        for (int sw = 1; sw <= n; ++sw)
            for (int i = 0; i < k; ++i) owners.push_back(sw);
        for (std::size_t i = owners.size(); i > 1; --i)
            std::swap(owners[i - 1], owners[static_cast<std::size_t>(rng.next_double() * i)]);
        s.phi.assign(m, 0);
        bool ok = true;
        for (int sw = 1; sw <= n && ok; ++sw) {
            std::vector<int> signs(static_cast<std::size_t>(k));
            for (int attempt = 0;; ++attempt) {
                for (int i = 0; i < k; ++i)
                    signs[static_cast<std::size_t>(i)] = rng.next_double() < 0.5 ? 1 : -1;
                if (mm::structures::has_alternating_quadruple(signs)) break;
                if (attempt > 200) { ok = false; break; }
            }
            int used = 0;
            for (std::size_t i = 0; i < m; ++i)
                if (owners[i] == sw) s.phi[i] = signs[static_cast<std::size_t>(used++)] * sw;
        }
        if (!ok) continue;
        std::vector<std::vector<Relation>> rel(m, std::vector<Relation>(m, Relation::Spacelike));
        for (std::size_t i = 0; i < m; ++i)
            for (std::size_t j = i + 1; j < m; ++j) {
                Relation r = rng.next_double() < 0.5 ? Relation::Past : Relation::Spacelike;
                rel[i][j] = r;
                rel[j][i] = mm::causal::reverse(r);
            }
        s.docket = Docket(std::move(rel));
        if (mm::structures::validate(s).valid()) return s;
    }
}

// Compact generate-and-filter census of one-new-determination successors.
std::size_t brute_force_one_determination_count(const SwitchingStructure& parent,
                                 const std::vector<Relation>& alphabet) {
    const std::size_t m = parent.phi.size();
    const std::size_t m2 = m + 1;
    const int n = parent.switch_count();
    auto in_alphabet = [&alphabet](Relation r) {
        return std::find(alphabet.begin(), alphabet.end(), r) != alphabet.end();
    };
    std::vector<std::pair<std::size_t, std::size_t>> pairs;
    for (std::size_t i = 0; i < m2; ++i)
        for (std::size_t j = i + 1; j < m2; ++j) pairs.emplace_back(i, j);
    const std::vector<Relation> letters = {Relation::Past, Relation::Spacelike};

    std::set<SwitchingStructure> found;
    std::vector<std::size_t> cursor(pairs.size(), 0);
    std::vector<int> values;
    for (int sw = 1; sw <= n; ++sw) {
        values.push_back(sw);
        values.push_back(-sw);
    }
    while (true) {
        std::vector<std::vector<Relation>> rel(m2, std::vector<Relation>(m2, Relation::Spacelike));
        for (std::size_t t = 0; t < pairs.size(); ++t) {
            auto [i, j] = pairs[t];
            rel[i][j] = letters[cursor[t]];
            rel[j][i] = mm::causal::reverse(letters[cursor[t]]);
        }
        Docket docket(rel);
        std::vector<std::size_t> pc(m2, 0);
        std::vector<int> phi2(m2, 0);
        while (true) {
            for (std::size_t i = 0; i < m2; ++i) phi2[i] = values[pc[i]];
            bool embeds = false;
            for (std::size_t slot = 0; slot < m2 && !embeds; ++slot) {
                bool ok = true;
                for (std::size_t i = 0; i < m && ok; ++i)
                    if (phi2[i < slot ? i : i + 1] != parent.phi[i]) ok = false;
                for (std::size_t i = 0; i < m && ok; ++i)
                    for (std::size_t j = 0; j < m && ok; ++j)
                        if (docket.at(i < slot ? i : i + 1, j < slot ? j : j + 1) !=
                            parent.docket.at(i, j))
                            ok = false;
                for (std::size_t i = 0; i < m && ok; ++i)
                    if (!in_alphabet(docket.at(slot, i < slot ? i : i + 1))) ok = false;
                embeds = ok;
            }
            if (embeds) {
                SwitchingStructure s;
                s.docket = docket;
                s.phi = phi2;
                if (s.switch_count() == n && mm::structures::validate(s).valid()) found.insert(s);
            }
            std::size_t k = 0;
            while (k < m2 && ++pc[k] == values.size()) pc[k++] = 0;
            if (k == m2) break;
        }
        std::size_t t = 0;
        while (t < cursor.size() && ++cursor[t] == letters.size()) cursor[t++] = 0;
        if (t == cursor.size() || cursor.empty()) break;
    }
    return found.size();
}

using Check = std::function<InvariantResult()>;

InvariantResult make_result(const std::string& name, bool pass, const std::string& detail) {
    return {name, pass, detail};
}

} // namespace

std::vector<InvariantResult> run_verify_suite(const VerifyOptions& opts) {
    std::vector<std::pair<std::string, Check>> checks;
    const std::uint64_t seed = opts.seed;
    const mm::quantum::Tolerances tol = opts.tol;

    // ----- causal ---------------------------------------------------------
    checks.emplace_back("causal.relation_symmetry", [seed]() {
        CounterRng rng(seed, 101);
        for (int trial = 0; trial < 2000; ++trial) {
            int dim = 2 + static_cast<int>(rng.next_double() * 3);
            Region a = random_region(rng, dim);
            Region b = random_region(rng, dim);
            if (mm::causal::causal_relation(b, a) !=
                mm::causal::reverse(mm::causal::causal_relation(a, b)))
                return make_result("causal.relation_symmetry", false,
                                   "asymmetry at trial " + std::to_string(trial));
        }
        return make_result("causal.relation_symmetry", true, "2000 random pairs");
    });

    checks.emplace_back("causal.oracle_agreement", [seed]() {
        CounterRng rng(seed, 102);
        int checked = 0;
        for (int trial = 0; checked < 10000 && trial < 60000; ++trial) {
            int dim = (trial % 3 == 0) ? 3 : 4;
            Region a = random_region(rng, dim);
            Region b = random_region(rng, dim);
            Relation claimed = mm::causal::causal_relation(a, b);
            if (claimed == Relation::Mixed) continue; // no uniform claim to refute
            if (!points_consistent(claimed, a, b, rng))
                return make_result("causal.oracle_agreement", false,
                                   "sampled witness refutes trial " + std::to_string(trial));
            ++checked;
        }
        return make_result("causal.oracle_agreement", true,
                           std::to_string(checked) + " uniform classifications confirmed");
    });

    checks.emplace_back("causal.permutation_round_trip", [seed]() {
        CounterRng rng(seed, 103);
        for (int trial = 0; trial < 300; ++trial) {
            const std::size_t m = 5;
            std::vector<std::vector<Relation>> rel(m,
                std::vector<Relation>(m, Relation::Spacelike));
            for (std::size_t i = 0; i < m; ++i)
                for (std::size_t j = i + 1; j < m; ++j) {
                    Relation r = rng.next_double() < 0.5 ? Relation::Past : Relation::Spacelike;
                    rel[i][j] = r;
                    rel[j][i] = mm::causal::reverse(r);
                }
            Docket d{rel};
            std::vector<std::size_t> pi = {0, 1, 2, 3, 4};
            for (std::size_t i = m; i > 1; --i)
                std::swap(pi[i - 1], pi[static_cast<std::size_t>(rng.next_double() * i)]);
            std::vector<std::size_t> inverse(m);
            for (std::size_t i = 0; i < m; ++i) inverse[pi[i]] = i;
            if (!(mm::causal::docket_permute(mm::causal::docket_permute(d, pi), inverse) == d))
                return make_result("causal.permutation_round_trip", false,
                                   "failed at trial " + std::to_string(trial));
        }
        return make_result("causal.permutation_round_trip", true, "300 dockets");
    });

    checks.emplace_back("causal.lorentz_point_invariance", [seed]() {
        CounterRng rng(seed, 104);
        Eigen::VectorXd v(3);
        v << 0.35, -0.15, 0.2;
        Eigen::MatrixXd boost = mm::geometry::boost_matrix(v);
        auto classify = [](const Event& a, const Event& b) {
            double dt = b[0] - a[0];
            double dist = 0;
            for (int i = 1; i < a.size(); ++i) dist += (b[i] - a[i]) * (b[i] - a[i]);
            dist = std::sqrt(dist);
            if (dt > 0 && dt >= dist) return 0;
            if (dt < 0 && -dt >= dist) return 1;
            if (dist > std::abs(dt)) return 2;
            return 3;
        };
        for (int trial = 0; trial < 1000; ++trial) {
            Event a(4), b(4);
            for (int i = 0; i < 4; ++i) {
                a[i] = (rng.next_double() - 0.5) * 8;
                b[i] = (rng.next_double() - 0.5) * 8;
            }
            if (classify(a, b) != classify(boost * a, boost * b))
                return make_result("causal.lorentz_point_invariance", false,
                                   "class changed at trial " + std::to_string(trial));
        }
        return make_result("causal.lorentz_point_invariance", true, "1000 point pairs");
    });

    // ----- structures -----------------------------------------------------
    checks.emplace_back("structures.validation_oracle", []() {
        for (int k = 4; k <= 7; ++k)
            for (int mask = 0; mask < (1 << k); ++mask) {
                std::vector<int> signs;
                for (int i = 0; i < k; ++i) signs.push_back(((mask >> i) & 1) ? 1 : -1);
                bool brute = false;
                for (int a = 0; a < k && !brute; ++a)
                    for (int b = a + 1; b < k && !brute; ++b)
                        for (int c = b + 1; c < k && !brute; ++c)
                            for (int d = c + 1; d < k && !brute; ++d)
                                if (signs[a] == -signs[b] && signs[b] == -signs[c] &&
                                    signs[c] == -signs[d])
                                    brute = true;
                if (mm::structures::has_alternating_quadruple(signs) != brute)
                    return make_result("structures.validation_oracle", false,
                                       "mismatch at length " + std::to_string(k));
            }
        return make_result("structures.validation_oracle", true,
                           "all sign patterns of length 4..7");
    });

    checks.emplace_back("structures.successor_oracle", [seed]() {
        CounterRng rng(seed, 201);
        std::vector<std::vector<Relation>> alphabets = {
            {Relation::Past, Relation::Spacelike, Relation::Future},
            {Relation::Past, Relation::Spacelike}};
        for (int trial = 0; trial < 2; ++trial) {
            SwitchingStructure s =
                trial == 0 ? mm::structures::minimal_structure() : random_structure(1, 4, rng);
            for (const auto& alphabet : alphabets) {
                mm::structures::SuccessorOptions o;
                o.alphabet = alphabet;
                std::size_t fast = mm::structures::determination_successors(s, o).size();
                std::size_t brute = brute_force_one_determination_count(s, alphabet);
                if (fast != brute)
                    return make_result("structures.successor_oracle", false,
                                       "count " + std::to_string(fast) + " vs census " +
                                           std::to_string(brute));
            }
        }
        return make_result("structures.successor_oracle", true,
                           "generate-and-filter census reproduced");
    });

    checks.emplace_back("structures.orbit_constancy", [seed]() {
        CounterRng rng(seed, 202);
        for (int trial = 0; trial < 500; ++trial) {
            SwitchingStructure s =
                trial % 2 == 0 ? random_structure(2, 4, rng) : random_structure(1, 5, rng);
            mm::structures::CanonicalForm reference = mm::structures::canonicalize(s);
            auto relabelings = mm::structures::admissible_relabelings(s);
            for (int pick = 0; pick < 10; ++pick) {
                const auto& r =
                    relabelings[static_cast<std::size_t>(rng.next_double() * relabelings.size())];
                if (!(mm::structures::canonicalize(mm::structures::apply_relabeling(s, r)) ==
                      reference))
                    return make_result("structures.orbit_constancy", false,
                                       "orbit split at trial " + std::to_string(trial));
            }
        }
        return make_result("structures.orbit_constancy", true, "500 structures x 10 relabelings");
    });

    checks.emplace_back("structures.successor_validity", [seed]() {
        CounterRng rng(seed, 203);
        mm::structures::SuccessorOptions o;
        o.alphabet = {Relation::Past, Relation::Spacelike};
        for (int trial = 0; trial < 5; ++trial) {
            SwitchingStructure s = random_structure(1, 4, rng);
            for (const auto& succ : mm::structures::determination_successors(s, o))
                if (!mm::structures::validate(succ).valid())
                    return make_result("structures.successor_validity", false,
                                       "invalid successor at trial " + std::to_string(trial));
        }
        return make_result("structures.successor_validity", true, "5 parents exhausted");
    });

    // ----- quantum --------------------------------------------------------
    checks.emplace_back("quantum.app_unit_interval", [seed, tol]() {
        CounterRng rng(seed, 301);
        for (int trial = 0; trial < 300; ++trial) {
            int dim = 2 + static_cast<int>(rng.next_double() * 5);
            AlgebraState s(random_density(dim, rng), AlgebraSpec::full(TensorSpace({dim})));
            AlgebraState r(random_density(dim, rng), AlgebraSpec::full(TensorSpace({dim})));
            double a = mm::quantum::app(s, r, tol);
            if (a < 0 || a > 1)
                return make_result("quantum.app_unit_interval", false,
                                   "value " + std::to_string(a));
        }
        return make_result("quantum.app_unit_interval", true, "300 random pairs");
    });

    checks.emplace_back("quantum.restriction_monotonicity", [seed, tol]() {
        CounterRng rng(seed, 302);
        TensorSpace space({2, 2});
        AlgebraSpec sub = AlgebraSpec::full_on_factors(space, {0});
        for (int trial = 0; trial < 1000; ++trial) {
            AlgebraState s(random_density(4, rng), AlgebraSpec::full(space));
            AlgebraState r(random_density(4, rng), AlgebraSpec::full(space));
            double on_full = mm::quantum::app(s, r, tol);
            double on_sub = mm::quantum::app(s, r, sub, tol);
            if (on_sub < on_full - 1e-10)
                return make_result("quantum.restriction_monotonicity", false,
                                   "violated by " + std::to_string(on_full - on_sub));
        }
        return make_result("quantum.restriction_monotonicity", true, "1000 nested trials");
    });

    checks.emplace_back("quantum.mixture_identity", [seed, tol]() {
        CounterRng rng(seed, 303);
        for (int trial = 0; trial < 200; ++trial) {
            int half = 1 + static_cast<int>(rng.next_double() * 4);
            int dim = 2 * half;
            double p = 0.02 + 0.96 * rng.next_double();
            Matrix sigma = Matrix::Zero(dim, dim);
            sigma.topLeftCorner(half, half) = random_density(half, rng);
            Matrix tail = Matrix::Zero(dim, dim);
            tail.bottomRightCorner(half, half) = random_density(half, rng);
            Matrix rho = p * sigma + (1 - p) * tail;
            Matrix q = Matrix::Zero(dim, dim);
            q.topLeftCorner(half, half) = Matrix::Identity(half, half);
            AlgebraState rs(rho, AlgebraSpec::full(TensorSpace({dim})));
            AlgebraState ss(sigma, AlgebraSpec::full(TensorSpace({dim})));
            double a = mm::quantum::app(ss, rs, tol);
            double weight = rs.expectation(q);
            if (std::abs(a - weight) >= 1e-9)
                return make_result("quantum.mixture_identity", false,
                                   "|app - weight| = " + std::to_string(std::abs(a - weight)));
        }
        return make_result("quantum.mixture_identity", true, "200 mixtures, dims 2..8");
    });

    checks.emplace_back("quantum.closure_closed", [seed]() {
        CounterRng rng(seed, 304);
        TensorSpace space({2, 2});
        Matrix p = mm::quantum::embed(random_rank_one_projection(2, rng), space, {0});
        Matrix q = mm::quantum::embed(random_rank_one_projection(2, rng), space, {1});
        AlgebraSpec alg = mm::quantum::generate_algebra(space, {p, q});
        const auto& basis = alg.closure_basis();
        for (std::size_t i = 0; i < basis.size(); ++i)
            for (std::size_t j = 0; j < basis.size(); ++j) {
                Matrix prod = basis[i] * basis[j];
                if ((alg.conditional_expectation(prod) - prod).norm() > 1e-10)
                    return make_result("quantum.closure_closed", false, "product escaped the span");
            }
        return make_result("quantum.closure_closed", true,
                           "basis of " + std::to_string(basis.size()) + " elements");
    });

    checks.emplace_back("quantum.conditional_expectation", [seed]() {
        CounterRng rng(seed, 305);
        TensorSpace space({2, 2});
        Matrix p = mm::quantum::embed(random_rank_one_projection(2, rng), space, {0});
        AlgebraSpec alg = mm::quantum::generate_algebra(space, {p});
        for (int trial = 0; trial < 50; ++trial) {
            Matrix x(4, 4);
            for (int i = 0; i < 4; ++i)
                for (int j = 0; j < 4; ++j)
                    x(i, j) = mm::quantum::Complex(gaussian(rng), gaussian(rng));
            Matrix ex = alg.conditional_expectation(x);
            Matrix a = Matrix::Identity(4, 4) + 0.5 * p;
            Matrix b = 2.0 * p - 0.25 * Matrix::Identity(4, 4);
            bool ok = (alg.conditional_expectation(ex) - ex).norm() < 1e-9 &&
                      std::abs((ex - x).trace()) < 1e-9 &&
                      (alg.conditional_expectation(a * x * b) - a * ex * b).norm() < 1e-8;
            if (!ok)
                return make_result("quantum.conditional_expectation", false,
                                   "property failed at trial " + std::to_string(trial));
        }
        return make_result("quantum.conditional_expectation", true,
                           "idempotent, trace preserving, bimodule");
    });

    checks.emplace_back("quantum.extension_supremum", [seed, tol]() {
        CounterRng rng(seed, 306);
        TensorSpace space({2, 2});
        for (int trial = 0; trial < 3; ++trial) {
            Matrix s1 = random_density(2, rng);
            Matrix r1 = random_density(2, rng);
            AlgebraState ss(s1, AlgebraSpec::full(TensorSpace({2})));
            AlgebraState rs(r1, AlgebraSpec::full(TensorSpace({2})));
            double bound = mm::quantum::rel_entropy(ss, rs, tol);
            for (int probe = 0; probe < 40; ++probe) {
                AlgebraState se(mm::quantum::kron(s1, random_density(2, rng)),
                                AlgebraSpec::full(space));
                AlgebraState re(mm::quantum::kron(r1, random_density(2, rng)),
                                AlgebraSpec::full(space));
                if (mm::quantum::rel_entropy(se, re, tol) > bound + 1e-6)
                    return make_result("quantum.extension_supremum", false,
                                       "an extension exceeded the restricted value");
            }
        }
        return make_result("quantum.extension_supremum", true, "120 extension probes");
    });

    // ----- apriori --------------------------------------------------------
    checks.emplace_back("apriori.jump_contract", [seed]() {
        CounterRng rng(seed, 401);
        for (int trial = 0; trial < 2000; ++trial) {
            double parent = 0.05 + rng.next_double();
            std::map<std::string, double> successors;
            double xi = 0;
            int count = 1 + static_cast<int>(rng.next_double() * 6);
            for (int i = 0; i < count; ++i) {
                double v = rng.next_double() * 0.5;
                successors["s" + std::to_string(i)] = v;
                xi += v;
            }
            auto jd = mm::apriori::jump_distribution(parent, successors);
            if (std::abs(jd.total() - 1.0) > 1e-12)
                return make_result("apriori.jump_contract", false, "total off unity");
            if (xi >= parent && jd.extinction != 0.0)
                return make_result("apriori.jump_contract", false,
                                   "extinction with exhausted successors");
            for (const auto& [id, p] : jd.jump)
                if (p < 0)
                    return make_result("apriori.jump_contract", false, "negative probability");
        }
        return make_result("apriori.jump_contract", true, "2000 random tables");
    });

    checks.emplace_back("apriori.inductive_bound", [seed, tol]() {
        CounterRng rng(seed, 402);
        for (int trial = 0; trial < 30; ++trial) {
            mm::apriori::ManifestationMenu menu;
            AlgebraState omega(random_density(3, rng), AlgebraSpec::full(TensorSpace({3})));
            double best = 0;
            for (int c = 0; c < 4; ++c) {
                mm::apriori::StateSequence seq;
                seq.omega = omega;
                for (int step = 0; step < 2; ++step)
                    seq.states.emplace_back(random_density(3, rng),
                                            AlgebraSpec::full(TensorSpace({3})));
                best = std::max(best, mm::apriori::seq_app(seq, tol));
                menu.candidates.push_back(std::move(seq));
            }
            if (mm::apriori::inductive_app(menu, {}, tol).value > best + 1e-12)
                return make_result("apriori.inductive_bound", false, "exceeded the menu maximum");
        }
        return make_result("apriori.inductive_bound", true, "30 menus");
    });

    checks.emplace_back("apriori.variant_reduction", [seed, tol]() {
        CounterRng rng(seed, 403);
        AlgebraState omega(random_density(4, rng), AlgebraSpec::full(TensorSpace({4})));
        mm::apriori::LabeledMenus menus;
        {
            mm::apriori::ManifestationMenu menu;
            mm::apriori::StateSequence seq;
            seq.omega = omega;
            seq.states.emplace_back(random_density(4, rng), AlgebraSpec::full(TensorSpace({4})));
            menu.candidates = {std::move(seq)};
            menus["identity"] = {std::move(menu)};
        }
        auto s = mm::structures::minimal_structure();
        auto direct = mm::apriori::structure_app(s, menus, {}, tol);
        mm::apriori::TheoryPoint tp;
        tp.omegas = {omega};
        auto variant = mm::apriori::structure_app_variant(s, menus, {tp}, {}, tol);
        if (variant.best.value != direct.value)
            return make_result("apriori.variant_reduction", false, "values differ");
        return make_result("apriori.variant_reduction", true, "bit-for-bit reduction");
    });

    checks.emplace_back("apriori.orbit_invariance", [seed, tol]() {
        CounterRng rng(seed, 404);
        AlgebraState omega(random_density(4, rng), AlgebraSpec::full(TensorSpace({4})));
        auto make_menu = [&]() {
            mm::apriori::ManifestationMenu menu;
            mm::apriori::StateSequence seq;
            seq.omega = omega;
            seq.states.emplace_back(random_density(4, rng), AlgebraSpec::full(TensorSpace({4})));
            menu.candidates = {std::move(seq)};
            return menu;
        };
        mm::apriori::LabeledMenus menus;
        menus["a"] = {make_menu()};
        menus["b"] = {make_menu()};
        auto s = mm::structures::minimal_structure();
        double direct = mm::apriori::structure_app(s, menus, {}, tol).value;
        mm::apriori::LabeledMenus swapped;
        swapped["a"] = menus["b"];
        swapped["b"] = menus["a"];
        if (mm::apriori::structure_app(s, swapped, {}, tol).value != direct)
            return make_result("apriori.orbit_invariance", false, "relabeling changed the value");
        return make_result("apriori.orbit_invariance", true, "label swap is invisible");
    });

    // ----- process --------------------------------------------------------
    // The convergence gate is a three-deviation band, so its seed stays
    // pinned; a free seed would fail for the expected fraction of draws.
    checks.emplace_back("process.caricature_convergence", []() {
        mm::process::CaricatureSpec spec;
        spec.p = 0.2;
        spec.q = 0.8;
        spec.x = 100.0;
        for (char variant : {'A', 'B'}) {
            spec.variant = variant;
            auto closed = mm::process::caricature_closed_form(spec);
            auto emp = mm::process::caricature_simulate(spec, 1000000, 2024);
            double sigma = std::sqrt(closed.f_a * (1 - closed.f_a) / 1e6);
            if (std::abs(emp.f_a - closed.f_a) >= 3 * sigma)
                return make_result("process.caricature_convergence", false,
                                   std::string("variant ") + variant + " off by " +
                                       std::to_string(std::abs(emp.f_a - closed.f_a)));
        }
        return make_result("process.caricature_convergence", true,
                           "1e6 walks within three deviations");
    });

    checks.emplace_back("process.split_sums_to_one", []() {
        mm::process::CaricatureSpec spec;
        spec.p = 0.37;
        spec.q = 0.55;
        spec.x = 3.0;
        for (char variant : {'A', 'B', 'C'}) {
            spec.variant = variant;
            if (variant == 'C') {
                spec.weights_a = {1.0, 0.5};
                spec.weights_b = {2.0};
            }
            auto closed = mm::process::caricature_closed_form(spec);
            if (closed.f_a + closed.f_b != 1.0)
                return make_result("process.split_sums_to_one", false,
                                   std::string("variant ") + variant);
        }
        return make_result("process.split_sums_to_one", true, "A, B, C exact");
    });

    checks.emplace_back("process.delay_independence", []() {
        mm::process::CaricatureSpec spec;
        spec.p = 0.2;
        spec.q = 0.8;
        spec.variant = 'A';
        double reference = -1;
        for (double x : {0.0, 1.0, 100.0}) {
            spec.x = x;
            double f = mm::process::caricature_closed_form(spec).f_a;
            if (reference < 0) reference = f;
            if (f != reference)
                return make_result("process.delay_independence", false,
                                   "x = " + std::to_string(x) + " shifted the split");
        }
        return make_result("process.delay_independence", true, "x in {0, 1, 100}");
    });

    checks.emplace_back("process.weight_replay", [seed]() {
        mm::process::RunOptions ro;
        ro.trajectories = 200;
        ro.seed = seed;
        ro.keep_trajectories = true;
        auto evaluator = [](const std::string& node) -> mm::process::JumpTable {
            mm::process::JumpTable table;
            if (node.size() > 4) {
                table.absorbing = true;
                return table;
            }
            table.distribution =
                mm::apriori::jump_distribution(1.0, {{node + "x", 0.45}, {node + "y", 0.55}});
            return table;
        };
        auto r = mm::process::run_trajectories("r", evaluator, ro);
        for (const auto& t : r.trajectories) {
            double product = 1.0;
            for (const auto& s : t.steps) product *= s.probability;
            if (std::abs(product - t.weight) > 1e-15)
                return make_result("process.weight_replay", false, "weight mismatch");
        }
        return make_result("process.weight_replay", true, "200 trajectories replayed");
    });

    checks.emplace_back("process.determinism", [seed]() {
        auto evaluator = [](const std::string& node) -> mm::process::JumpTable {
            mm::process::JumpTable table;
            if (node != "root") {
                table.absorbing = true;
                return table;
            }
            table.distribution = mm::apriori::jump_distribution(1.0, {{"a", 0.3}, {"b", 0.7}});
            return table;
        };
        mm::process::RunOptions ro;
        ro.trajectories = 5000;
        ro.seed = seed;
        auto a = mm::process::run_trajectories("root", evaluator, ro);
        auto b = mm::process::run_trajectories("root", evaluator, ro);
        if (mm::serialize::to_json(a.stats) != mm::serialize::to_json(b.stats))
            return make_result("process.determinism", false, "reports differ across runs");
        return make_result("process.determinism", true, "byte-identical ensemble reports");
    });

    // ----- geometry -------------------------------------------------------
    checks.emplace_back("geometry.proper_time", []() {
        Event base = Event::Zero(4);
        Eigen::VectorXd u = Eigen::VectorXd::Zero(4);
        u[0] = std::cosh(0.3);
        u[2] = std::sinh(0.3);
        std::vector<mm::geometry::PathSegment> segments;
        segments.push_back(mm::geometry::PathSegment::at(
            0.0, u, Eigen::MatrixXd::Identity(4, 4), mm::geometry::boost_generator(4, 0, 0.2)));
        Eigen::MatrixXd mid =
            mm::geometry::expm(Eigen::MatrixXd(mm::geometry::boost_generator(4, 0, 0.2) * 2.0));
        segments.push_back(mm::geometry::PathSegment::at(
            2.0, u, mid, mm::geometry::rotation_generator(4, 0, 1, 0.5)));
        mm::geometry::SwitchPath path(base, segments, 4.0);
        const double h = 1e-5;
        for (int seg = 0; seg < 2; ++seg)
            for (int i = 1; i < 100; ++i) {
                double t = seg * 2.0 + 2.0 * i / 101.0;
                Event v = (path.position_at(t + h) - path.position_at(t - h)) / (2 * h);
                if (std::abs(mm::geometry::minkowski_dot(v, v) + 1.0) >= 1e-6)
                    return make_result("geometry.proper_time", false,
                                       "residual at t = " + std::to_string(t));
            }
        return make_result("geometry.proper_time", true, "100 samples per segment");
    });

    checks.emplace_back("geometry.pose_composition", []() {
        Event base = Event::Zero(4);
        Eigen::VectorXd u = Eigen::VectorXd::Zero(4);
        u[0] = 1.0;
        Eigen::MatrixXd g1 = mm::geometry::boost_generator(4, 0, 0.4);
        Eigen::MatrixXd g2 = mm::geometry::rotation_generator(4, 1, 2, 0.9);
        Eigen::MatrixXd frame2 = mm::geometry::expm(Eigen::MatrixXd(g1 * 1.5));
        std::vector<mm::geometry::PathSegment> segments = {
            mm::geometry::PathSegment::at(0.0, u, Eigen::MatrixXd::Identity(4, 4), g1),
            mm::geometry::PathSegment::at(1.5, u, frame2, g2)};
        mm::geometry::SwitchPath path(base, segments, 3.0);
        double t = 2.25;
        mm::geometry::Pose p = path.pose_at(t);
        Eigen::MatrixXd expected = frame2 * mm::geometry::expm(Eigen::MatrixXd(g2 * (t - 1.5)));
        if ((p.frame - expected).norm() >= 1e-9)
            return make_result("geometry.pose_composition", false, "frame product mismatch");
        return make_result("geometry.pose_composition", true, "two-segment Poincare product");
    });

    checks.emplace_back("geometry.report_determinism", []() {
        SwitchingStructure s;
        std::vector<std::vector<Relation>> rel(4, std::vector<Relation>(4, Relation::Spacelike));
        for (std::size_t i = 0; i < 4; ++i)
            for (std::size_t j = i + 1; j < 4; ++j) {
                rel[i][j] = Relation::Past;
                rel[j][i] = Relation::Future;
            }
        s.docket = Docket(std::move(rel));
        s.phi = {1, -1, 1, -1};
        mm::geometry::Manifestation m;
        m.base_point = Event::Zero(4);
        m.base_region = Region::ball(m.base_point, 0.1);
        mm::geometry::SwitchTrack track;
        track.path = mm::geometry::static_path(m.base_point, 8.0);
        track.determination_times = {1.0, 3.0, 5.0, 7.0};
        track.collapse_times = {1.0};
        m.tracks.push_back(std::move(track));
        m.theta = {{1, 1, 2}};
        auto a = mm::geometry::check_manifestation(m, s);
        auto b = mm::geometry::check_manifestation(m, s);
        if (!a.pass || mm::serialize::to_json(a) != mm::serialize::to_json(b))
            return make_result("geometry.report_determinism", false,
                               a.pass ? "reports differ" : "reference manifestation failed");
        return make_result("geometry.report_determinism", true,
                           "single-switch reference manifestation");
    });

    // ----- scenarios ------------------------------------------------------
    checks.emplace_back("scenarios.registry", [tol]() {
        mm::scenarios::ScenarioParams params;
        params.seed = 2024; // scenario sampling gates are three-deviation bands
        params.trials = 200000;
        params.tol = tol;
        for (const std::string& name : mm::scenarios::scenario_names()) {
            auto report = mm::scenarios::scenario_registry().at(name)(params);
            if (!report.pass)
                return make_result("scenarios.registry", false, "scenario " + name + " failed");
        }
        return make_result("scenarios.registry", true, "all registered scenarios pass");
    });

    std::vector<InvariantResult> results;
    results.reserve(checks.size());
    for (auto& [name, check] : checks) {
        InvariantResult r = check();
        if (!opts.inject_failure.empty() && name == opts.inject_failure) {
            r.pass = false;
            r.detail = "failure injected for testing";
        }
        results.push_back(std::move(r));
    }
    return results;
}

} // namespace mmsim
