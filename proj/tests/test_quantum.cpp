#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "manyminds/quantum.hpp"
#include "support/oracles.hpp"
#include "support/random_states.hpp"

#include <cmath>

using namespace mm::quantum;
using mm::process::CounterRng;
using testing_support::random_density;
using testing_support::random_ket;
using testing_support::random_projection;
using testing_support::random_unitary;

namespace {

std::vector<std::vector<oracles::LongComplex>> to_long(const Matrix& m) {
    std::vector<std::vector<oracles::LongComplex>> out(
        static_cast<std::size_t>(m.rows()),
        std::vector<oracles::LongComplex>(static_cast<std::size_t>(m.cols())));
    for (Eigen::Index i = 0; i < m.rows(); ++i)
        for (Eigen::Index j = 0; j < m.cols(); ++j)
            out[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] =
                oracles::LongComplex(m(i, j).real(), m(i, j).imag());
    return out;
}

AlgebraState full_state(Matrix rho, std::vector<int> dims) {
    TensorSpace space(std::move(dims));
    return AlgebraState(std::move(rho), AlgebraSpec::full(space));
}

} // namespace

TEST_CASE("partial trace of a product state recovers the factors") {
    CounterRng rng(1, 0);
    Matrix a = random_density(2, rng);
    Matrix b = random_density(3, rng);
    Matrix joint = kron(a, b);
    TensorSpace space({2, 3});
    CHECK((partial_trace(joint, space, {0}) - a).norm() < 1e-12);
    CHECK((partial_trace(joint, space, {1}) - b).norm() < 1e-12);
}

TEST_CASE("embedding tensors identities on the complement") {
    CounterRng rng(2, 0);
    Matrix a = random_density(2, rng);
    TensorSpace space({2, 3});
    Matrix embedded = embed(a, space, {0});
    CHECK((embedded - kron(a, Matrix::Identity(3, 3))).norm() < 1e-12);
    Matrix b = random_density(3, rng);
    CHECK((embed(b, space, {1}) - kron(Matrix::Identity(2, 2), b)).norm() < 1e-12);
}

TEST_CASE("restriction to the full algebra is the identity") {
    CounterRng rng(3, 0);
    AlgebraState s = full_state(random_density(6, rng), {2, 3});
    AlgebraState r = restrict(s, s.algebra);
    CHECK((r.rho - s.rho).norm() == 0.0);
}

TEST_CASE("observer restriction of a branching pure state is the branch mixture") {
    std::vector<double> p = {0.3, 0.7};
    TensorSpace space({2, 2});
    Vector psi = Vector::Zero(4);
    psi[0] = std::sqrt(p[0]);
    psi[3] = std::sqrt(p[1]);
    AlgebraState omega(psi * psi.adjoint(), AlgebraSpec::full(space));
    AlgebraState reduced = restrict(omega, AlgebraSpec::full_on_factors(space, {0}));
    Matrix expected = Matrix::Zero(2, 2);
    expected(0, 0) = p[0];
    expected(1, 1) = p[1];
    CHECK((reduced.rho - expected).norm() < 1e-12);
}

TEST_CASE("partial trace route equals the conditional expectation route") {
    CounterRng rng(4, 0);
    TensorSpace space({2, 2, 2});
    for (int trial = 0; trial < 25; ++trial) {
        AlgebraState s = full_state(random_density(8, rng), {2, 2, 2});

        AlgebraState by_trace = restrict(s, AlgebraSpec::full_on_factors(space, {0, 2}));

        std::vector<Matrix> gens;
        Matrix e01 = Matrix::Zero(2, 2), e10 = Matrix::Zero(2, 2);
        e01(0, 1) = 1.0;
        e10(1, 0) = 1.0;
        gens.push_back(embed(kron(e01, Matrix::Identity(2, 2)), space, {0, 2}));
        gens.push_back(embed(kron(Matrix::Identity(2, 2), e01), space, {0, 2}));
        gens.push_back(embed(kron(e10, Matrix::Identity(2, 2)), space, {0, 2}));
        gens.push_back(embed(kron(Matrix::Identity(2, 2), e10), space, {0, 2}));
        AlgebraSpec generated = generate_algebra(space, gens);
        AlgebraState by_expectation = restrict(s, generated);

        Matrix expected = embed(by_trace.rho, space, {0, 2}) / 2.0;
        CHECK((by_expectation.rho - expected).norm() < 1e-10);

        AlgebraState t = full_state(random_density(8, rng), {2, 2, 2});
        AlgebraState t_trace = restrict(t, AlgebraSpec::full_on_factors(space, {0, 2}));
        AlgebraState t_exp = restrict(t, generated);
        double e1 = rel_entropy(by_trace, t_trace);
        double e2 = rel_entropy(by_expectation, t_exp);
        CHECK(std::abs(e1 - e2) < 1e-10);
    }
}

TEST_CASE("a single nontrivial projection generates a two dimensional algebra") {
    CounterRng rng(5, 0);
    TensorSpace space({3});
    Matrix p = random_projection(3, 1, rng);
    AlgebraSpec alg = generate_algebra(space, {p});
    CHECK(alg.closure_basis().size() == 2);
    CHECK(alg.contains_operator(Matrix::Identity(3, 3)));
    CHECK(alg.contains_operator(p));
    CHECK(alg.blocks().size() == 2);
}

TEST_CASE("two generic non-commuting projections generate the full qubit algebra") {
    CounterRng rng(6, 0);
    TensorSpace space({2});
    Matrix p = random_projection(2, 1, rng);
    Matrix q = random_projection(2, 1, rng);
    REQUIRE((p * q - q * p).norm() > 1e-3);
    AlgebraSpec alg = generate_algebra(space, {p, q});

    // Brute-force span closure oracle: count independent words in p, q.
    std::vector<Matrix> words = {Matrix::Identity(2, 2), p, q, p * q, q * p, p * q * p};
    Eigen::MatrixXcd stack(4, static_cast<int>(words.size()));
    for (std::size_t i = 0; i < words.size(); ++i)
        stack.col(static_cast<int>(i)) =
            Eigen::Map<const Eigen::VectorXcd>(words[i].data(), 4);
    Eigen::JacobiSVD<Eigen::MatrixXcd> svd(stack);
    int rank = 0;
    for (int i = 0; i < svd.singularValues().size(); ++i)
        if (svd.singularValues()[i] > 1e-10) ++rank;
    CHECK(rank == 4);
    CHECK(alg.closure_basis().size() == 4);
    CHECK(alg.blocks().size() == 1);
    CHECK(alg.blocks()[0].dim == 2);
    CHECK(alg.blocks()[0].multiplicity == 1);
}

TEST_CASE("generating from a full factor algebra is idempotent") {
    TensorSpace space({2});
    std::vector<Matrix> units;
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) {
            Matrix u = Matrix::Zero(2, 2);
            u(i, j) = 1.0;
            units.push_back(u);
        }
    AlgebraSpec alg = generate_algebra(space, units);
    CHECK(alg.closure_basis().size() == 4);
    AlgebraSpec again = generate_algebra(space, alg.closure_basis());
    CHECK(again.closure_basis().size() == 4);
}

TEST_CASE("closure is closed under products and adjoints") {
    CounterRng rng(7, 0);
    TensorSpace space({2, 2});
    Matrix p = embed(random_projection(2, 1, rng), space, {0});
    Matrix q = embed(random_projection(2, 1, rng), space, {1});
    AlgebraSpec alg = generate_algebra(space, {p, q});
    const auto& basis = alg.closure_basis();
    for (std::size_t i = 0; i < basis.size(); ++i) {
        Matrix adj = basis[i].adjoint();
        CHECK((alg.conditional_expectation(adj) - adj).norm() < 1e-10);
        for (std::size_t j = 0; j < basis.size(); ++j) {
            Matrix prod = basis[i] * basis[j];
            CHECK((alg.conditional_expectation(prod) - prod).norm() < 1e-10);
        }
    }
}

TEST_CASE("conditional expectation is a trace preserving bimodule projection") {
    CounterRng rng(8, 0);
    TensorSpace space({2, 2});
    Matrix p = embed(random_projection(2, 1, rng), space, {0});
    AlgebraSpec alg = generate_algebra(space, {p});
    for (int trial = 0; trial < 30; ++trial) {
        Matrix x = testing_support::random_ginibre(4, rng);
        Matrix ex = alg.conditional_expectation(x);
        CHECK((alg.conditional_expectation(ex) - ex).norm() < 1e-9);
        CHECK(std::abs((ex.trace() - x.trace()).real()) < 1e-9);
        CHECK(std::abs((ex.trace() - x.trace()).imag()) < 1e-9);

        Matrix a = Matrix::Identity(4, 4) + 0.5 * p;
        Matrix b = 2.0 * p - 0.25 * Matrix::Identity(4, 4);
        CHECK((alg.conditional_expectation(a * x * b) - a * ex * b).norm() < 1e-8);
    }
    CHECK((alg.conditional_expectation(Matrix::Identity(4, 4)) - Matrix::Identity(4, 4)).norm() <
          1e-10);
}

TEST_CASE("relative entropy of a state with itself vanishes") {
    CounterRng rng(9, 0);
    for (int dim : {2, 3, 5}) {
        AlgebraState s = full_state(random_density(dim, rng), {dim});
        CHECK(rel_entropy(s, s) == 0.0);
        CHECK(app(s, s) == 1.0);
    }
}

TEST_CASE("orthogonal mixtures give the logarithm of the weight") {
    CounterRng rng(10, 0);
    const double p = 0.3;
    Matrix sigma = Matrix::Zero(4, 4);
    sigma.topLeftCorner(2, 2) = random_density(2, rng);
    Matrix tail = Matrix::Zero(4, 4);
    tail.bottomRightCorner(2, 2) = random_density(2, rng);
    Matrix rho = p * sigma + (1 - p) * tail;
    AlgebraState s = full_state(sigma, {4});
    AlgebraState r = full_state(rho, {4});
    CHECK(std::abs(rel_entropy(s, r) - std::log(p)) < 1e-12);
    CHECK(std::abs(app(s, r) - p) < 1e-12);
}

TEST_CASE("support failure yields minus infinity and zero app") {
    Matrix sigma = Matrix::Zero(2, 2);
    sigma(0, 0) = 1.0;
    Matrix rho = Matrix::Zero(2, 2);
    rho(1, 1) = 1.0;
    AlgebraState s = full_state(sigma, {2});
    AlgebraState r = full_state(rho, {2});
    EntropyDiagnostics diag;
    CHECK(rel_entropy(s, r, {}, &diag) == kMinusInfinity);
    CHECK(diag.singular);
    CHECK(app(s, r) == 0.0);
}

TEST_CASE("relative entropy matches the extended precision oracle") {
    CounterRng rng(11, 0);
    for (int trial = 0; trial < 100; ++trial) {
        int dim = (trial % 2 == 0) ? 2 : 3;
        Matrix sm = random_density(dim, rng);
        Matrix rm = random_density(dim, rng);
        AlgebraState s = full_state(sm, {dim});
        AlgebraState r = full_state(rm, {dim});
        double computed = rel_entropy(s, r);
        long double reference = oracles::rel_entropy_long(to_long(sm), to_long(rm));
        CHECK(std::abs(computed - static_cast<double>(reference)) < 1e-9);
    }
}

TEST_CASE("app lies in the unit interval") {
    CounterRng rng(12, 0);
    for (int trial = 0; trial < 300; ++trial) {
        int dim = 2 + static_cast<int>(rng.next_double() * 5);
        AlgebraState s = full_state(random_density(dim, rng), {dim});
        AlgebraState r = full_state(random_density(dim, rng), {dim});
        double a = app(s, r);
        CHECK(a >= 0.0);
        CHECK(a <= 1.0);
    }
}

TEST_CASE("app grows under restriction to a subalgebra") {
    CounterRng rng(13, 0);
    TensorSpace space({2, 2});
    AlgebraSpec sub = AlgebraSpec::full_on_factors(space, {0});
    int checked = 0;
    for (int trial = 0; trial < 1000; ++trial) {
        AlgebraState s = full_state(random_density(4, rng), {2, 2});
        AlgebraState r = full_state(random_density(4, rng), {2, 2});
        double on_full = app(s, r);
        double on_sub = app(s, r, sub);
        CHECK(on_sub >= on_full - 1e-10);
        ++checked;
    }
    CHECK(checked == 1000);
}

TEST_CASE("restriction realizes the supremum over extensions") {
    CounterRng rng(14, 0);
    TensorSpace space({2, 2});
    for (int trial = 0; trial < 5; ++trial) {
        Matrix s1 = random_density(2, rng);
        Matrix r1 = random_density(2, rng);
        AlgebraState s_sub = full_state(s1, {2});
        AlgebraState r_sub = full_state(r1, {2});
        double bound = rel_entropy(s_sub, r_sub);

        Matrix tau = random_density(2, rng);
        AlgebraState s_ext = full_state(kron(s1, tau), {2, 2});
        AlgebraState r_ext = full_state(kron(r1, tau), {2, 2});
        CHECK(std::abs(rel_entropy(s_ext, r_ext) - bound) < 1e-10);

        for (int probe = 0; probe < 60; ++probe) {
            Matrix body_s = kron(s1, random_density(2, rng));
            Matrix body_r = kron(r1, random_density(2, rng));
            AlgebraState se = full_state(body_s, {2, 2});
            AlgebraState re = full_state(body_r, {2, 2});
            CHECK((partial_trace(body_s, space, {0}) - s1).norm() < 1e-10);
            double value = rel_entropy(se, re);
            CHECK(value <= bound + 1e-6);
        }
    }
}

TEST_CASE("decoherence with the identity projection and equal states") {
    CounterRng rng(15, 0);
    AlgebraState rho = full_state(random_density(3, rng), {3});
    auto result = is_decoherent(rho, rho, Matrix::Identity(3, 3), rho.algebra);
    CHECK(result.decoherent);
    CHECK(result.p == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("constructed mixtures are decoherent with the mixture weight") {
    CounterRng rng(16, 0);
    for (int trial = 0; trial < 50; ++trial) {
        int half = 2 + static_cast<int>(rng.next_double() * 2);
        int dim = 2 * half;
        double p = 0.05 + 0.9 * rng.next_double();
        Matrix sigma = Matrix::Zero(dim, dim);
        sigma.topLeftCorner(half, half) = random_density(half, rng);
        Matrix tail = Matrix::Zero(dim, dim);
        tail.bottomRightCorner(half, half) = random_density(half, rng);
        Matrix rho = p * sigma + (1 - p) * tail;
        Matrix q = Matrix::Zero(dim, dim);
        q.topLeftCorner(half, half) = Matrix::Identity(half, half);

        AlgebraState rs = full_state(rho, {dim});
        AlgebraState ss = full_state(sigma, {dim});
        auto result = is_decoherent(rs, ss, q, rs.algebra);
        CHECK(result.decoherent);
        CHECK(std::abs(result.p - p) < 1e-12);
        CHECK(std::abs(app(ss, rs) - result.p) < 1e-9);
    }
}

TEST_CASE("coherent superpositions are not decoherent") {
    Vector plus(2);
    plus << 1.0 / std::sqrt(2.0), 1.0 / std::sqrt(2.0);
    AlgebraState rho = full_state(plus * plus.adjoint(), {2});
    Matrix q = Matrix::Zero(2, 2);
    q(0, 0) = 1.0;
    AlgebraState sigma = full_state(q, {2});
    auto result = is_decoherent(rho, sigma, q, rho.algebra);
    CHECK_FALSE(result.decoherent);
    CHECK(result.max_basis_residual > 0.1);
}

TEST_CASE("a non-projection is rejected") {
    CounterRng rng(17, 0);
    AlgebraState rho = full_state(random_density(2, rng), {2});
    Matrix not_proj = 0.5 * Matrix::Identity(2, 2);
    CHECK_THROWS_AS(is_decoherent(rho, rho, not_proj, rho.algebra), std::invalid_argument);
}

TEST_CASE("pure states admit no mistaken identification") {
    CounterRng rng(18, 0);
    Vector psi = random_ket(3, rng);
    AlgebraState rho = full_state(psi * psi.adjoint(), {3});
    AlgebraState sigma = full_state(random_density(3, rng), {3});
    CHECK(app(sigma, rho) == 0.0);
    CHECK(app(rho, rho) == 1.0);
}

TEST_CASE("the purity implication holds on constructed triples") {
    CounterRng rng(19, 0);
    for (int trial = 0; trial < 100; ++trial) {
        int dim = 4;
        Matrix u = random_unitary(dim, rng);
        Eigen::VectorXd eigs(dim);
        eigs << 0.0, 0.2, 0.3, 0.5;
        Matrix rho = Matrix::Zero(dim, dim);
        for (int i = 0; i < dim; ++i) rho += eigs[i] * u.col(i) * u.col(i).adjoint();
        Matrix p = u.col(0) * u.col(0).adjoint();
        AlgebraState rs = full_state(rho, {dim});
        AlgebraState ss = full_state(random_density(dim, rng), {dim});
        CHECK(purity_property_check(rs, ss, p, rs.algebra));
    }
    AlgebraState rs = full_state(random_density(2, rng), {2});
    CHECK(purity_property_check(rs, rs, random_projection(2, 1, rng), rs.algebra));
}

TEST_CASE("maximally separated switch families satisfy every clause") {
    Matrix p = Matrix::Zero(2, 2), q = Matrix::Zero(2, 2);
    p(0, 0) = 1.0;
    q(1, 1) = 1.0;
    ProjectionPair pair(p, q);
    AlgebraState open_state = full_state(p, {2});
    AlgebraState closed_state = full_state(q, {2});
    SwitchStateFamily family;
    family.states = {open_state, closed_state, open_state, closed_state};
    family.statuses = {+1, -1, +1, -1};
    SwitchStateReport report = check_switch_states(family, pair, {open_state, closed_state});
    CHECK(report.pass);
}

TEST_CASE("same status states at trace distance above a half violate the spread clause") {
    Matrix p = Matrix::Zero(2, 2), q = Matrix::Zero(2, 2);
    p(0, 0) = 1.0;
    q(1, 1) = 1.0;
    ProjectionPair pair(p, q);
    Matrix a = Matrix::Zero(2, 2), b = Matrix::Zero(2, 2);
    a(0, 0) = 1.0;
    b(0, 0) = 0.4;
    b(1, 1) = 0.6;
    SwitchStateFamily family;
    family.states = {full_state(a, {2}), full_state(b, {2}), full_state(q, {2}),
                     full_state(q, {2})};
    family.statuses = {+1, +1, -1, -1};
    SwitchStateReport report = check_switch_states(family, pair);
    bool spread_failed = false;
    for (const auto& clause : report.clauses)
        if (clause.clause == "same-status-spread" && !clause.pass) spread_failed = true;
    CHECK(spread_failed);
}

TEST_CASE("the optimal projection gap equals half the trace norm") {
    CounterRng rng(20, 0);
    for (int trial = 0; trial < 40; ++trial) {
        AlgebraState a = full_state(random_density(2, rng), {2});
        AlgebraState b = full_state(random_density(2, rng), {2});
        double gap = max_projection_gap(a, b, a.algebra);

        double best = 0;
        const int steps = 60;
        for (int i = 0; i <= steps; ++i)
            for (int j = 0; j < 2 * steps; ++j) {
                double theta = M_PI * i / steps;
                double phi = M_PI * j / steps;
                Vector v(2);
                v << std::cos(theta / 2),
                    Complex(std::cos(phi), std::sin(phi)) * std::sin(theta / 2);
                Matrix proj = v * v.adjoint();
                best = std::max(best, std::abs(a.expectation(proj) - b.expectation(proj)));
            }
        double half_trace_norm = 0;
        {
            Matrix diff = a.rho - b.rho;
            Eigen::SelfAdjointEigenSolver<Matrix> es(diff, Eigen::EigenvaluesOnly);
            for (int i = 0; i < 2; ++i) half_trace_norm += std::abs(es.eigenvalues()[i]);
            half_trace_norm /= 2;
        }
        CHECK(gap == doctest::Approx(half_trace_norm).epsilon(1e-10));
        CHECK(best <= gap + 1e-9);
        CHECK(best >= gap - 2e-3);
    }
}

TEST_CASE("projection pairs must be orthogonal projections") {
    Matrix p = Matrix::Zero(2, 2), q = Matrix::Zero(2, 2);
    p(0, 0) = 1.0;
    q(0, 0) = 1.0;
    CHECK_THROWS_AS(ProjectionPair(p, q), std::invalid_argument);
    Matrix half = 0.5 * Matrix::Identity(2, 2);
    CHECK_THROWS_AS(ProjectionPair(half, q), std::invalid_argument);
}

TEST_CASE("entropy on a closed span of products falls back to the closure") {
    CounterRng rng(21, 0);
    TensorSpace space({2});
    Matrix p = random_projection(2, 1, rng);
    AlgebraSpec span = AlgebraSpec::generated(space, {p}, true);
    AlgebraState s(random_density(2, rng), AlgebraSpec::full(space));
    AlgebraState r(random_density(2, rng), AlgebraSpec::full(space));
    AlgebraState s_res = restrict(s, span);
    AlgebraState r_res = restrict(r, span);
    EntropyDiagnostics diag;
    rel_entropy(s_res, r_res, {}, &diag);
    CHECK(diag.closure_fallback);
}

TEST_CASE("restriction requires containment") {
    CounterRng rng(22, 0);
    TensorSpace space({2, 2});
    AlgebraState s(random_density(4, rng), AlgebraSpec::full_on_factors(space, {0}));
    CHECK_THROWS_AS(restrict(s, AlgebraSpec::full_on_factors(space, {1})), AlgebraError);
}

TEST_CASE("operator-typed generators must share a space") {
    CounterRng rng(23, 0);
    TensorSpace a({2});
    TensorSpace b({3});
    Operator p(a, random_projection(2, 1, rng));
    Operator q(b, random_projection(3, 1, rng));
    CHECK_THROWS_AS(generate_algebra({p, q}), std::invalid_argument);
    AlgebraSpec alg = generate_algebra({p});
    CHECK(alg.closure_basis().size() == 2);
}

TEST_CASE("factor algebras decompose as one full block with multiplicity") {
    TensorSpace space({2, 3});
    AlgebraSpec alg = AlgebraSpec::full_on_factors(space, {0});
    REQUIRE(alg.blocks().size() == 1);
    CHECK(alg.blocks()[0].dim == 2);
    CHECK(alg.blocks()[0].multiplicity == 3);
    CHECK((alg.blocks()[0].central_projection - Matrix::Identity(6, 6)).norm() < 1e-8);
}

TEST_CASE("commuting projections generate a diagonal block structure") {
    TensorSpace space({2, 2});
    Matrix p = Matrix::Zero(2, 2), q = Matrix::Zero(2, 2);
    p(0, 0) = 1.0;
    q(0, 0) = 1.0;
    Matrix pa = embed(p, space, {0});
    Matrix qb = embed(q, space, {1});
    AlgebraSpec alg = generate_algebra(space, {pa, qb});
    CHECK(alg.closure_basis().size() == 4);
    CHECK(alg.blocks().size() == 4);
    for (const auto& block : alg.blocks()) {
        CHECK(block.dim == 1);
        CHECK(block.multiplicity == 1);
    }
}
