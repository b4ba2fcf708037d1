#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "manyminds/process.hpp"
#include "manyminds/serialize.hpp"

#include <cmath>

using namespace mm::process;

namespace {

JumpEvaluator two_outcome(double p) {
    return [p](const std::string& node) -> JumpTable {
        JumpTable table;
        if (node == "root") {
            table.distribution = mm::apriori::jump_distribution(1.0, {{"a", p}, {"b", 1 - p}});
        } else {
            table.absorbing = true;
        }
        return table;
    };
}

} // namespace

TEST_CASE("counter generators reproduce draws independent of order") {
    CounterRng a(99, 7);
    double first = a.next_double();
    double second = a.next_double();
    CounterRng b(99, 7);
    CHECK(b.next_double() == first);
    CHECK(b.next_double() == second);
    CounterRng c(99, 8);
    CHECK(c.next_double() != first);
}

TEST_CASE("a deterministic chain yields identical trajectories") {
    JumpEvaluator chain = [](const std::string& node) -> JumpTable {
        JumpTable table;
        if (node == "end") {
            table.absorbing = true;
            return table;
        }
        std::string next = node == "root" ? "mid" : "end";
        table.distribution = mm::apriori::jump_distribution(1.0, {{next, 1.0}});
        return table;
    };
    RunOptions opts;
    opts.trajectories = 50;
    opts.keep_trajectories = true;
    EnsembleResult r = run_trajectories("root", chain, opts);
    CHECK(r.stats.terminal_counts["end"] == 50);
    CHECK(r.stats.absorbed == 50);
    for (const Trajectory& t : r.trajectories) {
        REQUIRE(t.steps.size() == 2);
        CHECK(t.steps[0].chosen == "mid");
        CHECK(t.steps[1].chosen == "end");
        CHECK(t.weight == 1.0);
    }
}

TEST_CASE("two outcome sampling lands within three binomial deviations") {
    const double p = 0.3;
    RunOptions opts;
    opts.trajectories = 100000;
    opts.seed = 5;
    opts.max_steps = 3;
    EnsembleResult r = run_trajectories("root", two_outcome(p), opts);
    double freq = r.stats.terminal_frequency("a");
    double sigma = std::sqrt(p * (1 - p) / static_cast<double>(opts.trajectories));
    CHECK(std::abs(freq - p) < 3 * sigma);
}

TEST_CASE("identical seeds give byte identical ensemble reports") {
    RunOptions opts;
    opts.trajectories = 2000;
    opts.seed = 11;
    EnsembleResult a = run_trajectories("root", two_outcome(0.4), opts);
    EnsembleResult b = run_trajectories("root", two_outcome(0.4), opts);
    CHECK(mm::serialize::to_json(a.stats) == mm::serialize::to_json(b.stats));
    opts.seed = 12;
    EnsembleResult c = run_trajectories("root", two_outcome(0.4), opts);
    CHECK(mm::serialize::to_json(a.stats) != mm::serialize::to_json(c.stats));
}

TEST_CASE("trajectory weights replay as the product of recorded probabilities") {
    RunOptions opts;
    opts.trajectories = 500;
    opts.seed = 3;
    opts.keep_trajectories = true;
    JumpEvaluator noisy = [](const std::string& node) -> JumpTable {
        JumpTable table;
        if (node.size() > 3) {
            table.absorbing = true;
            return table;
        }
        table.distribution =
            mm::apriori::jump_distribution(1.0, {{node + "x", 0.45}, {node + "y", 0.55}});
        return table;
    };
    EnsembleResult r = run_trajectories("r", noisy, opts);
    for (const Trajectory& t : r.trajectories) {
        double product = 1.0;
        for (const TrajectoryStep& s : t.steps) product *= s.probability;
        CHECK(t.weight == doctest::Approx(product).epsilon(1e-15));
    }
}

TEST_CASE("extinction mass terminates trajectories") {
    JumpEvaluator leaky = [](const std::string&) -> JumpTable {
        JumpTable table;
        table.distribution = mm::apriori::jump_distribution(1.0, {{"next", 0.6}});
        return table;
    };
    RunOptions opts;
    opts.trajectories = 50000;
    opts.seed = 17;
    opts.max_steps = 100;
    EnsembleResult r = run_trajectories("start", leaky, opts);
    CHECK(r.stats.extinct == opts.trajectories); // every walk dies eventually
    // First-step extinction frequency is 0.4.
    double mean_len = r.stats.mean_steps;
    CHECK(std::abs(mean_len - 1.0 / 0.4) < 0.05); // geometric mean 2.5
}

TEST_CASE("the step limit is reported distinctly from extinction") {
    JumpEvaluator loop = [](const std::string&) -> JumpTable {
        JumpTable table;
        table.distribution = mm::apriori::jump_distribution(1.0, {{"loop", 1.0}});
        return table;
    };
    RunOptions opts;
    opts.trajectories = 10;
    opts.max_steps = 25;
    EnsembleResult r = run_trajectories("loop", loop, opts);
    CHECK(r.stats.step_limited == 10);
    CHECK(r.stats.extinct == 0);
}

TEST_CASE("closed forms for the three state chain") {
    CaricatureSpec spec;
    spec.p = 0.2;
    spec.q = 0.8;
    spec.x = 7.0;

    SUBCASE("single sinks") {
        spec.variant = 'A';
        CaricatureClosedForm c = caricature_closed_form(spec);
        CHECK(c.f_a == 0.2);
        CHECK(c.f_b == 0.8);
        CHECK(c.f_a + c.f_b == 1.0);
        // Step distribution sums to the net probability.
        double total = 0;
        for (int n = 1; n < 2000; ++n) total += c.f_n_a(n);
        CHECK(std::abs(total - c.f_a) < 1e-12);
    }
    SUBCASE("doubled first outcome") {
        spec.variant = 'B';
        CaricatureClosedForm c = caricature_closed_form(spec);
        CHECK(c.f_a == doctest::Approx(1.0 / 3.0).epsilon(1e-15));
        CHECK(c.f_a + c.f_b == 1.0);
    }
    SUBCASE("weighted sinks with unit weights match the counts") {
        spec.variant = 'C';
        spec.weights_a = {1.0, 1.0};
        spec.weights_b = {1.0};
        CaricatureClosedForm c = caricature_closed_form(spec);
        CaricatureSpec b_spec = spec;
        b_spec.variant = 'B';
        CHECK(c.f_a == caricature_closed_form(b_spec).f_a);
    }
}

TEST_CASE("the delay rate never shifts the absorbing split") {
    CaricatureSpec spec;
    spec.p = 0.2;
    spec.q = 0.8;
    spec.variant = 'A';
    double reference = 0;
    bool first = true;
    for (double x : {0.0, 1.0, 100.0}) {
        spec.x = x;
        double f = caricature_closed_form(spec).f_a;
        if (first) {
            reference = f;
            first = false;
        }
        CHECK(f == reference);
    }
}

TEST_CASE("zero delay resolves every walk at the first step") {
    CaricatureSpec spec;
    spec.p = 0.2;
    spec.q = 0.8;
    spec.x = 0.0;
    spec.variant = 'A';
    CaricatureClosedForm c = caricature_closed_form(spec);
    CHECK(c.f_n_a(1) == doctest::Approx(0.2).epsilon(1e-15));
    CHECK(c.f_n_a(2) == 0.0);
    CaricatureEmpirical emp = caricature_simulate(spec, 20000, 1);
    CHECK(emp.unresolved == 0);
    CHECK(emp.f_a + emp.f_b == 1.0);
}

TEST_CASE("a million walks land within three deviations of the closed forms") {
    CaricatureSpec spec;
    spec.p = 0.2;
    spec.q = 0.8;
    spec.x = 100.0;
    for (char variant : {'A', 'B'}) {
        spec.variant = variant;
        CaricatureClosedForm closed = caricature_closed_form(spec);
        CaricatureEmpirical emp = caricature_simulate(spec, 1000000, 42);
        double sigma = std::sqrt(closed.f_a * (1 - closed.f_a) / 1e6);
        CHECK(std::abs(emp.f_a - closed.f_a) < 3 * sigma);
        CHECK(std::abs(emp.f_b - closed.f_b) < 3 * sigma);
    }
}

TEST_CASE("degenerate rates are rejected") {
    CaricatureSpec spec;
    spec.p = 0.0;
    spec.q = 0.0;
    spec.x = 1.0;
    CHECK_THROWS_AS(caricature_closed_form(spec), std::invalid_argument);
    spec.q = 0.5;
    spec.variant = 'C';
    CHECK_THROWS_AS(caricature_closed_form(spec), std::invalid_argument); // missing weights
}
