#include "etesc/analysis.hpp"

#include "test_helpers.hpp"

#include <catch_amalgamated.hpp>

#include <algorithm>
#include <cmath>
#include <random>

using namespace etesc;
using namespace etesc::test;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {

SimConfig short_config(TriggerKind kind, double duration) {
    TriggerConfig trig;
    trig.kind = kind;
    trig.sigma = 0.5;
    trig.beta = 3.1521;
    trig.mu = 0.4320;
    trig.gamma = 0.0542;
    SimConfig cfg{QuadraticMap(paper_hessian(), paper_optimizer(), 100.0),
                  DitherSpec(vec({0.1, 0.1}), {Rational(1), Rational(7)}, 100.0), ControllerGain(paper_gain()), trig,
                  vec({2.5, 6})};
    cfg.duration = duration;
    cfg.dt = default_dt(cfg.dither);
    cfg.frontend = FrontEnd{5.0, 5.0};
    cfg.lyapunov_q = Matrix::Identity(2, 2);
    return cfg;
}

}  // namespace

TEST_CASE("interval statistics by hand", "[analysis]") {
    const IntervalStats one = interval_stats(std::vector<double>{2.0});
    CHECK(one.count == 1);
    CHECK(one.mean == 2.0);
    CHECK(one.mean_deviation == 0.0);
    CHECK(one.variance == 0.0);
    const IntervalStats two = interval_stats(std::vector<double>{1.0, 3.0});
    CHECK_THAT(two.mean, WithinAbs(2.0, 1e-15));
    CHECK_THAT(two.mean_deviation, WithinAbs(1.0, 1e-15));
    CHECK_THAT(two.variance, WithinAbs(1.0, 1e-15));
    CHECK_THAT(two.standard_deviation, WithinAbs(1.0, 1e-15));
    CHECK(two.min_interval == 1.0);
    CHECK(two.max_interval == 3.0);
    CHECK_THROWS_AS(interval_stats(std::vector<double>{}), AnalysisError);
}

TEST_CASE("interval statistics pool event logs", "[analysis]") {
    EventLog a;
    a.append(0.0, 0, 0, 0);
    a.append(1.0, 1, 0, 0);
    EventLog b;
    b.append(0.0, 0, 0, 0);
    b.append(3.0, 3, 0, 0);
    const IntervalStats s = interval_stats(std::vector<EventLog>{a, b});
    CHECK(s.count == 2);
    CHECK_THAT(s.mean, WithinAbs(2.0, 1e-15));
}

TEST_CASE("interval statistics are permutation invariant", "[analysis][property]") {
    std::mt19937_64 rng(3);
    std::exponential_distribution<double> ex(100.0);
    std::vector<double> pool(1000);
    for (double& x : pool) {
        x = ex(rng);
    }
    const IntervalStats base = interval_stats(pool);
    CHECK(base.standard_deviation == std::sqrt(base.variance));
    for (int i = 0; i < 10; ++i) {
        std::shuffle(pool.begin(), pool.end(), rng);
        const IntervalStats s = interval_stats(pool);
        CHECK(s.mean == base.mean);
        CHECK(s.variance == base.variance);
        CHECK(s.mean_deviation == base.mean_deviation);
    }
}

TEST_CASE("histogram statistics match the expanded pool", "[analysis]") {
    IntervalHistogram h1;
    IntervalHistogram h2;
    h1.add_steps(3, 2);
    h2.add_steps(5);
    h2.add_steps(1, 4);
    IntervalHistogram merged = h1;
    merged.merge(h2);
    IntervalHistogram other = h2;
    other.merge(h1);
    const double dt = 0.01;
    const IntervalStats s = merged.stats(dt);
    const IntervalStats ref = interval_stats(std::vector<double>{0.03, 0.03, 0.05, 0.01, 0.01, 0.01, 0.01});
    CHECK(s.count == 7);
    CHECK_THAT(s.mean, WithinRel(ref.mean, 1e-14));
    CHECK_THAT(s.variance, WithinRel(ref.variance, 1e-12));
    CHECK_THAT(s.mean_deviation, WithinRel(ref.mean_deviation, 1e-12));
    CHECK(other.bins() == merged.bins());
}

TEST_CASE("convergence metrics on synthetic trajectories", "[analysis]") {
    const QuadraticMap map(paper_hessian(), paper_optimizer(), 100.0);
    Trajectory still(2, false);
    const Vector z = Vector::Zero(2);
    for (int i = 0; i <= 100; ++i) {
        still.push(i * 0.5, paper_optimizer(), paper_optimizer(), 100.0, z, z, z, 0.0, 0.0, 0.0);
    }
    const ConvergenceSummary s = convergence_metrics(still, map);
    CHECK(s.theta_hat_err_mean == 0.0);
    CHECK(s.y_err_max == 0.0);
    CHECK(s.settling_time == 0.0);

    Trajectory decaying(2, false);
    for (int i = 0; i <= 4000; ++i) {
        const double t = i * 0.01;
        const double env = std::exp(-0.25 * t);
        const Vector g = vec({env * (1.0 + 0.5 * std::sin(40.0 * t)), 0.0});
        const Vector th = paper_optimizer() + vec({env, 0.0});
        decaying.push(t, th, th, map.evaluate(th), g, g, z, 0.0, 0.0, 0.0);
    }
    const ConvergenceSummary d = convergence_metrics(decaying, map);
    CHECK_THAT(d.decay_rate, WithinAbs(0.25, 0.01));
    CHECK(d.settling_time > 0.0);
    CHECK(d.settling_time < std::log(1.0 / 0.3) / 0.25 + 0.02);
    CHECK_THROWS_AS(convergence_metrics(Trajectory(2, false), map), AnalysisError);
}

TEST_CASE("decay-rate fit", "[analysis]") {
    std::vector<double> t;
    std::vector<double> v;
    for (int i = 0; i < 1000; ++i) {
        t.push_back(i * 0.1);
        v.push_back(3.0 * std::exp(-0.7 * i * 0.1));
    }
    CHECK_THAT(fit_decay_rate(t, v, 20), WithinRel(0.7, 0.02));
}

TEST_CASE("average-mode envelope bound", "[analysis]") {
    const CertificateSet cert = build_certificate(paper_hessian(), paper_gain(), Matrix::Identity(2, 2), 1.0, 3.1521);

    SimConfig rest = short_config(TriggerKind::Static, 1.0);
    rest.mode = SimMode::Average;
    rest.dt = 1e-3;
    rest.theta_hat0 = paper_optimizer();
    CHECK(bound_check_average(run(rest).trajectory, cert, 0.1).pass);

    // Continuous control: e = 0, the bound holds with sigma treated as 0.
    SimConfig cont = short_config(TriggerKind::Continuous, 20.0);
    cont.mode = SimMode::Average;
    cont.dt = 1e-3;
    const double m = cert.alpha_tight / (2.0 * cert.lambda_max_p);
    const BoundReport rep = bound_check_average(run(cont).trajectory, cert, m, 0.0, 1e-9);
    CHECK(rep.pass);
    CHECK(rep.checked > 1000);

    SimConfig st = short_config(TriggerKind::Static, 20.0);
    st.mode = SimMode::Average;
    st.dt = 1e-4;
    const double ms = static_envelope(cert, 0.5, st.theta_hat0, paper_optimizer(), 0.1, 100.0).m;
    CHECK(bound_check_average(run(st).trajectory, cert, ms, 0.0, 0.05).pass);
}

TEST_CASE("residual bound arithmetic", "[analysis]") {
    ConvergenceSummary s;
    s.y_err_mean = 0.5;
    // bound c (a^2 + 1/omega^2) with a = 0.1, omega = 10 is 0.02 c
    CHECK(bound_check_residual(s, 30.0, 0.1, 10.0).pass);
    CHECK_FALSE(bound_check_residual(s, 20.0, 0.1, 10.0).pass);
}

TEST_CASE("events per window", "[analysis]") {
    EventLog log;
    for (int i = 0; i < 10; ++i) {
        log.append(i * 0.1, i, 0, 0);
    }
    log.append(5.0, 50, 0, 0);
    CHECK(max_events_in_window(log, 1.0) == 10);
    CHECK(max_events_in_window(log, 0.25) == 3);
}

TEST_CASE("sweep shape and determinism", "[analysis]") {
    const SimConfig base = short_config(TriggerKind::Static, 2.0);
    const SweepResult one = sweep({0.5}, {vec({2.5, 6})}, base, 1);
    CHECK(one.total_runs == 2);
    REQUIRE(one.rows.size() == 2);
    CHECK(one.rows[0].kind == TriggerKind::Static);
    CHECK(one.rows[1].kind == TriggerKind::Dynamic);
    CHECK(one.rows[0].tau_star_theory > 0.0);

    const std::vector<Vector> ics = {vec({2.5, 6}), vec({1.5, 3}), vec({3, 4.5})};
    const SweepResult serial = sweep({0.2, 0.6}, ics, base, 1);
    const SweepResult parallel = sweep({0.2, 0.6}, ics, base, 3);
    REQUIRE(serial.rows.size() == 4);
    for (std::size_t i = 0; i < serial.rows.size(); ++i) {
        CHECK(serial.rows[i].stats.mean == parallel.rows[i].stats.mean);
        CHECK(serial.rows[i].stats.variance == parallel.rows[i].stats.variance);
        CHECK(serial.rows[i].stats.count == parallel.rows[i].stats.count);
    }
}
