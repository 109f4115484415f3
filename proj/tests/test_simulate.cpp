#include <doctest.h>

#include <sstream>

#include "dppdyn/dpp.hpp"
#include "dppdyn/rates.hpp"
#include "dppdyn/simulate.hpp"
#include "oracles.hpp"

using namespace dppdyn;

namespace {

ErrorCode code_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  return ErrorCode::InvalidArgument;
}

struct Fixture {
  Kernel k = Kernel::from_matrix(oracle::random_kernel(6, 3, true));
  RateSpec spec = make_rate_spec(SiteSpace::plain(6), 0.5);
};

}  // namespace

TEST_CASE("trajectories are legal, deterministic and replayable") {
  Fixture f;
  for (Dynamics mode : {Dynamics::Glauber, Dynamics::Kawasaki}) {
    SimConfig cfg;
    cfg.mode = mode;
    cfg.horizon = 300.0;
    cfg.seed = 9;
    cfg.initial = InitialState::Explicit;
    cfg.initial_sites = {0, 2, 3};
    const Trajectory a = run(f.k, f.spec, cfg);
    const Trajectory b = run(f.k, f.spec, cfg);
    CHECK(a.events == b.events);
    CHECK(!a.events.empty());
    CHECK_NOTHROW(replay(a));
    if (mode == Dynamics::Kawasaki) {
      CHECK(replay(a).size() == 3);
      for (const Event& e : a.events) CHECK(e.kind == EventKind::Jump);
    }
    cfg.seed = 10;
    CHECK_FALSE(run(f.k, f.spec, cfg).events == a.events);
  }
}

TEST_CASE("Kawasaki conserves the particle number from every initial state") {
  Fixture f;
  SimConfig cfg;
  cfg.mode = Dynamics::Kawasaki;
  cfg.horizon = 100.0;
  cfg.initial = InitialState::DppSample;
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    cfg.seed = seed;
    const Trajectory t = run(f.k, f.spec, cfg);
    Configuration state = t.initial;
    for (const Event& e : t.events) {
      state.erase(e.site);
      state.insert(e.site2);
      CHECK(state.size() == t.initial.size());
    }
  }
  cfg.initial = InitialState::Empty;
  CHECK(run(f.k, f.spec, cfg).events.empty());
  cfg.initial = InitialState::Full;
  CHECK(run(f.k, f.spec, cfg).events.empty());
}

TEST_CASE("engine refresh period does not change the trajectory materially") {
  Fixture f;
  SimConfig cfg;
  cfg.horizon = 200.0;
  cfg.seed = 5;
  cfg.refactor_period = 1;
  const Trajectory fresh = run(f.k, f.spec, cfg);
  cfg.refactor_period = 100000;
  const Trajectory incremental = run(f.k, f.spec, cfg);
  REQUIRE(fresh.events.size() == incremental.events.size());
  for (size_t i = 0; i < fresh.events.size(); ++i) {
    CHECK(fresh.events[i].site == incremental.events[i].site);
    CHECK(fresh.events[i].time == doctest::Approx(incremental.events[i].time).epsilon(1e-9));
  }
}

TEST_CASE("holding times and first jumps follow the rates") {
  // From the empty two-site state both births have rate 2/3.
  const Kernel k = Kernel::from_matrix(oracle::a2());
  const RateSpec spec = make_rate_spec(SiteSpace::plain(2), 0.0);
  SimConfig cfg;
  cfg.horizon = 50.0;
  double hold = 0.0;
  int first_site0 = 0;
  const int runs = 20000;
  for (int i = 0; i < runs; ++i) {
    cfg.seed = 1000 + i;
    const Trajectory t = run(k, spec, cfg);
    REQUIRE(!t.events.empty());
    hold += t.events[0].time;
    first_site0 += t.events[0].site == 0;
  }
  const double mean = hold / runs;  // exponential with rate 4/3: mean 0.75, sd 0.75
  CHECK(std::abs(mean - 0.75) < 5 * 0.75 / std::sqrt(runs));
  CHECK(std::abs(first_site0 / double(runs) - 0.5) < 5 * 0.5 / std::sqrt(runs));
}

TEST_CASE("batch means use exact time weights") {
  Trajectory t;
  t.initial = Configuration(1);
  t.horizon = 4.0;
  t.events = {{1.0, EventKind::Birth, 0, -1}, {3.0, EventKind::Death, 0, -1}};
  const auto means = batch_means(t, {indicator_product({0})}, 0.0, 0.0, 2);
  CHECK(means[0][0] == doctest::Approx(0.5));
  CHECK(means[0][1] == doctest::Approx(0.5));
  const auto late = batch_means(t, {indicator_product({0})}, 2.0, 0.0, 2);
  CHECK(late[0][0] == doctest::Approx(1.0));
  CHECK(late[0][1] == doctest::Approx(0.0));
  // grid sampling at 0, 0.5, ..., 4: occupied at 1.0 .. 2.5
  const auto grid = batch_means(t, {indicator_product({0})}, 0.0, 0.5, 3);
  CHECK(grid[0][0] == doctest::Approx(1.0 / 3.0));
  CHECK(grid[0][1] == doctest::Approx(1.0));
  CHECK(grid[0][2] == doctest::Approx(0.0));
  const Estimate e = pool({1.0, 2.0, 3.0, 4.0});
  CHECK(e.mean == 2.5);
  CHECK(e.standard_error == doctest::Approx(std::sqrt(5.0 / 3.0 / 4.0)));
  CHECK(code_of([] { pool({1.0}); }) == ErrorCode::InsufficientData);
  CHECK(code_of([&] { batch_means(t, {indicator_product({0})}, 4.0, 0.0, 2); }) == ErrorCode::InsufficientData);
}

TEST_CASE("Glauber simulation reproduces the stationary law") {
  const Kernel k = Kernel::from_matrix(oracle::a2());
  const RateSpec spec = make_rate_spec(SiteSpace::plain(2), 0.0);
  SimConfig cfg;
  cfg.horizon = 20000.0;
  cfg.burn_in = 50.0;
  cfg.seed = 21;
  std::vector<Observable> obs;
  for (std::uint64_t s = 0; s < 4; ++s) obs.push_back(state_indicator(Configuration::from_mask(2, s)));
  const ReplicaSummary r = run_replicas(k, spec, cfg, 2, obs);
  const auto p = state_probabilities(DppMeasure(k));
  for (std::uint64_t s = 0; s < 4; ++s) CHECK(std::abs(r.estimates[s].mean - p[s]) < 4 * r.estimates[s].standard_error);
}

TEST_CASE("replicas: one replica equals a plain run, and execution order is irrelevant") {
  Fixture f;
  SimConfig cfg;
  cfg.horizon = 200.0;
  cfg.seed = 77;
  const std::vector<Observable> obs = {indicator_product({0}), indicator_product({1, 2})};
  const ReplicaSummary one = run_replicas(f.k, f.spec, cfg, 1, obs);
  const Trajectory t = run(f.k, f.spec, cfg);
  CHECK(one.event_counts[0] == t.events.size());
  CHECK(one.estimates[0].mean == pool(batch_means(t, obs, 0.0, 0.0, cfg.batches)[0]).mean);
  const ReplicaSummary serial = run_replicas(f.k, f.spec, cfg, 5, obs, Exec::Serial);
  const ReplicaSummary parallel = run_replicas(f.k, f.spec, cfg, 5, obs, Exec::Parallel);
  CHECK(serial.event_counts == parallel.event_counts);
  CHECK(serial.estimates[1].mean == parallel.estimates[1].mean);
  CHECK(serial.estimates[1].standard_error == parallel.estimates[1].standard_error);
}

TEST_CASE("event log format") {
  Trajectory t;
  t.initial = Configuration(3, {0});
  t.horizon = 10.0;
  t.events = {{0.25, EventKind::Jump, 0, 2}, {1.5, EventKind::Birth, 1, -1}};
  std::ostringstream out;
  write_event_log(out, t);
  CHECK(out.str() == "time,kind,site,site2\n0.25,jump,0,2\n1.5,birth,1,\n");
}

TEST_CASE("replay rejects illegal logs") {
  Trajectory t;
  t.initial = Configuration(2, {0});
  t.horizon = 5.0;
  t.events = {{1.0, EventKind::Birth, 0, -1}};
  CHECK(code_of([&] { replay(t); }) == ErrorCode::IllegalEvent);
  t.events = {{1.0, EventKind::Death, 0, -1}, {0.5, EventKind::Birth, 0, -1}};
  CHECK(code_of([&] { replay(t); }) == ErrorCode::IllegalEvent);
  t.events = {{6.0, EventKind::Death, 0, -1}};
  CHECK(code_of([&] { replay(t); }) == ErrorCode::IllegalEvent);
  t.events = {{1.0, EventKind::Jump, 1, 0}};
  CHECK(code_of([&] { replay(t); }) == ErrorCode::IllegalEvent);
}

TEST_CASE("simulation config validation") {
  SimConfig cfg;
  cfg.horizon = 1.0;
  cfg.burn_in = 2.0;
  CHECK(code_of([&] { validate(cfg); }) == ErrorCode::ValidationError);
  cfg = SimConfig{};
  cfg.batches = 1;
  CHECK(code_of([&] { validate(cfg); }) == ErrorCode::ValidationError);
  cfg = SimConfig{};
  cfg.thinning = -1.0;
  CHECK(code_of([&] { validate(cfg); }) == ErrorCode::ValidationError);
  CHECK(parse_initial_state("dpp-sample") == InitialState::DppSample);
  CHECK(code_of([] { parse_initial_state("random"); }) == ErrorCode::ValidationError);
}
