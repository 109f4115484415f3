#include "dppdyn/simulate.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "dppdyn/dpp.hpp"
#include "dppdyn/papangelou.hpp"
#include "dppdyn/parallel.hpp"
#include "dppdyn/random.hpp"

namespace dppdyn {

const char* to_string(EventKind kind) {
  switch (kind) {
    case EventKind::Birth: return "birth";
    case EventKind::Death: return "death";
    case EventKind::Jump: return "jump";
  }
  return "unknown";
}

const char* to_string(InitialState kind) {
  switch (kind) {
    case InitialState::Empty: return "empty";
    case InitialState::Full: return "full";
    case InitialState::DppSample: return "dpp-sample";
    case InitialState::Explicit: return "explicit";
  }
  return "unknown";
}

InitialState parse_initial_state(const std::string& name) {
  if (name == "empty") return InitialState::Empty;
  if (name == "full") return InitialState::Full;
  if (name == "dpp-sample") return InitialState::DppSample;
  if (name == "explicit") return InitialState::Explicit;
  throw Error(ErrorCode::ValidationError,
              "initial state must be empty, full, dpp-sample or explicit, got '" + name + "'");
}

void validate(const SimConfig& cfg) {
  if (!(cfg.burn_in >= 0.0)) throw Error(ErrorCode::ValidationError, "burn_in must be >= 0");
  if (!(cfg.horizon > cfg.burn_in) || !std::isfinite(cfg.horizon))
    throw Error(ErrorCode::ValidationError, "horizon must be finite and exceed burn_in");
  if (!(cfg.thinning >= 0.0)) throw Error(ErrorCode::ValidationError, "thinning must be >= 0");
  if (cfg.batches < 2) throw Error(ErrorCode::ValidationError, "batches must be >= 2");
  if (cfg.refactor_period < 1) throw Error(ErrorCode::ValidationError, "refactor period must be >= 1");
}

Configuration initial_configuration(const Kernel& k, const SimConfig& cfg) {
  switch (cfg.initial) {
    case InitialState::Empty: return Configuration(k.n());
    case InitialState::Full: return Configuration::full(k.n());
    case InitialState::DppSample: {
      const DppMeasure measure(k);
      return sample(measure, derive_seed(cfg.seed, kInitialStream));
    }
    case InitialState::Explicit: return Configuration(k.n(), cfg.initial_sites);
  }
  return Configuration(k.n());
}

namespace {

struct Move {
  EventKind kind;
  int site;
  int site2;
};

void check_rate(double rate) {
  if (!std::isfinite(rate) || rate < 0.0)
    throw Error(ErrorCode::RateOverflow, "non-finite or negative rate encountered");
}

}  // namespace

Trajectory run(const Kernel& k, const RateSpec& spec, const SimConfig& cfg) {
  validate(cfg);
  if (cfg.mode == Dynamics::Kawasaki && spec.weight.rows() != k.n())
    throw Error(ErrorCode::DimensionMismatch, "rate spec and kernel sizes differ");

  Trajectory traj;
  traj.initial = initial_configuration(k, cfg);
  traj.horizon = cfg.horizon;
  PapangelouEngine engine(k, traj.initial, cfg.refactor_period);
  Rng rng(cfg.seed);

  const bool kawasaki = cfg.mode == Dynamics::Kawasaki;
  std::vector<double> rates;
  std::vector<Move> moves;
  double now = 0.0;
  for (;;) {
    const IntensitySnapshot snap = engine.snapshot(kawasaki);
    rates.clear();
    moves.clear();
    if (!kawasaki) {
      for (size_t j = 0; j < snap.holes.size(); ++j) {
        rates.push_back(birth_from_alpha(snap.alpha_hole[j]));
        moves.push_back({EventKind::Birth, snap.holes[j], -1});
      }
      for (size_t i = 0; i < snap.occupied.size(); ++i) {
        rates.push_back(death_from_alpha(snap.alpha_removed[i]));
        moves.push_back({EventKind::Death, snap.occupied[i], -1});
      }
    } else {
      for (size_t i = 0; i < snap.occupied.size(); ++i) {
        const int x = snap.occupied[i];
        for (size_t j = 0; j < snap.holes.size(); ++j) {
          const int y = snap.holes[j];
          const double w = spec.d(x, y);
          if (w == 0.0) continue;
          rates.push_back(jump_from_alpha(w, spec.t, snap.alpha_removed[i], snap.alpha_pair(i, j)));
          moves.push_back({EventKind::Jump, x, y});
        }
      }
    }
    double total = 0.0;
    for (double r : rates) {
      check_rate(r);
      total += r;
    }
    check_rate(total);
    if (total <= 0.0) break;

    now += -std::log(uniform01_open_left(rng)) / total;
    if (now > cfg.horizon) break;

    const double target = uniform01(rng) * total;
    size_t pick = 0;
    double acc = rates[0];
    while (acc <= target && pick + 1 < rates.size()) acc += rates[++pick];
    const Move& mv = moves[pick];
    switch (mv.kind) {
      case EventKind::Birth: engine.add(mv.site); break;
      case EventKind::Death: engine.remove(mv.site); break;
      case EventKind::Jump:
        engine.remove(mv.site);
        engine.add(mv.site2);
        break;
    }
    traj.events.push_back({now, mv.kind, mv.site, mv.site2});
  }
  return traj;
}

namespace {

void apply(Configuration& state, const Event& e) {
  switch (e.kind) {
    case EventKind::Birth: state.insert(e.site); break;
    case EventKind::Death: state.erase(e.site); break;
    case EventKind::Jump:
      if (e.site == e.site2) throw Error(ErrorCode::IllegalEvent, "jump to the same site");
      if (!state.contains(e.site)) throw Error(ErrorCode::IllegalEvent, "jump from empty site");
      if (state.contains(e.site2)) throw Error(ErrorCode::IllegalEvent, "jump onto occupied site");
      state.erase(e.site);
      state.insert(e.site2);
      break;
  }
}

}  // namespace

Configuration replay(const Trajectory& trajectory) {
  Configuration state = trajectory.initial;
  double last = 0.0;
  for (size_t i = 0; i < trajectory.events.size(); ++i) {
    const Event& e = trajectory.events[i];
    const std::string where = "event " + std::to_string(i);
    if (!(e.time > last) && !(i == 0 && e.time >= 0.0))
      throw Error(ErrorCode::IllegalEvent, where + ": times must increase strictly");
    if (e.time > trajectory.horizon) throw Error(ErrorCode::IllegalEvent, where + ": after the horizon");
    if (e.site < 0 || e.site >= state.n_sites() ||
        (e.kind == EventKind::Jump && (e.site2 < 0 || e.site2 >= state.n_sites())))
      throw Error(ErrorCode::IllegalEvent, where + ": site out of range");
    try {
      apply(state, e);
    } catch (const Error& err) {
      if (err.code() == ErrorCode::IllegalEvent) throw Error(ErrorCode::IllegalEvent, where + ": " + err.what());
      throw Error(ErrorCode::IllegalEvent, where + ": " + to_string(e.kind) + " " + err.what());
    }
    last = e.time;
  }
  return state;
}

void write_event_log(std::ostream& out, const Trajectory& trajectory) {
  out << "time,kind,site,site2\n";
  char buf[64];
  for (const Event& e : trajectory.events) {
    std::snprintf(buf, sizeof buf, "%.17g", e.time);
    out << buf << ',' << to_string(e.kind) << ',' << e.site << ',';
    if (e.kind == EventKind::Jump) out << e.site2;
    out << '\n';
  }
}

Observable indicator_product(const SiteList& sites) {
  return [sites](const Configuration& xi) {
    for (int s : sites)
      if (!xi.contains(s)) return 0.0;
    return 1.0;
  };
}

Observable state_indicator(const Configuration& state) {
  return [state](const Configuration& xi) { return xi == state ? 1.0 : 0.0; };
}

std::vector<std::vector<double>> batch_means(const Trajectory& trajectory, const std::vector<Observable>& observables,
                                             double burn_in, double thinning, int batches) {
  const double horizon = trajectory.horizon;
  if (batches < 2) throw Error(ErrorCode::InsufficientData, "need at least two batches");
  if (!(horizon > burn_in) || burn_in < 0.0)
    throw Error(ErrorCode::InsufficientData, "no time left after burn-in");
  const size_t nobs = observables.size();
  std::vector<std::vector<double>> acc(nobs, std::vector<double>(batches, 0.0));
  Configuration state = trajectory.initial;
  std::vector<double> value(nobs);
  auto evaluate = [&] {
    for (size_t o = 0; o < nobs; ++o) value[o] = observables[o](state);
  };
  evaluate();
  const auto& events = trajectory.events;

  if (thinning > 0.0) {
    const auto samples = static_cast<std::int64_t>(std::floor((horizon - burn_in) / thinning)) + 1;
    if (samples < batches) throw Error(ErrorCode::InsufficientData, "fewer grid samples than batches");
    std::vector<std::int64_t> counts(batches, 0);
    size_t next = 0;
    for (std::int64_t s = 0; s < samples; ++s) {
      const double grid = burn_in + static_cast<double>(s) * thinning;
      bool moved = false;
      while (next < events.size() && events[next].time <= grid) {
        apply(state, events[next++]);
        moved = true;
      }
      if (moved) evaluate();
      const auto b = static_cast<size_t>(s * batches / samples);
      for (size_t o = 0; o < nobs; ++o) acc[o][b] += value[o];
      ++counts[b];
    }
    for (size_t o = 0; o < nobs; ++o)
      for (int b = 0; b < batches; ++b) acc[o][b] /= static_cast<double>(counts[b]);
    return acc;
  }

  const double width = (horizon - burn_in) / batches;
  auto add_segment = [&](double from, double to) {
    from = std::max(from, burn_in);
    to = std::min(to, horizon);
    while (from < to) {
      auto b = static_cast<int>((from - burn_in) / width);
      b = std::min(b, batches - 1);
      const double edge = b == batches - 1 ? horizon : burn_in + (b + 1) * width;
      const double stop = std::min(to, edge);
      if (stop <= from) break;
      for (size_t o = 0; o < nobs; ++o) acc[o][b] += value[o] * (stop - from);
      from = stop;
    }
  };
  double now = 0.0;
  for (const Event& e : events) {
    add_segment(now, e.time);
    apply(state, e);
    evaluate();
    now = e.time;
  }
  add_segment(now, horizon);
  for (size_t o = 0; o < nobs; ++o)
    for (int b = 0; b < batches; ++b) {
      const double lo = burn_in + b * width;
      const double hi = b == batches - 1 ? horizon : burn_in + (b + 1) * width;
      acc[o][b] /= (hi - lo);
    }
  return acc;
}

Estimate pool(const std::vector<double>& means) {
  if (means.size() < 2) throw Error(ErrorCode::InsufficientData, "need at least two batches");
  Estimate est;
  est.batch_means = means;
  const double nb = static_cast<double>(means.size());
  double sum = 0.0;
  for (double m : means) sum += m;
  est.mean = sum / nb;
  double ss = 0.0;
  for (double m : means) ss += (m - est.mean) * (m - est.mean);
  est.standard_error = std::sqrt(ss / (nb - 1.0) / nb);
  return est;
}

std::vector<Estimate> estimate_correlations(const std::vector<Trajectory>& trajectories,
                                            const std::vector<SiteList>& site_tuples, double burn_in,
                                            double thinning, int batches) {
  if (trajectories.empty()) throw Error(ErrorCode::InsufficientData, "no trajectories");
  std::vector<Observable> observables;
  for (const auto& sites : site_tuples) observables.push_back(indicator_product(sites));
  std::vector<std::vector<double>> pooled(observables.size());
  for (const auto& traj : trajectories) {
    const auto means = batch_means(traj, observables, burn_in, thinning, batches);
    for (size_t o = 0; o < observables.size(); ++o)
      pooled[o].insert(pooled[o].end(), means[o].begin(), means[o].end());
  }
  std::vector<Estimate> out;
  for (const auto& p : pooled) out.push_back(pool(p));
  return out;
}

ReplicaSummary run_replicas(const Kernel& k, const RateSpec& spec, const SimConfig& cfg, int replicas,
                            const std::vector<Observable>& observables, Exec exec) {
  if (replicas < 1) throw Error(ErrorCode::InvalidArgument, "need at least one replica");
  validate(cfg);
  struct Slot {
    std::vector<std::vector<double>> means;
    std::uint64_t events = 0;
    int final_size = 0;
  };
  std::vector<Slot> slots(replicas);
  for_each_index(replicas, exec, [&](std::int64_t i) {
    SimConfig local = cfg;
    local.seed = derive_seed(cfg.seed, static_cast<std::uint64_t>(i));
    const Trajectory traj = run(k, spec, local);
    slots[i].means = batch_means(traj, observables, cfg.burn_in, cfg.thinning, cfg.batches);
    slots[i].events = traj.events.size();
    slots[i].final_size = replay(traj).size();
  });

  ReplicaSummary summary;
  summary.replicas = replicas;
  std::vector<std::vector<double>> pooled(observables.size());
  for (const Slot& s : slots) {
    for (size_t o = 0; o < observables.size(); ++o)
      pooled[o].insert(pooled[o].end(), s.means[o].begin(), s.means[o].end());
    summary.event_counts.push_back(s.events);
    summary.final_sizes.push_back(s.final_size);
  }
  for (const auto& p : pooled) summary.estimates.push_back(pool(p));
  return summary;
}

}  // namespace dppdyn
