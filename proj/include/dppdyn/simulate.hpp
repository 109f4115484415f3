#ifndef DPPDYN_SIMULATE_HPP
#define DPPDYN_SIMULATE_HPP

#include <cstdint>
#include <functional>
#include <ostream>
#include <string>
#include <vector>

#include "dppdyn/common.hpp"
#include "dppdyn/configuration.hpp"
#include "dppdyn/kernel.hpp"
#include "dppdyn/rates.hpp"

namespace dppdyn {

enum class EventKind { Birth, Death, Jump };

const char* to_string(EventKind kind);

struct Event {
  double time = 0.0;
  EventKind kind = EventKind::Birth;
  int site = -1;
  int site2 = -1;  // jump target, -1 otherwise
  bool operator==(const Event&) const = default;
};

struct Trajectory {
  Configuration initial;
  std::vector<Event> events;  // strictly increasing times
  double horizon = 0.0;
};

enum class InitialState { Empty, Full, DppSample, Explicit };

const char* to_string(InitialState kind);
InitialState parse_initial_state(const std::string& name);

struct SimConfig {
  Dynamics mode = Dynamics::Glauber;
  double horizon = 1000.0;
  double burn_in = 0.0;
  // 0: exact time-weighted averages; > 0: observables sampled on the grid
  // burn_in + k * thinning.
  double thinning = 0.0;
  std::uint64_t seed = 0;
  InitialState initial = InitialState::Empty;
  SiteList initial_sites;  // Explicit only
  int refactor_period = 256;
  int batches = 32;
};

/// Throws ValidationError unless horizon > burn_in >= 0, thinning >= 0 and
/// batches >= 2.
void validate(const SimConfig& cfg);

/// Initial configuration of a run. A DPP-sampled start draws from stream
/// derive_seed(cfg.seed, kInitialStream) so it does not share the event RNG.
Configuration initial_configuration(const Kernel& k, const SimConfig& cfg);
inline constexpr std::uint64_t kInitialStream = 0x1417;

/// Gillespie direct-method trajectory of the Glauber or Kawasaki generator.
/// Intensities come from an incrementally updated PapangelouEngine and all
/// rates are refreshed after every event.
Trajectory run(const Kernel& k, const RateSpec& spec, const SimConfig& cfg);

/// Applies the events in order, checking times and legality; returns the
/// final state. Throws IllegalEvent on the first bad event.
Configuration replay(const Trajectory& trajectory);

/// Event log as CSV with header "time,kind,site,site2" (site2 empty unless a jump).
void write_event_log(std::ostream& out, const Trajectory& trajectory);

using Observable = std::function<double(const Configuration&)>;

/// prod_{x in sites} 1{x occupied}
Observable indicator_product(const SiteList& sites);
/// 1{xi == state}
Observable state_indicator(const Configuration& state);

struct Estimate {
  double mean = 0.0;
  double standard_error = 0.0;
  std::vector<double> batch_means;
};

/// Batch means of each observable over [burn_in, horizon] of one trajectory,
/// indexed [observable][batch]. Batches have equal duration.
std::vector<std::vector<double>> batch_means(const Trajectory& trajectory, const std::vector<Observable>& observables,
                                             double burn_in, double thinning, int batches);

/// Pools batch means (all batches weighted equally) into mean and standard error.
Estimate pool(const std::vector<double>& batch_means);

/// Time-weighted averages of indicator products with batch-means standard
/// errors, pooled over trajectories. Throws InsufficientData with fewer
/// than two batches in total.
std::vector<Estimate> estimate_correlations(const std::vector<Trajectory>& trajectories,
                                            const std::vector<SiteList>& site_tuples, double burn_in,
                                            double thinning = 0.0, int batches = 32);

struct ReplicaSummary {
  int replicas = 0;
  std::vector<Estimate> estimates;           // one per observable
  std::vector<std::uint64_t> event_counts;   // per replica
  std::vector<int> final_sizes;              // |xi| at the horizon, per replica
};

/// Replica i runs with seed derive_seed(cfg.seed, i), so one replica is
/// exactly run(k, spec, cfg). Results are identical for both Exec values.
ReplicaSummary run_replicas(const Kernel& k, const RateSpec& spec, const SimConfig& cfg, int replicas,
                            const std::vector<Observable>& observables, Exec exec = Exec::Parallel);

}  // namespace dppdyn

#endif  // DPPDYN_SIMULATE_HPP
