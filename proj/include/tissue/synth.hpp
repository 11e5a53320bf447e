#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "tissue/trace.hpp"

namespace tissue::ingest {

/// Planted attack traffic: `count` events spread uniformly over [start, end),
/// each drawing its syscall uniformly from `syscalls`.
struct AttackSpec {
  std::vector<Syscall> syscalls;
  std::size_t count = 0;
  Micros start = 0;
  Micros end = 0;
};

/// Shape of a synthetic session.
///
/// The normal syscalls (`frequencies`, exact counts) are shuffled; the first
/// `max_rate` of them form one burst lasting `burst_length` starting at
/// `burst_at`, and the rest arrive as small request-like clusters placed
/// uniformly over the session outside a guard band around the burst. CPU usage (channel 0) sits at a flat
/// baseline, steps up during the burst and the attack interval, then decays.
/// Memory usage (channel 1) creeps upward after each such episode. Both are
/// sampled at `signal_hz`.
struct SynthProfile {
  std::string name = "synthetic";
  Micros total_time = 0;
  std::map<Syscall, std::size_t> frequencies;
  std::size_t max_rate = 0;
  std::optional<AttackSpec> attack;
  /// Burst start; when empty a start in [15%, 45%] of the session is drawn.
  std::optional<Micros> burst_at;
  Micros burst_length = 800'000;
  /// Background clusters hold 1..background_cluster syscalls within cluster_spread.
  std::size_t background_cluster = 8;
  Micros cluster_spread = 2'000'000;
  double signal_hz = 4.0;
  double cpu_baseline = 0.01;
  double cpu_peak = 0.5;
  /// Time constant of the CPU decay after an episode, seconds.
  double cpu_decay_s = 0.75;

  std::size_t total_antigen() const;
};

/// Thrown when a profile cannot be laid out (for instance a max rate above
/// the antigen total, or a session too short for the burst guard band).
class InfeasibleProfile : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Deterministic under `seed`. Never emits a syscall outside
/// frequencies ∪ attack syscalls.
SessionTrace synthesize(const SynthProfile& profile, std::uint64_t seed);

struct NamedSyscall {
  std::string_view name;
  Syscall number;
  std::size_t frequency;  // combined count over both normal sessions
};

/// The 38 syscalls of the rpc.statd normal sessions with their combined
/// frequencies (884 calls in total).
const std::vector<NamedSyscall>& statd_normal_syscalls();

/// Syscalls planted as novel attack traffic; none occur in normal sessions.
const std::vector<Syscall>& novel_attack_syscalls();

/// The six session shapes: success1, success2, failure1, failure2, normal1,
/// normal2. Throws std::invalid_argument for any other name.
SynthProfile builtin_profile(std::string_view name);
std::vector<std::string> builtin_profile_names();

/// The Table-2 row each builtin profile targets.
SessionStats builtin_targets(std::string_view name);

/// Frequency table scaled to `total` with largest-remainder rounding.
std::map<Syscall, std::size_t> scaled_frequencies(std::size_t total);

}  // namespace tissue::ingest
