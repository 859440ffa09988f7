#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <vector>

#include "lod/model.hpp"
#include "lod/rng.hpp"

namespace lod {

enum class MoranEventKind : std::uint8_t { neutral_arrow, selective_arrow, mutation };

const char* to_string(MoranEventKind kind);

/// One element of the untyped graphical representation. For arrows `line`
/// is the tail (parent) and `target` the head (offspring); for mutation
/// marks `target` holds the newly drawn type.
struct MoranEvent {
  MoranEventKind kind = MoranEventKind::neutral_arrow;
  double time = 0.0;
  std::int32_t line = 0;
  std::int32_t target = 0;

  friend bool operator==(const MoranEvent&, const MoranEvent&) = default;
};

/// Untyped realisation of a Moran run on [0, horizon].
struct EventStream {
  std::int64_t population_size = 1;
  double horizon = 0.0;
  std::vector<MoranEvent> events;

  std::size_t count(MoranEventKind kind) const;

  /// Checks strictly increasing times within [0, horizon] and indices in
  /// range; throws std::invalid_argument otherwise.
  void validate() const;

  /// Line-oriented text: a header `N <n> T <horizon>` followed by one
  /// `<kind> <time> <line> <target-or-type>` line per event. Times are
  /// written in shortest round-trip form so a read-back is exact.
  void write(std::ostream& out) const;
  static EventStream read(std::istream& in);

  friend bool operator==(const EventStream&, const EventStream&) = default;
};

/// Draws the graphical representation from a single superposed Poisson
/// clock of rate N/2 + N s + N u. Arrow endpoints are uniform ordered pairs
/// including self-pairs, which act as no-ops on types.
EventStream generate_event_stream(const MoranParams& params, double horizon, RngStream& rng);

using TypeVector = std::vector<std::uint8_t>;

/// I.i.d. initial types with P(type 0) = x.
TypeVector iid_types(std::int64_t population_size, double x, RngStream& rng);

/// Piecewise-constant proportion of type 0, stored at its jump times.
struct FrequencyPath {
  std::int64_t population_size = 1;
  TypeVector initial_types;
  std::vector<double> times;
  std::vector<std::int64_t> counts;

  double frequency_at(double t) const;
  std::vector<double> sample(std::span<const double> grid) const;
  void write_csv(std::ostream& out) const;

  friend bool operator==(const FrequencyPath&, const FrequencyPath&) = default;
};

/// Reads the typed picture off an untyped stream. Neutral arrows always copy
/// the tail's type; selective arrows copy it only if the tail is type 0
/// (fecundity) or the head is type 1 (viability); mutation marks overwrite.
FrequencyPath propagate_types(const EventStream& stream, std::span<const std::uint8_t> initial_types,
                              SelectionMode mode);

}  // namespace lod
