#include "lod/moran.hpp"

#include <algorithm>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>

#include "lod/csv.hpp"

namespace lod {

const char* to_string(MoranEventKind kind) {
  switch (kind) {
    case MoranEventKind::neutral_arrow: return "neutral";
    case MoranEventKind::selective_arrow: return "selective";
    case MoranEventKind::mutation: return "mutation";
  }
  return "unknown";
}

namespace {

MoranEventKind parse_kind(const std::string& text) {
  if (text == "neutral") return MoranEventKind::neutral_arrow;
  if (text == "selective") return MoranEventKind::selective_arrow;
  if (text == "mutation") return MoranEventKind::mutation;
  throw std::invalid_argument("unknown event kind '" + text + "'");
}

}  // namespace

std::size_t EventStream::count(MoranEventKind kind) const {
  return static_cast<std::size_t>(
      std::count_if(events.begin(), events.end(), [kind](const MoranEvent& e) { return e.kind == kind; }));
}

void EventStream::validate() const {
  if (population_size < 1) throw std::invalid_argument("event stream: N must be >= 1");
  double previous = -1.0;
  for (const auto& e : events) {
    if (!(e.time > previous)) throw std::invalid_argument("event stream: times must be strictly increasing");
    if (e.time < 0.0 || e.time > horizon) throw std::invalid_argument("event stream: time outside [0, T]");
    if (e.line < 0 || e.line >= population_size) throw std::invalid_argument("event stream: line out of range");
    if (e.kind == MoranEventKind::mutation) {
      if (e.target != 0 && e.target != 1) throw std::invalid_argument("event stream: mutation type must be 0 or 1");
    } else if (e.target < 0 || e.target >= population_size) {
      throw std::invalid_argument("event stream: arrow head out of range");
    }
    previous = e.time;
  }
}

void EventStream::write(std::ostream& out) const {
  out << "N " << population_size << " T " << format_exact(horizon) << '\n';
  for (const auto& e : events) {
    out << to_string(e.kind) << ' ' << format_exact(e.time) << ' ' << e.line << ' ' << e.target << '\n';
  }
}

EventStream EventStream::read(std::istream& in) {
  EventStream stream;
  std::string line;
  if (!std::getline(in, line)) throw std::invalid_argument("event stream: missing header");
  {
    std::istringstream header(line);
    std::string n_tag, t_tag, horizon;
    header >> n_tag >> stream.population_size >> t_tag >> horizon;
    if (!header || n_tag != "N" || t_tag != "T") throw std::invalid_argument("event stream: bad header");
    stream.horizon = parse_number(horizon);
  }
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::istringstream row(line);
    std::string kind, time;
    MoranEvent e;
    row >> kind >> time >> e.line >> e.target;
    if (!row) throw std::invalid_argument("event stream: malformed line '" + line + "'");
    e.kind = parse_kind(kind);
    e.time = parse_number(time);
    stream.events.push_back(e);
  }
  stream.validate();
  return stream;
}

EventStream generate_event_stream(const MoranParams& raw, double horizon, RngStream& rng) {
  const MoranParams params = validate(raw);
  if (!(horizon > 0.0)) throw ParameterError("T", "must be > 0");
  const auto n = static_cast<double>(params.population_size);
  const auto lines = static_cast<std::uint64_t>(params.population_size);
  const double neutral_rate = 0.5 * n;
  const double selective_rate = params.s * n;
  const double mutation_rate = params.u * n;
  const double total = neutral_rate + selective_rate + mutation_rate;

  EventStream stream;
  stream.population_size = params.population_size;
  stream.horizon = horizon;
  stream.events.reserve(static_cast<std::size_t>(total * horizon * 1.1) + 16);

  double time = 0.0;
  while (true) {
    const double next = time + rng.exponential(total);
    if (next > horizon) break;
    if (next == time) continue;
    time = next;
    const double pick = rng.uniform() * total;
    MoranEvent e;
    e.time = time;
    if (pick < neutral_rate) {
      e.kind = MoranEventKind::neutral_arrow;
    } else if (pick < neutral_rate + selective_rate) {
      e.kind = MoranEventKind::selective_arrow;
    } else {
      e.kind = MoranEventKind::mutation;
    }
    e.line = static_cast<std::int32_t>(rng.below(lines));
    if (e.kind == MoranEventKind::mutation) {
      e.target = rng.bernoulli(params.nu0) ? 0 : 1;
    } else {
      e.target = static_cast<std::int32_t>(rng.below(lines));
    }
    stream.events.push_back(e);
  }
  return stream;
}

TypeVector iid_types(std::int64_t population_size, double x, RngStream& rng) {
  if (x < 0.0 || x > 1.0) throw ParameterError("x", "must lie in [0,1]");
  TypeVector types(static_cast<std::size_t>(population_size));
  for (auto& t : types) t = rng.bernoulli(x) ? 0 : 1;
  return types;
}

double FrequencyPath::frequency_at(double t) const {
  const auto it = std::upper_bound(times.begin(), times.end(), t);
  const auto k = it == times.begin() ? 0 : static_cast<std::size_t>(it - times.begin()) - 1;
  return static_cast<double>(counts[k]) / static_cast<double>(population_size);
}

std::vector<double> FrequencyPath::sample(std::span<const double> grid) const {
  std::vector<double> out;
  out.reserve(grid.size());
  for (double t : grid) out.push_back(frequency_at(t));
  return out;
}

void FrequencyPath::write_csv(std::ostream& out) const {
  CsvWriter csv(out, {"time", "frequency"});
  for (std::size_t k = 0; k < times.size(); ++k) {
    csv.cell(times[k]).cell(static_cast<double>(counts[k]) / static_cast<double>(population_size));
    csv.end_row();
  }
}

FrequencyPath propagate_types(const EventStream& stream, std::span<const std::uint8_t> initial_types,
                              SelectionMode mode) {
  if (static_cast<std::int64_t>(initial_types.size()) != stream.population_size) {
    throw std::invalid_argument("initial type vector length " + std::to_string(initial_types.size()) +
                                " does not match N = " + std::to_string(stream.population_size));
  }
  FrequencyPath path;
  path.population_size = stream.population_size;
  path.initial_types.assign(initial_types.begin(), initial_types.end());

  TypeVector types = path.initial_types;
  std::int64_t zeros = std::count(types.begin(), types.end(), std::uint8_t{0});
  path.times.push_back(0.0);
  path.counts.push_back(zeros);

  for (const auto& e : stream.events) {
    const std::int64_t before = zeros;
    auto set_type = [&](std::int32_t line, std::uint8_t type) {
      auto& slot = types[static_cast<std::size_t>(line)];
      if (slot == type) return;
      zeros += type == 0 ? 1 : -1;
      slot = type;
    };
    switch (e.kind) {
      case MoranEventKind::neutral_arrow:
        set_type(e.target, types[static_cast<std::size_t>(e.line)]);
        break;
      case MoranEventKind::selective_arrow: {
        const auto tail = types[static_cast<std::size_t>(e.line)];
        const auto head = types[static_cast<std::size_t>(e.target)];
        const bool used = mode == SelectionMode::fecundity ? tail == 0 : head == 1;
        if (used) set_type(e.target, tail);
        break;
      }
      case MoranEventKind::mutation:
        set_type(e.line, static_cast<std::uint8_t>(e.target));
        break;
    }
    if (zeros != before) {
      path.times.push_back(e.time);
      path.counts.push_back(zeros);
    }
  }
  return path;
}

}  // namespace lod
