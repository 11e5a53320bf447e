#include "tissue/run_log.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

namespace tissue {
namespace {

template <typename T>
std::vector<T> collect(const std::vector<LogEvent>& events) {
  std::vector<T> out;
  for (const auto& e : events) {
    if (const auto* p = std::get_if<T>(&e)) out.push_back(*p);
  }
  return out;
}

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};

class Fields {
 public:
  Fields(std::string_view line, std::size_t line_no) : line_no_(line_no) {
    std::size_t i = 0;
    while (i < line.size()) {
      while (i < line.size() && (line[i] == ' ' || line[i] == '\t' || line[i] == '\r')) ++i;
      const auto start = i;
      while (i < line.size() && line[i] != ' ' && line[i] != '\t' && line[i] != '\r') ++i;
      if (i > start) tokens_.push_back(line.substr(start, i - start));
    }
  }

  std::size_t size() const { return tokens_.size(); }
  std::string_view tag() const { return tokens_.front(); }

  template <typename T>
  T get(std::size_t i) const {
    if (i >= tokens_.size()) throw ParseError(line_no_, "too few fields");
    T value{};
    const auto tok = tokens_[i];
    const auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), value);
    if (ec != std::errc{} || ptr != tok.data() + tok.size()) {
      throw ParseError(line_no_, "bad number `" + std::string(tok) + "`");
    }
    return value;
  }

  void expect(std::size_t n) const {
    if (tokens_.size() != n) {
      throw ParseError(line_no_, "record `" + std::string(tag()) + "` expects " + std::to_string(n - 1) + " fields");
    }
  }

 private:
  std::size_t line_no_;
  std::vector<std::string_view> tokens_;
};

}  // namespace

std::vector<ResponseEvent> RunLog::responses() const { return collect<ResponseEvent>(events); }
std::vector<RandomisationEvent> RunLog::randomisations() const { return collect<RandomisationEvent>(events); }
std::vector<InjectionEvent> RunLog::injections() const { return collect<InjectionEvent>(events); }
std::vector<ProbeSnapshot> RunLog::probes() const { return collect<ProbeSnapshot>(events); }

std::string serialize_run_log(const RunLog& log) {
  std::ostringstream out;
  for (const auto& event : log.events) {
    std::visit(overloaded{
                   [&](const InjectionEvent& e) { out << "I " << e.at << ' ' << e.syscall << ' ' << e.copies << '\n'; },
                   [&](const ResponseEvent& e) { out << "R " << e.at << ' ' << e.cell << ' ' << e.syscall << '\n'; },
                   [&](const RandomisationEvent& e) { out << "X " << e.at << ' ' << e.cell << '\n'; },
                   [&](const DestroyEvent& e) { out << "D " << e.at << ' ' << e.syscall << '\n'; },
                   [&](const ProbeSnapshot& p) {
                     out << "P " << p.taken_at << ' ' << p.antigen_count << ' ' << p.response_count_so_far << '\n';
                     for (const auto& [cell, locks] : p.per_cell_vr_locks) {
                       out << "L " << p.taken_at << ' ' << cell;
                       for (const auto v : locks) out << ' ' << v;
                       out << '\n';
                     }
                   },
               },
               event);
  }
  const auto& c = log.counters;
  out << "C " << c.end_time << ' ' << c.ticks << ' ' << c.injected << ' ' << c.evicted << ' ' << c.destroyed << ' '
      << c.live << ' ' << c.presentations << ' ' << c.action_time_sum << '\n';
  return out.str();
}

RunLog parse_run_log(std::string_view text) {
  RunLog log;
  std::size_t line_no = 0;
  ProbeSnapshot* open_probe = nullptr;
  while (!text.empty()) {
    ++line_no;
    const auto eol = text.find('\n');
    const std::string_view line = text.substr(0, eol);
    text = eol == std::string_view::npos ? std::string_view{} : text.substr(eol + 1);

    const Fields f(line, line_no);
    if (f.size() == 0 || f.tag().front() == '#') continue;
    const auto tag = f.tag();
    if (tag != "L") open_probe = nullptr;

    if (tag == "I") {
      f.expect(4);
      log.events.emplace_back(InjectionEvent{f.get<Micros>(1), f.get<Syscall>(2), f.get<std::size_t>(3)});
    } else if (tag == "R") {
      f.expect(4);
      log.events.emplace_back(ResponseEvent{f.get<Micros>(1), f.get<CellId>(2), f.get<Syscall>(3)});
    } else if (tag == "X") {
      f.expect(3);
      log.events.emplace_back(RandomisationEvent{f.get<Micros>(1), f.get<CellId>(2)});
    } else if (tag == "D") {
      f.expect(3);
      log.events.emplace_back(DestroyEvent{f.get<Micros>(1), f.get<Syscall>(2)});
    } else if (tag == "P") {
      f.expect(4);
      ProbeSnapshot snap;
      snap.taken_at = f.get<Micros>(1);
      snap.antigen_count = f.get<std::size_t>(2);
      snap.response_count_so_far = f.get<std::size_t>(3);
      log.events.emplace_back(std::move(snap));
      open_probe = &std::get<ProbeSnapshot>(log.events.back());
    } else if (tag == "L") {
      if (open_probe == nullptr) throw ParseError(line_no, "`L` record without a preceding `P`");
      if (f.get<Micros>(1) != open_probe->taken_at) throw ParseError(line_no, "`L` time differs from its probe");
      std::vector<Syscall> locks;
      for (std::size_t i = 3; i < f.size(); ++i) locks.push_back(f.get<Syscall>(i));
      open_probe->per_cell_vr_locks[f.get<CellId>(2)] = std::move(locks);
    } else if (tag == "C") {
      f.expect(9);
      auto& c = log.counters;
      c.end_time = f.get<Micros>(1);
      c.ticks = f.get<std::uint64_t>(2);
      c.injected = f.get<std::uint64_t>(3);
      c.evicted = f.get<std::uint64_t>(4);
      c.destroyed = f.get<std::uint64_t>(5);
      c.live = f.get<std::uint64_t>(6);
      c.presentations = f.get<std::uint64_t>(7);
      c.action_time_sum = f.get<std::uint64_t>(8);
    } else {
      throw ParseError(line_no, "unknown record `" + std::string(tag) + "`");
    }
  }
  return log;
}

RunLog load_run_log(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open run log: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_run_log(buf.str());
}

}  // namespace tissue
