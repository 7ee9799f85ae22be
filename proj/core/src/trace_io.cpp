#include "mepsim/trace_io.hpp"

#include <charconv>
#include <fstream>
#include <istream>
#include <map>
#include <ostream>
#include <string_view>
#include <vector>

#include "mepsim/error.hpp"

namespace mepsim {

namespace {

class LineReader {
 public:
  explicit LineReader(std::istream& in) : in_(in) {}

  bool next(std::string& line) {
    if (!std::getline(in_, line)) return false;
    ++line_no_;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    return true;
  }

  [[noreturn]] void fail(const std::string& message) const {
    throw Error(ErrorKind::kParse, "trace line " + std::to_string(line_no_) + ": " + message);
  }

  std::size_t line_no() const { return line_no_; }

 private:
  std::istream& in_;
  std::size_t line_no_ = 0;
};

std::vector<std::string_view> split(std::string_view line, char sep) {
  std::vector<std::string_view> fields;
  std::size_t start = 0;
  while (true) {
    const auto pos = line.find(sep, start);
    fields.push_back(line.substr(start, pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return fields;
}

template <typename T>
bool parse_int(std::string_view text, T& out) {
  const auto* end = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(text.data(), end, out);
  return ec == std::errc{} && ptr == end && !text.empty();
}

template <typename T>
T field_int(const LineReader& r, std::string_view text, const char* what) {
  T value{};
  if (!parse_int(text, value)) r.fail(std::string("bad ") + what + " '" + std::string(text) + "'");
  return value;
}

std::optional<Seq> field_opt_seq(const LineReader& r, std::string_view text, const char* what) {
  if (text.empty()) return std::nullopt;
  return field_int<Seq>(r, text, what);
}

void append_int(std::string& out, std::int64_t v) {
  char buf[24];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  out.append(buf, ptr);
}

}  // namespace

std::string format_double(double value) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, value);
  return std::string(buf, ptr);
}

void write_trace(std::ostream& out, const Trace& t) {
  const SimParams& p = t.params;
  out << "# mepsim-trace schema=" << Trace::kSchemaVersion << '\n'
      << "# seed=" << t.seed << '\n'
      << "# horizon_ns=" << t.horizon << '\n'
      << "# topology=" << t.graph.spec() << '\n'
      << "# n=" << t.graph.node_count() << '\n'
      << "# diameter=" << t.stats.diameter << '\n'
      << "# longest_simple_path=" << t.stats.longest_simple_path << '\n'
      << "# lg_is_exact=" << (t.stats.lg_is_exact ? 1 : 0) << '\n'
      << "# d_min_ns=" << p.d_min << '\n'
      << "# d_max_ns=" << p.d_max << '\n'
      << "# rho_ppb=" << p.rho.ppb() << '\n'
      << "# tau0_ns=" << p.tau0 << '\n'
      << "# tau1_ns=" << p.tau1 << '\n'
      << "# tau2_ns=" << p.tau2 << '\n'
      << "# omission_p=" << format_double(p.omission_p) << '\n'
      << "# dmin_compensation=" << (p.dmin_compensation ? 1 : 0) << '\n'
      << "# param_mode=" << to_string(p.mode) << '\n'
      << "# lg=" << p.lg << '\n';
  for (const auto& w : t.warnings) out << "# warning=" << w << '\n';

  std::string buf;
  buf.reserve(1 << 16);
  auto flush = [&](bool force) {
    if (force || buf.size() > (1 << 15)) {
      out.write(buf.data(), static_cast<std::streamsize>(buf.size()));
      buf.clear();
    }
  };

  buf += "[edges]\ni,j\n";
  for (const auto& [i, j] : t.graph.edges()) {
    append_int(buf, i);
    buf += ',';
    append_int(buf, j);
    buf += '\n';
    flush(false);
  }
  buf += "[triggers]\nseq,time_ns,cell,kind,pioneer\n";
  for (const auto& r : t.triggers) {
    append_int(buf, static_cast<std::int64_t>(r.seq));
    buf += ',';
    append_int(buf, r.time);
    buf += ',';
    append_int(buf, r.cell);
    buf += ',';
    buf += to_string(r.kind);
    buf += ',';
    append_int(buf, r.pioneer);
    buf += '\n';
    flush(false);
  }
  buf += "[arrivals]\ntime_ns,from,to,outcome,rejecting_seq,emit_seq\n";
  for (const auto& a : t.arrivals) {
    append_int(buf, a.time);
    buf += ',';
    append_int(buf, a.from);
    buf += ',';
    append_int(buf, a.to);
    buf += ',';
    buf += to_string(a.outcome);
    buf += ',';
    if (a.rejecting_seq) append_int(buf, static_cast<std::int64_t>(*a.rejecting_seq));
    buf += ',';
    if (a.emit_seq) append_int(buf, static_cast<std::int64_t>(*a.emit_seq));
    buf += '\n';
    flush(false);
  }
  buf += "# end triggers=" + std::to_string(t.triggers.size()) +
         " arrivals=" + std::to_string(t.arrivals.size()) + '\n';
  flush(true);
}

Trace read_trace(std::istream& in) {
  LineReader reader(in);
  std::string line;
  std::map<std::string, std::string> header;
  std::vector<std::string> warnings;

  if (!reader.next(line) || line.rfind("# mepsim-trace schema=", 0) != 0) {
    reader.fail("missing '# mepsim-trace' schema line");
  }
  const std::string schema = line.substr(std::string("# mepsim-trace schema=").size());
  if (schema != std::to_string(Trace::kSchemaVersion)) {
    reader.fail("unsupported schema version '" + schema + "'");
  }
  while (true) {
    if (!reader.next(line)) reader.fail("unexpected end of file in header");
    if (line == "[edges]") break;
    if (line.rfind("# ", 0) != 0) reader.fail("expected header line '# key=value'");
    const auto eq = line.find('=');
    if (eq == std::string::npos) reader.fail("header line lacks '='");
    const std::string key = line.substr(2, eq - 2);
    const std::string value = line.substr(eq + 1);
    if (key == "warning") {
      warnings.push_back(value);
    } else {
      header[key] = value;
    }
  }

  auto need = [&](const std::string& key) -> const std::string& {
    const auto it = header.find(key);
    if (it == header.end()) reader.fail("header is missing '" + key + "'");
    return it->second;
  };
  auto need_int = [&](const std::string& key) {
    return field_int<std::int64_t>(reader, need(key), key.c_str());
  };

  Trace t;
  t.seed = field_int<std::uint64_t>(reader, need("seed"), "seed");
  t.horizon = need_int("horizon_ns");
  t.stats.diameter = static_cast<std::size_t>(need_int("diameter"));
  t.stats.longest_simple_path = static_cast<std::size_t>(need_int("longest_simple_path"));
  t.stats.lg_is_exact = need_int("lg_is_exact") != 0;
  SimParams& p = t.params;
  p.d_min = need_int("d_min_ns");
  p.d_max = need_int("d_max_ns");
  p.rho = Drift::from_ppb(need_int("rho_ppb"));
  p.tau0 = need_int("tau0_ns");
  p.tau1 = need_int("tau1_ns");
  p.tau2 = need_int("tau2_ns");
  {
    const std::string& text = need("omission_p");
    auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), p.omission_p);
    if (ec != std::errc{} || ptr != text.data() + text.size()) reader.fail("bad omission_p");
  }
  p.dmin_compensation = need_int("dmin_compensation") != 0;
  try {
    p.mode = parse_param_mode(need("param_mode"));
  } catch (const Error&) {
    reader.fail("bad param_mode");
  }
  p.lg = static_cast<std::size_t>(need_int("lg"));
  t.warnings = std::move(warnings);
  const auto n = static_cast<std::size_t>(need_int("n"));

  // [edges]
  if (!reader.next(line) || line != "i,j") reader.fail("expected edges column header 'i,j'");
  std::vector<Edge> edges;
  while (true) {
    if (!reader.next(line)) reader.fail("unexpected end of file in [edges]");
    if (line == "[triggers]") break;
    const auto f = split(line, ',');
    if (f.size() != 2) reader.fail("edge row needs 2 fields");
    edges.emplace_back(field_int<CellId>(reader, f[0], "node id"),
                       field_int<CellId>(reader, f[1], "node id"));
  }
  const std::string& topo = need("topology");
  try {
    if (topo == "custom") {
      t.graph = from_edge_list(n, edges);
    } else {
      t.graph = parse_topology_spec(topo);
      if (t.graph != from_edge_list(n, edges)) reader.fail("edges do not match topology " + topo);
    }
  } catch (const Error& e) {
    if (e.kind() == ErrorKind::kParse) throw;
    reader.fail(std::string("invalid graph: ") + e.what());
  }

  // [triggers]
  if (!reader.next(line) || line != "seq,time_ns,cell,kind,pioneer") {
    reader.fail("expected triggers column header");
  }
  while (true) {
    if (!reader.next(line)) reader.fail("unexpected end of file in [triggers]");
    if (line == "[arrivals]") break;
    const auto f = split(line, ',');
    if (f.size() != 5) reader.fail("trigger row needs 5 fields");
    TriggerRecord r;
    r.seq = field_int<Seq>(reader, f[0], "seq");
    r.time = field_int<TimeNs>(reader, f[1], "time_ns");
    r.cell = field_int<CellId>(reader, f[2], "cell");
    if (f[3] == "external") {
      r.kind = TriggerKind::kExternal;
    } else if (f[3] == "internal") {
      r.kind = TriggerKind::kInternal;
    } else {
      reader.fail("bad trigger kind '" + std::string(f[3]) + "'");
    }
    r.pioneer = field_int<CellId>(reader, f[4], "pioneer");
    if (r.cell >= n || r.pioneer >= n) reader.fail("cell id out of range");
    if (r.seq != t.triggers.size()) reader.fail("trigger seq out of order");
    t.triggers.push_back(r);
  }

  // [arrivals]
  if (!reader.next(line) || line != "time_ns,from,to,outcome,rejecting_seq,emit_seq") {
    reader.fail("expected arrivals column header");
  }
  bool closed = false;
  while (reader.next(line)) {
    if (line.rfind("# end ", 0) == 0) {
      const std::string expected = "# end triggers=" + std::to_string(t.triggers.size()) +
                                   " arrivals=" + std::to_string(t.arrivals.size());
      if (line != expected) reader.fail("record counts do not match trailer '" + line + "'");
      closed = true;
      break;
    }
    const auto f = split(line, ',');
    if (f.size() != 6) reader.fail("arrival row needs 6 fields");
    ArrivalRecord a;
    a.time = field_int<TimeNs>(reader, f[0], "time_ns");
    a.from = field_int<CellId>(reader, f[1], "from");
    a.to = field_int<CellId>(reader, f[2], "to");
    if (f[3] == "accepted") {
      a.outcome = ArrivalOutcome::kAccepted;
    } else if (f[3] == "rejected") {
      a.outcome = ArrivalOutcome::kRejected;
    } else if (f[3] == "omitted") {
      a.outcome = ArrivalOutcome::kOmitted;
    } else {
      reader.fail("bad outcome '" + std::string(f[3]) + "'");
    }
    a.rejecting_seq = field_opt_seq(reader, f[4], "rejecting_seq");
    a.emit_seq = field_opt_seq(reader, f[5], "emit_seq");
    if (a.from >= n || a.to >= n) reader.fail("cell id out of range");
    if ((a.rejecting_seq && *a.rejecting_seq >= t.triggers.size()) ||
        (a.emit_seq && *a.emit_seq >= t.triggers.size())) {
      reader.fail("trigger reference out of range");
    }
    t.arrivals.push_back(a);
  }
  if (!closed) reader.fail("missing '# end' trailer (truncated file?)");
  return t;
}

void save_trace(const std::filesystem::path& path, const Trace& trace) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorKind::kIo, "cannot open " + path.string() + " for writing");
  write_trace(out, trace);
  if (!out) throw Error(ErrorKind::kIo, "failed writing " + path.string());
}

Trace load_trace(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::kIo, "cannot open " + path.string());
  return read_trace(in);
}

}  // namespace mepsim
