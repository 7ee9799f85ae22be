#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>

#include "mepsim/trace.hpp"

namespace mepsim {

/// Trace CSV: a "# key=value" header echoing schema, seed and parameters,
/// then [edges], [triggers] ("seq,time_ns,cell,kind,pioneer") and [arrivals]
/// ("time_ns,from,to,outcome,rejecting_seq,emit_seq") sections, closed by a
/// "# end" trailer carrying the record counts.
void write_trace(std::ostream& out, const Trace& trace);
Trace read_trace(std::istream& in);

void save_trace(const std::filesystem::path& path, const Trace& trace);
Trace load_trace(const std::filesystem::path& path);

/// Shortest decimal text that parses back to the same double.
std::string format_double(double value);

}  // namespace mepsim
