#include <gtest/gtest.h>

#include <filesystem>
#include <string>
#include <sstream>

#include "fixtures.hpp"
#include "mepsim/error.hpp"
#include "mepsim/trace_io.hpp"

namespace mepsim {
namespace {

std::string text_of(const Trace& t) {
  std::ostringstream out;
  write_trace(out, t);
  return out.str();
}

ErrorKind read_error(const std::string& text) {
  std::istringstream in(text);
  try {
    read_trace(in);
  } catch (const Error& e) {
    return e.kind();
  }
  ADD_FAILURE() << "trace was accepted";
  return ErrorKind::kIo;
}

Trace sample_trace(const Graph& g, double rho = 1e-4) {
  testing::RunSetup setup;
  setup.rho = rho;
  setup.omission_p = 0.1;
  setup.adversarial_init = true;
  setup.periods = 5;
  return testing::seeded_run(g, setup, 21);
}

TEST(TraceIo, RoundTripPreservesEverything) {
  for (const Graph& g : {build_ring(6), build_grid(3, 4), build_hypercube(3),
                         testing::graph_of(4, {{0, 1}, {1, 2}, {1, 3}})}) {
    Trace t = sample_trace(g);
    t.warnings.push_back("example warning");
    std::istringstream in(text_of(t));
    const Trace back = read_trace(in);
    EXPECT_TRUE(same_events(t, back));
    EXPECT_EQ(back.graph, t.graph);
    EXPECT_EQ(back.graph.spec(), t.graph.spec());
    EXPECT_EQ(back.params, t.params);
    EXPECT_EQ(back.stats, t.stats);
    EXPECT_EQ(back.horizon, t.horizon);
    EXPECT_EQ(back.seed, t.seed);
    EXPECT_EQ(back.warnings, t.warnings);
    EXPECT_EQ(text_of(back), text_of(t));
  }
}

TEST(TraceIo, SaveAndLoad) {
  const Trace t = sample_trace(build_ring(5));
  const auto path = std::filesystem::temp_directory_path() / "mepsim_trace_io_test.csv";
  save_trace(path, t);
  EXPECT_EQ(text_of(load_trace(path)), text_of(t));
  std::filesystem::remove(path);
  try {
    load_trace(path);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::kIo);
  }
}

TEST(TraceIo, TruncatedFileIsAParseError) {
  const std::string text = text_of(sample_trace(build_ring(5)));
  for (std::size_t cut : {std::size_t{0}, std::size_t{10}, text.size() / 3, text.size() / 2,
                          text.size() - 30}) {
    EXPECT_EQ(read_error(text.substr(0, cut)), ErrorKind::kParse) << "cut at " << cut;
  }
}

TEST(TraceIo, ErrorsCarryLineNumbers) {
  std::string text = text_of(sample_trace(build_ring(5)));
  const auto pos = text.find("internal");
  ASSERT_NE(pos, std::string::npos);
  text.replace(pos, 8, "sideways");
  std::istringstream in(text);
  try {
    read_trace(in);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::kParse);
    EXPECT_NE(std::string(e.what()).find("trace line "), std::string::npos);
  }
}

TEST(TraceIo, RejectsMalformedInput) {
  const std::string good = text_of(sample_trace(build_ring(5)));
  auto replaced = [&](const std::string& from, const std::string& to) {
    std::string s = good;
    s.replace(s.find(from), from.size(), to);
    return s;
  };
  EXPECT_EQ(read_error(replaced("schema=1", "schema=9")), ErrorKind::kParse);
  EXPECT_EQ(read_error(replaced("# seed=", "# sed=")), ErrorKind::kParse);
  EXPECT_EQ(read_error(replaced("seq,time_ns", "seq,t")), ErrorKind::kParse);
  EXPECT_EQ(read_error(replaced("# end triggers=", "# end triggers=9")), ErrorKind::kParse);
  EXPECT_EQ(read_error(replaced("[edges]\ni,j\n0,1\n", "[edges]\ni,j\n0,2\n")),
            ErrorKind::kParse);
}

TEST(FormatDouble, ShortestRoundTrip) {
  EXPECT_EQ(format_double(0.1), "0.1");
  EXPECT_EQ(format_double(0.0), "0");
  for (double v : {1e-4, 0.3, 123456.789, 2.5e-300}) {
    EXPECT_EQ(std::stod(format_double(v)), v);
  }
}

}  // namespace
}  // namespace mepsim
