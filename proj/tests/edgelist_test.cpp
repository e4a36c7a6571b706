#include <catch2/catch_amalgamated.hpp>

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "kron/edgelist.hpp"

namespace {

kron::ModelParams make(double a, double b, double g, int k) {
  return kron::ModelParams(kron::Initiator(a, b, g), k);
}

std::string render(const kron::GraphSample& sample) {
  std::ostringstream out;
  kron::write_edge_list(out, sample);
  return out.str();
}

kron::GraphSample parse(const std::string& text) {
  std::istringstream in(text);
  return kron::read_edge_list(in);
}

}  // namespace

TEST_CASE("edge lists render the exact documented layout", "[edgelist]") {
  const kron::GraphSample sample{
      make(0.8, 0.6, 0.4, 2), {{0, 1}, {1, 3}}, {2}, kron::RngSeed{7, 0}};
  REQUIRE(render(sample) ==
          "# kron k=2 alpha=0.8 beta=0.6 gamma=0.4 seed=7\n"
          "2 2\n"
          "0 1\n"
          "1 3\n");
  REQUIRE(render(sample).find('\r') == std::string::npos);
  REQUIRE(render(sample) == render(sample));
}

TEST_CASE("edge lists round trip through write and read", "[edgelist]") {
  const auto params = make(0.85, 0.55, 0.25, 6);
  const auto sample = kron::sample_dense(params, kron::RngSeed{99, 0});
  const auto back = parse(render(sample));
  REQUIRE(back.params == params);
  REQUIRE(back.edges == sample.edges);
  REQUIRE(back.loops == sample.loops);
  REQUIRE(back.seed.value == 99);

  // Header doubles survive the round trip bit-exactly.
  const auto odd = make(1.0 / 3.0, 0.1 + 0.2, 0.017, 3);
  const kron::GraphSample tricky{odd, {}, {}, kron::RngSeed{12345678901234567ull, 0}};
  const auto tricky_back = parse(render(tricky));
  REQUIRE(tricky_back.params.theta().alpha() == odd.theta().alpha());
  REQUIRE(tricky_back.params.theta().beta() == odd.theta().beta());
  REQUIRE(tricky_back.params.theta().gamma() == odd.theta().gamma());
  REQUIRE(tricky_back.seed.value == 12345678901234567ull);
}

TEST_CASE("edge list parsing rejects malformed content", "[edgelist]") {
  REQUIRE_THROWS_AS(parse(""), kron::parse_error);
  REQUIRE_THROWS_AS(parse("0 1\n"), kron::parse_error);
  REQUIRE_THROWS_AS(parse("# kron k=2 alpha=0.8 beta=0.6 seed=7\n"), kron::parse_error);
  REQUIRE_THROWS_AS(parse("# kron k=2 alpha=zz beta=0.6 gamma=0.4 seed=7\n"),
                    kron::parse_error);

  const std::string header = "# kron k=2 alpha=0.8 beta=0.6 gamma=0.4 seed=7\n";
  REQUIRE_THROWS_AS(parse(header + "0 4\n"), kron::parse_error);   // id out of range
  REQUIRE_THROWS_AS(parse(header + "2 1\n"), kron::parse_error);   // endpoints reversed
  REQUIRE_THROWS_AS(parse(header + "0 x\n"), kron::parse_error);   // not a number
  REQUIRE_THROWS_AS(parse(header + "1 2\n0 1\n"), kron::parse_error);  // unsorted
  REQUIRE_THROWS_AS(parse(header + "0 1\n0 1\n"), kron::parse_error);  // duplicate
  REQUIRE_THROWS_AS(parse(header + "1 1\n0 0\n"), kron::parse_error);  // loops unsorted

  // Invalid model parameters in the header surface as model errors.
  REQUIRE_THROWS_AS(parse("# kron k=2 alpha=0.4 beta=0.6 gamma=0.8 seed=7\n"),
                    kron::ordering_violation);

  REQUIRE_NOTHROW(parse(header));  // empty graph is fine
  REQUIRE_NOTHROW(parse(header + "0 0\n1 1\n0 1\n"));
}

TEST_CASE("edge list file helpers report io failures", "[edgelist]") {
  namespace fs = std::filesystem;
  const auto params = make(0.8, 0.6, 0.4, 4);
  const auto sample = kron::sample_dense(params, kron::RngSeed{11, 0});
  const auto path = fs::temp_directory_path() / "kron_edgelist_test.txt";

  kron::write_edge_list_file(path, sample);
  const auto back = kron::read_edge_list_file(path);
  REQUIRE(back.edges == sample.edges);
  REQUIRE(back.loops == sample.loops);
  fs::remove(path);

  REQUIRE_THROWS_AS(kron::write_edge_list_file("/nonexistent-dir/kron.txt", sample),
                    kron::io_error);
  REQUIRE_THROWS_AS(kron::read_edge_list_file("/nonexistent-dir/kron.txt"),
                    kron::io_error);
}
