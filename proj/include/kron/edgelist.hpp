#pragma once

#include <algorithm>
#include <charconv>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>
#include <string_view>

#include "kron/errors.hpp"
#include "kron/sampler.hpp"

namespace kron {

// Plain-text edge list, bit-exact:
//   # kron k=<k> alpha=<a> beta=<b> gamma=<g> seed=<s>
//   <v> <v>     one line per loop, ascending
//   <u> <v>     one line per edge, u < v, ascending lexicographic
// Decimal ids, UTF-8, LF endings. Doubles use the shortest round-trip form.

namespace detail {

inline std::string shortest_double(double value) {
  char buffer[32];
  const auto [end, ec] = std::to_chars(buffer, buffer + sizeof(buffer), value);
  return std::string(buffer, end);
}

inline double parse_double_field(std::string_view text, const char* name) {
  double value = 0.0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc{} || ptr != text.data() + text.size()) {
    throw parse_error(std::string("bad header field: ") + name);
  }
  return value;
}

inline std::uint64_t parse_u64_field(std::string_view text, const char* name) {
  std::uint64_t value = 0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc{} || ptr != text.data() + text.size()) {
    throw parse_error(std::string("bad header field: ") + name);
  }
  return value;
}

inline std::string_view field_after(std::string_view line, std::string_view key) {
  const auto at = line.find(key);
  if (at == std::string_view::npos) {
    throw parse_error("missing header field: " + std::string(key));
  }
  const auto start = at + key.size();
  auto end = line.find(' ', start);
  if (end == std::string_view::npos) end = line.size();
  return line.substr(start, end - start);
}

}  // namespace detail

inline void write_edge_list(std::ostream& out, const GraphSample& sample) {
  const Initiator& t = sample.params.theta();
  out << "# kron k=" << sample.params.k() << " alpha=" << detail::shortest_double(t.alpha())
      << " beta=" << detail::shortest_double(t.beta())
      << " gamma=" << detail::shortest_double(t.gamma()) << " seed=" << sample.seed.value
      << "\n";
  for (std::uint64_t v : sample.loops) {
    out << v << " " << v << "\n";
  }
  for (const auto& [u, v] : sample.edges) {
    out << u << " " << v << "\n";
  }
}

inline GraphSample read_edge_list(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) {
    throw parse_error("empty edge-list stream");
  }
  if (!line.starts_with("# kron ")) {
    throw parse_error("missing '# kron' header");
  }
  const std::string_view header = line;
  const int k = static_cast<int>(detail::parse_u64_field(detail::field_after(header, "k="), "k"));
  const double alpha = detail::parse_double_field(detail::field_after(header, "alpha="), "alpha");
  const double beta = detail::parse_double_field(detail::field_after(header, "beta="), "beta");
  const double gamma = detail::parse_double_field(detail::field_after(header, "gamma="), "gamma");
  const std::uint64_t seed = detail::parse_u64_field(detail::field_after(header, "seed="), "seed");

  GraphSample sample{ModelParams(Initiator(alpha, beta, gamma), k), {}, {}, RngSeed{seed, 0}};
  const std::uint64_t n = sample.params.vertex_count();
  std::uint64_t line_number = 1;
  while (std::getline(in, line)) {
    ++line_number;
    if (line.empty()) continue;
    std::istringstream fields(line);
    std::uint64_t u = 0;
    std::uint64_t v = 0;
    if (!(fields >> u >> v)) {
      throw parse_error("malformed edge line " + std::to_string(line_number));
    }
    if (u >= n || v >= n) {
      throw parse_error("vertex id out of range on line " + std::to_string(line_number));
    }
    if (u > v) {
      throw parse_error("edge endpoints out of order on line " + std::to_string(line_number));
    }
    if (u == v) {
      sample.loops.push_back(u);
    } else {
      sample.edges.emplace_back(u, v);
    }
  }
  if (!std::is_sorted(sample.loops.begin(), sample.loops.end()) ||
      !std::is_sorted(sample.edges.begin(), sample.edges.end())) {
    throw parse_error("edge list not in ascending order");
  }
  if (std::adjacent_find(sample.edges.begin(), sample.edges.end()) != sample.edges.end() ||
      std::adjacent_find(sample.loops.begin(), sample.loops.end()) != sample.loops.end()) {
    throw parse_error("duplicate entries in edge list");
  }
  return sample;
}

inline void write_edge_list_file(const std::filesystem::path& path,
                                 const GraphSample& sample) {
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw io_error("cannot open for writing: " + path.string());
  }
  write_edge_list(out, sample);
  out.flush();
  if (!out) {
    throw io_error("write failed: " + path.string());
  }
}

inline GraphSample read_edge_list_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw io_error("cannot open for reading: " + path.string());
  }
  return read_edge_list(in);
}

}  // namespace kron
