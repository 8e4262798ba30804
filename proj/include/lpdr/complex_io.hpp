#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <string_view>

#include "lpdr/complex.hpp"

namespace lpdr {

// Text format:
//   dim <n>
//   vertices
//   <id> <c1> ... <cd>
//   simplices
//   <v0> ... <vk>
// Only maximal simplices of dimension >= 1 are written; the vertex table lists
// every vertex. Reals are printed in shortest round-trip form.

std::string format_real(double x);
/// Parses a real, throwing ParseError on junk.
double parse_real(std::string_view token);

std::string write_complex(const MetricComplex& K);
MetricComplex read_complex(std::istream& in);
MetricComplex parse_complex(std::string_view text);

MetricComplex load_complex(const std::filesystem::path& path);
void save_complex(const MetricComplex& K, const std::filesystem::path& path);

/// Reads a whole file; ParseError if it cannot be opened.
std::string read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, std::string_view contents);

}  // namespace lpdr
