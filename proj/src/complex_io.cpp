#include "lpdr/complex_io.hpp"

#include <cctype>
#include <charconv>
#include <fstream>
#include <sstream>

namespace lpdr {

namespace {

std::vector<std::string_view> split_ws(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && std::isspace(static_cast<unsigned char>(line[i]))) ++i;
    std::size_t j = i;
    while (j < line.size() && !std::isspace(static_cast<unsigned char>(line[j]))) ++j;
    if (j > i) out.push_back(line.substr(i, j - i));
    i = j;
  }
  return out;
}

VertexId parse_id(std::string_view token) {
  VertexId v{};
  auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), v);
  if (ec != std::errc() || ptr != token.data() + token.size()) {
    throw Error(ErrorCode::kParseError, "bad vertex id '" + std::string(token) + "'");
  }
  return v;
}

}  // namespace

std::string format_real(double x) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, ptr);
}

double parse_real(std::string_view token) {
  double x{};
  if (!token.empty() && token.front() == '+') token.remove_prefix(1);
  auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), x);
  if (ec != std::errc() || ptr != token.data() + token.size()) {
    throw Error(ErrorCode::kParseError, "bad number '" + std::string(token) + "'");
  }
  return x;
}

std::string write_complex(const MetricComplex& K) {
  std::string out = "dim " + std::to_string(K.dim()) + "\nvertices\n";
  for (Index j = 0; j < K.num_vertices(); ++j) {
    out += std::to_string(K.vertex_ids()[j]);
    for (int r = 0; r < K.ambient_dim(); ++r) {
      out += ' ';
      out += format_real(K.coordinates()(r, Eigen::Index(j)));
    }
    out += '\n';
  }
  out += "simplices\n";
  for (const auto& s : K.facets()) {
    if (s.dim() < 1) continue;
    for (int i = 0; i < s.size(); ++i) {
      if (i) out += ' ';
      out += std::to_string(s[i]);
    }
    out += '\n';
  }
  return out;
}

MetricComplex read_complex(std::istream& in) {
  enum class Section { kHeader, kVertices, kSimplices } section = Section::kHeader;
  int declared_dim = -2;
  int ambient = -1;
  std::map<VertexId, Eigen::VectorXd> vertices;
  std::vector<std::vector<VertexId>> tops;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto tokens = split_ws(line);
    if (tokens.empty() || tokens[0].front() == '#') continue;
    const auto where = " (line " + std::to_string(lineno) + ")";
    if (tokens[0] == "dim") {
      if (section != Section::kHeader || tokens.size() != 2) {
        throw Error(ErrorCode::kParseError, "misplaced dim header" + where);
      }
      declared_dim = int(parse_id(tokens[1]));
      continue;
    }
    if (tokens[0] == "vertices" && tokens.size() == 1) {
      if (section != Section::kHeader || declared_dim == -2) {
        throw Error(ErrorCode::kParseError, "vertices section before dim header" + where);
      }
      section = Section::kVertices;
      continue;
    }
    if (tokens[0] == "simplices" && tokens.size() == 1) {
      if (section != Section::kVertices) throw Error(ErrorCode::kParseError, "simplices before vertices" + where);
      section = Section::kSimplices;
      continue;
    }
    if (section == Section::kVertices) {
      const VertexId id = parse_id(tokens[0]);
      const int d = int(tokens.size()) - 1;
      if (ambient >= 0 && d != ambient) throw Error(ErrorCode::kParseError, "coordinate length differs" + where);
      ambient = d;
      Eigen::VectorXd x(d);
      for (int r = 0; r < d; ++r) x(r) = parse_real(tokens[std::size_t(r + 1)]);
      if (!vertices.emplace(id, x).second) throw Error(ErrorCode::kParseError, "duplicate vertex id" + where);
    } else if (section == Section::kSimplices) {
      std::vector<VertexId> ids;
      for (auto t : tokens) ids.push_back(parse_id(t));
      tops.push_back(std::move(ids));
    } else {
      throw Error(ErrorCode::kParseError, "unexpected line '" + line + "'" + where);
    }
  }
  if (section == Section::kHeader) throw Error(ErrorCode::kParseError, "missing vertices section");
  MetricComplex K = build_complex(vertices, tops);
  if (K.dim() != declared_dim) {
    throw Error(ErrorCode::kParseError, "declared dim " + std::to_string(declared_dim) +
                                            " but simplices give " + std::to_string(K.dim()));
  }
  return K;
}

MetricComplex parse_complex(std::string_view text) {
  std::istringstream in{std::string(text)};
  return read_complex(in);
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kParseError, "cannot open " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void write_file(const std::filesystem::path& path, std::string_view contents) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::kParseError, "cannot write " + path.string());
  out << contents;
}

MetricComplex load_complex(const std::filesystem::path& path) { return parse_complex(read_file(path)); }

void save_complex(const MetricComplex& K, const std::filesystem::path& path) {
  write_file(path, write_complex(K));
}

}  // namespace lpdr
