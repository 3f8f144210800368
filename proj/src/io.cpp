#include "kne/io.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include "kne/graph.hpp"

namespace kne {

void write_embeddings(const EmbeddingModel& model, std::span<const std::string> labels, std::ostream& out,
                      EmbeddingTable table) {
  if (!labels.empty() && labels.size() != model.node_count()) {
    throw std::invalid_argument("label count does not match embedding rows");
  }
  out << model.node_count() << ' ' << model.dim() << '\n';
  char buf[32];
  for (NodeId v = 0; v < model.node_count(); ++v) {
    if (labels.empty()) {
      out << v;
    } else {
      out << labels[v];
    }
    auto row = table == EmbeddingTable::kContext ? model.a(v) : model.b(v);
    for (float x : row) {
      std::snprintf(buf, sizeof buf, " %.9g", static_cast<double>(x));
      out << buf;
    }
    out << '\n';
  }
}

void write_embeddings(const EmbeddingModel& model, std::span<const std::string> labels, const std::string& path,
                      EmbeddingTable table) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open '" + path + "' for writing");
  write_embeddings(model, labels, out, table);
  if (!out) throw std::runtime_error("failed writing embeddings to '" + path + "'");
}

LoadedEmbeddings read_embeddings(std::istream& in) {
  std::string line;
  std::size_t line_no = 1;
  if (!std::getline(in, line)) throw ParseError("missing embedding header", line_no);
  std::istringstream header(line);
  long long n = -1, d = -1;
  std::string extra;
  if (!(header >> n >> d) || (header >> extra) || n < 0 || d < 1) {
    throw ParseError("malformed embedding header '" + line + "' (expected 'n d')", line_no);
  }
  LoadedEmbeddings out;
  out.model = EmbeddingModel(static_cast<NodeId>(n), static_cast<std::size_t>(d), 1);
  out.labels.reserve(static_cast<std::size_t>(n));
  for (NodeId v = 0; v < static_cast<NodeId>(n); ++v) {
    ++line_no;
    if (!std::getline(in, line)) throw ParseError("expected " + std::to_string(n) + " embedding rows", line_no);
    std::istringstream fields(line);
    std::string label, token;
    if (!(fields >> label)) throw ParseError("empty embedding row", line_no);
    auto row = out.model.a(v);
    for (std::size_t j = 0; j < row.size(); ++j) {
      if (!(fields >> token)) throw ParseError("row has fewer than " + std::to_string(d) + " values", line_no);
      float value = 0.0f;
      auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), value);
      if (ec != std::errc() || ptr != token.data() + token.size()) {
        throw ParseError("non-numeric token '" + token + "'", line_no);
      }
      row[j] = value;
    }
    if (fields >> token) throw ParseError("row has more than " + std::to_string(d) + " values", line_no);
    out.labels.push_back(std::move(label));
  }
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") != std::string::npos) {
      throw ParseError("more rows than the header's node count", line_no);
    }
  }
  return out;
}

LoadedEmbeddings read_embeddings(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open embeddings '" + path + "'");
  return read_embeddings(in);
}

}  // namespace kne
