#pragma once

#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "kne/model.hpp"

namespace kne {

enum class EmbeddingTable { kContext, kCenter };

// Text format: header "n d", then per node its label followed by d values
// printed with 9 significant digits.
void write_embeddings(const EmbeddingModel& model, std::span<const std::string> labels, std::ostream& out,
                      EmbeddingTable table = EmbeddingTable::kContext);
void write_embeddings(const EmbeddingModel& model, std::span<const std::string> labels, const std::string& path,
                      EmbeddingTable table = EmbeddingTable::kContext);

struct LoadedEmbeddings {
  std::vector<std::string> labels;
  EmbeddingModel model;  // rows loaded into A; B is zero
};

LoadedEmbeddings read_embeddings(std::istream& in);
LoadedEmbeddings read_embeddings(const std::string& path);

}  // namespace kne
