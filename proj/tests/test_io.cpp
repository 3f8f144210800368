#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <sstream>
#include <vector>

#include "kne/graph.hpp"
#include "kne/io.hpp"

namespace {

TEST(EmbeddingIo, RoundTripPreservesValues) {
  std::mt19937_64 gen(1);
  std::normal_distribution<float> nd(0.0f, 1.0f);
  kne::EmbeddingModel m(5, 4, 1);
  for (float& x : m.a_data()) x = nd(gen);
  for (float& x : m.b_data()) x = nd(gen);
  const std::vector<std::string> labels{"n0", "n1", "n2", "n3", "n4"};
  for (auto table : {kne::EmbeddingTable::kContext, kne::EmbeddingTable::kCenter}) {
    std::stringstream io;
    kne::write_embeddings(m, labels, io, table);
    const auto loaded = kne::read_embeddings(io);
    EXPECT_EQ(loaded.labels, labels);
    const auto& src = table == kne::EmbeddingTable::kContext ? m.a_data() : m.b_data();
    double max_diff = 0.0;
    for (std::size_t i = 0; i < src.size(); ++i) {
      max_diff = std::max(max_diff, std::abs(static_cast<double>(src[i]) - loaded.model.a_data()[i]));
    }
    EXPECT_LT(max_diff, 1e-8);
  }
}

TEST(EmbeddingIo, EmptyModelHasHeaderOnly) {
  const kne::EmbeddingModel m(0, 3, 1);
  std::ostringstream out;
  kne::write_embeddings(m, {}, out);
  EXPECT_EQ(out.str(), "0 3\n");
  std::istringstream in(out.str());
  EXPECT_EQ(kne::read_embeddings(in).model.node_count(), 0u);
}

TEST(EmbeddingIo, HeaderMatchesBody) {
  kne::EmbeddingModel m(2, 3, 1);
  std::ostringstream out;
  kne::write_embeddings(m, {}, out);
  std::istringstream in(out.str());
  std::string first;
  std::getline(in, first);
  EXPECT_EQ(first, "2 3");
  EXPECT_EQ(out.str(), "2 3\n0 0 0 0\n1 0 0 0\n");
}

TEST(EmbeddingIo, MalformedInputsAreErrors) {
  const char* bad[] = {
      "",                      // no header
      "two 3\n",               // non-numeric header
      "1\n",                   // short header
      "1 2 3\na 1 2\n",        // long header
      "2 2\na 1 2\n",          // missing row
      "1 2\na 1\n",            // short row
      "1 2\na 1 2 3\n",        // long row
      "1 2\na 1 x\n",          // non-numeric value
      "1 2\na 1 2\nb 3 4\n",   // extra row
  };
  for (const char* text : bad) {
    std::istringstream in(text);
    EXPECT_THROW(kne::read_embeddings(in), kne::ParseError) << text;
  }
  EXPECT_THROW(kne::read_embeddings(std::string("/nonexistent/emb.txt")), std::runtime_error);
}

TEST(EmbeddingIo, LabelCountMismatchIsRejected) {
  const kne::EmbeddingModel m(2, 1, 1);
  std::ostringstream out;
  const std::vector<std::string> labels{"only-one"};
  EXPECT_THROW(kne::write_embeddings(m, labels, out), std::invalid_argument);
}

}  // namespace
