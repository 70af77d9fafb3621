#include "doctest.h"
#include "sccl/embedding.hpp"
#include "sccl/error.hpp"
#include "sccl/ops.hpp"
#include "toy_data.hpp"

using namespace sccl;

TEST_CASE("reserved symbols and lookup") {
  const Vocab v;
  CHECK(v.size() == 3);
  CHECK(v.symbols()[Vocab::kPad] == "<PAD>");
  CHECK(v.symbols()[Vocab::kUnk] == "<UNK>");
  CHECK(v.symbols()[Vocab::kNullSent] == std::string(kNullSentiment));
  CHECK(v.lookup("never seen") == Vocab::kUnk);
}

TEST_CASE("char vocab of a repeated character") {
  Corpus c;
  c.add(make_doc({"好", "好"}, 1));
  const Vocab v = build_vocab(c, VocabLevel::Char, 1);
  CHECK(v.regular_symbols() == std::vector<std::string>{"好"});
  CHECK(build_vocab(c, VocabLevel::Char, 3).size() == 3);
}

TEST_CASE("vocab order is by descending count then symbol") {
  const Vocab v = build_vocab({{"b", "c", "a"}, {"c", "a"}, {"d"}}, 1);
  CHECK(v.regular_symbols() == std::vector<std::string>{"a", "c", "b", "d"});
  CHECK(build_vocab({{"b", "c", "a"}, {"c", "a"}, {"d"}}, 2).regular_symbols() == std::vector<std::string>{"a", "c"});
  const Vocab w = Vocab::from_symbols(v.regular_symbols());
  CHECK(w == v);
  for (std::size_t i = 0; i < v.size(); ++i) CHECK(v.lookup(v.symbols()[i]) == i);
}

TEST_CASE("table init: PAD row zero, others inside the range, stream-determined") {
  const auto t = make_embedding_table(10, 4, 0.1, 7, "embed.char");
  CHECK(t.weights.shape() == Shape{10, 4});
  for (std::size_t i = 0; i < 4; ++i) CHECK(t.weights[i] == 0.0);
  for (std::size_t i = 4; i < 40; ++i) CHECK(std::abs(t.weights[i]) <= 0.1);
  CHECK(make_embedding_table(10, 4, 0.1, 7, "embed.char").weights.to_vector() == t.weights.to_vector());
  CHECK(make_embedding_table(10, 4, 0.1, 7, "embed.word").weights.to_vector() != t.weights.to_vector());
}

TEST_CASE("encode pads and truncates; embedding rows come from the table") {
  const Vocab v = Vocab::from_symbols({"x", "y"});
  const std::vector<std::string> seq{"y", "zz", "x"};
  CHECK(encode_sequence(seq, v, 5) == std::vector<std::size_t>{4, 1, 3, 0, 0});
  CHECK(encode_sequence(seq, v, 2) == std::vector<std::size_t>{4, 1});
  const auto table = make_embedding_table(v.size(), 3, 0.5, 1, "t");
  const Tensor e = embed_sequence(seq, v, table, 4);
  CHECK(e.shape() == Shape{4, 3});
  for (std::size_t c = 0; c < 3; ++c) {
    CHECK(e[c] == table.weights[4 * 3 + c]);
    CHECK(e[3 * 3 + c] == 0.0);
  }
  backward(sum(e));
  CHECK(table.weights.grad()[4 * 3] == 1.0);
  CHECK(table.weights.grad()[2 * 3] == 0.0);
}

TEST_CASE("pretrained vectors") {
  toy::TempDir dir;
  toy::write_file(dir / "vec.txt", "好 0.5 -0.25\n坏 1 2\nother 3 3\n");
  const Vocab v = Vocab::from_symbols({"好", "坏", "中"});
  const auto load = load_pretrained_vectors(dir / "vec.txt", v, 3);
  CHECK(load.matched == 2);
  CHECK(load.missing == 1);
  CHECK(load.coverage() == doctest::Approx(2.0 / 3.0));
  const auto& w = load.table.weights;
  CHECK(w[v.lookup("好") * 2] == 0.5);
  CHECK(w[v.lookup("坏") * 2 + 1] == 2.0);
  CHECK(w[0] == 0.0);
  CHECK(w[1] == 0.0);
  CHECK(std::abs(w[v.lookup("中") * 2]) <= 0.05);
  CHECK(load_pretrained_vectors(dir / "vec.txt", v, 3).table.weights.to_vector() == w.to_vector());

  toy::write_file(dir / "ragged.txt", "a 1 2\nb 1\n");
  CHECK_THROWS_AS(load_pretrained_vectors(dir / "ragged.txt", v, 0), DataError);
  CHECK_THROWS_AS(load_pretrained_vectors(dir / "vec.txt", v, 0, 5), DataError);
  CHECK_THROWS_AS(load_pretrained_vectors(dir / "none.txt", v, 0), DataError);
}

TEST_CASE("table embedder behind the provider interface") {
  const Vocab v = Vocab::from_symbols({"a"});
  const TableEmbedder emb(v, make_embedding_table(v.size(), 5, 0.1, 0, "e"));
  const SequenceEmbedder& provider = emb;
  const std::vector<std::string> seq{"a", "a"};
  CHECK(provider.width() == 5);
  CHECK(provider.embed(seq, 3).shape() == Shape{3, 5});
}
