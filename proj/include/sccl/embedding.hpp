#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "sccl/corpus.hpp"
#include "sccl/random.hpp"
#include "sccl/tensor.hpp"

namespace sccl {

/// Symbol index with reserved PAD = 0, UNK = 1, NULLSENT = 2.
class Vocab {
 public:
  static constexpr std::size_t kPad = 0;
  static constexpr std::size_t kUnk = 1;
  static constexpr std::size_t kNullSent = 2;
  static constexpr std::string_view kPadSymbol = "<PAD>";
  static constexpr std::string_view kUnkSymbol = "<UNK>";

  Vocab();
  /// Reserved symbols first, then `symbols` in the given order.
  static Vocab from_symbols(const std::vector<std::string>& symbols);

  std::size_t size() const { return symbols_.size(); }
  std::size_t lookup(const std::string& symbol) const;
  bool contains(const std::string& symbol) const { return index_.count(symbol) != 0; }
  const std::vector<std::string>& symbols() const { return symbols_; }
  /// Non-reserved symbols in index order.
  std::vector<std::string> regular_symbols() const;

  bool operator==(const Vocab& other) const { return symbols_ == other.symbols_; }

 private:
  void push(std::string symbol);
  std::vector<std::string> symbols_;
  std::unordered_map<std::string, std::size_t> index_;
};

enum class VocabLevel { Char, Word };

/// Indexes symbols seen at least `min_count` times, by descending count then
/// lexicographic order.
Vocab build_vocab(const std::vector<std::vector<std::string>>& sequences, std::size_t min_count);
Vocab build_vocab(const Corpus& corpus, VocabLevel level, std::size_t min_count);

struct EmbeddingTable {
  Tensor weights;  // vocab x width, trainable
  std::size_t width = 0;
};

/// U(-scale, scale) rows drawn from the named stream; the PAD row is zero.
EmbeddingTable make_embedding_table(std::size_t vocab_size, std::size_t width, double scale, std::uint64_t seed,
                                    std::string_view stream);

/// Indices for up to `max_len` symbols, right-padded with PAD. Unknown
/// symbols map to UNK.
std::vector<std::size_t> encode_sequence(std::span<const std::string> symbols, const Vocab& vocab,
                                         std::size_t max_len);

/// max_len x width rows of the table: truncated, or right-padded with the PAD
/// row. Table rows receive gradients through the lookup.
Tensor embed_sequence(std::span<const std::string> symbols, const Vocab& vocab, const EmbeddingTable& table,
                      std::size_t max_len);

struct PretrainedLoad {
  EmbeddingTable table;
  std::size_t matched = 0;  // regular symbols found in the file
  std::size_t missing = 0;  // regular symbols initialized randomly
  double coverage() const {
    return matched + missing == 0 ? 0.0 : static_cast<double>(matched) / static_cast<double>(matched + missing);
  }
};

/// Reads `word v1 ... ve` lines. Rows not covered by the file are drawn from
/// U(-0.05, 0.05) with `seed`; the PAD row stays zero. `width` is required
/// when the file is empty and must match the file otherwise (0 = take the
/// file's width).
PretrainedLoad load_pretrained_vectors(const std::filesystem::path& path, const Vocab& vocab, std::uint64_t seed,
                                       std::size_t width = 0);

/// Source of per-position input vectors for a sequence encoder. The table
/// lookup below is the only implementation; a contextual encoder would slot
/// in here.
class SequenceEmbedder {
 public:
  virtual ~SequenceEmbedder() = default;
  virtual Tensor embed(std::span<const std::string> symbols, std::size_t max_len) const = 0;
  virtual std::size_t width() const = 0;
};

class TableEmbedder final : public SequenceEmbedder {
 public:
  TableEmbedder(Vocab vocab, EmbeddingTable table) : vocab_(std::move(vocab)), table_(std::move(table)) {}
  Tensor embed(std::span<const std::string> symbols, std::size_t max_len) const override {
    return embed_sequence(symbols, vocab_, table_, max_len);
  }
  std::size_t width() const override { return table_.width; }
  const Vocab& vocab() const { return vocab_; }
  const EmbeddingTable& table() const { return table_; }

 private:
  Vocab vocab_;
  EmbeddingTable table_;
};

}  // namespace sccl
