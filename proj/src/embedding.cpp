#include "sccl/embedding.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <sstream>

#include "sccl/error.hpp"
#include "sccl/lexicon.hpp"
#include "sccl/ops.hpp"
#include "sccl/text.hpp"

namespace sccl {

Vocab::Vocab() {
  push(std::string(kPadSymbol));
  push(std::string(kUnkSymbol));
  push(std::string(kNullSentiment));
}

Vocab Vocab::from_symbols(const std::vector<std::string>& symbols) {
  Vocab v;
  for (const auto& s : symbols) {
    if (!v.contains(s)) v.push(s);
  }
  return v;
}

void Vocab::push(std::string symbol) {
  index_.emplace(symbol, symbols_.size());
  symbols_.push_back(std::move(symbol));
}

std::size_t Vocab::lookup(const std::string& symbol) const {
  auto it = index_.find(symbol);
  return it == index_.end() ? kUnk : it->second;
}

std::vector<std::string> Vocab::regular_symbols() const {
  return {symbols_.begin() + static_cast<std::ptrdiff_t>(kNullSent + 1), symbols_.end()};
}

Vocab build_vocab(const std::vector<std::vector<std::string>>& sequences, std::size_t min_count) {
  std::map<std::string, std::size_t> counts;
  for (const auto& seq : sequences)
    for (const auto& s : seq) ++counts[s];
  std::vector<std::pair<std::string, std::size_t>> kept;
  for (auto& [s, n] : counts) {
    if (n >= min_count) kept.emplace_back(s, n);
  }
  std::stable_sort(kept.begin(), kept.end(), [](const auto& a, const auto& b) { return a.second > b.second; });
  std::vector<std::string> symbols;
  symbols.reserve(kept.size());
  for (auto& [s, _] : kept) symbols.push_back(s);
  return Vocab::from_symbols(symbols);
}

Vocab build_vocab(const Corpus& corpus, VocabLevel level, std::size_t min_count) {
  std::vector<std::vector<std::string>> seqs;
  seqs.reserve(corpus.size());
  for (const auto& d : corpus.docs()) seqs.push_back(level == VocabLevel::Char ? d.chars : d.tokens);
  return build_vocab(seqs, min_count);
}

EmbeddingTable make_embedding_table(std::size_t vocab_size, std::size_t width, double scale, std::uint64_t seed,
                                    std::string_view stream) {
  Rng rng = derive_rng(seed, stream);
  auto values = uniform_values(vocab_size * width, -scale, scale, rng);
  std::fill_n(values.begin(), width, 0.0);  // PAD
  return {Tensor::parameter({vocab_size, width}, std::move(values)), width};
}

std::vector<std::size_t> encode_sequence(std::span<const std::string> symbols, const Vocab& vocab,
                                         std::size_t max_len) {
  std::vector<std::size_t> idx(max_len, Vocab::kPad);
  const std::size_t n = std::min(max_len, symbols.size());
  for (std::size_t i = 0; i < n; ++i) idx[i] = vocab.lookup(symbols[i]);
  return idx;
}

Tensor embed_sequence(std::span<const std::string> symbols, const Vocab& vocab, const EmbeddingTable& table,
                      std::size_t max_len) {
  if (table.weights.dim(0) != vocab.size()) {
    throw ShapeError("embed_sequence: table has " + std::to_string(table.weights.dim(0)) + " rows for a vocab of " +
                     std::to_string(vocab.size()));
  }
  const auto idx = encode_sequence(symbols, vocab, max_len);
  return gather_rows(table.weights, idx);
}

PretrainedLoad load_pretrained_vectors(const std::filesystem::path& path, const Vocab& vocab, std::uint64_t seed,
                                       std::size_t width) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open vectors " + path.string());
  std::map<std::size_t, std::vector<double>> rows;
  std::string raw;
  std::size_t line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    auto fields = text::split_whitespace(text::chomp(raw));
    if (fields.empty()) continue;
    const std::size_t w = fields.size() - 1;
    if (width == 0) width = w;
    if (w != width || w == 0) {
      throw DataError("vectors " + path.string() + ": width " + std::to_string(w) + " differs from " +
                      std::to_string(width) + " at line " + std::to_string(line_no));
    }
    const std::string word = text::nfc(fields[0]);
    if (!vocab.contains(word)) continue;
    std::vector<double> v(w);
    for (std::size_t i = 0; i < w; ++i) {
      const auto x = text::parse_double(fields[i + 1]);
      if (!x) throw DataError("vectors " + path.string() + ": malformed value at line " + std::to_string(line_no));
      v[i] = *x;
    }
    rows[vocab.lookup(word)] = std::move(v);
  }
  if (width == 0) throw DataError("vectors " + path.string() + " is empty and no width was given");

  PretrainedLoad out;
  Rng rng = derive_rng(seed, "pretrained:" + path.filename().string());
  auto values = uniform_values(vocab.size() * width, -0.05, 0.05, rng);
  std::fill_n(values.begin(), width, 0.0);
  for (std::size_t r = Vocab::kNullSent + 1; r < vocab.size(); ++r) {
    auto it = rows.find(r);
    if (it == rows.end()) {
      ++out.missing;
      continue;
    }
    ++out.matched;
    std::copy(it->second.begin(), it->second.end(), values.begin() + static_cast<std::ptrdiff_t>(r * width));
  }
  out.table = {Tensor::parameter({vocab.size(), width}, std::move(values)), width};
  return out;
}

}  // namespace sccl
