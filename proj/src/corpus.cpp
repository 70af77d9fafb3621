#include "sccl/corpus.hpp"

#include <algorithm>
#include <cmath>
#include <charconv>
#include <fstream>
#include <numeric>

#include "sccl/error.hpp"
#include "sccl/random.hpp"
#include "sccl/text.hpp"

namespace sccl {

std::string_view emotion_name(int label) {
  static constexpr std::array<std::string_view, kNumClasses> names{"Null", "Like", "Sad",
                                                                   "Disgust", "Anger", "Happiness"};
  if (label < 0 || label >= static_cast<int>(kNumClasses)) return "?";
  return names[static_cast<std::size_t>(label)];
}

LabeledDoc make_doc(std::vector<std::string> tokens, int label) {
  LabeledDoc doc;
  doc.label = label;
  for (const auto& t : tokens) {
    auto cps = text::code_points(t);
    doc.chars.insert(doc.chars.end(), cps.begin(), cps.end());
  }
  doc.tokens = std::move(tokens);
  doc.degenerate = doc.tokens.empty();
  return doc;
}

Corpus::Corpus(std::vector<LabeledDoc> docs) {
  docs_.reserve(docs.size());
  for (auto& d : docs) add(std::move(d));
}

void Corpus::add(LabeledDoc doc) {
  if (doc.label < 0 || doc.label >= static_cast<int>(kNumClasses)) {
    throw DataError("label " + std::to_string(doc.label) + " out of range");
  }
  ++class_counts_[static_cast<std::size_t>(doc.label)];
  docs_.push_back(std::move(doc));
}

Corpus parse_corpus(std::istream& in, std::string_view source) {
  Corpus corpus;
  std::string raw;
  std::size_t line_no = 0;
  auto fail = [&](const std::string& what) {
    throw DataError(what + " at line " + std::to_string(line_no) + " of " + std::string(source));
  };
  while (std::getline(in, raw)) {
    ++line_no;
    const std::string_view line = text::chomp(raw);
    if (line.find_first_not_of(" \t") == std::string_view::npos) continue;
    const auto tab = line.find('\t');
    if (tab == std::string_view::npos) fail("missing tab");
    const std::string_view label_text = line.substr(0, tab);
    int label = 0;
    const auto [end, ec] = std::from_chars(label_text.data(), label_text.data() + label_text.size(), label);
    if (ec != std::errc{} || end != label_text.data() + label_text.size()) fail("non-integer label");
    if (label < 0 || label >= static_cast<int>(kNumClasses)) fail("label out of range");
    std::string body;
    try {
      body = text::nfc(line.substr(tab + 1));
    } catch (const DataError& e) {
      fail(e.what());
    }
    corpus.add(make_doc(text::split_whitespace(body), label));
  }
  if (corpus.empty()) throw DataError("corpus " + std::string(source) + " is empty");
  return corpus;
}

Corpus load_corpus(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open corpus " + path.string());
  return parse_corpus(in, path.string());
}

void write_corpus(std::ostream& out, const Corpus& corpus) {
  for (const auto& d : corpus.docs()) out << d.label << '\t' << text::join(d.tokens, " ") << '\n';
}

void save_corpus(const std::filesystem::path& path, const Corpus& corpus) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw DataError("cannot write corpus " + path.string());
  write_corpus(out, corpus);
}

std::vector<LabeledDoc> parse_token_lines(std::istream& in) {
  std::vector<LabeledDoc> out;
  std::string raw;
  while (std::getline(in, raw)) {
    out.push_back(make_doc(text::split_whitespace(text::nfc(text::chomp(raw))), 0));
  }
  return out;
}

StopwordSet load_stopwords(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open stopword list " + path.string());
  StopwordSet set;
  std::string raw;
  while (std::getline(in, raw)) {
    auto words = text::split_whitespace(text::nfc(text::chomp(raw)));
    for (auto& w : words) set.words.insert(std::move(w));
  }
  return set;
}

LabeledDoc preprocess(const LabeledDoc& doc, const StopwordSet& stopwords) {
  std::vector<std::string> kept;
  kept.reserve(doc.tokens.size());
  for (const auto& t : doc.tokens) {
    if (!stopwords.contains(t)) kept.push_back(t);
  }
  return make_doc(std::move(kept), doc.label);
}

Corpus preprocess(const Corpus& corpus, const StopwordSet& stopwords) {
  Corpus out;
  for (const auto& d : corpus.docs()) out.add(preprocess(d, stopwords));
  return out;
}

namespace {

std::vector<std::size_t> shuffled_indices(std::vector<std::size_t> idx, Rng& rng) {
  for (std::size_t i = idx.size(); i > 1; --i) {
    std::uniform_int_distribution<std::size_t> pick(0, i - 1);
    std::swap(idx[i - 1], idx[pick(rng)]);
  }
  return idx;
}

}  // namespace

std::pair<Corpus, Corpus> split_train_test(const Corpus& corpus, const SplitOptions& opts) {
  if (!(opts.test_fraction > 0.0 && opts.test_fraction < 1.0)) {
    throw ConfigError("test fraction must lie in (0,1), got " + std::to_string(opts.test_fraction));
  }
  if (corpus.empty()) throw DataError("cannot split an empty corpus");
  const std::size_t n = corpus.size();
  const auto n_test = static_cast<std::size_t>(std::floor(opts.test_fraction * static_cast<double>(n)));
  Rng rng = derive_rng(opts.seed, "split");
  std::vector<bool> is_test(n, false);

  if (!opts.stratified) {
    std::vector<std::size_t> idx(n);
    std::iota(idx.begin(), idx.end(), 0);
    idx = shuffled_indices(std::move(idx), rng);
    for (std::size_t k = 0; k < n_test; ++k) is_test[idx[k]] = true;
  } else {
    // Per-class quotas by largest remainder so they add up to n_test.
    std::array<std::vector<std::size_t>, kNumClasses> members;
    for (std::size_t i = 0; i < n; ++i) members[static_cast<std::size_t>(corpus[i].label)].push_back(i);
    std::array<std::size_t, kNumClasses> quota{};
    std::array<double, kNumClasses> remainder{};
    std::size_t assigned = 0;
    for (std::size_t c = 0; c < kNumClasses; ++c) {
      const double exact = opts.test_fraction * static_cast<double>(members[c].size());
      quota[c] = static_cast<std::size_t>(std::floor(exact));
      remainder[c] = exact - static_cast<double>(quota[c]);
      assigned += quota[c];
    }
    std::array<std::size_t, kNumClasses> order{};
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](auto a, auto b) { return remainder[a] > remainder[b]; });
    for (std::size_t k = 0; assigned < n_test; k = (k + 1) % kNumClasses) {
      const auto c = order[k];
      if (quota[c] < members[c].size()) {
        ++quota[c];
        ++assigned;
      }
    }
    for (std::size_t c = 0; c < kNumClasses; ++c) {
      auto idx = shuffled_indices(members[c], rng);
      for (std::size_t k = 0; k < quota[c]; ++k) is_test[idx[k]] = true;
    }
  }

  Corpus train, test;
  for (std::size_t i = 0; i < n; ++i) (is_test[i] ? test : train).add(corpus[i]);
  return {std::move(train), std::move(test)};
}

}  // namespace sccl
