#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <istream>
#include <ostream>
#include <string>
#include <string_view>
#include <unordered_set>
#include <utility>
#include <vector>

namespace sccl {

inline constexpr std::size_t kNumClasses = 6;

/// Emotion label schema of the Weibo review data.
enum class Emotion : int { Null = 0, Like = 1, Sad = 2, Disgust = 3, Anger = 4, Happiness = 5 };

std::string_view emotion_name(int label);

struct LabeledDoc {
  std::vector<std::string> tokens;
  std::vector<std::string> chars;  // code points of the concatenated tokens
  int label = 0;
  bool degenerate = false;  // no tokens survived preprocessing

  bool operator==(const LabeledDoc&) const = default;
};

/// Builds a doc from tokens, deriving the character sequence.
LabeledDoc make_doc(std::vector<std::string> tokens, int label);

class Corpus {
 public:
  Corpus() = default;
  explicit Corpus(std::vector<LabeledDoc> docs);

  void add(LabeledDoc doc);
  const std::vector<LabeledDoc>& docs() const { return docs_; }
  const std::array<std::size_t, kNumClasses>& class_counts() const { return class_counts_; }
  std::size_t size() const { return docs_.size(); }
  bool empty() const { return docs_.empty(); }
  const LabeledDoc& operator[](std::size_t i) const { return docs_[i]; }

  bool operator==(const Corpus&) const = default;

 private:
  std::vector<LabeledDoc> docs_;
  std::array<std::size_t, kNumClasses> class_counts_{};
};

/// One doc per line: `<label>\t<space-separated tokens>`, UTF-8, NFC-normalized
/// on load. Errors name the offending 1-based line.
Corpus parse_corpus(std::istream& in, std::string_view source = "<stream>");
Corpus load_corpus(const std::filesystem::path& path);
void write_corpus(std::ostream& out, const Corpus& corpus);
void save_corpus(const std::filesystem::path& path, const Corpus& corpus);

/// Unlabeled token lines (prediction input); blank lines become empty docs.
std::vector<LabeledDoc> parse_token_lines(std::istream& in);

struct StopwordSet {
  std::unordered_set<std::string> words;
  bool contains(const std::string& w) const { return words.count(w) != 0; }
};

StopwordSet load_stopwords(const std::filesystem::path& path);

LabeledDoc preprocess(const LabeledDoc& doc, const StopwordSet& stopwords);
Corpus preprocess(const Corpus& corpus, const StopwordSet& stopwords);

struct SplitOptions {
  double test_fraction = 0.1;
  std::uint64_t seed = 0;
  bool stratified = false;
};

/// Returns (train, test). The test part holds floor(fraction * N) docs picked
/// by a seeded permutation; both parts keep input order.
std::pair<Corpus, Corpus> split_train_test(const Corpus& corpus, const SplitOptions& opts);

}  // namespace sccl
