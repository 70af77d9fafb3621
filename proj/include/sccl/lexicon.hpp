#pragma once

#include <cstdint>
#include <filesystem>
#include <istream>
#include <map>
#include <optional>
#include <ostream>
#include <set>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "sccl/corpus.hpp"

namespace sccl {

enum class Polarity : int { Negative = -1, Positive = 1 };
enum class EntrySource { Base, Expanded };

struct LexiconEntry {
  Polarity polarity = Polarity::Positive;
  double score = 0.0;
  EntrySource source = EntrySource::Base;

  bool operator==(const LexiconEntry&) const = default;
};

/// Word -> polarity map; each word has exactly one entry.
class Lexicon {
 public:
  /// Returns false (and leaves the lexicon unchanged) when the word exists.
  bool add(const std::string& word, LexiconEntry entry);
  const LexiconEntry* find(const std::string& word) const;
  bool contains(const std::string& word) const { return entries_.count(word) != 0; }
  std::size_t size() const { return entries_.size(); }
  std::size_t count(EntrySource source) const;
  std::size_t count(Polarity polarity) const;
  const std::map<std::string, LexiconEntry>& entries() const { return entries_; }

  bool operator==(const Lexicon&) const = default;

 private:
  std::map<std::string, LexiconEntry> entries_;
};

/// `<word>\t<+1|-1>\t<score>\t<base|expanded>` per line. Scores are written
/// in shortest round-trip form so save/load is lossless.
void write_lexicon(std::ostream& out, const Lexicon& lex);
Lexicon parse_lexicon(std::istream& in, std::string_view source = "<stream>");
void save_lexicon(const std::filesystem::path& path, const Lexicon& lex);
Lexicon load_lexicon(const std::filesystem::path& path);

/// Group sizes of a HowNet-shaped word-list file.
struct BaseListCounts {
  std::size_t positive_evaluation = 0;
  std::size_t negative_evaluation = 0;
  std::size_t positive_emotion = 0;
  std::size_t negative_emotion = 0;
  std::size_t duplicates = 0;  // repeated words with agreeing polarity, merged
};

/// Reads a base lexicon laid out as sections of one word per line, each
/// section introduced by a header line `# positive-evaluation`,
/// `# negative-evaluation`, `# positive-emotion` or `# negative-emotion`.
/// A word listed under both polarities is an error.
std::pair<Lexicon, BaseListCounts> load_base_word_lists(const std::filesystem::path& path);
std::pair<Lexicon, BaseListCounts> parse_base_word_lists(std::istream& in, std::string_view source = "<stream>");

/// Document-level counts over a corpus. Words are interned to dense ids in
/// lexicographic order.
class CorpusStats {
 public:
  /// Words with fewer than `vocab_min_count` total occurrences keep their
  /// document frequency but are left out of the co-occurrence table.
  static CorpusStats build(const Corpus& corpus, std::size_t vocab_min_count = 1);

  std::size_t n_docs() const { return n_docs_; }
  std::size_t vocab_size() const { return words_.size(); }
  const std::vector<std::string>& words() const { return words_; }
  bool contains(const std::string& w) const { return ids_.count(w) != 0; }
  std::optional<std::size_t> id(const std::string& w) const;

  std::size_t doc_freq(const std::string& w) const;
  std::size_t term_freq(const std::string& w) const;
  std::size_t total_terms() const { return total_terms_; }
  /// Number of docs containing both words (symmetric); for w1 == w2 this is
  /// doc_freq when the word takes part in co-occurrence counting.
  std::size_t cooc(const std::string& w1, const std::string& w2) const;

  std::size_t doc_freq(std::size_t id) const { return doc_freq_[id]; }
  std::size_t term_freq(std::size_t id) const { return term_freq_[id]; }
  std::size_t cooc(std::size_t a, std::size_t b) const;

  /// Test hook: overwrite one pair count, e.g. to probe monotonicity.
  void set_cooc(const std::string& w1, const std::string& w2, std::size_t count);

 private:
  std::size_t require(const std::string& w) const;
  static std::uint64_t pair_key(std::size_t a, std::size_t b);

  std::size_t n_docs_ = 0;
  std::size_t total_terms_ = 0;
  std::vector<std::string> words_;
  std::unordered_map<std::string, std::size_t> ids_;
  std::vector<std::size_t> doc_freq_;
  std::vector<std::size_t> term_freq_;
  std::vector<bool> in_cooc_;
  std::unordered_map<std::uint64_t, std::size_t> cooc_;
};

/// score(w) = term_freq(w) / sum(term_freq) * ln(n_docs / doc_freq(w))
std::map<std::string, double> tf_idf(const CorpusStats& stats);

struct ScoredWord {
  std::string word;
  double score = 0.0;
};

/// All words by descending TF-IDF, ties broken lexicographically.
std::vector<ScoredWord> rank_by_tf_idf(const CorpusStats& stats);

/// log2[P(w1,w2) / (P(w1) P(w2))] with document-level probabilities; zero
/// when the pair never co-occurs. Throws DataError for an unknown word.
double pmi(const std::string& w1, const std::string& w2, const CorpusStats& stats);

struct SeedSet {
  std::set<std::string> pos;
  std::set<std::string> neg;

  /// Throws ConfigError when the sets overlap or one is empty.
  void validate() const;
};

/// `<word>\t<pos|neg>` per line.
SeedSet parse_seeds(std::istream& in, std::string_view source = "<stream>");
SeedSet load_seeds(const std::filesystem::path& path);
void write_seeds(std::ostream& out, const SeedSet& seeds);

struct SoPmiResult {
  double score = 0.0;
  std::size_t skipped_seeds = 0;  // seeds absent from the corpus statistics
};

/// Sum of PMI with positive seeds minus sum of PMI with negative seeds.
SoPmiResult so_pmi(const std::string& word, const SeedSet& seeds, const CorpusStats& stats);

struct SeedCandidate {
  std::string word;
  double tf_idf = 0.0;
  std::optional<Polarity> base_polarity;
};

struct CandidateRanking {
  std::vector<SeedCandidate> items;
  bool truncated = false;  // fewer words than requested exist
};

/// Top-k TF-IDF words annotated with base-lexicon polarity, for manual seed curation.
CandidateRanking rank_seed_candidates(const CorpusStats& stats, const Lexicon& base, std::size_t k);

/// TSV report with a header row: rank, word, tf_idf, base_polarity.
void write_candidate_report(std::ostream& out, const CandidateRanking& ranking);

/// Non-interactive seed choice: walks the TF-IDF ranking and keeps the first
/// k/2 words with positive base polarity and the first k - k/2 with negative.
SeedSet auto_seeds(const CorpusStats& stats, const Lexicon& base, std::size_t k);

struct ExpansionResult {
  Lexicon lexicon;
  std::size_t added_pos = 0;
  std::size_t added_neg = 0;
  std::size_t shortfall_pos = 0;
  std::size_t shortfall_neg = 0;
  std::size_t skipped_seeds = 0;
};

/// Scores every corpus word outside the base lexicon and the seeds by SO-PMI;
/// the n_pos highest positive scorers enter as +1 and the n_neg lowest
/// negative scorers as -1. Words with score exactly 0 carry no orientation
/// and are never added. Base entries are never overwritten.
ExpansionResult expand_lexicon(const Lexicon& base, const SeedSet& seeds, const CorpusStats& stats,
                               std::size_t n_pos, std::size_t n_neg);

inline constexpr std::string_view kNullSentiment = "<NULLSENT>";

struct SentimentSeq {
  std::vector<std::string> words;
  std::vector<int> polarity;  // +1 / -1, 0 for the NULLSENT sentinel

  bool is_null() const { return words.size() == 1 && words[0] == kNullSentiment; }
};

/// Lexicon hits in document order (repeats kept); no hits gives [<NULLSENT>].
SentimentSeq extract_sentiment_sequence(const LabeledDoc& doc, const Lexicon& lex);

}  // namespace sccl
