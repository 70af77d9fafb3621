#include "sccl/lexicon.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

#include "sccl/error.hpp"
#include "sccl/text.hpp"

namespace sccl {

// ---------------------------------------------------------------- Lexicon

bool Lexicon::add(const std::string& word, LexiconEntry entry) {
  return entries_.emplace(word, entry).second;
}

const LexiconEntry* Lexicon::find(const std::string& word) const {
  auto it = entries_.find(word);
  return it == entries_.end() ? nullptr : &it->second;
}

std::size_t Lexicon::count(EntrySource source) const {
  return static_cast<std::size_t>(
      std::count_if(entries_.begin(), entries_.end(), [&](const auto& kv) { return kv.second.source == source; }));
}

std::size_t Lexicon::count(Polarity polarity) const {
  return static_cast<std::size_t>(std::count_if(entries_.begin(), entries_.end(),
                                                [&](const auto& kv) { return kv.second.polarity == polarity; }));
}

void write_lexicon(std::ostream& out, const Lexicon& lex) {
  for (const auto& [word, e] : lex.entries()) {
    out << word << '\t' << (e.polarity == Polarity::Positive ? "+1" : "-1") << '\t'
        << text::format_double(e.score) << '\t' << (e.source == EntrySource::Base ? "base" : "expanded") << '\n';
  }
}

Lexicon parse_lexicon(std::istream& in, std::string_view source) {
  Lexicon lex;
  std::string raw;
  std::size_t line_no = 0;
  auto fail = [&](const std::string& what) {
    throw DataError("lexicon " + std::string(source) + ": " + what + " at line " + std::to_string(line_no));
  };
  while (std::getline(in, raw)) {
    ++line_no;
    const auto line = text::chomp(raw);
    if (line.empty()) continue;
    std::vector<std::string_view> fields;
    std::size_t start = 0;
    while (true) {
      const auto tab = line.find('\t', start);
      fields.push_back(line.substr(start, tab == std::string_view::npos ? std::string_view::npos : tab - start));
      if (tab == std::string_view::npos) break;
      start = tab + 1;
    }
    // Two-column `<word>\t<+1|-1>` lines are accepted as base entries with score 0.
    if (fields.size() != 4 && fields.size() != 2) fail("expected 4 tab-separated fields");
    if (fields[0].empty()) fail("empty word");
    LexiconEntry e;
    if (fields[1] == "+1" || fields[1] == "1") e.polarity = Polarity::Positive;
    else if (fields[1] == "-1") e.polarity = Polarity::Negative;
    else fail("polarity must be +1 or -1");
    if (fields.size() == 4) {
      const auto score = text::parse_double(fields[2]);
      if (!score) fail("malformed score");
      e.score = *score;
      if (fields[3] == "base") e.source = EntrySource::Base;
      else if (fields[3] == "expanded") e.source = EntrySource::Expanded;
      else fail("source must be base or expanded");
    }
    if (!lex.add(text::nfc(fields[0]), e)) fail("duplicate word '" + std::string(fields[0]) + "'");
  }
  return lex;
}

void save_lexicon(const std::filesystem::path& path, const Lexicon& lex) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw DataError("cannot write lexicon " + path.string());
  write_lexicon(out, lex);
}

Lexicon load_lexicon(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open lexicon " + path.string());
  return parse_lexicon(in, path.string());
}

std::pair<Lexicon, BaseListCounts> parse_base_word_lists(std::istream& in, std::string_view source) {
  Lexicon lex;
  BaseListCounts counts;
  std::size_t* group = nullptr;
  Polarity polarity = Polarity::Positive;
  std::string raw;
  std::size_t line_no = 0;
  auto fail = [&](const std::string& what) {
    throw DataError("word lists " + std::string(source) + ": " + what + " at line " + std::to_string(line_no));
  };
  while (std::getline(in, raw)) {
    ++line_no;
    auto line = text::chomp(raw);
    const auto first = line.find_first_not_of(" \t");
    if (first == std::string_view::npos) continue;
    line = line.substr(first, line.find_last_not_of(" \t") - first + 1);
    if (line.front() == '#') {
      auto name = line.substr(1);
      name.remove_prefix(std::min(name.find_first_not_of(' '), name.size()));
      if (name == "positive-evaluation") group = &counts.positive_evaluation, polarity = Polarity::Positive;
      else if (name == "negative-evaluation") group = &counts.negative_evaluation, polarity = Polarity::Negative;
      else if (name == "positive-emotion") group = &counts.positive_emotion, polarity = Polarity::Positive;
      else if (name == "negative-emotion") group = &counts.negative_emotion, polarity = Polarity::Negative;
      else fail("unknown section '" + std::string(name) + "'");
      continue;
    }
    if (!group) fail("word before any section header");
    const std::string word = text::nfc(line);
    if (const auto* prior = lex.find(word)) {
      if (prior->polarity != polarity) fail("word '" + word + "' listed with both polarities");
      ++counts.duplicates;
      continue;
    }
    lex.add(word, LexiconEntry{polarity, 0.0, EntrySource::Base});
    ++*group;
  }
  return {std::move(lex), counts};
}

std::pair<Lexicon, BaseListCounts> load_base_word_lists(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open word lists " + path.string());
  return parse_base_word_lists(in, path.string());
}

// ------------------------------------------------------------ CorpusStats

CorpusStats CorpusStats::build(const Corpus& corpus, std::size_t vocab_min_count) {
  if (corpus.empty()) throw DataError("corpus statistics need at least one document");
  std::map<std::string, std::size_t> tf;
  for (const auto& d : corpus.docs())
    for (const auto& t : d.tokens) ++tf[t];

  CorpusStats s;
  s.n_docs_ = corpus.size();
  s.words_.reserve(tf.size());
  for (const auto& [w, n] : tf) {
    s.ids_.emplace(w, s.words_.size());
    s.words_.push_back(w);
    s.term_freq_.push_back(n);
    s.in_cooc_.push_back(n >= vocab_min_count);
    s.total_terms_ += n;
  }
  s.doc_freq_.assign(s.words_.size(), 0);

  std::vector<std::size_t> ids;
  for (const auto& d : corpus.docs()) {
    ids.clear();
    for (const auto& t : d.tokens) ids.push_back(s.ids_.at(t));
    std::sort(ids.begin(), ids.end());
    ids.erase(std::unique(ids.begin(), ids.end()), ids.end());
    for (auto id : ids) ++s.doc_freq_[id];
    std::erase_if(ids, [&](std::size_t id) { return !s.in_cooc_[id]; });
    for (std::size_t a = 0; a < ids.size(); ++a)
      for (std::size_t b = a + 1; b < ids.size(); ++b) ++s.cooc_[pair_key(ids[a], ids[b])];
  }
  return s;
}

std::uint64_t CorpusStats::pair_key(std::size_t a, std::size_t b) {
  if (a > b) std::swap(a, b);
  return (static_cast<std::uint64_t>(a) << 32) | static_cast<std::uint64_t>(b);
}

std::optional<std::size_t> CorpusStats::id(const std::string& w) const {
  auto it = ids_.find(w);
  if (it == ids_.end()) return std::nullopt;
  return it->second;
}

std::size_t CorpusStats::require(const std::string& w) const {
  auto it = ids_.find(w);
  if (it == ids_.end()) throw DataError("unknown word '" + w + "'");
  return it->second;
}

std::size_t CorpusStats::doc_freq(const std::string& w) const { return doc_freq_[require(w)]; }

std::size_t CorpusStats::term_freq(const std::string& w) const { return term_freq_[require(w)]; }

std::size_t CorpusStats::cooc(const std::string& w1, const std::string& w2) const {
  return cooc(require(w1), require(w2));
}

std::size_t CorpusStats::cooc(std::size_t a, std::size_t b) const {
  if (!in_cooc_[a] || !in_cooc_[b]) return 0;
  if (a == b) return doc_freq_[a];
  auto it = cooc_.find(pair_key(a, b));
  return it == cooc_.end() ? 0 : it->second;
}

void CorpusStats::set_cooc(const std::string& w1, const std::string& w2, std::size_t count) {
  const auto a = require(w1), b = require(w2);
  if (a == b) throw DataError("set_cooc needs two distinct words");
  cooc_[pair_key(a, b)] = count;
}

// ------------------------------------------------------------------ scores

std::map<std::string, double> tf_idf(const CorpusStats& stats) {
  std::map<std::string, double> out;
  const double total = static_cast<double>(stats.total_terms());
  const double n = static_cast<double>(stats.n_docs());
  for (std::size_t id = 0; id < stats.vocab_size(); ++id) {
    const double tf = static_cast<double>(stats.term_freq(id)) / total;
    out.emplace(stats.words()[id], tf * std::log(n / static_cast<double>(stats.doc_freq(id))));
  }
  return out;
}

std::vector<ScoredWord> rank_by_tf_idf(const CorpusStats& stats) {
  std::vector<ScoredWord> ranked;
  for (auto& [w, s] : tf_idf(stats)) ranked.push_back({w, s});
  std::stable_sort(ranked.begin(), ranked.end(),
                   [](const ScoredWord& a, const ScoredWord& b) { return a.score > b.score; });
  return ranked;  // tf_idf() iterates in word order, so ties stay lexicographic
}

namespace {

double pmi_by_id(std::size_t a, std::size_t b, const CorpusStats& stats) {
  const std::size_t joint = stats.cooc(a, b);
  if (joint == 0) return 0.0;
  const double n = static_cast<double>(stats.n_docs());
  const double p12 = static_cast<double>(joint) / n;
  const double p1 = static_cast<double>(stats.doc_freq(a)) / n;
  const double p2 = static_cast<double>(stats.doc_freq(b)) / n;
  return std::log2(p12 / (p1 * p2));
}

}  // namespace

double pmi(const std::string& w1, const std::string& w2, const CorpusStats& stats) {
  const auto a = stats.id(w1);
  if (!a) throw DataError("pmi: unknown word '" + w1 + "'");
  const auto b = stats.id(w2);
  if (!b) throw DataError("pmi: unknown word '" + w2 + "'");
  return pmi_by_id(*a, *b, stats);
}

void SeedSet::validate() const {
  if (pos.empty() || neg.empty()) throw ConfigError("seed set needs both positive and negative seeds");
  for (const auto& w : pos) {
    if (neg.count(w)) throw ConfigError("seed '" + w + "' is both positive and negative");
  }
}

SeedSet parse_seeds(std::istream& in, std::string_view source) {
  SeedSet seeds;
  std::string raw;
  std::size_t line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    const auto line = text::chomp(raw);
    if (line.empty()) continue;
    const auto tab = line.find('\t');
    const auto tag = tab == std::string_view::npos ? std::string_view{} : line.substr(tab + 1);
    if (tab == 0 || (tag != "pos" && tag != "neg")) {
      throw DataError("seeds " + std::string(source) + ": expected `<word>\\t<pos|neg>` at line " +
                      std::to_string(line_no));
    }
    (tag == "pos" ? seeds.pos : seeds.neg).insert(text::nfc(line.substr(0, tab)));
  }
  return seeds;
}

SeedSet load_seeds(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open seeds " + path.string());
  return parse_seeds(in, path.string());
}

void write_seeds(std::ostream& out, const SeedSet& seeds) {
  for (const auto& w : seeds.pos) out << w << "\tpos\n";
  for (const auto& w : seeds.neg) out << w << "\tneg\n";
}

namespace {

struct ResolvedSeeds {
  std::vector<std::size_t> pos;
  std::vector<std::size_t> neg;
  std::size_t skipped = 0;
};

ResolvedSeeds resolve(const SeedSet& seeds, const CorpusStats& stats) {
  seeds.validate();
  ResolvedSeeds r;
  for (const auto& w : seeds.pos) {
    if (auto id = stats.id(w)) r.pos.push_back(*id);
    else ++r.skipped;
  }
  for (const auto& w : seeds.neg) {
    if (auto id = stats.id(w)) r.neg.push_back(*id);
    else ++r.skipped;
  }
  return r;
}

double so_pmi_by_id(std::size_t word, const ResolvedSeeds& seeds, const CorpusStats& stats) {
  double pos = 0.0, neg = 0.0;
  for (auto s : seeds.pos) pos += pmi_by_id(word, s, stats);
  for (auto s : seeds.neg) neg += pmi_by_id(word, s, stats);
  return pos - neg;
}

}  // namespace

SoPmiResult so_pmi(const std::string& word, const SeedSet& seeds, const CorpusStats& stats) {
  const auto id = stats.id(word);
  if (!id) throw DataError("so_pmi: unknown word '" + word + "'");
  const auto resolved = resolve(seeds, stats);
  return {so_pmi_by_id(*id, resolved, stats), resolved.skipped};
}

CandidateRanking rank_seed_candidates(const CorpusStats& stats, const Lexicon& base, std::size_t k) {
  auto ranked = rank_by_tf_idf(stats);
  CandidateRanking out;
  out.truncated = k > ranked.size();
  const std::size_t n = std::min(k, ranked.size());
  out.items.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    SeedCandidate c{ranked[i].word, ranked[i].score, std::nullopt};
    if (const auto* e = base.find(c.word)) c.base_polarity = e->polarity;
    out.items.push_back(std::move(c));
  }
  return out;
}

void write_candidate_report(std::ostream& out, const CandidateRanking& ranking) {
  out << "rank\tword\ttf_idf\tbase_polarity\n";
  for (std::size_t i = 0; i < ranking.items.size(); ++i) {
    const auto& c = ranking.items[i];
    out << (i + 1) << '\t' << c.word << '\t' << text::format_double(c.tf_idf) << '\t';
    if (c.base_polarity) out << (*c.base_polarity == Polarity::Positive ? "+1" : "-1");
    out << '\n';
  }
}

SeedSet auto_seeds(const CorpusStats& stats, const Lexicon& base, std::size_t k) {
  const std::size_t want_pos = k / 2, want_neg = k - k / 2;
  SeedSet seeds;
  for (const auto& sw : rank_by_tf_idf(stats)) {
    if (seeds.pos.size() == want_pos && seeds.neg.size() == want_neg) break;
    const auto* e = base.find(sw.word);
    if (!e) continue;
    if (e->polarity == Polarity::Positive && seeds.pos.size() < want_pos) seeds.pos.insert(sw.word);
    if (e->polarity == Polarity::Negative && seeds.neg.size() < want_neg) seeds.neg.insert(sw.word);
  }
  return seeds;
}

ExpansionResult expand_lexicon(const Lexicon& base, const SeedSet& seeds, const CorpusStats& stats,
                               std::size_t n_pos, std::size_t n_neg) {
  ExpansionResult result;
  result.lexicon = base;
  if (n_pos == 0 && n_neg == 0) return result;

  const auto resolved = resolve(seeds, stats);
  result.skipped_seeds = resolved.skipped;
  std::vector<ScoredWord> positive, negative;
  for (std::size_t id = 0; id < stats.vocab_size(); ++id) {
    const auto& w = stats.words()[id];
    if (base.contains(w) || seeds.pos.count(w) || seeds.neg.count(w)) continue;
    const double score = so_pmi_by_id(id, resolved, stats);
    if (score > 0.0) positive.push_back({w, score});
    else if (score < 0.0) negative.push_back({w, score});
  }
  // Word ids are lexicographic, so stable sorts break ties by word.
  std::stable_sort(positive.begin(), positive.end(), [](auto& a, auto& b) { return a.score > b.score; });
  std::stable_sort(negative.begin(), negative.end(), [](auto& a, auto& b) { return a.score < b.score; });

  result.added_pos = std::min(n_pos, positive.size());
  result.added_neg = std::min(n_neg, negative.size());
  result.shortfall_pos = n_pos - result.added_pos;
  result.shortfall_neg = n_neg - result.added_neg;
  for (std::size_t i = 0; i < result.added_pos; ++i) {
    result.lexicon.add(positive[i].word, {Polarity::Positive, positive[i].score, EntrySource::Expanded});
  }
  for (std::size_t i = 0; i < result.added_neg; ++i) {
    result.lexicon.add(negative[i].word, {Polarity::Negative, negative[i].score, EntrySource::Expanded});
  }
  return result;
}

SentimentSeq extract_sentiment_sequence(const LabeledDoc& doc, const Lexicon& lex) {
  SentimentSeq seq;
  for (const auto& t : doc.tokens) {
    if (const auto* e = lex.find(t)) {
      seq.words.push_back(t);
      seq.polarity.push_back(static_cast<int>(e->polarity));
    }
  }
  if (seq.words.empty()) {
    seq.words.emplace_back(kNullSentiment);
    seq.polarity.push_back(0);
  }
  return seq;
}

}  // namespace sccl
