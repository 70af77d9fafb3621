#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "sccl/corpus.hpp"
#include "sccl/lexicon.hpp"
#include "sccl/model.hpp"

namespace toy {

/// One lexicon word per class; the toy corpus puts it in every doc of the class.
const std::array<std::string, sccl::kNumClasses>& class_words();
sccl::Lexicon class_lexicon();

/// `n` docs cycling through the six classes: the class word plus two to four
/// filler tokens drawn from a shared pool.
sccl::Corpus class_corpus(std::size_t n, std::uint64_t seed = 0);

/// Config used by the learning-sanity run.
sccl::ModelConfig learning_config();

/// 50-doc corpus for the lexicon oracle. "赞" co-occurs only with positive
/// seeds and "烂" only with negative ones; other words are noise.
struct PlantedCorpus {
  sccl::Corpus corpus;
  sccl::SeedSet seeds;
  sccl::Lexicon base;
  std::string planted_pos = "赞";
  std::string planted_neg = "烂";
};
PlantedCorpus planted_corpus(std::uint64_t seed = 0);

/// Random corpus over a small vocabulary, for property tests.
sccl::Corpus random_corpus(std::size_t n_docs, std::size_t vocab, std::uint64_t seed);

/// Writes a corpus file with exactly `counts[c]` docs of class c.
void write_counted_corpus(const std::filesystem::path& path, const std::array<std::size_t, sccl::kNumClasses>& counts,
                          std::uint64_t seed);

/// Class sizes of the reference training file.
inline constexpr std::array<std::size_t, sccl::kNumClasses> kTrainCounts{13993, 6697, 5348, 5978, 3167, 4950};
/// 2000 docs in the training proportions (largest remainder).
inline constexpr std::array<std::size_t, sccl::kNumClasses> kTargetCounts{697, 334, 266, 298, 158, 247};

/// Scratch directory removed on destruction.
class TempDir {
 public:
  TempDir();
  ~TempDir();
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;
  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

 private:
  std::filesystem::path path_;
};

std::string read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, const std::string& content);

}  // namespace toy
