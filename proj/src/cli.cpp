#include "sccl/cli.hpp"

#include <fstream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "sccl/ablation.hpp"
#include "sccl/corpus.hpp"
#include "sccl/error.hpp"
#include "sccl/lexicon.hpp"
#include "sccl/metrics.hpp"
#include "sccl/model.hpp"
#include "sccl/text.hpp"
#include "sccl/train.hpp"

namespace sccl::cli {

namespace {

constexpr double kGradTolerance = 1e-4;

struct Options {
  std::string config;
  std::uint64_t seed = 0;
  std::string corpus;
  std::string lexicon;
  std::string checkpoint;
  std::string out;
  std::string variants;
  std::size_t auto_seeds = 0;
  std::size_t n_pos = 60;
  std::size_t n_neg = 60;
  std::string seeds;
  std::string report;
  std::string base_format = "tsv";
  std::string stopwords;
  std::string history;
  std::string target;
  std::string input;
  std::size_t candidates = 50;
  std::size_t min_count = 1;
  std::optional<std::size_t> epochs;
  bool validate = false;
  bool verbose = false;
};

/// Output file when --out is given, `fallback` otherwise.
class Sink {
 public:
  Sink(const std::string& path, std::ostream& fallback) : stream_(&fallback) {
    if (!path.empty()) {
      file_ = std::make_unique<std::ofstream>(path, std::ios::binary | std::ios::trunc);
      if (!*file_) throw DataError("cannot write " + path);
      stream_ = file_.get();
    }
  }
  std::ostream& get() { return *stream_; }

 private:
  std::unique_ptr<std::ofstream> file_;
  std::ostream* stream_;
};

void require(const std::string& value, const char* flag) {
  if (value.empty()) throw CLI::RequiredError(flag);
}

Corpus read_corpus(const std::string& path, const Options& o) {
  Corpus c = load_corpus(path);
  if (!o.stopwords.empty()) c = preprocess(c, load_stopwords(o.stopwords));
  return c;
}

Lexicon read_base_lexicon(const std::string& path, const std::string& format) {
  if (format == "hownet") return load_base_word_lists(path).first;
  return load_lexicon(path);
}

ModelConfig read_config(const Options& o) {
  ModelConfig cfg = o.config.empty() ? ModelConfig{} : load_config(o.config);
  cfg.seed = o.seed;
  if (o.epochs) cfg.train.epochs = *o.epochs;
  cfg.validate();
  return cfg;
}

LexiconPlan read_plan(const Options& o) {
  LexiconPlan plan;
  plan.base = read_base_lexicon(o.lexicon, o.base_format);
  if (!o.seeds.empty()) plan.seeds = load_seeds(o.seeds);
  else if (o.auto_seeds > 0) plan.auto_seed_count = o.auto_seeds;
  plan.n_pos = o.n_pos;
  plan.n_neg = o.n_neg;
  return plan;
}

int lexicon_build(const Options& o, std::ostream& out, std::ostream& err) {
  require(o.corpus, "--corpus");
  require(o.lexicon, "--lexicon");
  require(o.out, "--out");
  if (o.seeds.empty() == (o.auto_seeds == 0)) throw CLI::ValidationError("give exactly one of --seeds and --auto-seeds");
  const Corpus corpus = read_corpus(o.corpus, o);
  const Lexicon base = read_base_lexicon(o.lexicon, o.base_format);
  const CorpusStats stats = CorpusStats::build(corpus, o.min_count);
  const SeedSet seeds = o.seeds.empty() ? auto_seeds(stats, base, o.auto_seeds) : load_seeds(o.seeds);
  seeds.validate();
  const ExpansionResult res = expand_lexicon(base, seeds, stats, o.n_pos, o.n_neg);
  save_lexicon(o.out, res.lexicon);

  const std::string report = o.report.empty() ? o.out + ".candidates.tsv" : o.report;
  std::ofstream rep(report, std::ios::binary | std::ios::trunc);
  if (!rep) throw DataError("cannot write " + report);
  write_candidate_report(rep, rank_seed_candidates(stats, base, o.candidates));

  out << "base\t" << base.size() << "\nadded_pos\t" << res.added_pos << "\nadded_neg\t" << res.added_neg
      << "\nlexicon\t" << res.lexicon.size() << '\n';
  if (res.shortfall_pos + res.shortfall_neg > 0) {
    err << "warning: corpus supports only " << res.added_pos << " positive and " << res.added_neg
        << " negative additions (" << o.n_pos << " and " << o.n_neg << " requested)\n";
  }
  if (res.skipped_seeds > 0) err << "warning: " << res.skipped_seeds << " seed(s) do not occur in the corpus\n";
  return kExitOk;
}

int train_cmd(const Options& o, std::ostream& out, std::ostream& err) {
  require(o.corpus, "--corpus");
  require(o.checkpoint, "--checkpoint");
  const ModelConfig cfg = read_config(o);
  if (cfg.use_lexicon) require(o.lexicon, "--lexicon");
  Corpus corpus = read_corpus(o.corpus, o);
  Corpus validation;
  if (o.validate) {
    auto [tr, te] = split_train_test(
        corpus, {.test_fraction = cfg.data.test_fraction, .seed = cfg.seed, .stratified = cfg.data.stratified});
    corpus = std::move(tr);
    validation = std::move(te);
  }
  Lexicon lex = cfg.use_lexicon ? load_lexicon(o.lexicon) : Lexicon{};
  ScclModel model = ScclModel::build(cfg, corpus, std::move(lex));
  TrainOptions topts;
  topts.checkpoint = o.checkpoint;
  if (o.validate) topts.validation = &validation;
  if (o.verbose) {
    topts.on_epoch = [&](const EpochRecord& r) {
      err << "epoch " << r.epoch << " loss " << text::format_double(r.mean_loss) << " acc " << percent(r.train_accuracy)
          << '\n';
    };
  }
  const auto history = train(model, corpus, topts);
  const std::string hist_path = o.history.empty() ? o.checkpoint + ".history.tsv" : o.history;
  std::ofstream hist(hist_path, std::ios::binary | std::ios::trunc);
  if (!hist) throw DataError("cannot write " + hist_path);
  write_history(hist, history);
  out << "epochs\t" << history.size() << "\nfinal_loss\t" << text::format_double(history.back().mean_loss)
      << "\ntrain_acc\t" << percent(history.back().train_accuracy) << '\n';
  return kExitOk;
}

int eval_cmd(const Options& o, std::ostream& out) {
  require(o.checkpoint, "--checkpoint");
  require(o.corpus, "--corpus");
  const ScclModel model = ScclModel::load(o.checkpoint);
  const Metrics m = evaluate(model, read_corpus(o.corpus, o));
  Sink sink(o.out, out);
  write_metrics_header(sink.get());
  write_metrics_row(sink.get(), model.config().variant, m);
  if (o.verbose) write_metrics_detail(sink.get(), m);
  return kExitOk;
}

int predict_cmd(const Options& o, std::istream& in, std::ostream& out) {
  require(o.checkpoint, "--checkpoint");
  const ScclModel model = ScclModel::load(o.checkpoint);
  std::ifstream file;
  if (!o.input.empty()) {
    file.open(o.input);
    if (!file) throw DataError("cannot open " + o.input);
  }
  const auto docs = parse_token_lines(o.input.empty() ? in : file);
  Sink sink(o.out, out);
  for (const auto& doc : docs) {
    const auto p = model.distribution(doc);
    sink.get() << argmax(p);
    for (double v : p) sink.get() << '\t' << text::format_double(v);
    sink.get() << '\n';
  }
  return kExitOk;
}

int gradcheck_cmd(const Options& o, std::ostream& out) {
  ModelConfig cfg = o.config.empty() ? toy_config() : load_config(o.config);
  cfg.seed = o.seed;
  const GradCheckResult r = gradcheck_model(cfg);
  out << "max_rel_error\t" << text::format_double(r.max_rel_error) << "\nworst\t" << r.worst_param << '['
      << r.worst_index << "]\nanalytic\t" << text::format_double(r.worst_analytic) << "\nnumeric\t"
      << text::format_double(r.worst_numeric) << "\nentries\t" << r.entries_checked << '\n';
  return r.max_rel_error < kGradTolerance ? kExitOk : kExitCheck;
}

int ablate_cmd(const Options& o, std::ostream& out) {
  require(o.corpus, "--corpus");
  require(o.lexicon, "--lexicon");
  const ModelConfig cfg = read_config(o);
  std::vector<std::string> variants;
  if (o.variants.empty()) {
    variants = ablation_variants();
  } else {
    std::stringstream ss(o.variants);
    for (std::string v; std::getline(ss, v, ',');) variants.push_back(v);
  }
  const Corpus corpus = read_corpus(o.corpus, o);
  std::optional<Corpus> target;
  if (!o.target.empty()) target = read_corpus(o.target, o);
  const auto rows = run_ablation(cfg, variants, corpus, read_plan(o), target ? &*target : nullptr);
  Sink sink(o.out, out);
  write_ablation_table(sink.get(), rows);
  return kExitOk;
}

}  // namespace

int run(int argc, const char* const* argv, std::istream& in, std::ostream& out, std::ostream& err) {
  CLI::App app{"Sentiment classification with capsules and domain lexicons", "sccl"};
  app.require_subcommand(1);
  Options o;

  auto seed = [&](CLI::App* c) { c->add_option("--seed", o.seed, "random seed")->capture_default_str(); };
  auto verbose = [&](CLI::App* c) { c->add_flag("--verbose,-v", o.verbose, "more output"); };
  auto stop = [&](CLI::App* c) { c->add_option("--stopwords", o.stopwords, "stopword list applied to corpora"); };
  auto lexicon_source = [&](CLI::App* c) {
    c->add_option("--seeds", o.seeds, "seed file (word<TAB>pos|neg)");
    c->add_option("--auto-seeds", o.auto_seeds, "pick k seeds from the TF-IDF ranking");
    c->add_option("--n-pos", o.n_pos, "positive words to add")->capture_default_str();
    c->add_option("--n-neg", o.n_neg, "negative words to add")->capture_default_str();
    c->add_option("--base-format", o.base_format, "base lexicon layout")
        ->check(CLI::IsMember({"tsv", "hownet"}))
        ->capture_default_str();
  };

  auto* lb = app.add_subcommand("lexicon-build", "expand a base lexicon with corpus SO-PMI scores");
  lb->add_option("--corpus", o.corpus, "labeled corpus");
  lb->add_option("--lexicon", o.lexicon, "base lexicon");
  lb->add_option("--out", o.out, "expanded lexicon to write");
  lb->add_option("--report", o.report, "seed candidate report (default <out>.candidates.tsv)");
  lb->add_option("--candidates", o.candidates, "rows in the candidate report")->capture_default_str();
  lb->add_option("--min-count", o.min_count, "co-occurrence vocabulary cutoff")->capture_default_str();
  lexicon_source(lb);
  stop(lb);
  seed(lb);

  auto* tr = app.add_subcommand("train", "train a model and write a checkpoint");
  tr->add_option("--corpus", o.corpus, "labeled training corpus");
  tr->add_option("--lexicon", o.lexicon, "sentiment lexicon");
  tr->add_option("--config", o.config, "JSON model config");
  tr->add_option("--checkpoint", o.checkpoint, "checkpoint to write");
  tr->add_option("--history", o.history, "per-epoch history TSV (default <checkpoint>.history.tsv)");
  tr->add_option("--epochs", o.epochs, "override the configured epoch count");
  tr->add_flag("--validate", o.validate, "hold out the configured test fraction and score it every epoch");
  stop(tr);
  seed(tr);
  verbose(tr);

  auto* ev = app.add_subcommand("eval", "score a checkpoint on a labeled corpus");
  ev->add_option("--checkpoint", o.checkpoint, "model checkpoint");
  ev->add_option("--corpus", o.corpus, "labeled corpus");
  ev->add_option("--out", o.out, "metrics TSV (default stdout)");
  stop(ev);
  seed(ev);
  verbose(ev);

  auto* pr = app.add_subcommand("predict", "classify whitespace-tokenized lines");
  pr->add_option("--checkpoint", o.checkpoint, "model checkpoint");
  pr->add_option("--input", o.input, "input lines (default stdin)");
  pr->add_option("--out", o.out, "predictions (default stdout)");
  seed(pr);

  auto* gc = app.add_subcommand("gradcheck", "finite-difference check of the full model");
  gc->add_option("--config", o.config, "JSON model config (default toy dimensions)");
  seed(gc);

  auto* ab = app.add_subcommand("ablate", "train and score the ablation variants on one split");
  ab->add_option("--corpus", o.corpus, "labeled corpus");
  ab->add_option("--lexicon", o.lexicon, "base lexicon");
  ab->add_option("--config", o.config, "JSON model config");
  ab->add_option("--variants", o.variants, "comma-separated variant names (default all)");
  ab->add_option("--target", o.target, "extra target corpus scored by the full model");
  ab->add_option("--out", o.out, "table TSV (default stdout)");
  ab->add_option("--epochs", o.epochs, "override the configured epoch count");
  lexicon_source(ab);
  stop(ab);
  seed(ab);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (lb->parsed()) return lexicon_build(o, out, err);
    if (tr->parsed()) return train_cmd(o, out, err);
    if (ev->parsed()) return eval_cmd(o, out);
    if (pr->parsed()) return predict_cmd(o, in, out);
    if (gc->parsed()) return gradcheck_cmd(o, out);
    return ablate_cmd(o, out);
  } catch (const CLI::Error& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const ConfigError& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const DataError& e) {
    err << "error: " << e.what() << '\n';
    return kExitData;
  } catch (const DivergenceError& e) {
    err << "error: " << e.what() << '\n';
    return kExitCheck;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitData;
  }
}

}  // namespace sccl::cli
