#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include <sstream>

#include "sccl/ablation.hpp"
#include "sccl/capsule.hpp"
#include "sccl/cli.hpp"
#include "sccl/corpus.hpp"
#include "sccl/error.hpp"
#include "sccl/gru.hpp"
#include "sccl/lexicon.hpp"
#include "sccl/metrics.hpp"
#include "sccl/model.hpp"
#include "sccl/ops.hpp"
#include "sccl/train.hpp"

namespace py = pybind11;
using namespace sccl;

namespace {

Tensor matrix(const std::vector<std::vector<double>>& rows) {
  if (rows.empty()) throw ShapeError("expected a non-empty matrix");
  std::vector<double> flat;
  for (const auto& r : rows) {
    if (r.size() != rows.front().size()) throw ShapeError("ragged matrix");
    flat.insert(flat.end(), r.begin(), r.end());
  }
  return Tensor::constant({rows.size(), rows.front().size()}, std::move(flat));
}

std::vector<std::vector<double>> rows_of(const Tensor& t) {
  const std::size_t cols = t.dim(1);
  std::vector<std::vector<double>> out(t.dim(0));
  for (std::size_t i = 0; i < out.size(); ++i) out[i].assign(t.data().begin() + i * cols, t.data().begin() + (i + 1) * cols);
  return out;
}

Corpus corpus_from(const std::vector<std::pair<int, std::vector<std::string>>>& docs) {
  Corpus c;
  for (const auto& [label, tokens] : docs) c.add(make_doc(tokens, label));
  return c;
}

std::vector<std::pair<int, std::vector<std::string>>> docs_of(const Corpus& c) {
  std::vector<std::pair<int, std::vector<std::string>>> out;
  for (const auto& d : c.docs()) out.emplace_back(d.label, d.tokens);
  return out;
}

py::dict metrics_dict(const Metrics& m) {
  py::dict d;
  d["accuracy"] = m.accuracy;
  d["macro_f1"] = m.macro_f1;
  d["micro_f1"] = m.micro_f1;
  d["f1"] = m.f1;
  d["support"] = m.support;
  d["zero_support"] = m.zero_support;
  d["confusion"] = m.confusion;
  return d;
}

std::map<std::string, std::pair<int, double>> lexicon_dict(const Lexicon& lex) {
  std::map<std::string, std::pair<int, double>> out;
  for (const auto& [w, e] : lex.entries()) out[w] = {static_cast<int>(e.polarity), e.score};
  return out;
}

Lexicon lexicon_from(const std::map<std::string, int>& words) {
  Lexicon lex;
  for (const auto& [w, p] : words) {
    if (p != 1 && p != -1) throw ConfigError("polarity of '" + w + "' must be +1 or -1");
    lex.add(w, {p > 0 ? Polarity::Positive : Polarity::Negative, 0.0, EntrySource::Base});
  }
  return lex;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Dual-route sentiment classifier: corpus, lexicon expansion, model training";

  py::register_exception<DataError>(m, "DataError", PyExc_ValueError);
  py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);
  py::register_exception<ShapeError>(m, "ShapeError", PyExc_ValueError);
  py::register_exception<DivergenceError>(m, "DivergenceError", PyExc_RuntimeError);

  m.attr("NUM_CLASSES") = kNumClasses;
  m.def("emotion_name", [](int label) { return std::string(emotion_name(label)); });

  py::class_<Corpus>(m, "Corpus")
      .def(py::init(&corpus_from), py::arg("docs"))
      .def_static("load", &load_corpus, py::arg("path"))
      .def("save", [](const Corpus& c, const std::filesystem::path& p) { save_corpus(p, c); })
      .def("__len__", &Corpus::size)
      .def_property_readonly("class_counts", &Corpus::class_counts)
      .def_property_readonly("docs", &docs_of)
      .def(
          "split",
          [](const Corpus& c, double fraction, std::uint64_t seed, bool stratified) {
            return split_train_test(c, {.test_fraction = fraction, .seed = seed, .stratified = stratified});
          },
          py::arg("fraction") = 0.1, py::arg("seed") = 0, py::arg("stratified") = false);

  py::class_<Lexicon>(m, "Lexicon")
      .def(py::init(&lexicon_from), py::arg("words"))
      .def_static("load", &load_lexicon, py::arg("path"))
      .def_static(
          "load_word_lists", [](const std::filesystem::path& p) { return load_base_word_lists(p).first; },
          py::arg("path"))
      .def("save", [](const Lexicon& l, const std::filesystem::path& p) { save_lexicon(p, l); })
      .def("__len__", &Lexicon::size)
      .def("__contains__", &Lexicon::contains)
      .def("entries", &lexicon_dict)
      .def(
          "sentiment_sequence",
          [](const Lexicon& l, const std::vector<std::string>& tokens) {
            return extract_sentiment_sequence(make_doc(tokens, 0), l).words;
          },
          py::arg("tokens"));

  py::class_<CorpusStats>(m, "CorpusStats")
      .def(py::init([](const Corpus& c, std::size_t min_count) { return CorpusStats::build(c, min_count); }),
           py::arg("corpus"), py::arg("min_count") = 1)
      .def_property_readonly("n_docs", &CorpusStats::n_docs)
      .def_property_readonly("words", &CorpusStats::words)
      .def("doc_freq", py::overload_cast<const std::string&>(&CorpusStats::doc_freq, py::const_))
      .def("cooc", py::overload_cast<const std::string&, const std::string&>(&CorpusStats::cooc, py::const_))
      .def("tf_idf", [](const CorpusStats& s) { return tf_idf(s); })
      .def("pmi", [](const CorpusStats& s, const std::string& a, const std::string& b) { return pmi(a, b, s); })
      .def(
          "so_pmi",
          [](const CorpusStats& s, const std::string& w, const std::set<std::string>& pos,
             const std::set<std::string>& neg) { return so_pmi(w, SeedSet{pos, neg}, s).score; },
          py::arg("word"), py::arg("pos"), py::arg("neg"));

  m.def(
      "expand_lexicon",
      [](const Lexicon& base, const std::set<std::string>& pos, const std::set<std::string>& neg,
         const CorpusStats& stats, std::size_t n_pos, std::size_t n_neg) {
        SeedSet seeds{pos, neg};
        seeds.validate();
        auto r = expand_lexicon(base, seeds, stats, n_pos, n_neg);
        return py::make_tuple(r.lexicon, r.added_pos, r.added_neg);
      },
      py::arg("base"), py::arg("pos"), py::arg("neg"), py::arg("stats"), py::arg("n_pos") = 60,
      py::arg("n_neg") = 60);

  m.def(
      "squash", [](const std::vector<double>& s) { return capsule::squash(Tensor::constant({s.size()}, s)).to_vector(); },
      py::arg("s"));
  m.def(
      "dynamic_routing",
      [](const std::vector<std::vector<std::vector<double>>>& u_hat, std::size_t iters) {
        const std::size_t n_in = u_hat.size(), n_out = u_hat.at(0).size(), d = u_hat.at(0).at(0).size();
        std::vector<double> flat;
        for (const auto& a : u_hat) {
          if (a.size() != n_out) throw ShapeError("ragged prediction tensor");
          for (const auto& b : a) {
            if (b.size() != d) throw ShapeError("ragged prediction tensor");
            flat.insert(flat.end(), b.begin(), b.end());
          }
        }
        capsule::RoutingTrace trace;
        const Tensor v = capsule::dynamic_routing(Tensor::constant({n_in, n_out, d}, flat), iters, &trace);
        return py::make_tuple(rows_of(v), trace.couplings.back());
      },
      py::arg("u_hat"), py::arg("iters") = 3);
  m.def(
      "bigru",
      [](const std::vector<std::vector<double>>& x, std::size_t hidden, std::uint64_t seed) {
        const Tensor X = matrix(x);
        return rows_of(gru::bidirectional(X, gru::init_bidirectional(hidden, X.dim(1), seed)));
      },
      py::arg("x"), py::arg("hidden"), py::arg("seed") = 0);

  m.def(
      "metrics", [](const std::vector<int>& t, const std::vector<int>& p) { return metrics_dict(compute_metrics(t, p)); },
      py::arg("truth"), py::arg("predicted"));

  py::class_<ModelConfig>(m, "ModelConfig")
      .def(py::init<>())
      .def_static("from_json", &config_from_json)
      .def_static("load", &load_config)
      .def_static("toy", &toy_config)
      .def("to_json", &config_to_json)
      .def_readwrite("variant", &ModelConfig::variant)
      .def_readwrite("seed", &ModelConfig::seed)
      .def_property(
          "epochs", [](const ModelConfig& c) { return c.train.epochs; },
          [](ModelConfig& c, std::size_t e) { c.train.epochs = e; })
      .def_property(
          "lr", [](const ModelConfig& c) { return c.train.optimizer.lr; },
          [](ModelConfig& c, double lr) { c.train.optimizer.lr = lr; })
      .def_property(
          "batch_size", [](const ModelConfig& c) { return c.train.batch_size; },
          [](ModelConfig& c, std::size_t b) { c.train.batch_size = b; });

  py::class_<ScclModel>(m, "Model")
      .def_static("build", &ScclModel::build, py::arg("config"), py::arg("corpus"), py::arg("lexicon"))
      .def_static("load", &ScclModel::load, py::arg("path"))
      .def("save", &ScclModel::save, py::arg("path"))
      .def(
          "predict", [](const ScclModel& mdl, const std::vector<std::string>& t) { return mdl.predict(make_doc(t, 0)); },
          py::arg("tokens"))
      .def(
          "distribution",
          [](const ScclModel& mdl, const std::vector<std::string>& t) { return mdl.distribution(make_doc(t, 0)); },
          py::arg("tokens"))
      .def(
          "train",
          [](ScclModel& mdl, const Corpus& c) {
            std::vector<double> losses;
            for (const auto& r : train(mdl, c)) losses.push_back(r.mean_loss);
            return losses;
          },
          py::arg("corpus"), "Returns the mean loss of every epoch.")
      .def(
          "evaluate", [](const ScclModel& mdl, const Corpus& c) { return metrics_dict(evaluate(mdl, c)); },
          py::arg("corpus"))
      .def_property_readonly("parameter_count", [](const ScclModel& mdl) { return mdl.params().total_values(); })
      .def_property_readonly("config", &ScclModel::config);

  m.def(
      "gradcheck", [](const ModelConfig& cfg) { return gradcheck_model(cfg).max_rel_error; },
      py::arg("config") = toy_config(), "Largest finite-difference relative error over all parameters.");

  m.def("ablation_variants", &ablation_variants);

  m.def(
      "run_cli",
      [](std::vector<std::string> args, const std::string& stdin_text) {
        args.insert(args.begin(), "sccl");
        std::vector<const char*> argv;
        for (const auto& a : args) argv.push_back(a.c_str());
        std::istringstream in(stdin_text);
        std::ostringstream out, err;
        const int code = cli::run(static_cast<int>(argv.size()), argv.data(), in, out, err);
        return py::make_tuple(code, out.str(), err.str());
      },
      py::arg("args"), py::arg("stdin") = "", "Runs a CLI subcommand in-process; returns (exit code, stdout, stderr).");
}
