// Python bindings for the main operations: lexicon compilation, Kronecker
// kernels, factor reconstruction, parameter accounting, distillation losses
// and the toy teacher/student harness.

#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/numpy.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "see/baselines.hpp"
#include "see/distill.hpp"
#include "see/embedding.hpp"
#include "see/lexicon.hpp"
#include "see/matrix.hpp"
#include "see/tensor.hpp"
#include "see/toy.hpp"

namespace py = pybind11;

namespace {

using NpArray = py::array_t<double, py::array::c_style | py::array::forcecast>;

see::Vec to_vec(const NpArray& arr) {
    if (arr.ndim() != 1) throw std::invalid_argument("expected a 1-d array");
    return see::Vec(arr.data(), arr.data() + arr.shape(0));
}

py::array_t<double> from_vec(const see::Vec& v) {
    py::array_t<double> arr(static_cast<py::ssize_t>(v.size()));
    std::copy(v.begin(), v.end(), arr.mutable_data());
    return arr;
}

see::DenseMatrix to_matrix(const NpArray& arr) {
    if (arr.ndim() != 2) throw std::invalid_argument("expected a 2-d array");
    see::DenseMatrix m(static_cast<std::size_t>(arr.shape(0)),
                       static_cast<std::size_t>(arr.shape(1)));
    std::copy(arr.data(), arr.data() + m.data.size(), m.data.begin());
    return m;
}

py::array_t<double> from_matrix(const see::DenseMatrix& m) {
    py::array_t<double> arr({m.rows, m.cols});
    std::copy(m.data.begin(), m.data.end(), arr.mutable_data());
    return arr;
}

std::vector<see::Vec> to_chain(const std::vector<NpArray>& factors) {
    std::vector<see::Vec> chain;
    chain.reserve(factors.size());
    for (const auto& f : factors) chain.push_back(to_vec(f));
    return chain;
}

see::Stage stage_from_name(const std::string& name) {
    if (name == "initial") return see::Stage::initial;
    if (name == "formal") return see::Stage::formal;
    throw std::invalid_argument("stage must be 'initial' or 'formal'");
}

py::dict stats_dict(const see::CoverageStats& s) {
    py::dict d;
    d["tokens"] = s.tokens;
    d["oov"] = s.oov;
    d["oov_fraction"] = s.oov_fraction;
    d["mean_senses"] = s.mean_senses;
    d["truncated_senses"] = s.truncated_senses;
    d["pad_fill_rate"] = s.pad_fill_rate;
    return d;
}

py::dict metrics_dict(const see::EpochMetrics& m) {
    py::dict d;
    d["epoch"] = m.epoch;
    d["stage"] = see::stage_name(m.stage);
    d["embedding_mse"] = m.losses.embedding_mse;
    d["hidden_mse"] = m.losses.hidden_mse;
    d["kl"] = m.losses.kl;
    d["ce"] = m.losses.ce;
    d["total"] = m.total;
    d["train_acc"] = m.train_acc;
    d["test_acc"] = m.test_acc;
    return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Sememe entanglement embedding compression";

    // ---- tensor kernels ----
    m.def("kron", [](const NpArray& x, const NpArray& y) {
        return from_vec(see::kron(to_vec(x), to_vec(y)));
    });
    m.def("kron_chain", [](const std::vector<NpArray>& factors) {
        return from_vec(see::kron_chain(to_chain(factors)));
    });
    m.def("kron_chain_backward",
          [](const std::vector<NpArray>& factors, const NpArray& upstream) {
              const auto grads = see::kron_chain_backward(to_chain(factors), to_vec(upstream));
              py::list out;
              for (const auto& g : grads) out.append(from_vec(g));
              return out;
          });
    m.def(
        "finite_diff_check",
        [](const std::function<double(py::array_t<double>)>& f, const NpArray& x,
           const NpArray& grad, double eps) {
            const auto wrapped = [&f](const see::Vec& v) { return f(from_vec(v)); };
            return see::finite_diff_check(wrapped, to_vec(x), to_vec(grad), eps);
        },
        py::arg("f"), py::arg("x"), py::arg("analytic_grad"), py::arg("eps") = 1e-6);

    // ---- lexicon ----
    py::class_<see::Lexicon>(m, "Lexicon")
        .def_property_readonly("size", [](const see::Lexicon& l) { return l.records.size(); })
        .def("words",
             [](const see::Lexicon& l) {
                 std::vector<std::string> words;
                 for (const auto& rec : l.records) words.push_back(rec.word);
                 return words;
             })
        .def("morphemes_of",
             [](const see::Lexicon& l, const std::string& word) {
                 const auto* rec = l.find(word);
                 if (!rec) throw py::key_error(word);
                 return rec->morphemes;
             })
        .def("senses_of", [](const see::Lexicon& l, const std::string& word) {
            const auto* rec = l.find(word);
            if (!rec) throw py::key_error(word);
            return rec->senses;
        });

    py::class_<see::UnitVocab>(m, "UnitVocab")
        .def_property_readonly("size", &see::UnitVocab::size)
        .def_property_readonly("sememe_count", &see::UnitVocab::sememe_count)
        .def_property_readonly("morpheme_count", &see::UnitVocab::morpheme_count)
        .def("morpheme_id", &see::UnitVocab::morpheme_id)
        .def("sememe_id", &see::UnitVocab::sememe_id)
        .def_readonly_static("PAD_ID", &see::UnitVocab::kPadId)
        .def_readonly_static("ZERO_ID", &see::UnitVocab::kZeroId);

    py::class_<see::IndexGrid>(m, "IndexGrid")
        .def_readonly("rank", &see::IndexGrid::rank)
        .def_readonly("order", &see::IndexGrid::order)
        .def("at", [](const see::IndexGrid& g, int row, int col) { return g.at(row, col); })
        .def("ids", [](const see::IndexGrid& g) {
            py::array_t<std::uint32_t> arr(
                {static_cast<std::size_t>(g.rank), static_cast<std::size_t>(g.order)});
            std::copy(g.ids.begin(), g.ids.end(), arr.mutable_data());
            return arr;
        });

    py::class_<see::GridTable>(m, "GridTable")
        .def_readonly("rank", &see::GridTable::rank)
        .def_readonly("order", &see::GridTable::order)
        .def_readonly("tokens", &see::GridTable::tokens)
        .def_property_readonly("vocab",
                               [](const see::GridTable& t) { return t.vocab; })
        .def("grid",
             [](const see::GridTable& t, std::size_t i) {
                 if (i >= t.grids.size()) throw py::index_error();
                 return t.grids[i];
             })
        .def("word_id",
             [](const see::GridTable& t, const std::string& w) {
                 const auto it = t.word_ids.find(w);
                 if (it == t.word_ids.end()) throw py::key_error(w);
                 return it->second;
             })
        .def("stats", [](const see::GridTable& t) { return stats_dict(t.stats); });

    m.def("parse_lexicon_text", &see::parse_lexicon_text);
    m.def("parse_lexicon_file",
          [](const std::filesystem::path& p) { return see::parse_lexicon_file(p); });
    m.def("serialize_lexicon", &see::serialize_lexicon);
    m.def(
        "segment_morphemes",
        [](const std::string& word,
           const std::optional<std::map<std::string, std::vector<std::string>>>& table) {
            if (!table) return see::segment_morphemes(word);
            see::MorphTable native(table->begin(), table->end());
            return see::segment_morphemes(word, &native);
        },
        py::arg("word"), py::arg("table") = py::none());
    m.def("build_unit_vocab", &see::build_unit_vocab);
    m.def(
        "compile_grid",
        [](const see::Lexicon& lex, const std::string& word, const see::UnitVocab& vocab,
           int rank, int order) {
            const auto* rec = lex.find(word);
            if (!rec) throw py::key_error(word);
            return see::compile_grid(*rec, vocab, rank, order);
        },
        py::arg("lexicon"), py::arg("word"), py::arg("vocab"), py::arg("rank"), py::arg("order"));
    m.def(
        "compile_table",
        [](const see::Lexicon& lex, const std::vector<std::string>& tokens,
           const see::UnitVocab& vocab, int rank, int order) {
            return see::compile_table(lex, tokens, vocab, rank, order);
        },
        py::arg("lexicon"), py::arg("tokens"), py::arg("vocab"), py::arg("rank"),
        py::arg("order"));
    m.def("coverage_stats",
          [](const see::GridTable& t) { return stats_dict(see::coverage_stats(t)); });
    m.def("write_grid_table_file", &see::write_grid_table_file);
    m.def("read_grid_table_file", &see::read_grid_table_file);

    // ---- factors and reconstruction ----
    py::class_<see::SeeConfig>(m, "SeeConfig")
        .def(py::init([](int d, int o, int r, int m_, std::uint32_t unit_count,
                         std::uint64_t seed, double target_var) {
                 const see::SeeConfig cfg{d, o, r, m_, unit_count, seed, target_var};
                 cfg.validate();
                 return cfg;
             }),
             py::arg("d"), py::arg("o"), py::arg("r"), py::arg("m"), py::arg("unit_count"),
             py::arg("seed") = 0, py::arg("target_var") = 0.0)
        .def_readonly("d", &see::SeeConfig::d)
        .def_readonly("o", &see::SeeConfig::o)
        .def_readonly("r", &see::SeeConfig::r)
        .def_readonly("m", &see::SeeConfig::m)
        .def_readonly("unit_count", &see::SeeConfig::unit_count)
        .def_readonly("seed", &see::SeeConfig::seed)
        .def_property_readonly("q", &see::SeeConfig::q)
        .def_property_readonly("target_var", &see::SeeConfig::resolved_target_var);

    py::class_<see::FactorStore>(m, "FactorStore")
        .def_property_readonly("unit_count", &see::FactorStore::unit_count)
        .def_property_readonly("copies", &see::FactorStore::copies)
        .def_property_readonly("factor_dim", &see::FactorStore::factor_dim)
        .def_property_readonly("seed", &see::FactorStore::seed)
        .def("row", [](const see::FactorStore& s, std::uint32_t unit, int copy) {
            const auto r = s.row(unit, copy);
            return from_vec(see::Vec(r.begin(), r.end()));
        });

    m.def("factor_dim", &see::factor_dim, py::arg("d"), py::arg("o"));
    m.def("init_factors", &see::init_factors);
    m.def("reconstruct_row",
          [](const see::IndexGrid& grid, const see::FactorStore& store,
             const see::SeeConfig& cfg) { return from_vec(see::reconstruct_row(grid, store, cfg)); });
    m.def("reconstruct_backward",
          [](const see::IndexGrid& grid, const see::FactorStore& store, const see::SeeConfig& cfg,
             const NpArray& upstream) {
              py::dict out;
              for (const auto& [key, grad] :
                   see::reconstruct_backward(grid, store, cfg, to_vec(upstream)))
                  out[py::make_tuple(key.first, key.second)] = from_vec(grad);
              return out;
          });
    m.def("materialize",
          [](const see::GridTable& table, const see::FactorStore& store,
             const see::SeeConfig& cfg) { return from_matrix(see::materialize(table, store, cfg)); });
    m.def("param_count", &see::param_count);
    m.def("solve_m_for_ratio", &see::solve_m_for_ratio, py::arg("cfg"),
          py::arg("original_params"), py::arg("target_ratio"));
    m.def("write_factor_store_file", &see::write_factor_store_file);
    m.def("read_factor_store_file", &see::read_factor_store_file);

    // ---- baseline parameter models ----
    m.def("lrmf_params", &see::lrmf_params);
    m.def("lrmf_rank_for_ratio", &see::lrmf_rank_for_ratio);
    m.def("tt_params", [](const std::vector<int>& row_dims, const std::vector<int>& col_dims,
                          const std::vector<int>& ranks) {
        return see::tt_params(see::TtSpec{row_dims, col_dims, ranks});
    });
    m.def("near_balanced_factors", &see::near_balanced_factors);
    m.def("word2ket_params", &see::word2ket_params);
    m.def("word2ket_rank_for_ratio", &see::word2ket_rank_for_ratio);
    m.def("morphte_params", &see::morphte_params, py::arg("morph_vocab"), py::arg("r"),
          py::arg("o"), py::arg("q"), py::arg("copies") = 1);

    // ---- distillation losses ----
    m.def("embedding_mse", [](const NpArray& t, const NpArray& s) {
        return see::embedding_mse(to_matrix(t), to_matrix(s));
    });
    m.def("hidden_mse", [](const NpArray& t, const NpArray& s) {
        return see::hidden_mse(to_matrix(t), to_matrix(s));
    });
    m.def(
        "kl_distill",
        [](const NpArray& zt, const NpArray& zs, double temperature, bool scale_t_squared,
           bool reverse) {
            return see::kl_distill(to_vec(zt), to_vec(zs), temperature,
                                   {scale_t_squared, reverse});
        },
        py::arg("z_teacher"), py::arg("z_student"), py::arg("temperature") = 2.0,
        py::arg("scale_t_squared") = false, py::arg("reverse") = false);
    m.def(
        "kl_distill_grad_student",
        [](const NpArray& zt, const NpArray& zs, double temperature, bool scale_t_squared,
           bool reverse) {
            return from_vec(see::kl_distill_grad_student(to_vec(zt), to_vec(zs), temperature,
                                                         {scale_t_squared, reverse}));
        },
        py::arg("z_teacher"), py::arg("z_student"), py::arg("temperature") = 2.0,
        py::arg("scale_t_squared") = false, py::arg("reverse") = false);
    m.def("cross_entropy", [](const NpArray& probs, const NpArray& onehot) {
        return see::cross_entropy(to_matrix(probs), to_matrix(onehot));
    });
    m.def(
        "total_loss",
        [](double embedding_mse, double hidden_mse, double kl, double ce, double alpha,
           double beta, double gamma, double temperature, const std::string& stage) {
            const see::LossReport report =
                see::total_loss({embedding_mse, hidden_mse, kl, ce},
                                {alpha, beta, gamma, temperature}, stage_from_name(stage));
            py::dict d;
            d["embedding_mse"] = report.components.embedding_mse;
            d["hidden_mse"] = report.components.hidden_mse;
            d["kl"] = report.components.kl;
            d["ce"] = report.components.ce;
            d["total"] = report.total;
            d["stage"] = see::stage_name(report.stage);
            return d;
        },
        py::arg("embedding_mse"), py::arg("hidden_mse"), py::arg("kl"), py::arg("ce"),
        py::arg("alpha") = 1.0, py::arg("beta") = 1.0, py::arg("gamma") = 1.0,
        py::arg("temperature") = 2.0, py::arg("stage") = "formal");
    m.def(
        "stage_of",
        [](int epoch, int boundary) { return see::stage_name(see::stage_of(epoch, boundary)); },
        py::arg("epoch"), py::arg("boundary") = 2);

    // ---- toy harness ----
    py::class_<see::TaskConfig>(m, "TaskConfig")
        .def(py::init([](std::uint64_t seed, int vocab, int num_sememes, int num_morphemes,
                         int classes, int seq_len, int n_train, int n_test) {
                 see::TaskConfig cfg;
                 cfg.seed = seed;
                 cfg.vocab = vocab;
                 cfg.num_sememes = num_sememes;
                 cfg.num_morphemes = num_morphemes;
                 cfg.classes = classes;
                 cfg.seq_len = seq_len;
                 cfg.n_train = n_train;
                 cfg.n_test = n_test;
                 cfg.validate();
                 return cfg;
             }),
             py::arg("seed") = 1, py::arg("vocab") = 480, py::arg("num_sememes") = 32,
             py::arg("num_morphemes") = 24, py::arg("classes") = 4, py::arg("seq_len") = 9,
             py::arg("n_train") = 4000, py::arg("n_test") = 1000);

    py::class_<see::SyntheticTask>(m, "SyntheticTask")
        .def_readonly("tokens", &see::SyntheticTask::tokens)
        .def_readonly("majority_baseline", &see::SyntheticTask::majority_baseline)
        .def_readonly("train_labels", &see::SyntheticTask::train_labels)
        .def_readonly("test_labels", &see::SyntheticTask::test_labels)
        .def_property_readonly("lexicon",
                               [](const see::SyntheticTask& t) { return t.lexicon; });

    py::class_<see::TeacherModel>(m, "TeacherModel")
        .def_property_readonly(
            "embedding", [](const see::TeacherModel& t) { return from_matrix(t.embedding); });

    py::class_<see::StudentModel>(m, "StudentModel")
        .def_readonly("cfg", &see::StudentModel::cfg)
        .def_property_readonly("store",
                               [](const see::StudentModel& s) { return s.store; });

    m.def("gen_task", &see::gen_task);
    m.def(
        "train_teacher",
        [](const see::SyntheticTask& task, int d, int epochs, double lr, std::uint64_t seed,
           double momentum) {
            const auto result = see::train_teacher(task, d, epochs, lr, seed, momentum);
            py::dict stats;
            stats["train_acc"] = result.stats.train_acc;
            stats["test_acc"] = result.stats.test_acc;
            stats["epoch_loss"] = result.stats.epoch_loss;
            return py::make_tuple(result.model, stats);
        },
        py::arg("task"), py::arg("d") = 32, py::arg("epochs") = 30, py::arg("lr") = 0.3,
        py::arg("seed") = 7, py::arg("momentum") = 0.9);
    m.def(
        "train_student_see",
        [](const see::SyntheticTask& task, const see::TeacherModel& teacher, int o, int r,
           int m_, std::uint64_t see_seed, double target_var, double alpha, double beta,
           double gamma, double temperature, int boundary, int epochs, double lr,
           std::uint64_t seed, double momentum) {
            const see::SeeConfig cfg{0, o, r, m_, 0, see_seed, target_var};
            const auto result = see::train_student_see(
                task, teacher, cfg, {alpha, beta, gamma, temperature}, boundary, epochs, lr,
                seed, momentum);
            py::list trace;
            for (const auto& entry : result.trace) trace.append(metrics_dict(entry));
            py::dict out;
            out["model"] = result.model;
            out["trace"] = trace;
            out["embedding_params"] = result.embedding_params;
            out["compression_ratio"] = result.compression_ratio;
            return out;
        },
        py::arg("task"), py::arg("teacher"), py::arg("o") = 2, py::arg("r") = 4,
        py::arg("m") = 4, py::arg("see_seed") = 11, py::arg("target_var") = 0.0,
        py::arg("alpha") = 1.0, py::arg("beta") = 1.0, py::arg("gamma") = 1.0,
        py::arg("temperature") = 2.0, py::arg("boundary") = 2, py::arg("epochs") = 30,
        py::arg("lr") = 0.05, py::arg("seed") = 5, py::arg("momentum") = 0.9);
    m.def(
        "evaluate_teacher",
        [](const see::TeacherModel& teacher, const see::SyntheticTask& task,
           const std::string& split) {
            return split == "train"
                       ? see::evaluate_teacher(teacher, task.train_seqs, task.train_labels)
                       : see::evaluate_teacher(teacher, task.test_seqs, task.test_labels);
        },
        py::arg("teacher"), py::arg("task"), py::arg("split") = "test");
    m.def(
        "evaluate_student",
        [](const see::StudentModel& student, const see::SyntheticTask& task,
           const std::string& split) {
            return split == "train"
                       ? see::evaluate_student(student, task.train_seqs, task.train_labels)
                       : see::evaluate_student(student, task.test_seqs, task.test_labels);
        },
        py::arg("student"), py::arg("task"), py::arg("split") = "test");

    m.attr("__all__") = py::make_tuple(
        "kron", "kron_chain", "kron_chain_backward", "finite_diff_check", "Lexicon",
        "UnitVocab", "IndexGrid", "GridTable", "parse_lexicon_text", "parse_lexicon_file",
        "serialize_lexicon", "segment_morphemes", "build_unit_vocab", "compile_grid",
        "compile_table", "coverage_stats", "write_grid_table_file", "read_grid_table_file",
        "SeeConfig", "FactorStore", "factor_dim", "init_factors", "reconstruct_row",
        "reconstruct_backward", "materialize", "param_count", "solve_m_for_ratio",
        "write_factor_store_file", "read_factor_store_file", "lrmf_params",
        "lrmf_rank_for_ratio", "tt_params", "near_balanced_factors", "word2ket_params",
        "word2ket_rank_for_ratio", "morphte_params", "embedding_mse", "hidden_mse",
        "kl_distill", "kl_distill_grad_student", "cross_entropy", "total_loss", "stage_of",
        "TaskConfig", "SyntheticTask", "TeacherModel", "StudentModel", "gen_task",
        "train_teacher", "train_student_see", "evaluate_teacher", "evaluate_student");
}
