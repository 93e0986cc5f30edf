// Command-line front end: compile lexicons into grid tables, account
// parameters against baselines, check gradients, materialize embeddings and
// run the toy distillation experiments.

#include <CLI11.hpp>

#include <cinttypes>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "see/baselines.hpp"
#include "see/distill.hpp"
#include "see/embedding.hpp"
#include "see/lexicon.hpp"
#include "see/matrix.hpp"
#include "see/tensor.hpp"
#include "see/toy.hpp"

namespace fs = std::filesystem;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitCheckFailed = 1;
constexpr int kExitInputError = 2;

// ---------- small formatting / hashing helpers ----------

std::string fmt(const char* spec, double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), spec, v);
    return buf;
}

std::string fmt_u64(std::uint64_t v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%" PRIu64, v);
    return buf;
}

std::uint64_t fnv1a(const std::string& s) {
    std::uint64_t h = 1469598103934665603ull;
    for (unsigned char c : s) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return h;
}

// Collects the resolved settings of one command; the hash of the canonical
// text is stamped on every output so runs can be traced to their config.
class ConfigEcho {
public:
    explicit ConfigEcho(std::string command) : text_("command=" + std::move(command) + "\n") {}

    template <typename T>
    void add(const std::string& key, const T& value) {
        std::ostringstream os;
        os << value;
        text_ += key + "=" + os.str() + "\n";
    }
    void add(const std::string& key, double value) { text_ += key + "=" + fmt("%.17g", value) + "\n"; }

    std::string hash_hex() const {
        char buf[24];
        std::snprintf(buf, sizeof(buf), "%016" PRIx64, fnv1a(text_));
        return buf;
    }
    std::string header() const { return "# config_hash " + hash_hex() + "\n"; }
    const std::string& text() const { return text_; }

private:
    std::string text_;
};

// SEE_OUT_DIR redirects outputs without touching the command line.
fs::path override_file(const fs::path& p) {
    if (const char* env = std::getenv("SEE_OUT_DIR")) {
        fs::path dir(env);
        fs::create_directories(dir);
        return dir / p.filename();
    }
    return p;
}

fs::path override_dir(const fs::path& p) {
    if (const char* env = std::getenv("SEE_OUT_DIR")) return fs::path(env);
    return p;
}

std::vector<std::string> read_token_file(const fs::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open token file: " + path.string());
    std::vector<std::string> tokens;
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty() || line[0] == '#') continue;
        tokens.push_back(line);
    }
    return tokens;
}

std::vector<int> parse_values(const std::string& text) {
    std::vector<int> out;
    const auto colon = text.find(':');
    if (colon != std::string::npos) {
        const int lo = std::stoi(text.substr(0, colon));
        const int hi = std::stoi(text.substr(colon + 1));
        if (hi < lo) throw std::invalid_argument("values: empty range " + text);
        for (int v = lo; v <= hi; ++v) out.push_back(v);
        return out;
    }
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (!item.empty()) out.push_back(std::stoi(item));
    }
    if (out.empty()) throw std::invalid_argument("values: nothing to sweep in '" + text + "'");
    return out;
}

std::vector<int> parse_dims(const std::string& text) {
    std::vector<int> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, 'x'))
        if (!item.empty()) out.push_back(std::stoi(item));
    if (out.empty()) throw std::invalid_argument("expected AxBxC dimensions, got '" + text + "'");
    return out;
}

// ---------- baseline spec strings ----------

struct BaselineSpec {
    std::string kind;
    std::map<std::string, std::string> params;

    bool has(const std::string& k) const { return params.count(k) > 0; }
    std::string get(const std::string& k) const {
        const auto it = params.find(k);
        if (it == params.end())
            throw std::invalid_argument("baseline '" + kind + "' is missing key '" + k + "'");
        return it->second;
    }
    long get_int(const std::string& k) const { return std::stol(get(k)); }
    long get_int_or(const std::string& k, long fallback) const {
        return has(k) ? get_int(k) : fallback;
    }
};

BaselineSpec parse_baseline(const std::string& text) {
    std::stringstream ss(text);
    BaselineSpec spec;
    if (!(ss >> spec.kind)) throw std::invalid_argument("empty baseline spec");
    std::string token;
    while (ss >> token) {
        const auto eq = token.find('=');
        if (eq == std::string::npos)
            throw std::invalid_argument("baseline key without value: '" + token + "'");
        spec.params[token.substr(0, eq)] = token.substr(eq + 1);
    }
    static const std::vector<std::string> kinds{"matrix", "tt", "word2ket", "morphte"};
    if (std::find(kinds.begin(), kinds.end(), spec.kind) == kinds.end())
        throw std::invalid_argument("unknown baseline kind '" + spec.kind + "'");
    return spec;
}

struct TableRow {
    std::string method;
    std::string setting;
    std::uint64_t params;
    double ratio;
};

void print_rows(const std::vector<TableRow>& rows) {
    std::cout << "method\tsetting\tparams\tratio\n";
    for (const auto& row : rows)
        std::cout << row.method << '\t' << row.setting << '\t' << fmt_u64(row.params) << '\t'
                  << fmt("%.2f", row.ratio) << '\n';
}

TableRow baseline_row(const BaselineSpec& spec, std::uint64_t vocab, int dim, int order) {
    const double original = static_cast<double>(vocab) * dim;
    if (spec.kind == "matrix") {
        const auto k = static_cast<std::uint64_t>(spec.get_int("k"));
        const auto params = see::lrmf_params(vocab, static_cast<std::uint64_t>(dim), k);
        return {"matrix", "k=" + std::to_string(k), params, original / static_cast<double>(params)};
    }
    if (spec.kind == "tt") {
        see::TtSpec tt;
        if (spec.has("rows")) {
            tt.row_dims = parse_dims(spec.get("rows"));
            tt.col_dims = parse_dims(spec.get("cols"));
            tt.ranks = parse_dims(spec.get("ranks"));
        } else {
            const int parts = static_cast<int>(spec.get_int_or("parts", 3));
            const int rank = static_cast<int>(spec.get_int("rank"));
            tt.row_dims = see::near_balanced_factors(vocab, parts);
            tt.col_dims = see::near_balanced_factors(static_cast<std::uint64_t>(dim), parts);
            tt.ranks.assign(static_cast<std::size_t>(parts) + 1, rank);
            tt.ranks.front() = tt.ranks.back() = 1;
        }
        if (tt.rows() != vocab || tt.cols() != static_cast<std::uint64_t>(dim))
            throw std::invalid_argument("tt baseline shapes do not factor the table");
        const auto params = see::tt_params(tt);
        std::string setting = "rows=";
        for (std::size_t i = 0; i < tt.row_dims.size(); ++i)
            setting += (i ? "x" : "") + std::to_string(tt.row_dims[i]);
        setting += " ranks=";
        for (std::size_t i = 0; i < tt.ranks.size(); ++i)
            setting += (i ? "x" : "") + std::to_string(tt.ranks[i]);
        return {"tt", setting, params, original / static_cast<double>(params)};
    }
    if (spec.kind == "word2ket") {
        const int o = static_cast<int>(spec.get_int_or("o", order));
        const int r = static_cast<int>(spec.get_int_or("r", 1));
        const int q = static_cast<int>(spec.get_int_or("q", see::factor_dim(dim, o)));
        const auto params = see::word2ket_params(vocab, r, o, q);
        return {"word2ket",
                "r=" + std::to_string(r) + " o=" + std::to_string(o) + " q=" + std::to_string(q),
                params, original / static_cast<double>(params)};
    }
    const auto mv = static_cast<std::uint64_t>(spec.get_int("vocab"));
    const int r = static_cast<int>(spec.get_int_or("r", 1));
    const int o = static_cast<int>(spec.get_int_or("o", order));
    const int q = static_cast<int>(spec.get_int_or("q", see::factor_dim(dim, o)));
    const int copies = static_cast<int>(spec.get_int_or("copies", 1));
    const auto params = see::morphte_params(mv, r, o, q, copies);
    return {"morphte",
            "vocab=" + std::to_string(mv) + " r=" + std::to_string(r) + " q=" +
                std::to_string(q) + " copies=" + std::to_string(copies),
            params, original / static_cast<double>(params)};
}

// ---------- gradient check families ----------

struct GradCheckResult {
    std::string family;
    int trials;
    double max_rel_err;
};

double dot(see::ConstSlice a, see::ConstSlice b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

GradCheckResult check_kron_chain(std::uint64_t seed, int trials, bool inject_bug) {
    std::mt19937_64 rng(seed * 2654435761ull + 1);
    std::uniform_real_distribution<double> real(-1.0, 1.0);
    double worst = 0.0;
    for (int trial = 0; trial < trials; ++trial) {
        const std::size_t q = 2 + rng() % 4;
        const std::size_t o = 1 + rng() % 4;
        std::vector<see::Vec> factors;
        for (std::size_t k = 0; k < o; ++k) {
            see::Vec f(q);
            for (double& v : f) v = real(rng);
            factors.push_back(std::move(f));
        }
        std::size_t full = 1;
        for (std::size_t k = 0; k < o; ++k) full *= q;
        see::Vec upstream(full);
        for (double& v : upstream) v = real(rng);

        auto grads = see::kron_chain_backward(factors, upstream);
        const std::size_t free = rng() % o;
        if (inject_bug)
            for (double& g : grads[free]) g *= 2.0;  // test hook: detectability
        const auto f = [&](const see::Vec& w) {
            auto fs = factors;
            fs[free] = w;
            return dot(see::kron_chain(fs), upstream);
        };
        worst = std::max(worst, see::finite_diff_check(f, factors[free], grads[free], 1e-6));
    }
    return {"kron_chain_backward", trials, worst};
}

GradCheckResult check_reconstruct(std::uint64_t seed, int trials) {
    std::mt19937_64 rng(seed * 2654435761ull + 2);
    std::uniform_real_distribution<double> real(-1.0, 1.0);
    double worst = 0.0;
    for (int trial = 0; trial < trials; ++trial) {
        see::SeeConfig cfg{.d = 4 + static_cast<int>(rng() % 10),
                           .o = 1 + static_cast<int>(rng() % 3),
                           .r = 2 + static_cast<int>(rng() % 3),
                           .m = 1 + static_cast<int>(rng() % 3),
                           .unit_count = 12,
                           .seed = rng(),
                           .target_var = 0.5};
        while (cfg.q() > 6) cfg.d = 2 + static_cast<int>(rng() % 8);
        const see::FactorStore store = see::init_factors(cfg);

        see::IndexGrid grid(cfg.r, cfg.o);
        for (auto& id : grid.ids) id = 2 + static_cast<std::uint32_t>(rng() % (cfg.unit_count - 2));
        if (trial % 2 == 0) grid.at(1, 0) = grid.at(0, 0);  // shared unit across rows

        see::Vec upstream(static_cast<std::size_t>(cfg.d));
        for (double& v : upstream) v = real(rng);

        const auto grads = see::reconstruct_backward(grid, store, cfg, upstream);
        for (const auto& [key, grad] : grads) {
            const auto f = [&](const see::Vec& w) {
                see::FactorStore probe = store;
                auto dst = probe.row_mut(key.first, key.second);
                std::copy(w.begin(), w.end(), dst.begin());
                return dot(see::reconstruct_row(grid, probe, cfg), upstream);
            };
            const see::Vec x0(store.row(key.first, key.second).begin(),
                              store.row(key.first, key.second).end());
            worst = std::max(worst, see::finite_diff_check(f, x0, grad, 1e-6));
        }
    }
    return {"reconstruct_backward", trials, worst};
}

GradCheckResult check_kl(std::uint64_t seed, int trials) {
    std::mt19937_64 rng(seed * 2654435761ull + 3);
    std::uniform_real_distribution<double> real(-2.0, 2.0);
    double worst = 0.0;
    for (int trial = 0; trial < trials; ++trial) {
        const std::size_t n = 2 + rng() % 6;
        see::Vec zt(n), zs(n);
        for (double& v : zt) v = real(rng);
        for (double& v : zs) v = real(rng);
        const double T = 0.5 + 0.75 * static_cast<double>(rng() % 5);
        const see::KlOptions opt{.scale_t_squared = trial % 3 == 0, .reverse = trial % 2 == 1};

        const see::Vec grad = see::kl_distill_grad_student(zt, zs, T, opt);
        const auto f = [&](const see::Vec& z) { return see::kl_distill(zt, z, T, opt); };
        worst = std::max(worst, see::finite_diff_check(f, zs, grad, 1e-6));
    }
    return {"kl_grad", trials, worst};
}

// ---------- run artifact writers ----------

void write_text_file(const fs::path& path, const std::string& text) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw std::runtime_error("cannot open for writing: " + path.string());
    os << text;
}

std::string metrics_table(const std::vector<see::EpochMetrics>& trace,
                          const ConfigEcho& echo) {
    std::string out = echo.header();
    out += "step\tstage\tembedding_mse\thidden_mse\tkl\tce\ttotal\ttrain_acc\ttest_acc\n";
    for (const auto& e : trace) {
        out += std::to_string(e.epoch);
        out += '\t';
        out += see::stage_name(e.stage);
        out += '\t' + fmt("%.17g", e.losses.embedding_mse) + '\t' +
               fmt("%.17g", e.losses.hidden_mse) + '\t' + fmt("%.17g", e.losses.kl) + '\t' +
               fmt("%.17g", e.losses.ce) + '\t' + fmt("%.17g", e.total) + '\t' +
               fmt("%.17g", e.train_acc) + '\t' + fmt("%.17g", e.test_acc) + '\n';
    }
    return out;
}

// ---------- command options ----------

struct TaskOpts {
    std::uint64_t seed = 1;
    int vocab = 480, sememes = 32, morphemes = 24, classes = 4, seq_len = 9;
    int n_train = 4000, n_test = 1000;

    void attach(CLI::App* cmd) {
        cmd->add_option("--task-seed", seed, "Task generation seed");
        cmd->add_option("--vocab", vocab, "Token vocabulary size");
        cmd->add_option("--sememes", sememes, "Latent sememe count");
        cmd->add_option("--morphemes", morphemes, "Morpheme pool size");
        cmd->add_option("--classes", classes, "Label classes");
        cmd->add_option("--seq-len", seq_len, "Tokens per sequence");
        cmd->add_option("--train-n", n_train, "Training sequences");
        cmd->add_option("--test-n", n_test, "Test sequences");
    }
    see::TaskConfig to_config() const {
        see::TaskConfig cfg;
        cfg.seed = seed;
        cfg.vocab = vocab;
        cfg.num_sememes = sememes;
        cfg.num_morphemes = morphemes;
        cfg.classes = classes;
        cfg.seq_len = seq_len;
        cfg.n_train = n_train;
        cfg.n_test = n_test;
        return cfg;
    }
    void echo(ConfigEcho& e) const {
        e.add("task_seed", seed);
        e.add("vocab", vocab);
        e.add("sememes", sememes);
        e.add("morphemes", morphemes);
        e.add("classes", classes);
        e.add("seq_len", seq_len);
        e.add("train_n", n_train);
        e.add("test_n", n_test);
    }
};

struct TeacherOpts {
    int dim = 32, epochs = 30;
    double lr = 0.3, momentum = 0.9;
    std::uint64_t seed = 7;

    void attach(CLI::App* cmd) {
        cmd->add_option("-d,--dim", dim, "Embedding dimension");
        cmd->add_option("--epochs", epochs, "Teacher epochs");
        cmd->add_option("--lr", lr, "Teacher learning rate");
        cmd->add_option("--momentum", momentum, "Teacher SGD momentum");
        cmd->add_option("--seed", seed, "Teacher training seed");
    }
    void echo(ConfigEcho& e) const {
        e.add("dim", dim);
        e.add("epochs", epochs);
        e.add("lr", lr);
        e.add("momentum", momentum);
        e.add("seed", seed);
    }
};

// ---------- commands ----------

int cmd_compile(const fs::path& lexicon_path, const std::optional<fs::path>& tokens_path,
                const std::optional<fs::path>& morph_path,
                const std::optional<fs::path>& affix_path, int rank, int order,
                fs::path out_path) {
    ConfigEcho echo("compile");
    echo.add("lexicon", lexicon_path.string());
    echo.add("tokens", tokens_path ? tokens_path->string() : "-");
    echo.add("morph_table", morph_path ? morph_path->string() : "-");
    echo.add("affixes", affix_path ? affix_path->string() : "-");
    echo.add("rank", rank);
    echo.add("order", order);

    const see::Lexicon lexicon = see::parse_lexicon_file(lexicon_path);
    std::vector<std::string> tokens;
    if (tokens_path) {
        tokens = read_token_file(*tokens_path);
    } else {
        for (const auto& rec : lexicon.records) tokens.push_back(rec.word);
    }
    const see::AffixSet affixes =
        affix_path ? see::parse_affix_file(*affix_path) : see::AffixSet::builtin();
    std::optional<see::MorphTable> morphs;
    if (morph_path) morphs = see::parse_morph_table_file(*morph_path);

    const see::UnitVocab vocab = see::build_unit_vocab(lexicon);
    const see::GridTable table = see::compile_table(
        lexicon, tokens, vocab, rank, order, morphs ? &*morphs : nullptr, affixes);

    out_path = override_file(out_path);
    see::write_grid_table_file(out_path, table);

    const auto stats = see::coverage_stats(table);
    std::cout << echo.header();
    std::cout << "tokens\t" << fmt_u64(stats.tokens) << '\n';
    std::cout << "units\t" << vocab.size() << '\n';
    std::cout << "sememes\t" << vocab.sememe_count() << '\n';
    std::cout << "morphemes\t" << vocab.morpheme_count() << '\n';
    std::cout << "oov_fraction\t" << fmt("%.17g", stats.oov_fraction) << '\n';
    std::cout << "mean_senses\t" << fmt("%.17g", stats.mean_senses) << '\n';
    std::cout << "truncated_senses\t" << fmt_u64(stats.truncated_senses) << '\n';
    std::cout << "pad_fill_rate\t" << fmt("%.17g", stats.pad_fill_rate) << '\n';
    std::cout << "out\t" << out_path.string() << '\n';
    return kExitOk;
}

int cmd_count(std::uint64_t vocab, int dim, std::uint64_t units, int order, int rank,
              const std::vector<int>& copies, const std::vector<std::string>& baselines) {
    ConfigEcho echo("count");
    echo.add("vocab", vocab);
    echo.add("dim", dim);
    echo.add("units", units);
    echo.add("order", order);
    echo.add("rank", rank);
    for (int m : copies) echo.add("copies", m);
    for (const auto& b : baselines) echo.add("baseline", b);

    const std::uint64_t original = vocab * static_cast<std::uint64_t>(dim);
    std::vector<TableRow> rows;
    rows.push_back({"original", std::to_string(vocab) + "x" + std::to_string(dim), original, 1.0});

    for (int m : copies) {
        const see::SeeConfig cfg{.d = dim,
                                 .o = order,
                                 .r = rank,
                                 .m = m,
                                 .unit_count = static_cast<std::uint32_t>(units) + 1,
                                 .seed = 0};
        const auto params = see::param_count(cfg);
        rows.push_back({"see",
                        "m=" + std::to_string(m) + " o=" + std::to_string(order) + " q=" +
                            std::to_string(cfg.q()) + " r=" + std::to_string(rank),
                        params, static_cast<double>(original) / static_cast<double>(params)});
    }
    for (const auto& text : baselines)
        rows.push_back(baseline_row(parse_baseline(text), vocab, dim, order));

    std::cout << echo.header();
    print_rows(rows);
    return kExitOk;
}

int cmd_solve_ratio(std::uint64_t vocab, int dim, std::uint64_t units, int order, int rank,
                    double target) {
    ConfigEcho echo("solve-ratio");
    echo.add("vocab", vocab);
    echo.add("dim", dim);
    echo.add("units", units);
    echo.add("order", order);
    echo.add("rank", rank);
    echo.add("target", target);

    const std::uint64_t original = vocab * static_cast<std::uint64_t>(dim);
    see::SeeConfig cfg{.d = dim,
                       .o = order,
                       .r = rank,
                       .m = 1,
                       .unit_count = static_cast<std::uint32_t>(units) + 1,
                       .seed = 0};
    const int m = see::solve_m_for_ratio(cfg, original, target);
    cfg.m = m;
    const auto see_params = see::param_count(cfg);

    const auto k = see::lrmf_rank_for_ratio(vocab, static_cast<std::uint64_t>(dim), target);
    const auto k_params = see::lrmf_params(vocab, static_cast<std::uint64_t>(dim), k);

    std::cout << echo.header();
    std::cout << "method\tparam\tvalue\tparams\tratio\n";
    std::cout << "see\tm\t" << m << '\t' << fmt_u64(see_params) << '\t'
              << fmt("%.2f", static_cast<double>(original) / static_cast<double>(see_params))
              << '\n';
    std::cout << "matrix\tk\t" << fmt_u64(k) << '\t' << fmt_u64(k_params) << '\t'
              << fmt("%.2f", static_cast<double>(original) / static_cast<double>(k_params))
              << '\n';
    return kExitOk;
}

int cmd_gradcheck(std::uint64_t seed, int trials, bool inject_bug) {
    if (trials < 1) throw std::invalid_argument("gradcheck: trials must be >= 1");
    constexpr double kTolerance = 1e-5;

    ConfigEcho echo("gradcheck");
    echo.add("seed", seed);
    echo.add("trials", trials);
    echo.add("inject_bug", inject_bug ? 1 : 0);

    std::vector<GradCheckResult> results;
    results.push_back(check_kron_chain(seed, trials, inject_bug));
    results.push_back(check_reconstruct(seed, trials));
    results.push_back(check_kl(seed, trials));

    double overall = 0.0;
    std::cout << echo.header();
    std::cout << "family\ttrials\tmax_rel_err\n";
    for (const auto& r : results) {
        overall = std::max(overall, r.max_rel_err);
        std::cout << r.family << '\t' << r.trials << '\t' << fmt("%.3e", r.max_rel_err) << '\n';
    }
    const bool pass = overall <= kTolerance;
    std::cout << "overall\t" << 3 * trials << '\t' << fmt("%.3e", overall) << '\n';
    std::cout << "status\t" << (pass ? "pass" : "fail") << "\ttolerance=" << kTolerance << '\n';
    return pass ? kExitOk : kExitCheckFailed;
}

int cmd_materialize(const fs::path& table_path, const fs::path& store_path, int dim,
                    fs::path out_path, bool as_float32) {
    ConfigEcho echo("materialize");
    echo.add("table", table_path.string());
    echo.add("store", store_path.string());
    echo.add("dim", dim);
    echo.add("float32", as_float32 ? 1 : 0);

    const see::GridTable table = see::read_grid_table_file(table_path);
    const see::FactorStore store = see::read_factor_store_file(store_path);
    const see::SeeConfig cfg{.d = dim,
                             .o = table.order,
                             .r = table.rank,
                             .m = store.copies(),
                             .unit_count = store.unit_count(),
                             .seed = store.seed()};
    const see::DenseMatrix matrix = see::materialize(table, store, cfg);

    out_path = override_file(out_path);
    see::write_matrix_file(out_path, matrix, as_float32);

    std::cout << echo.header();
    std::cout << "rows\t" << fmt_u64(matrix.rows) << '\n';
    std::cout << "cols\t" << fmt_u64(matrix.cols) << '\n';
    std::cout << "scalars\t" << fmt_u64(matrix.scalar_count()) << '\n';
    std::cout << "out\t" << out_path.string() << '\n';
    return kExitOk;
}

int cmd_train(const TaskOpts& task_opts, const TeacherOpts& teacher_opts, fs::path out_dir) {
    ConfigEcho echo("train");
    task_opts.echo(echo);
    teacher_opts.echo(echo);

    out_dir = override_dir(out_dir);
    fs::create_directories(out_dir);

    const see::SyntheticTask task = see::gen_task(task_opts.to_config());
    const see::TeacherResult result = see::train_teacher(
        task, teacher_opts.dim, teacher_opts.epochs, teacher_opts.lr, teacher_opts.seed,
        teacher_opts.momentum);

    write_text_file(out_dir / "config.snapshot", echo.header() + echo.text());
    std::string metrics = echo.header() + "epoch\tloss\n";
    for (std::size_t e = 0; e < result.stats.epoch_loss.size(); ++e)
        metrics += std::to_string(e) + '\t' + fmt("%.17g", result.stats.epoch_loss[e]) + '\n';
    write_text_file(out_dir / "teacher_metrics.tsv", metrics);
    see::write_teacher_file(out_dir / "teacher.ckpt", result.model);

    std::cout << echo.header();
    std::cout << "majority_baseline\t" << fmt("%.17g", task.majority_baseline) << '\n';
    std::cout << "embedding_params\t" << fmt_u64(result.model.embedding.scalar_count()) << '\n';
    std::cout << "train_acc\t" << fmt("%.17g", result.stats.train_acc) << '\n';
    std::cout << "test_acc\t" << fmt("%.17g", result.stats.test_acc) << '\n';
    std::cout << "out\t" << out_dir.string() << '\n';
    return kExitOk;
}

struct StudentOpts {
    int order = 2, rank = 4, copies = 4;
    double target_ratio = 0.0;  // > 0 solves copies for the ratio
    std::uint64_t see_seed = 11, train_seed = 5;
    double target_var = 0.0;
    double alpha = 1.0, beta = 1.0, gamma = 1.0, temperature = 2.0;
    int boundary = 2, epochs = 30;
    double lr = 0.05, momentum = 0.9;

    void attach(CLI::App* cmd) {
        cmd->add_option("-o,--order", order, "Student order");
        cmd->add_option("-r,--rank", rank, "Student rank (morpheme row + senses)");
        cmd->add_option("-m,--copies", copies, "Factor copies per unit");
        cmd->add_option("--target-ratio", target_ratio,
                        "Solve copies for this compression ratio instead of -m");
        cmd->add_option("--see-seed", see_seed, "Factor init seed");
        cmd->add_option("--student-seed", train_seed, "Student training seed");
        cmd->add_option("--target-var", target_var, "Init variance target (0: 1/d)");
        cmd->add_option("--alpha", alpha, "KL weight");
        cmd->add_option("--beta", beta, "Embedding MSE weight");
        cmd->add_option("--gamma", gamma, "Hidden MSE weight");
        cmd->add_option("-T,--temperature", temperature, "Distillation temperature");
        cmd->add_option("--boundary", boundary, "Epochs in the initial stage");
        cmd->add_option("--student-epochs", epochs, "Student epochs");
        cmd->add_option("--student-lr", lr, "Student learning rate");
        cmd->add_option("--student-momentum", momentum, "Student SGD momentum");
    }
    void echo(ConfigEcho& e) const {
        e.add("order", order);
        e.add("rank", rank);
        e.add("copies", copies);
        e.add("target_ratio", target_ratio);
        e.add("see_seed", see_seed);
        e.add("student_seed", train_seed);
        e.add("target_var", target_var);
        e.add("alpha", alpha);
        e.add("beta", beta);
        e.add("gamma", gamma);
        e.add("temperature", temperature);
        e.add("boundary", boundary);
        e.add("student_epochs", epochs);
        e.add("student_lr", lr);
        e.add("student_momentum", momentum);
    }
};

int cmd_distill(const TaskOpts& task_opts, const TeacherOpts& teacher_opts,
                const StudentOpts& student_opts, const std::optional<fs::path>& teacher_path,
                fs::path out_dir) {
    ConfigEcho echo("distill");
    task_opts.echo(echo);
    teacher_opts.echo(echo);
    student_opts.echo(echo);
    echo.add("teacher_ckpt", teacher_path ? teacher_path->string() : "-");

    out_dir = override_dir(out_dir);
    fs::create_directories(out_dir);

    const see::SyntheticTask task = see::gen_task(task_opts.to_config());

    see::TeacherModel teacher;
    see::TeacherStats teacher_stats;
    if (teacher_path) {
        teacher = see::read_teacher_file(*teacher_path);
        if (teacher.embedding.rows != task.tokens.size())
            throw std::runtime_error("teacher checkpoint does not match the task vocabulary");
        teacher_stats.train_acc = see::evaluate_teacher(teacher, task.train_seqs, task.train_labels);
        teacher_stats.test_acc = see::evaluate_teacher(teacher, task.test_seqs, task.test_labels);
    } else {
        see::TeacherResult trained = see::train_teacher(
            task, teacher_opts.dim, teacher_opts.epochs, teacher_opts.lr, teacher_opts.seed,
            teacher_opts.momentum);
        teacher = std::move(trained.model);
        teacher_stats = trained.stats;
        see::write_teacher_file(out_dir / "teacher.ckpt", teacher);
    }

    see::SeeConfig student_cfg{.d = 0,
                               .o = student_opts.order,
                               .r = student_opts.rank,
                               .m = student_opts.copies,
                               .unit_count = 0,
                               .seed = student_opts.see_seed,
                               .target_var = student_opts.target_var};
    if (student_opts.target_ratio > 0.0) {
        see::SeeConfig probe = student_cfg;
        probe.d = static_cast<int>(teacher.embedding.cols);
        probe.unit_count = see::build_unit_vocab(task.lexicon).size();
        probe.m = 1;
        student_cfg.m = see::solve_m_for_ratio(probe, teacher.embedding.scalar_count(),
                                               student_opts.target_ratio);
    }

    const see::LossWeights weights{student_opts.alpha, student_opts.beta, student_opts.gamma,
                                   student_opts.temperature};
    const see::StudentResult result = see::train_student_see(
        task, teacher, student_cfg, weights, student_opts.boundary, student_opts.epochs,
        student_opts.lr, student_opts.train_seed, student_opts.momentum);

    write_text_file(out_dir / "config.snapshot", echo.header() + echo.text());
    write_text_file(out_dir / "student_metrics.tsv", metrics_table(result.trace, echo));
    see::write_student_file(out_dir / "student.ckpt", result.model);

    const auto& final_entry = result.trace.back();
    std::string summary = echo.header();
    summary += "embedding_params\t" + fmt_u64(result.embedding_params) + '\n';
    summary += "compression_ratio\t" + fmt("%.17g", result.compression_ratio) + '\n';
    summary += "copies\t" + std::to_string(result.model.cfg.m) + '\n';
    summary += "teacher_train_acc\t" + fmt("%.17g", teacher_stats.train_acc) + '\n';
    summary += "teacher_test_acc\t" + fmt("%.17g", teacher_stats.test_acc) + '\n';
    summary += "student_train_acc\t" + fmt("%.17g", final_entry.train_acc) + '\n';
    summary += "student_test_acc\t" + fmt("%.17g", final_entry.test_acc) + '\n';
    write_text_file(out_dir / "summary.tsv", summary);
    std::cout << summary;
    std::cout << "out\t" << out_dir.string() << '\n';
    return kExitOk;
}

int cmd_sweep(const std::string& axis, const std::string& values_text, std::uint64_t vocab,
              int dim, std::uint64_t units, int order, int rank, int copies, bool with_run) {
    ConfigEcho echo("sweep");
    echo.add("axis", axis);
    echo.add("values", values_text);
    echo.add("vocab", vocab);
    echo.add("dim", dim);
    echo.add("units", units);
    echo.add("order", order);
    echo.add("rank", rank);
    echo.add("copies", copies);
    echo.add("with_run", with_run ? 1 : 0);

    const std::vector<int> values = parse_values(values_text);
    const std::uint64_t original = vocab * static_cast<std::uint64_t>(dim);

    // the optional toy run uses the stock task and teacher settings
    std::optional<see::SyntheticTask> task;
    std::optional<see::TeacherResult> teacher;
    if (with_run) {
        const TaskOpts task_opts;
        const TeacherOpts teacher_opts;
        task = see::gen_task(task_opts.to_config());
        teacher = see::train_teacher(*task, teacher_opts.dim, teacher_opts.epochs,
                                     teacher_opts.lr, teacher_opts.seed, teacher_opts.momentum);
    }

    std::cout << echo.header();
    std::cout << "value\tq\tparams\tratio";
    if (with_run) std::cout << "\tteacher_acc\tstudent_acc";
    std::cout << '\n';

    for (int value : values) {
        see::SeeConfig cfg{.d = dim,
                           .o = order,
                           .r = rank,
                           .m = copies,
                           .unit_count = static_cast<std::uint32_t>(units) + 1,
                           .seed = 0};
        if (axis == "rank") cfg.r = value;
        else if (axis == "order") cfg.o = value;
        else cfg.m = value;

        const auto params = see::param_count(cfg);
        std::cout << value << '\t' << cfg.q() << '\t' << fmt_u64(params) << '\t'
                  << fmt("%.2f", static_cast<double>(original) / static_cast<double>(params));

        if (with_run) {
            see::SeeConfig student_cfg{.d = 0,
                                       .o = axis == "order" ? value : 2,
                                       .r = axis == "rank" ? value : 4,
                                       .m = axis == "m" ? value : 4,
                                       .unit_count = 0,
                                       .seed = 11};
            std::cout << '\t' << fmt("%.4f", teacher->stats.test_acc) << '\t';
            try {
                const auto res = see::train_student_see(*task, teacher->model, student_cfg, {},
                                                        2, 12, 0.05, 5);
                std::cout << fmt("%.4f", res.trace.back().test_acc);
            } catch (const std::exception&) {
                std::cout << '-';  // value unusable at this scale (e.g. < 5x compression)
            }
        }
        std::cout << '\n';
    }
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Sememe entanglement embedding compression toolkit"};
    app.require_subcommand(1);
    app.fallthrough();  // app-level flags like --config may follow the subcommand
    app.set_config("--config", "", "Key-value config file; sections name subcommands");
    app.allow_config_extras(CLI::config_extras_mode::error);

    // compile
    auto* compile = app.add_subcommand("compile", "Compile a lexicon into a grid table");
    fs::path lexicon_path, out_path;
    std::optional<fs::path> tokens_path, morph_path, affix_path;
    int rank = 5, order = 3;
    compile->add_option("--lexicon", lexicon_path, "Lexicon file")
        ->required()
        ->check(CLI::ExistingFile);
    compile->add_option("--tokens", tokens_path, "Token vocabulary file (default: lexicon words)")
        ->check(CLI::ExistingFile);
    compile->add_option("--morph-table", morph_path, "Morpheme segmentation table")
        ->check(CLI::ExistingFile);
    compile->add_option("--affixes", affix_path, "Affix list for fallback segmentation")
        ->check(CLI::ExistingFile);
    compile->add_option("-r,--rank", rank, "Grid rank (morpheme row + senses)");
    compile->add_option("-o,--order", order, "Units per grid row");
    compile->add_option("--out", out_path, "Output grid table path")->required();

    // count
    auto* count = app.add_subcommand("count", "Parameter/ratio table for SEE and baselines");
    std::uint64_t vocab = 46272, units = 16325;
    int dim = 512, count_rank = 5, count_order = 3;
    std::vector<int> copies_list{18, 9, 4, 2};
    std::vector<std::string> baseline_specs;
    count->add_option("--vocab", vocab, "Token vocabulary size |V|");
    count->add_option("-d,--dim", dim, "Embedding dimension");
    count->add_option("--units", units, "Trainable unit rows (|S|+|M| plus the learned pad)");
    count->add_option("-o,--order", count_order, "Order");
    count->add_option("-r,--rank", count_rank, "Rank (echoed; the count ignores it)");
    count->add_option("-m,--copies", copies_list, "Copies column values");
    count->add_option("--baseline", baseline_specs,
                      "Baseline spec, e.g. 'matrix k=50' 'tt rank=64' "
                      "'word2ket r=1 o=2' 'morphte vocab=10000 r=5'");

    // solve-ratio
    auto* solve = app.add_subcommand("solve-ratio", "Largest m (and LRMF k) hitting a ratio");
    std::uint64_t sr_vocab = 46272, sr_units = 16325;
    int sr_dim = 512, sr_order = 3, sr_rank = 5;
    double target_ratio = 0.0;
    solve->add_option("--vocab", sr_vocab, "Token vocabulary size |V|");
    solve->add_option("-d,--dim", sr_dim, "Embedding dimension");
    solve->add_option("--units", sr_units, "Trainable unit rows");
    solve->add_option("-o,--order", sr_order, "Order");
    solve->add_option("-r,--rank", sr_rank, "Rank");
    solve->add_option("--target", target_ratio, "Target compression ratio")->required();

    // gradcheck
    auto* gradcheck = app.add_subcommand("gradcheck", "Finite-difference gradient suite");
    std::uint64_t gc_seed = 42;
    int gc_trials = 100;
    bool inject_bug = false;
    gradcheck->add_option("--seed", gc_seed, "RNG seed");
    gradcheck->add_option("--trials", gc_trials, "Trials per family");
    gradcheck->add_flag("--inject-bug", inject_bug, "Scale one gradient by 2 (test hook)")
        ->group("");

    // materialize
    auto* materialize = app.add_subcommand("materialize", "Expand factors into a dense table");
    fs::path mat_table, mat_store, mat_out;
    int mat_dim = 0;
    bool mat_f32 = false;
    materialize->add_option("--table", mat_table, "Grid table file")
        ->required()
        ->check(CLI::ExistingFile);
    materialize->add_option("--store", mat_store, "Factor store file")
        ->required()
        ->check(CLI::ExistingFile);
    materialize->add_option("-d,--dim", mat_dim, "Embedding dimension")->required();
    materialize->add_option("--out", mat_out, "Output matrix path")->required();
    materialize->add_flag("--float32", mat_f32, "Store the table in 32-bit floats");

    // train
    auto* train = app.add_subcommand("train", "Train the dense-embedding teacher");
    TaskOpts train_task;
    TeacherOpts train_teacher_opts;
    fs::path train_out;
    train_task.attach(train);
    train_teacher_opts.attach(train);
    train->add_option("--out", train_out, "Run artifact directory")->required();

    // distill
    auto* distill = app.add_subcommand("distill", "Two-stage distillation into an SEE student");
    TaskOpts distill_task;
    TeacherOpts distill_teacher;
    StudentOpts distill_student;
    std::optional<fs::path> teacher_ckpt;
    fs::path distill_out;
    distill_task.attach(distill);
    distill_teacher.attach(distill);
    distill_student.attach(distill);
    distill->add_option("--teacher", teacher_ckpt, "Load a teacher checkpoint instead of training")
        ->check(CLI::ExistingFile);
    distill->add_option("--out", distill_out, "Run artifact directory")->required();

    // sweep
    auto* sweep = app.add_subcommand("sweep", "Sweep rank, order or copies");
    std::string axis, values_text;
    std::uint64_t sweep_vocab = 46272, sweep_units = 16325;
    int sweep_dim = 512, sweep_order = 3, sweep_rank = 5, sweep_copies = 9;
    bool with_run = false;
    sweep->add_option("--axis", axis, "One of rank|order|m")
        ->required()
        ->check(CLI::IsMember({"rank", "order", "m"}));
    sweep->add_option("--values", values_text, "Comma list or lo:hi range")->required();
    sweep->add_option("--vocab", sweep_vocab, "Token vocabulary size |V|");
    sweep->add_option("-d,--dim", sweep_dim, "Embedding dimension");
    sweep->add_option("--units", sweep_units, "Trainable unit rows");
    sweep->add_option("-o,--order", sweep_order, "Order");
    sweep->add_option("-r,--rank", sweep_rank, "Rank");
    sweep->add_option("-m,--copies", sweep_copies, "Copies");
    sweep->add_flag("--with-run", with_run, "Run the toy distillation per value");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitInputError;
    }

    try {
        if (*compile)
            return cmd_compile(lexicon_path, tokens_path, morph_path, affix_path, rank, order,
                               out_path);
        if (*count)
            return cmd_count(vocab, dim, units, count_order, count_rank, copies_list,
                             baseline_specs);
        if (*solve)
            return cmd_solve_ratio(sr_vocab, sr_dim, sr_units, sr_order, sr_rank, target_ratio);
        if (*gradcheck) return cmd_gradcheck(gc_seed, gc_trials, inject_bug);
        if (*materialize)
            return cmd_materialize(mat_table, mat_store, mat_dim, mat_out, mat_f32);
        if (*train) return cmd_train(train_task, train_teacher_opts, train_out);
        if (*distill)
            return cmd_distill(distill_task, distill_teacher, distill_student, teacher_ckpt,
                               distill_out);
        if (*sweep)
            return cmd_sweep(axis, values_text, sweep_vocab, sweep_dim, sweep_units, sweep_order,
                             sweep_rank, sweep_copies, with_run);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitInputError;
    }
    return kExitInputError;
}
