#include <doctest.h>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <sys/wait.h>
#include <vector>

#include "see/embedding.hpp"
#include "see/lexicon.hpp"
#include "see/matrix.hpp"

namespace fs = std::filesystem;

namespace {

struct CliResult {
    int exit_code = -1;
    std::string out;
};

const char* cli_path() { return std::getenv("SEE_CLI"); }
const char* data_dir() { return std::getenv("SEE_DATA"); }

CliResult run_cli(const std::string& args) {
    std::string cmd = std::string(cli_path()) + " " + args + " 2>/dev/null";
    FILE* pipe = popen(cmd.c_str(), "r");
    REQUIRE(pipe != nullptr);
    std::string out;
    char buf[4096];
    std::size_t n;
    while ((n = std::fread(buf, 1, sizeof buf, pipe)) > 0) out.append(buf, n);
    const int status = pclose(pipe);
    return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, out};
}

std::vector<std::vector<std::string>> parse_tsv(const std::string& text) {
    std::vector<std::vector<std::string>> rows;
    std::istringstream in(text);
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#') continue;
        std::vector<std::string> fields;
        std::istringstream ls(line);
        std::string field;
        while (std::getline(ls, field, '\t')) fields.push_back(field);
        rows.push_back(std::move(fields));
    }
    return rows;
}

std::string field_of(const std::string& text, const std::string& key) {
    for (const auto& row : parse_tsv(text))
        if (!row.empty() && row[0] == key) return row.size() > 1 ? row[1] : "";
    return "";
}

std::string read_file(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    REQUIRE(in.good());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

#define REQUIRE_CLI()                                               \
    if (!cli_path() || !data_dir()) {                               \
        WARN("SEE_CLI / SEE_DATA not set; skipping CLI test");      \
        return;                                                     \
    }

}  // namespace

TEST_CASE("cli compile reports stats and writes deterministic tables") {
    REQUIRE_CLI();
    const fs::path tmp = fs::temp_directory_path() / "see_cli_compile";
    fs::create_directories(tmp);
    const std::string lexicon = std::string(data_dir()) + "/sample_lexicon.tsv";

    const auto a = run_cli("compile --lexicon " + lexicon + " --out " + (tmp / "a.grids").string());
    CHECK(a.exit_code == 0);
    CHECK(field_of(a.out, "truncated_senses") == "1");  // power's fifth sense
    CHECK(field_of(a.out, "oov_fraction") == "0");

    const auto b = run_cli("compile --lexicon " + lexicon + " --out " + (tmp / "b.grids").string());
    CHECK(b.exit_code == 0);
    CHECK(read_file(tmp / "a.grids") == read_file(tmp / "b.grids"));

    const auto missing = run_cli("compile --lexicon /no/such/file.tsv --out " +
                                 (tmp / "c.grids").string());
    CHECK(missing.exit_code == 2);
    fs::remove_all(tmp);
}

TEST_CASE("cli count reproduces the translation-scale ratios") {
    REQUIRE_CLI();
    const auto res = run_cli("count");
    REQUIRE(res.exit_code == 0);
    const auto rows = parse_tsv(res.out);
    REQUIRE(rows.size() >= 6);
    CHECK(rows[1][0] == "original");
    CHECK(rows[1][2] == "23691264");
    std::vector<std::string> ratios;
    for (const auto& row : rows)
        if (row[0] == "see") ratios.push_back(row[3]);
    CHECK(ratios == std::vector<std::string>{"10.08", "20.16", "45.35", "90.70"});

    const auto again = run_cli("count");
    CHECK(res.out == again.out);

    CHECK(run_cli("count -o 0").exit_code == 2);
}

TEST_CASE("cli solve-ratio picks table-3 values") {
    REQUIRE_CLI();
    const auto res = run_cli("solve-ratio --target 10");
    REQUIRE(res.exit_code == 0);
    const auto rows = parse_tsv(res.out);
    REQUIRE(rows.size() == 3);
    CHECK(rows[1][0] == "see");
    CHECK(rows[1][2] == "18");
    CHECK(rows[2][0] == "matrix");
    CHECK(rows[2][2] == "50");

    CHECK(run_cli("solve-ratio --target 0.5").exit_code == 2);
    CHECK(run_cli("solve-ratio --target 10000000").exit_code == 2);
}

TEST_CASE("cli gradcheck passes, detects injected bugs, validates trials") {
    REQUIRE_CLI();
    const auto ok = run_cli("gradcheck --trials 20");
    CHECK(ok.exit_code == 0);
    CHECK(ok.out.find("status\tpass") != std::string::npos);

    const auto broken = run_cli("gradcheck --trials 20 --inject-bug");
    CHECK(broken.exit_code == 1);
    CHECK(broken.out.find("status\tfail") != std::string::npos);

    CHECK(run_cli("gradcheck --trials 0").exit_code == 2);
}

TEST_CASE("cli materialize matches reconstruction and is byte-deterministic") {
    REQUIRE_CLI();
    const fs::path tmp = fs::temp_directory_path() / "see_cli_mat";
    fs::create_directories(tmp);
    const std::string lexicon = std::string(data_dir()) + "/sample_lexicon.tsv";
    const fs::path grids = tmp / "t.grids";
    REQUIRE(run_cli("compile --lexicon " + lexicon + " -r 4 -o 2 --out " + grids.string())
                .exit_code == 0);

    const see::GridTable table = see::read_grid_table_file(grids);
    const see::SeeConfig cfg{.d = 12,
                             .o = table.order,
                             .r = table.rank,
                             .m = 3,
                             .unit_count = table.vocab.size(),
                             .seed = 321};
    see::write_factor_store_file(tmp / "t.factors", see::init_factors(cfg));

    const std::string base = "materialize --table " + grids.string() + " --store " +
                             (tmp / "t.factors").string() + " -d 12 --out ";
    const auto a = run_cli(base + (tmp / "a.mat").string());
    REQUIRE(a.exit_code == 0);
    CHECK(field_of(a.out, "scalars") == std::to_string(12 * table.tokens.size()));
    const auto b = run_cli(base + (tmp / "b.mat").string());
    REQUIRE(b.exit_code == 0);
    CHECK(read_file(tmp / "a.mat") == read_file(tmp / "b.mat"));

    // lookups equal on-the-fly reconstruction
    const see::DenseMatrix mat = see::read_matrix_file(tmp / "a.mat");
    const see::FactorStore store = see::read_factor_store_file(tmp / "t.factors");
    for (std::size_t w = 0; w < table.grids.size(); ++w) {
        const see::Vec row = see::reconstruct_row(table.grids[w], store, cfg);
        for (int c = 0; c < cfg.d; ++c) CHECK(mat.at(w, c) == row[c]);
    }

    CHECK(run_cli("materialize --table " + grids.string() +
                  " --store /no/such.factors -d 12 --out " + (tmp / "x.mat").string())
              .exit_code == 2);
    fs::remove_all(tmp);
}

TEST_CASE("cli sweep columns behave per axis") {
    REQUIRE_CLI();
    const auto rank_sweep = run_cli("sweep --axis rank --values 1:10");
    REQUIRE(rank_sweep.exit_code == 0);
    const auto rank_rows = parse_tsv(rank_sweep.out);
    REQUIRE(rank_rows.size() == 11);
    for (std::size_t i = 2; i < rank_rows.size(); ++i)
        CHECK(rank_rows[i][2] == rank_rows[1][2]);  // params constant in rank

    const auto order_sweep = run_cli("sweep --axis order --values 1:6");
    REQUIRE(order_sweep.exit_code == 0);
    const auto order_rows = parse_tsv(order_sweep.out);
    for (std::size_t i = 2; i < order_rows.size(); ++i)
        CHECK(std::stoull(order_rows[i][2]) < std::stoull(order_rows[i - 1][2]));

    const auto m_sweep = run_cli("sweep --axis m --values 1:6");
    REQUIRE(m_sweep.exit_code == 0);
    const auto m_rows = parse_tsv(m_sweep.out);
    for (std::size_t i = 2; i < m_rows.size(); ++i)
        CHECK(std::stod(m_rows[i][3]) < std::stod(m_rows[i - 1][3]));  // ratio falls with m
}

TEST_CASE("cli train and distill produce deterministic artifacts") {
    REQUIRE_CLI();
    const fs::path tmp = fs::temp_directory_path() / "see_cli_runs";
    fs::remove_all(tmp);
    const std::string small_task =
        " --vocab 80 --sememes 12 --morphemes 12 --train-n 200 --test-n 80 --seq-len 5";

    const auto t1 = run_cli("train --out " + (tmp / "t1").string() + small_task + " --epochs 5");
    REQUIRE(t1.exit_code == 0);
    CHECK(fs::exists(tmp / "t1" / "teacher.ckpt"));
    CHECK(fs::exists(tmp / "t1" / "config.snapshot"));
    const auto t2 = run_cli("train --out " + (tmp / "t2").string() + small_task + " --epochs 5");
    REQUIRE(t2.exit_code == 0);
    CHECK(read_file(tmp / "t1" / "teacher_metrics.tsv") ==
          read_file(tmp / "t2" / "teacher_metrics.tsv"));
    CHECK(read_file(tmp / "t1" / "teacher.ckpt") == read_file(tmp / "t2" / "teacher.ckpt"));

    const std::string student = " -m 2 --student-epochs 3 --boundary 1 --student-lr 0.1";
    const auto d1 = run_cli("distill --out " + (tmp / "d1").string() + small_task + student +
                            " --epochs 5");
    REQUIRE(d1.exit_code == 0);
    CHECK(fs::exists(tmp / "d1" / "student_metrics.tsv"));
    CHECK(fs::exists(tmp / "d1" / "student.ckpt"));
    CHECK(fs::exists(tmp / "d1" / "summary.tsv"));
    const auto d2 = run_cli("distill --out " + (tmp / "d2").string() + small_task + student +
                            " --epochs 5");
    REQUIRE(d2.exit_code == 0);
    CHECK(read_file(tmp / "d1" / "student_metrics.tsv") ==
          read_file(tmp / "d2" / "student_metrics.tsv"));

    // metrics rows: header + epochs + 1 snapshot
    const auto rows = parse_tsv(read_file(tmp / "d1" / "student_metrics.tsv"));
    CHECK(rows.size() == 1 + 4);
    CHECK(rows[1][1] == "initial");
    CHECK(rows[3][1] == "formal");

    // a bad config is rejected before any work
    CHECK(run_cli("distill --out " + (tmp / "bad").string() + " --classes 0").exit_code == 2);
    fs::remove_all(tmp);
}

TEST_CASE("cli respects the output dir override variable") {
    REQUIRE_CLI();
    const fs::path tmp = fs::temp_directory_path() / "see_cli_env";
    fs::remove_all(tmp);
    fs::create_directories(tmp);
    const std::string lexicon = std::string(data_dir()) + "/sample_lexicon.tsv";
    std::string cmd = std::string("SEE_OUT_DIR=") + (tmp / "redirect").string() + " " +
                      cli_path() + " compile --lexicon " + lexicon +
                      " --out elsewhere.grids >/dev/null 2>&1";
    CHECK(std::system(cmd.c_str()) == 0);
    CHECK(fs::exists(tmp / "redirect" / "elsewhere.grids"));
    fs::remove_all(tmp);
}
