#include <doctest.h>

#include <set>

#include "see/toy.hpp"

using see::SeeConfig;
using see::Stage;
using see::SyntheticTask;
using see::TaskConfig;

namespace {

TaskConfig small_task_config() {
    TaskConfig cfg;
    cfg.seed = 42;
    cfg.vocab = 120;
    cfg.num_sememes = 16;
    cfg.num_morphemes = 16;
    cfg.classes = 4;
    cfg.seq_len = 7;
    cfg.n_train = 600;
    cfg.n_test = 200;
    return cfg;
}

}  // namespace

TEST_CASE("gen_task is deterministic under a fixed seed") {
    const TaskConfig cfg = small_task_config();
    const SyntheticTask a = see::gen_task(cfg);
    const SyntheticTask b = see::gen_task(cfg);
    CHECK(a.tokens == b.tokens);
    CHECK(a.lexicon == b.lexicon);
    CHECK(a.train_seqs == b.train_seqs);
    CHECK(a.test_seqs == b.test_seqs);
    CHECK(a.train_labels == b.train_labels);
    CHECK(a.test_labels == b.test_labels);
    CHECK(a.majority_baseline == b.majority_baseline);
}

TEST_CASE("gen_task produces a balanced, structured task") {
    const SyntheticTask task = see::gen_task(small_task_config());
    CHECK(task.tokens.size() == 120);
    CHECK(task.lexicon.records.size() == 120);
    CHECK(task.train_seqs.size() == 600);
    CHECK(task.test_seqs.size() == 200);

    // majority-class baseline sits near 1/classes
    CHECK(task.majority_baseline == doctest::Approx(0.25).epsilon(0.2));
    CHECK(task.majority_baseline < 0.30);

    // splits are disjoint
    std::set<std::vector<int>> train(task.train_seqs.begin(), task.train_seqs.end());
    for (const auto& seq : task.test_seqs) CHECK(train.count(seq) == 0);

    // every record respects the lexicon invariants
    for (const auto& rec : task.lexicon.records) {
        CHECK(!rec.morphemes.empty());
        CHECK(!rec.senses.empty());
        for (const auto& sense : rec.senses) CHECK(!sense.empty());
    }
}

TEST_CASE("gen_task with one class is trivially learnable") {
    TaskConfig cfg = small_task_config();
    cfg.classes = 1;
    cfg.n_train = 40;
    cfg.n_test = 20;
    const SyntheticTask task = see::gen_task(cfg);
    for (int label : task.train_labels) CHECK(label == 0);

    // an untrained zero head already predicts class 0 everywhere
    see::TeacherModel blank;
    blank.embedding = see::DenseMatrix(task.tokens.size(), 8, 0.1);
    blank.head.weight = see::DenseMatrix(1, 8, 0.0);
    blank.head.bias = see::Vec(1, 0.0);
    CHECK(see::evaluate_teacher(blank, task.test_seqs, task.test_labels) == 1.0);
}

TEST_CASE("train_teacher learns the task and is reproducible") {
    const SyntheticTask task = see::gen_task(small_task_config());

    const see::TeacherResult first = see::train_teacher(task, 16, 30, 0.3, 7);
    CHECK(first.stats.test_acc > 0.9);
    CHECK(first.stats.train_acc > 0.9);

    const see::TeacherResult second = see::train_teacher(task, 16, 30, 0.3, 7);
    CHECK(first.stats.epoch_loss == second.stats.epoch_loss);
    CHECK(first.model.embedding == second.model.embedding);

    SUBCASE("zero learning rate leaves parameters at their init") {
        const see::TeacherResult frozen = see::train_teacher(task, 16, 3, 0.0, 7);
        const see::TeacherResult init_only = see::train_teacher(task, 16, 0, 0.5, 7);
        CHECK(frozen.model.embedding == init_only.model.embedding);
        CHECK(frozen.model.head.weight == init_only.model.head.weight);
    }
}

TEST_CASE("an untrained multi-class model scores near chance") {
    const SyntheticTask task = see::gen_task(small_task_config());
    const see::TeacherResult untrained = see::train_teacher(task, 16, 0, 0.3, 7);
    const double acc = see::evaluate_teacher(untrained.model, task.test_seqs, task.test_labels);
    CHECK(acc > 0.15);
    CHECK(acc < 0.35);
    CHECK(acc == see::evaluate_teacher(untrained.model, task.test_seqs, task.test_labels));
}

TEST_CASE("train_student_see runs the two-stage schedule") {
    const SyntheticTask task = see::gen_task(small_task_config());
    const see::TeacherResult teacher = see::train_teacher(task, 16, 30, 0.3, 7);

    const SeeConfig student_cfg{.d = 0, .o = 2, .r = 3, .m = 2, .unit_count = 0, .seed = 11};
    const see::LossWeights weights{};

    SUBCASE("boundary == epochs keeps every epoch in the initial stage") {
        const auto result =
            see::train_student_see(task, teacher.model, student_cfg, weights, 4, 4, 0.3, 5);
        REQUIRE(result.trace.size() == 5);
        for (const auto& entry : result.trace) {
            CHECK(entry.stage == Stage::initial);
            // CE and KL are reported but masked out of the total
            CHECK(entry.total == doctest::Approx(weights.beta * entry.losses.embedding_mse +
                                                 weights.gamma * entry.losses.hidden_mse));
            CHECK(entry.losses.ce > 0.0);
        }
    }

    SUBCASE("embedding mse falls across the initial stage and params match") {
        const auto result =
            see::train_student_see(task, teacher.model, student_cfg, weights, 2, 3, 0.3, 5);
        REQUIRE(result.trace.size() == 4);
        CHECK(result.trace[2].losses.embedding_mse < result.trace[0].losses.embedding_mse);

        SeeConfig expect = student_cfg;
        expect.d = 16;
        expect.unit_count = see::build_unit_vocab(task.lexicon).size();
        CHECK(result.embedding_params == see::param_count(expect));
        CHECK(result.compression_ratio >= 5.0);

        // deterministic rerun
        const auto again =
            see::train_student_see(task, teacher.model, student_cfg, weights, 2, 3, 0.3, 5);
        for (std::size_t i = 0; i < result.trace.size(); ++i) {
            CHECK(result.trace[i].total == again.trace[i].total);
            CHECK(result.trace[i].test_acc == again.trace[i].test_acc);
        }
    }

    SUBCASE("a config below 5x compression is rejected") {
        SeeConfig fat = student_cfg;
        fat.m = 50;
        CHECK_THROWS_AS(
            see::train_student_see(task, teacher.model, fat, weights, 2, 2, 0.3, 5),
            std::invalid_argument);
    }
}

TEST_CASE("one student step only moves factor rows referenced by its batches") {
    TaskConfig cfg = small_task_config();
    cfg.n_train = 8;  // a single batch
    cfg.n_test = 4;
    cfg.seq_len = 3;
    const SyntheticTask task = see::gen_task(cfg);
    const see::TeacherResult teacher = see::train_teacher(task, 16, 5, 0.3, 7);

    const SeeConfig student_cfg{.d = 0, .o = 2, .r = 3, .m = 2, .unit_count = 0, .seed = 11};
    see::LossWeights weights{};
    weights.beta = 0.0;  // keep the full-table term out so only batch rows move

    const auto result =
        see::train_student_see(task, teacher.model, student_cfg, weights, 0, 1, 0.2, 5);

    const see::FactorStore before = see::init_factors(result.model.cfg);
    const see::FactorStore& after = result.model.store;

    // referenced units: union over the grids of tokens present in training
    std::set<std::uint32_t> referenced;
    std::set<int> batch_tokens;
    for (const auto& seq : task.train_seqs)
        for (int t : seq) batch_tokens.insert(t);
    for (int t : batch_tokens)
        for (std::uint32_t id : result.model.table.grids[static_cast<std::size_t>(t)].ids)
            referenced.insert(id);

    bool any_changed = false;
    for (std::uint32_t u = 0; u < result.model.cfg.unit_count; ++u) {
        for (int i = 0; i < result.model.cfg.m; ++i) {
            bool changed = false;
            const auto b = before.row(u, i);
            const auto a = after.row(u, i);
            for (std::size_t c = 0; c < b.size(); ++c) changed |= a[c] != b[c];
            if (u == see::UnitVocab::kZeroId) {
                CHECK(!changed);
                for (double v : a) CHECK(v == 0.0);
            }
            if (changed) {
                any_changed = true;
                CHECK(referenced.count(u) == 1);
            }
        }
    }
    CHECK(any_changed);
}

TEST_CASE("checkpoints round trip") {
    const SyntheticTask task = see::gen_task(small_task_config());
    const see::TeacherResult teacher = see::train_teacher(task, 8, 2, 0.3, 7);

    const auto dir = std::filesystem::temp_directory_path() / "see_toy_test";
    std::filesystem::create_directories(dir);

    const auto teacher_path = dir / "teacher.ckpt";
    see::write_teacher_file(teacher_path, teacher.model);
    const see::TeacherModel t2 = see::read_teacher_file(teacher_path);
    CHECK(t2.embedding == teacher.model.embedding);
    CHECK(t2.head.weight == teacher.model.head.weight);
    CHECK(t2.head.bias == teacher.model.head.bias);

    const SeeConfig student_cfg{.d = 0, .o = 2, .r = 3, .m = 1, .unit_count = 0, .seed = 11};
    const auto result =
        see::train_student_see(task, teacher.model, student_cfg, {}, 1, 1, 0.2, 5);
    const auto student_path = dir / "student.ckpt";
    see::write_student_file(student_path, result.model);
    const see::StudentModel s2 = see::read_student_file(student_path);
    CHECK(s2.store == result.model.store);
    CHECK(s2.cfg.m == result.model.cfg.m);
    CHECK(s2.table.grids == result.model.table.grids);
    CHECK(s2.head.weight == result.model.head.weight);

    std::filesystem::remove_all(dir);
}
