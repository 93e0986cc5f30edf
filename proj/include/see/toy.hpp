#pragma once

#include <cstdint>
#include <filesystem>
#include <vector>

#include "see/distill.hpp"
#include "see/embedding.hpp"
#include "see/lexicon.hpp"
#include "see/matrix.hpp"

namespace see {

/// Synthetic classification task whose labels depend on latent sememe
/// structure: every token draws a primary sememe, sememes map to classes,
/// and a sequence is labeled with the majority class of its tokens.
struct TaskConfig {
    std::uint64_t seed = 1;
    int vocab = 480;          // tokens, formed as morpheme pairs
    int num_sememes = 32;
    int num_morphemes = 24;
    int classes = 4;
    int seq_len = 9;
    int n_train = 4000;
    int n_test = 1000;
    int max_senses = 4;
    int max_sememes_per_sense = 2;

    void validate() const;
};

struct SyntheticTask {
    TaskConfig config;
    std::vector<std::string> tokens;
    Lexicon lexicon;                  // generated sememe/morpheme records
    std::vector<int> token_class;     // class of each token's primary sememe
    std::vector<std::vector<int>> train_seqs, test_seqs;
    std::vector<int> train_labels, test_labels;
    double majority_baseline = 0.0;   // top label share over all sequences
};

SyntheticTask gen_task(const TaskConfig& cfg);

struct Classifier {
    DenseMatrix weight;  // classes x d
    Vec bias;            // classes
};

struct TeacherModel {
    DenseMatrix embedding;  // V x d
    Classifier head;
};

struct TeacherStats {
    std::vector<double> epoch_loss;
    double train_acc = 0.0;
    double test_acc = 0.0;
};

struct TeacherResult {
    TeacherModel model;
    TeacherStats stats;
};

/// Minibatch SGD (momentum) through mean-pool + linear head and the dense
/// table. Throws on divergence (non-finite loss).
TeacherResult train_teacher(const SyntheticTask& task, int d, int epochs, double lr,
                            std::uint64_t seed, double momentum = 0.9);

struct StudentModel {
    SeeConfig cfg;
    GridTable table;
    FactorStore store;
    Classifier head;
};

struct EpochMetrics {
    int epoch = 0;  // 0 is the pre-training snapshot; k is after k epochs
    Stage stage = Stage::initial;
    LossComponents losses;
    double total = 0.0;
    double train_acc = 0.0;
    double test_acc = 0.0;
};

struct StudentResult {
    StudentModel model;
    std::vector<EpochMetrics> trace;
    std::uint64_t embedding_params = 0;
    double compression_ratio = 0.0;
};

/// Two-stage distillation of an SEE student against a trained teacher.
/// see_cfg supplies o/r/m/seed/target_var; d and unit_count are filled in
/// from the teacher and the task lexicon. Epochs before stage_boundary use
/// the initial-stage losses (embedding + hidden MSE) only. The student head
/// starts as a copy of the teacher head. Requires >= 5x embedding
/// compression. trace[k] holds metrics after k epochs (k = 0 pre-training).
StudentResult train_student_see(const SyntheticTask& task, const TeacherModel& teacher,
                                const SeeConfig& see_cfg, const LossWeights& weights,
                                int stage_boundary, int epochs, double lr,
                                std::uint64_t seed, double momentum = 0.9);

/// Fraction of sequences whose argmax logit (lowest index wins ties) hits
/// the label. Deterministic.
double evaluate(const DenseMatrix& embedding, const Classifier& head,
                const std::vector<std::vector<int>>& seqs, const std::vector<int>& labels);
double evaluate_teacher(const TeacherModel& teacher, const std::vector<std::vector<int>>& seqs,
                        const std::vector<int>& labels);
double evaluate_student(const StudentModel& student, const std::vector<std::vector<int>>& seqs,
                        const std::vector<int>& labels);

// Versioned checkpoint containers ("SEET" / "SEES").
void write_teacher_file(const std::filesystem::path& path, const TeacherModel& teacher);
TeacherModel read_teacher_file(const std::filesystem::path& path);
void write_student_file(const std::filesystem::path& path, const StudentModel& student);
StudentModel read_student_file(const std::filesystem::path& path);

}  // namespace see
