#pragma once

#include "see/matrix.hpp"
#include "see/tensor.hpp"

namespace see {

enum class Stage { initial, formal };

const char* stage_name(Stage s);

struct LossWeights {
    double alpha = 1.0;        // KL distillation weight
    double beta = 1.0;         // embedding MSE weight
    double gamma = 1.0;        // hidden MSE weight
    double temperature = 2.0;  // softmax temperature, > 0
};

struct LossComponents {
    double embedding_mse = 0.0;
    double hidden_mse = 0.0;
    double kl = 0.0;
    double ce = 0.0;
};

struct LossReport {
    LossComponents components;
    double total = 0.0;
    Stage stage = Stage::initial;
};

/// Mean squared difference over all entries of two equally shaped tables.
/// The student side is the materialized factor table, which makes the two
/// parameter blocks shape-compatible.
double embedding_mse(const DenseMatrix& teacher, const DenseMatrix& student);

/// Per-step squared Euclidean norm of the hidden-state difference, averaged
/// over steps (rows).
double hidden_mse(const DenseMatrix& teacher_hiddens, const DenseMatrix& student_hiddens);

struct KlOptions {
    bool scale_t_squared = false;  // opt-in T^2 factor
    bool reverse = false;          // student || teacher instead of the written direction
};

/// KL(softmax(z_teacher / T) || softmax(z_student / T)).
double kl_distill(ConstSlice z_teacher, ConstSlice z_student, double temperature,
                  KlOptions opt = {});

/// Gradient of kl_distill with respect to the student logits.
Vec kl_distill_grad_student(ConstSlice z_teacher, ConstSlice z_student, double temperature,
                            KlOptions opt = {});

/// -(1/N) sum_i sum_c y[i,c] * log(max(p[i,c], 1e-12)). Rows of pred_probs
/// must sum to 1 within 1e-6; labels must be one-hot.
double cross_entropy(const DenseMatrix& pred_probs, const DenseMatrix& labels_onehot);

/// Stage-masked weighted total: the initial stage takes beta*emb + gamma*hid
/// only; the formal stage adds alpha*kl + ce.
LossReport total_loss(const LossComponents& components, const LossWeights& weights,
                      Stage stage);

/// initial while epoch < boundary, formal afterwards.
Stage stage_of(int epoch, int boundary = 2);

/// Numerically stable softmax of logits / T.
Vec softmax(ConstSlice logits, double temperature = 1.0);

}  // namespace see
