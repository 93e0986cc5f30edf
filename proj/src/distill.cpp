#include "see/distill.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace see {

const char* stage_name(Stage s) { return s == Stage::initial ? "initial" : "formal"; }

double embedding_mse(const DenseMatrix& teacher, const DenseMatrix& student) {
    if (teacher.rows != student.rows || teacher.cols != student.cols)
        throw std::invalid_argument("embedding_mse: shape mismatch");
    if (teacher.scalar_count() == 0) throw std::invalid_argument("embedding_mse: empty tables");
    double sum = 0.0;
    for (std::size_t p = 0; p < teacher.data.size(); ++p) {
        const double diff = teacher.data[p] - student.data[p];
        sum += diff * diff;
    }
    return sum / static_cast<double>(teacher.scalar_count());
}

double hidden_mse(const DenseMatrix& teacher_hiddens, const DenseMatrix& student_hiddens) {
    if (teacher_hiddens.rows != student_hiddens.rows ||
        teacher_hiddens.cols != student_hiddens.cols)
        throw std::invalid_argument("hidden_mse: shape mismatch");
    if (teacher_hiddens.rows == 0) throw std::invalid_argument("hidden_mse: no time steps");
    double sum = 0.0;
    for (std::size_t p = 0; p < teacher_hiddens.data.size(); ++p) {
        const double diff = teacher_hiddens.data[p] - student_hiddens.data[p];
        sum += diff * diff;
    }
    return sum / static_cast<double>(teacher_hiddens.rows);
}

namespace {

Vec log_softmax(ConstSlice logits, double temperature) {
    const double max_z = *std::max_element(logits.begin(), logits.end());
    double z_sum = 0.0;
    Vec out(logits.size());
    for (std::size_t i = 0; i < logits.size(); ++i) {
        out[i] = (logits[i] - max_z) / temperature;
        z_sum += std::exp(out[i]);
    }
    const double log_z = std::log(z_sum);
    for (double& v : out) v -= log_z;
    return out;
}

void check_kl_inputs(ConstSlice z_teacher, ConstSlice z_student, double temperature) {
    if (z_teacher.size() != z_student.size())
        throw std::invalid_argument("kl_distill: logit length mismatch");
    if (z_teacher.size() < 2) throw std::invalid_argument("kl_distill: need >= 2 logits");
    if (!(temperature > 0.0)) throw std::invalid_argument("kl_distill: temperature must be > 0");
}

}  // namespace

Vec softmax(ConstSlice logits, double temperature) {
    Vec out = log_softmax(logits, temperature);
    for (double& v : out) v = std::exp(v);
    return out;
}

double kl_distill(ConstSlice z_teacher, ConstSlice z_student, double temperature,
                  KlOptions opt) {
    check_kl_inputs(z_teacher, z_student, temperature);
    const ConstSlice z_p = opt.reverse ? z_student : z_teacher;
    const ConstSlice z_q = opt.reverse ? z_teacher : z_student;
    const Vec log_p = log_softmax(z_p, temperature);
    const Vec log_q = log_softmax(z_q, temperature);
    double kl = 0.0;
    for (std::size_t i = 0; i < log_p.size(); ++i)
        kl += std::exp(log_p[i]) * (log_p[i] - log_q[i]);
    kl = std::max(kl, 0.0);
    return opt.scale_t_squared ? kl * temperature * temperature : kl;
}

Vec kl_distill_grad_student(ConstSlice z_teacher, ConstSlice z_student, double temperature,
                            KlOptions opt) {
    check_kl_inputs(z_teacher, z_student, temperature);
    const std::size_t n = z_student.size();
    Vec grad(n);
    if (!opt.reverse) {
        // d/dz_s KL(p_t || p_s) = (p_s - p_t) / T
        const Vec p_t = softmax(z_teacher, temperature);
        const Vec p_s = softmax(z_student, temperature);
        for (std::size_t i = 0; i < n; ++i) grad[i] = (p_s[i] - p_t[i]) / temperature;
    } else {
        // d/dz_s KL(p_s || p_t) = p_s * ((log p_s - log p_t) - KL) / T
        const Vec log_s = log_softmax(z_student, temperature);
        const Vec log_t = log_softmax(z_teacher, temperature);
        double kl = 0.0;
        for (std::size_t i = 0; i < n; ++i) kl += std::exp(log_s[i]) * (log_s[i] - log_t[i]);
        for (std::size_t i = 0; i < n; ++i)
            grad[i] = std::exp(log_s[i]) * ((log_s[i] - log_t[i]) - kl) / temperature;
    }
    if (opt.scale_t_squared)
        for (double& g : grad) g *= temperature * temperature;
    return grad;
}

double cross_entropy(const DenseMatrix& pred_probs, const DenseMatrix& labels_onehot) {
    if (pred_probs.rows != labels_onehot.rows || pred_probs.cols != labels_onehot.cols)
        throw std::invalid_argument("cross_entropy: shape mismatch");
    if (pred_probs.rows == 0) throw std::invalid_argument("cross_entropy: no samples");

    constexpr double kEps = 1e-12;
    double sum = 0.0;
    for (std::size_t i = 0; i < pred_probs.rows; ++i) {
        double row_sum = 0.0;
        int ones = 0;
        for (std::size_t c = 0; c < pred_probs.cols; ++c) {
            const double p = pred_probs.at(i, c);
            const double y = labels_onehot.at(i, c);
            row_sum += p;
            if (y == 1.0) {
                ++ones;
                sum -= std::log(std::max(p, kEps));
            } else if (y != 0.0) {
                throw std::invalid_argument("cross_entropy: labels must be one-hot");
            }
        }
        if (std::abs(row_sum - 1.0) > 1e-6)
            throw std::invalid_argument("cross_entropy: probability row does not sum to 1");
        if (ones != 1) throw std::invalid_argument("cross_entropy: labels must be one-hot");
    }
    return sum / static_cast<double>(pred_probs.rows);
}

LossReport total_loss(const LossComponents& components, const LossWeights& weights,
                      Stage stage) {
    if (!(weights.temperature > 0.0))
        throw std::invalid_argument("total_loss: temperature must be > 0");
    if (weights.alpha < 0.0 || weights.beta < 0.0 || weights.gamma < 0.0)
        throw std::invalid_argument("total_loss: weights must be non-negative");

    LossReport report;
    report.components = components;
    report.stage = stage;
    report.total = weights.beta * components.embedding_mse +
                   weights.gamma * components.hidden_mse;
    if (stage == Stage::formal)
        report.total += weights.alpha * components.kl + components.ce;
    return report;
}

Stage stage_of(int epoch, int boundary) {
    if (epoch < 0 || boundary < 0)
        throw std::invalid_argument("stage_of: epoch and boundary must be >= 0");
    return epoch < boundary ? Stage::initial : Stage::formal;
}

}  // namespace see
