#include "see/toy.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <random>
#include <set>
#include <stdexcept>
#include <string>

#include "see/io.hpp"

namespace see {

namespace {

constexpr int kBatchSize = 32;

// Portable uniform double in [0, 1).
double unit_real(std::mt19937_64& rng) {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

int uniform_int(std::mt19937_64& rng, int n) {
    return static_cast<int>(rng() % static_cast<std::uint64_t>(n));
}

// Zipf-like sememe sampler: sememe i belongs to class i % classes and has
// weight 1 / (1 + i / classes), so ranks within a class decay while class
// marginals stay uniform. draw_in_class restricts to one class's sememes.
class SememeSampler {
public:
    SememeSampler(int num_sememes, int classes) : classes_(classes) {
        cum_.reserve(num_sememes);
        double total = 0.0;
        for (int i = 0; i < num_sememes; ++i) {
            total += 1.0 / (1.0 + i / classes);
            cum_.push_back(total);
        }
    }
    int draw(std::mt19937_64& rng) const {
        const double u = unit_real(rng) * cum_.back();
        return static_cast<int>(std::lower_bound(cum_.begin(), cum_.end(), u) - cum_.begin());
    }
    int draw_in_class(std::mt19937_64& rng, int cls) const {
        for (int attempt = 0; attempt < 64; ++attempt) {
            const int s = draw(rng);
            if (s % classes_ == cls) return s;
        }
        return cls;  // rank-0 sememe of the class
    }

private:
    int classes_;
    std::vector<double> cum_;
};

Vec mean_pool(const DenseMatrix& emb, const std::vector<int>& seq) {
    Vec h(emb.cols, 0.0);
    for (int t : seq) {
        const auto row = emb.row(static_cast<std::size_t>(t));
        for (std::size_t i = 0; i < emb.cols; ++i) h[i] += row[i];
    }
    const double inv = 1.0 / static_cast<double>(seq.size());
    for (double& v : h) v *= inv;
    return h;
}

Vec head_logits(const Classifier& head, const Vec& h) {
    Vec z(head.bias);
    for (std::size_t c = 0; c < head.weight.rows; ++c) {
        const auto row = head.weight.row(c);
        for (std::size_t i = 0; i < head.weight.cols; ++i) z[c] += row[i] * h[i];
    }
    return z;
}

int argmax_lowest(const Vec& z) {
    int best = 0;
    for (std::size_t i = 1; i < z.size(); ++i)
        if (z[i] > z[best]) best = static_cast<int>(i);
    return best;
}

void sgd_step(std::vector<double>& params, std::vector<double>& velocity,
              const std::vector<double>& grad, double lr, double momentum) {
    for (std::size_t i = 0; i < params.size(); ++i) {
        velocity[i] = momentum * velocity[i] + grad[i];
        params[i] -= lr * velocity[i];
    }
}

}  // namespace

void TaskConfig::validate() const {
    if (vocab < 1 || num_sememes < 1 || num_morphemes < 1 || classes < 1 || seq_len < 1 ||
        n_train < 1 || n_test < 1 || max_senses < 1 || max_sememes_per_sense < 1)
        throw std::invalid_argument("TaskConfig: all counts must be positive");
    if (num_morphemes > 100)
        throw std::invalid_argument("TaskConfig: morpheme pool is capped at 100");
    if (static_cast<long long>(num_morphemes) * num_morphemes < vocab)
        throw std::invalid_argument("TaskConfig: vocab exceeds morpheme pair count");
    if (num_sememes < classes)
        throw std::invalid_argument("TaskConfig: need at least one sememe per class");
}

SyntheticTask gen_task(const TaskConfig& cfg) {
    cfg.validate();
    std::mt19937_64 rng(cfg.seed);
    SyntheticTask task;
    task.config = cfg;

    static const std::string kConsonants = "bcdfghjklmnpqrstvwxz";
    static const std::string kVowels = "aeiou";
    std::vector<std::string> morphs;
    for (int i = 0; i < cfg.num_morphemes; ++i)
        morphs.push_back({kConsonants[i / 5 % kConsonants.size()], kVowels[i % 5]});

    std::vector<std::string> sememes;
    for (int i = 0; i < cfg.num_sememes; ++i) sememes.push_back("s" + std::to_string(i));

    const SememeSampler sampler(cfg.num_sememes, cfg.classes);

    for (int w = 0; w < cfg.vocab; ++w) {
        LexiconRecord rec;
        rec.word = morphs[w / cfg.num_morphemes] + morphs[w % cfg.num_morphemes];
        rec.morphemes = {morphs[w / cfg.num_morphemes], morphs[w % cfg.num_morphemes]};

        // primary classes go round-robin so label classes stay balanced;
        // the sememe within the class is still Zipf-distributed
        const int primary = sampler.draw_in_class(rng, w % cfg.classes);
        task.token_class.push_back(primary % cfg.classes);

        const int n_senses = 1 + uniform_int(rng, cfg.max_senses);
        for (int s = 0; s < n_senses; ++s) {
            std::vector<std::string> sense;
            const int want = 1 + uniform_int(rng, cfg.max_sememes_per_sense);
            if (s == 0) sense.push_back(sememes[primary]);
            int attempts = 0;
            while (static_cast<int>(sense.size()) < want && attempts < 16) {
                const auto& cand = sememes[sampler.draw(rng)];
                if (std::find(sense.begin(), sense.end(), cand) == sense.end())
                    sense.push_back(cand);
                ++attempts;
            }
            rec.senses.push_back(std::move(sense));
        }
        task.tokens.push_back(rec.word);
        task.lexicon.index.emplace(rec.word, task.lexicon.records.size());
        task.lexicon.records.push_back(std::move(rec));
    }

    // Sequences with a unique majority class; ties are redrawn so labels
    // stay a clean function of the latent structure.
    std::set<std::vector<int>> seen;
    std::vector<std::uint64_t> label_counts(cfg.classes, 0);
    const int total = cfg.n_train + cfg.n_test;
    long long attempts_left = 10000LL * total;
    for (int s = 0; s < total; ++s) {
        while (true) {
            if (--attempts_left < 0)
                throw std::runtime_error("gen_task: could not draw enough distinct sequences");
            std::vector<int> seq(cfg.seq_len);
            for (int& t : seq) t = uniform_int(rng, cfg.vocab);

            std::vector<int> counts(cfg.classes, 0);
            for (int t : seq) ++counts[task.token_class[t]];
            const int top = *std::max_element(counts.begin(), counts.end());
            if (std::count(counts.begin(), counts.end(), top) != 1) continue;
            if (seen.count(seq)) continue;

            const int label = static_cast<int>(
                std::max_element(counts.begin(), counts.end()) - counts.begin());
            seen.insert(seq);
            ++label_counts[label];
            if (s < cfg.n_train) {
                task.train_seqs.push_back(std::move(seq));
                task.train_labels.push_back(label);
            } else {
                task.test_seqs.push_back(std::move(seq));
                task.test_labels.push_back(label);
            }
            break;
        }
    }
    task.majority_baseline =
        static_cast<double>(*std::max_element(label_counts.begin(), label_counts.end())) /
        static_cast<double>(total);
    return task;
}

double evaluate(const DenseMatrix& embedding, const Classifier& head,
                const std::vector<std::vector<int>>& seqs, const std::vector<int>& labels) {
    if (seqs.size() != labels.size()) throw std::invalid_argument("evaluate: split size mismatch");
    if (seqs.empty()) throw std::invalid_argument("evaluate: empty split");
    std::size_t hits = 0;
    for (std::size_t s = 0; s < seqs.size(); ++s) {
        const Vec z = head_logits(head, mean_pool(embedding, seqs[s]));
        if (argmax_lowest(z) == labels[s]) ++hits;
    }
    return static_cast<double>(hits) / static_cast<double>(seqs.size());
}

double evaluate_teacher(const TeacherModel& teacher, const std::vector<std::vector<int>>& seqs,
                        const std::vector<int>& labels) {
    return evaluate(teacher.embedding, teacher.head, seqs, labels);
}

double evaluate_student(const StudentModel& student, const std::vector<std::vector<int>>& seqs,
                        const std::vector<int>& labels) {
    return evaluate(materialize(student.table, student.store, student.cfg), student.head, seqs,
                    labels);
}

TeacherResult train_teacher(const SyntheticTask& task, int d, int epochs, double lr,
                            std::uint64_t seed, double momentum) {
    if (d < 1) throw std::invalid_argument("train_teacher: d must be >= 1");
    if (epochs < 0 || lr < 0.0) throw std::invalid_argument("train_teacher: bad epochs/lr");

    const auto vocab = task.tokens.size();
    const auto classes = static_cast<std::size_t>(task.config.classes);
    std::mt19937_64 rng(seed);

    TeacherModel model;
    model.embedding = DenseMatrix(vocab, static_cast<std::size_t>(d));
    std::normal_distribution<double> normal(0.0, 1.0 / std::sqrt(static_cast<double>(d)));
    for (double& v : model.embedding.data) v = normal(rng);
    model.head.weight = DenseMatrix(classes, static_cast<std::size_t>(d));
    model.head.bias = Vec(classes, 0.0);

    std::vector<double> vel_emb(model.embedding.data.size(), 0.0);
    std::vector<double> vel_w(model.head.weight.data.size(), 0.0);
    std::vector<double> vel_b(classes, 0.0);

    TeacherResult result;
    std::vector<std::size_t> order(task.train_seqs.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;

    for (int epoch = 0; epoch < epochs; ++epoch) {
        std::shuffle(order.begin(), order.end(), rng);
        double epoch_loss = 0.0;
        std::size_t batches = 0;

        for (std::size_t start = 0; start < order.size(); start += kBatchSize) {
            const std::size_t end = std::min(order.size(), start + kBatchSize);
            const double inv_batch = 1.0 / static_cast<double>(end - start);

            std::vector<double> g_emb(model.embedding.data.size(), 0.0);
            std::vector<double> g_w(model.head.weight.data.size(), 0.0);
            std::vector<double> g_b(classes, 0.0);
            double batch_loss = 0.0;

            for (std::size_t s = start; s < end; ++s) {
                const auto& seq = task.train_seqs[order[s]];
                const int label = task.train_labels[order[s]];
                const Vec h = mean_pool(model.embedding, seq);
                const Vec z = head_logits(model.head, h);
                const Vec p = softmax(z);
                batch_loss -= std::log(std::max(p[label], 1e-12));

                Vec dz = p;
                dz[label] -= 1.0;
                for (double& v : dz) v *= inv_batch;

                Vec dh(static_cast<std::size_t>(d), 0.0);
                for (std::size_t c = 0; c < classes; ++c) {
                    g_b[c] += dz[c];
                    const auto w_row = model.head.weight.row(c);
                    for (int i = 0; i < d; ++i) {
                        g_w[c * d + i] += dz[c] * h[i];
                        dh[i] += dz[c] * w_row[i];
                    }
                }
                const double inv_len = 1.0 / static_cast<double>(seq.size());
                for (int t : seq)
                    for (int i = 0; i < d; ++i)
                        g_emb[static_cast<std::size_t>(t) * d + i] += dh[i] * inv_len;
            }

            batch_loss *= inv_batch;
            if (!std::isfinite(batch_loss))
                throw std::runtime_error("train_teacher: loss diverged");
            epoch_loss += batch_loss;
            ++batches;

            sgd_step(model.embedding.data, vel_emb, g_emb, lr, momentum);
            sgd_step(model.head.weight.data, vel_w, g_w, lr, momentum);
            sgd_step(model.head.bias, vel_b, g_b, lr, momentum);
        }
        result.stats.epoch_loss.push_back(epoch_loss / static_cast<double>(batches));
    }

    result.stats.train_acc = evaluate(model.embedding, model.head, task.train_seqs, task.train_labels);
    result.stats.test_acc = evaluate(model.embedding, model.head, task.test_seqs, task.test_labels);
    result.model = std::move(model);
    return result;
}

namespace {

struct StudentLossAverages {
    double hidden = 0.0;
    double kl = 0.0;
    double ce = 0.0;
};

// Full-train-set loss components for the metrics trace.
StudentLossAverages student_set_losses(const SyntheticTask& task, const TeacherModel& teacher,
                                       const DenseMatrix& student_table, const Classifier& head,
                                       double temperature) {
    StudentLossAverages out;
    const auto n = task.train_seqs.size();
    const auto classes = static_cast<std::size_t>(task.config.classes);

    DenseMatrix probs(n, classes);
    DenseMatrix onehot(n, classes);
    double hidden_sum = 0.0;
    std::size_t steps = 0;

    for (std::size_t s = 0; s < n; ++s) {
        const auto& seq = task.train_seqs[s];
        for (int t : seq) {
            const auto ts = teacher.embedding.row(static_cast<std::size_t>(t));
            const auto ss = student_table.row(static_cast<std::size_t>(t));
            for (std::size_t i = 0; i < ts.size(); ++i) {
                const double diff = ts[i] - ss[i];
                hidden_sum += diff * diff;
            }
            ++steps;
        }
        const Vec z_t = head_logits(teacher.head, mean_pool(teacher.embedding, seq));
        const Vec z_s = head_logits(head, mean_pool(student_table, seq));
        out.kl += kl_distill(z_t, z_s, temperature);
        const Vec p = softmax(z_s);
        for (std::size_t c = 0; c < classes; ++c) probs.at(s, c) = p[c];
        onehot.at(s, static_cast<std::size_t>(task.train_labels[s])) = 1.0;
    }
    out.hidden = hidden_sum / static_cast<double>(steps);
    out.kl /= static_cast<double>(n);
    out.ce = cross_entropy(probs, onehot);
    return out;
}

EpochMetrics student_metrics(const SyntheticTask& task, const TeacherModel& teacher,
                             const SeeConfig& cfg, const GridTable& table,
                             const FactorStore& store, const Classifier& head,
                             const LossWeights& weights, int entry, int boundary) {
    const DenseMatrix student_table = materialize(table, store, cfg);
    const auto set_losses = student_set_losses(task, teacher, student_table, head,
                                               weights.temperature);
    EpochMetrics m;
    m.epoch = entry;
    m.stage = stage_of(entry == 0 ? 0 : entry - 1, boundary);
    m.losses.embedding_mse = embedding_mse(teacher.embedding, student_table);
    m.losses.hidden_mse = set_losses.hidden;
    m.losses.kl = set_losses.kl;
    m.losses.ce = set_losses.ce;
    m.total = total_loss(m.losses, weights, m.stage).total;
    m.train_acc = evaluate(student_table, head, task.train_seqs, task.train_labels);
    m.test_acc = evaluate(student_table, head, task.test_seqs, task.test_labels);
    return m;
}

}  // namespace

StudentResult train_student_see(const SyntheticTask& task, const TeacherModel& teacher,
                                const SeeConfig& see_cfg, const LossWeights& weights,
                                int stage_boundary, int epochs, double lr,
                                std::uint64_t seed, double momentum) {
    if (stage_boundary < 0 || epochs < 0 || lr < 0.0)
        throw std::invalid_argument("train_student_see: bad schedule");
    if (teacher.embedding.rows != task.tokens.size())
        throw std::invalid_argument("train_student_see: teacher does not match task vocab");

    const int d = static_cast<int>(teacher.embedding.cols);
    const UnitVocab vocab = build_unit_vocab(task.lexicon);

    SeeConfig cfg = see_cfg;
    cfg.d = d;
    cfg.unit_count = vocab.size();
    cfg.validate();
    if (cfg.r < 2) throw std::invalid_argument("train_student_see: r must be >= 2");

    const std::uint64_t original = teacher.embedding.scalar_count();
    const std::uint64_t compressed = param_count(cfg);
    const double ratio = static_cast<double>(original) / static_cast<double>(compressed);
    if (ratio < 5.0)
        throw std::invalid_argument("train_student_see: config reaches only " +
                                    std::to_string(ratio) + "x compression; need >= 5x");

    StudentResult result;
    result.embedding_params = compressed;
    result.compression_ratio = ratio;

    GridTable table = compile_table(task.lexicon, task.tokens, vocab, cfg.r, cfg.o);
    FactorStore store = init_factors(cfg);
    Classifier head{teacher.head.weight, teacher.head.bias};  // student starts from the teacher head

    const auto vocab_size = task.tokens.size();
    const auto classes = static_cast<std::size_t>(task.config.classes);
    const std::uint64_t table_scalars = original;

    std::vector<double> vel_f(store.raw().size(), 0.0);
    std::vector<double> vel_w(head.weight.data.size(), 0.0);
    std::vector<double> vel_b(head.bias.size(), 0.0);

    std::mt19937_64 rng(seed);
    std::vector<std::size_t> order(task.train_seqs.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;

    result.trace.push_back(
        student_metrics(task, teacher, cfg, table, store, head, weights, 0, stage_boundary));

    for (int epoch = 0; epoch < epochs; ++epoch) {
        const Stage stage = stage_of(epoch, stage_boundary);
        std::shuffle(order.begin(), order.end(), rng);

        for (std::size_t start = 0; start < order.size(); start += kBatchSize) {
            const std::size_t end = std::min(order.size(), start + kBatchSize);
            const double inv_batch = 1.0 / static_cast<double>(end - start);

            const DenseMatrix student_table = materialize(table, store, cfg);

            DenseMatrix upstream(vocab_size, static_cast<std::size_t>(d));
            std::vector<std::uint8_t> touched(vocab_size, 0);

            if (weights.beta > 0.0) {
                const double scale = 2.0 * weights.beta / static_cast<double>(table_scalars);
                for (std::size_t p = 0; p < upstream.data.size(); ++p)
                    upstream.data[p] =
                        scale * (student_table.data[p] - teacher.embedding.data[p]);
                std::fill(touched.begin(), touched.end(), std::uint8_t{1});
            }

            std::vector<double> g_w(head.weight.data.size(), 0.0);
            std::vector<double> g_b(head.bias.size(), 0.0);

            std::size_t batch_steps = 0;
            for (std::size_t s = start; s < end; ++s) batch_steps += task.train_seqs[order[s]].size();

            for (std::size_t s = start; s < end; ++s) {
                const auto& seq = task.train_seqs[order[s]];
                const int label = task.train_labels[order[s]];

                if (weights.gamma > 0.0) {
                    const double scale = 2.0 * weights.gamma / static_cast<double>(batch_steps);
                    for (int t : seq) {
                        const auto ts = teacher.embedding.row(static_cast<std::size_t>(t));
                        const auto ss = student_table.row(static_cast<std::size_t>(t));
                        auto up = upstream.row(static_cast<std::size_t>(t));
                        for (int i = 0; i < d; ++i) up[i] += scale * (ss[i] - ts[i]);
                        touched[static_cast<std::size_t>(t)] = 1;
                    }
                }

                if (stage == Stage::formal) {
                    const Vec h_s = mean_pool(student_table, seq);
                    const Vec h_t = mean_pool(teacher.embedding, seq);
                    const Vec z_s = head_logits(head, h_s);
                    const Vec z_t = head_logits(teacher.head, h_t);

                    Vec dz(classes, 0.0);
                    const Vec kl_grad =
                        kl_distill_grad_student(z_t, z_s, weights.temperature);
                    const Vec p_s = softmax(z_s);
                    for (std::size_t c = 0; c < classes; ++c) {
                        dz[c] = weights.alpha * kl_grad[c] * inv_batch +
                                (p_s[c] - (static_cast<int>(c) == label ? 1.0 : 0.0)) * inv_batch;
                    }

                    Vec dh(static_cast<std::size_t>(d), 0.0);
                    for (std::size_t c = 0; c < classes; ++c) {
                        g_b[c] += dz[c];
                        const auto w_row = head.weight.row(c);
                        for (int i = 0; i < d; ++i) {
                            g_w[c * static_cast<std::size_t>(d) + i] += dz[c] * h_s[i];
                            dh[i] += dz[c] * w_row[i];
                        }
                    }
                    const double inv_len = 1.0 / static_cast<double>(seq.size());
                    for (int t : seq) {
                        auto up = upstream.row(static_cast<std::size_t>(t));
                        for (int i = 0; i < d; ++i) up[i] += dh[i] * inv_len;
                        touched[static_cast<std::size_t>(t)] = 1;
                    }
                }
            }

            std::vector<double> g_f(store.raw().size(), 0.0);
            for (std::size_t w = 0; w < vocab_size; ++w) {
                if (!touched[w]) continue;
                const GradMap grads =
                    reconstruct_backward(table.grids[w], store, cfg, upstream.row(w));
                for (const auto& [key, g] : grads) {
                    const std::size_t base = store.offset(key.first, key.second);
                    for (std::size_t c = 0; c < g.size(); ++c) g_f[base + c] += g[c];
                }
            }

            sgd_step(store.raw_mut(), vel_f, g_f, lr, momentum);
            if (stage == Stage::formal) {
                sgd_step(head.weight.data, vel_w, g_w, lr, momentum);
                sgd_step(head.bias, vel_b, g_b, lr, momentum);
            }
        }

        EpochMetrics entry = student_metrics(task, teacher, cfg, table, store, head, weights,
                                             epoch + 1, stage_boundary);
        if (!std::isfinite(entry.total))
            throw std::runtime_error("train_student_see: loss diverged");
        result.trace.push_back(entry);
    }

    result.model = StudentModel{cfg, std::move(table), std::move(store), std::move(head)};
    return result;
}

namespace {
constexpr char kTeacherMagic[5] = "SEET";
constexpr char kStudentMagic[5] = "SEES";
constexpr std::uint32_t kCheckpointVersion = 1;

void write_classifier(std::ostream& os, const Classifier& head) {
    write_matrix(os, head.weight);
    io::write_le<std::uint64_t>(os, head.bias.size());
    for (double v : head.bias) io::write_f64(os, v);
}

Classifier read_classifier(std::istream& is) {
    Classifier head;
    head.weight = read_matrix(is);
    head.bias.resize(io::read_le<std::uint64_t>(is));
    for (double& v : head.bias) v = io::read_f64(is);
    return head;
}
}  // namespace

void write_teacher_file(const std::filesystem::path& path, const TeacherModel& teacher) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw std::runtime_error("cannot open for writing: " + path.string());
    io::write_magic(os, kTeacherMagic);
    io::write_le<std::uint32_t>(os, kCheckpointVersion);
    write_matrix(os, teacher.embedding);
    write_classifier(os, teacher.head);
}

TeacherModel read_teacher_file(const std::filesystem::path& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw std::runtime_error("cannot open for reading: " + path.string());
    io::expect_magic(is, kTeacherMagic, "teacher checkpoint");
    if (io::read_le<std::uint32_t>(is) != kCheckpointVersion)
        throw std::runtime_error("teacher checkpoint: unsupported version");
    TeacherModel teacher;
    teacher.embedding = read_matrix(is);
    teacher.head = read_classifier(is);
    return teacher;
}

void write_student_file(const std::filesystem::path& path, const StudentModel& student) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw std::runtime_error("cannot open for writing: " + path.string());
    io::write_magic(os, kStudentMagic);
    io::write_le<std::uint32_t>(os, kCheckpointVersion);
    io::write_le<std::uint32_t>(os, static_cast<std::uint32_t>(student.cfg.d));
    io::write_le<std::uint32_t>(os, static_cast<std::uint32_t>(student.cfg.o));
    io::write_le<std::uint32_t>(os, static_cast<std::uint32_t>(student.cfg.r));
    io::write_le<std::uint32_t>(os, static_cast<std::uint32_t>(student.cfg.m));
    io::write_le<std::uint32_t>(os, student.cfg.unit_count);
    io::write_le<std::uint64_t>(os, student.cfg.seed);
    io::write_f64(os, student.cfg.target_var);
    write_grid_table(os, student.table);
    write_factor_store(os, student.store);
    write_classifier(os, student.head);
}

StudentModel read_student_file(const std::filesystem::path& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw std::runtime_error("cannot open for reading: " + path.string());
    io::expect_magic(is, kStudentMagic, "student checkpoint");
    if (io::read_le<std::uint32_t>(is) != kCheckpointVersion)
        throw std::runtime_error("student checkpoint: unsupported version");
    StudentModel student;
    student.cfg.d = static_cast<int>(io::read_le<std::uint32_t>(is));
    student.cfg.o = static_cast<int>(io::read_le<std::uint32_t>(is));
    student.cfg.r = static_cast<int>(io::read_le<std::uint32_t>(is));
    student.cfg.m = static_cast<int>(io::read_le<std::uint32_t>(is));
    student.cfg.unit_count = io::read_le<std::uint32_t>(is);
    student.cfg.seed = io::read_le<std::uint64_t>(is);
    student.cfg.target_var = io::read_f64(is);
    student.table = read_grid_table(is);
    student.store = read_factor_store(is);
    student.head = read_classifier(is);
    return student;
}

}  // namespace see
