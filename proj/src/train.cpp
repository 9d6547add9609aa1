// Copyright 2026 The QViT Authors.

// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at

//     http://www.apache.org/licenses/LICENSE-2.0

// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
#include "qvit/train.hpp"

#include "qvit/errors.hpp"
#include "qvit/io.hpp"
#include "qvit/random.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <sstream>
#include <thread>

namespace qvit::train {

namespace fs = std::filesystem;

BceResult bce_loss(double prob, int label) {
    const double p = std::clamp(prob, kProbClamp, 1.0 - kProbClamp);
    const double y = label ? 1.0 : 0.0;
    const double loss = -(y * std::log(p) + (1.0 - y) * std::log(1.0 - p));
    const double grad = -y / p + (1.0 - y) / (1.0 - p);
    return {loss, grad};
}

void adam_step(std::span<double> params, std::span<const double> grads, AdamState &state,
               const AdamConfig &cfg) {
    if (params.size() != grads.size() || state.m.size() != params.size()) {
        throw DimensionError("adam_step: parameter/gradient/state sizes differ");
    }
    ++state.step;
    const double t = static_cast<double>(state.step);
    const double c1 = 1.0 - std::pow(cfg.beta1, t);
    const double c2 = 1.0 - std::pow(cfg.beta2, t);
    for (std::size_t i = 0; i < params.size(); ++i) {
        state.m[i] = cfg.beta1 * state.m[i] + (1.0 - cfg.beta1) * grads[i];
        state.v[i] = cfg.beta2 * state.v[i] + (1.0 - cfg.beta2) * grads[i] * grads[i];
        const double m_hat = state.m[i] / c1;
        const double v_hat = state.v[i] / c2;
        params[i] -= cfg.learning_rate * m_hat / (std::sqrt(v_hat) + cfg.epsilon);
    }
}

double roc_auc(std::span<const double> scores, std::span<const int> labels) {
    if (scores.size() != labels.size()) {
        throw DimensionError("roc_auc: scores and labels differ in length");
    }
    std::vector<std::size_t> order(scores.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return scores[a] < scores[b]; });
    // Sum of midranks of the positives.
    double rank_sum = 0.0;
    std::size_t n_pos = 0;
    for (std::size_t i = 0; i < order.size();) {
        std::size_t j = i;
        while (j < order.size() && scores[order[j]] == scores[order[i]]) {
            ++j;
        }
        const double mid = 0.5 * static_cast<double>(i + 1 + j);
        for (std::size_t k = i; k < j; ++k) {
            if (labels[order[k]]) {
                rank_sum += mid;
                ++n_pos;
            }
        }
        i = j;
    }
    const std::size_t n_neg = scores.size() - n_pos;
    if (n_pos == 0 || n_neg == 0) {
        throw DomainError("roc_auc: both classes must be present");
    }
    const double np = static_cast<double>(n_pos);
    const double u = rank_sum - np * (np + 1.0) / 2.0;
    return u / (np * static_cast<double>(n_neg));
}

double accuracy(std::span<const double> scores, std::span<const int> labels, double threshold) {
    if (scores.size() != labels.size() || scores.empty()) {
        throw DimensionError("accuracy: need equal, non-empty inputs");
    }
    std::size_t hit = 0;
    for (std::size_t i = 0; i < scores.size(); ++i) {
        hit += ((scores[i] >= threshold) == (labels[i] != 0)) ? 1 : 0;
    }
    return static_cast<double>(hit) / static_cast<double>(scores.size());
}

std::string metrics_csv_header() { return "epoch,split,loss,accuracy,auc"; }

std::string metrics_csv_row(const MetricsRecord &r) {
    char buf[160];
    std::snprintf(buf, sizeof buf, "%d,%s,%.6f,%.6f,%.6f", r.epoch, r.split.c_str(), r.loss,
                  r.accuracy, r.auc);
    return buf;
}

void write_metrics_csv(const fs::path &path, std::span<const MetricsRecord> records) {
    std::string text = metrics_csv_header() + "\n";
    for (const auto &r : records) {
        text += metrics_csv_row(r) + "\n";
    }
    io::write_text_file(path, text);
}

void append_metrics_csv(const fs::path &path, const MetricsRecord &r) {
    std::string text;
    if (fs::exists(path)) {
        text = io::read_text_file(path);
    } else {
        text = metrics_csv_header() + "\n";
    }
    text += metrics_csv_row(r) + "\n";
    io::write_text_file(path, text);
}

std::vector<MetricsRecord> read_metrics_csv(const fs::path &path) {
    std::istringstream in(io::read_text_file(path));
    std::string line;
    if (!std::getline(in, line) || line != metrics_csv_header()) {
        throw FormatError(path.string() + ": missing metrics header");
    }
    std::vector<MetricsRecord> out;
    while (std::getline(in, line)) {
        if (line.empty()) {
            continue;
        }
        std::vector<std::string> cols;
        std::stringstream ls(line);
        std::string c;
        while (std::getline(ls, c, ',')) {
            cols.push_back(c);
        }
        if (cols.size() != 5) {
            throw FormatError(path.string() + ": expected 5 columns in '" + line + "'");
        }
        MetricsRecord r;
        r.epoch = static_cast<int>(io::parse_int(cols[0], "epoch"));
        r.split = cols[1];
        r.loss = io::parse_double(cols[2], "loss");
        r.accuracy = io::parse_double(cols[3], "accuracy");
        r.auc = io::parse_double(cols[4], "auc");
        out.push_back(std::move(r));
    }
    return out;
}

std::vector<double> image_as_double(const data::Dataset &d, std::size_t i) {
    const auto img = d.image(i);
    return {img.begin(), img.end()};
}

namespace {

std::vector<int> labels_of(const data::Dataset &d) {
    return {d.labels.begin(), d.labels.end()};
}

MetricsRecord summarize(int epoch, const std::string &split, double loss_sum,
                        const std::vector<double> &scores, const std::vector<int> &labels) {
    MetricsRecord r;
    r.epoch = epoch;
    r.split = split;
    r.loss = loss_sum / static_cast<double>(scores.size());
    r.accuracy = accuracy(scores, labels);
    r.auc = roc_auc(scores, labels);
    return r;
}

/// Runs fn(i) for i in [0, n) on up to `threads` workers with a static split.
template <class Fn> void parallel_for(std::size_t n, int threads, Fn &&fn) {
    const std::size_t workers = std::min<std::size_t>(std::max(threads, 1), n);
    if (workers <= 1) {
        for (std::size_t i = 0; i < n; ++i) {
            fn(i);
        }
        return;
    }
    std::vector<std::thread> pool;
    std::vector<std::exception_ptr> errors(workers);
    for (std::size_t w = 0; w < workers; ++w) {
        pool.emplace_back([&, w] {
            try {
                for (std::size_t i = w; i < n; i += workers) {
                    fn(i);
                }
            } catch (...) {
                errors[w] = std::current_exception();
            }
        });
    }
    for (auto &t : pool) {
        t.join();
    }
    for (auto &e : errors) {
        if (e) {
            std::rethrow_exception(e);
        }
    }
}

} // namespace

Evaluation evaluate(const model::ModelParams &params, const data::Dataset &d) {
    Evaluation ev;
    ev.scores.resize(d.size());
    double loss = 0.0;
    for (std::size_t i = 0; i < d.size(); ++i) {
        const auto img = image_as_double(d, i);
        const auto t = model::model_forward(params, img, d.m0[i], d.pt[i]);
        ev.scores[i] = t.prob;
        loss += bce_loss(t.prob, d.labels[i]).loss;
    }
    const auto labels = labels_of(d);
    ev.loss = loss / static_cast<double>(d.size());
    ev.accuracy = accuracy(ev.scores, labels);
    ev.auc = roc_auc(ev.scores, labels);
    return ev;
}

GradCheckReport grad_check(const model::ModelParams &params, const GradSample &sample,
                           const GradCheckOptions &opts) {
    auto loss_and_trace = [&](const model::ModelParams &p) {
        Rng rng(opts.dropout_seed);
        model::ForwardOptions fo;
        fo.training = opts.training;
        fo.rng = &rng;
        auto trace = model::model_forward(p, sample.image, sample.m0, sample.pt, fo);
        const double loss = bce_loss(trace.prob, sample.label).loss;
        return std::pair{loss, std::move(trace)};
    };

    const auto [loss0, trace] = loss_and_trace(params);
    (void)loss0;
    model::ModelParams analytic(params.config);
    analytic.set_zero();
    model::model_backward(params, trace, bce_loss(trace.prob, sample.label).grad, analytic);
    if (opts.corrupt) {
        opts.corrupt(analytic);
    }
    const std::vector<double> grad = analytic.flatten();

    model::ModelParams probe = params;
    std::vector<double> flat = params.flatten();
    GradCheckReport report;
    report.tolerance = opts.tolerance;
    std::size_t offset = 0;
    std::vector<std::pair<std::string, std::size_t>> groups;
    params.for_each([&](std::string_view name, const auto &, auto values) {
        groups.emplace_back(std::string(name), values.size());
    });
    for (const auto &[name, count] : groups) {
        GroupError ge{name, count, 0.0, 0.0};
        for (std::size_t k = 0; k < count; ++k) {
            const std::size_t idx = offset + k;
            const double keep = flat[idx];
            flat[idx] = keep + opts.step;
            probe.unflatten(flat);
            const double lp = loss_and_trace(probe).first;
            flat[idx] = keep - opts.step;
            probe.unflatten(flat);
            const double lm = loss_and_trace(probe).first;
            flat[idx] = keep;
            const double numeric = (lp - lm) / (2.0 * opts.step);
            const double a = grad[idx];
            const double abs_err = std::abs(a - numeric);
            const double denom =
                std::max({std::abs(a), std::abs(numeric), opts.denominator_floor});
            ge.max_abs_err = std::max(ge.max_abs_err, abs_err);
            ge.max_rel_err = std::max(ge.max_rel_err, abs_err / denom);
        }
        offset += count;
        report.worst = std::max(report.worst, ge.max_rel_err);
        report.groups.push_back(std::move(ge));
    }
    report.passed = report.worst < opts.tolerance;
    return report;
}

void TrainConfig::validate() const {
    if (epochs < 1 || batch_size < 1 || threads < 1) {
        throw DomainError("TrainConfig: epochs, batch_size and threads must be positive");
    }
    if (!(adam.learning_rate > 0.0) || !(adam.epsilon > 0.0)) {
        throw DomainError("TrainConfig: learning_rate and epsilon must be positive");
    }
    if (!(adam.beta1 > 0.0 && adam.beta1 < 1.0 && adam.beta2 > 0.0 && adam.beta2 < 1.0)) {
        throw DomainError("TrainConfig: beta1 and beta2 must lie in (0, 1)");
    }
}

TrainResult train_loop(model::ModelParams params, const data::Dataset &train,
                       const data::Dataset &val, const TrainConfig &cfg,
                       const EpochCallback &on_epoch) {
    cfg.validate();
    if (train.size() == 0 || val.size() == 0) {
        throw DomainError("train_loop: empty train or validation split");
    }
    const std::size_t bs = static_cast<std::size_t>(cfg.batch_size);
    std::vector<double> flat = params.flatten();
    AdamState adam(flat.size());

    std::vector<model::ModelParams> sample_grads(std::min(bs, train.size()),
                                                 model::ModelParams(params.config));
    model::ModelParams batch_grad(params.config);
    std::vector<double> batch_probs(sample_grads.size());

    const std::vector<int> val_labels = labels_of(val);
    TrainResult result{{}, params, params, 0, -1.0};

    std::vector<std::size_t> order(train.size());
    std::iota(order.begin(), order.end(), 0);

    for (int epoch = 1; epoch <= cfg.epochs; ++epoch) {
        Rng shuffle_rng(derive_seed(cfg.seed, 0x5348554646ULL, static_cast<std::uint64_t>(epoch)));
        std::shuffle(order.begin(), order.end(), shuffle_rng);

        std::vector<double> train_scores(train.size());
        std::vector<int> train_labels(train.size());
        double train_loss = 0.0;

        for (std::size_t start = 0; start < order.size(); start += bs) {
            const std::size_t n = std::min(bs, order.size() - start);
            parallel_for(n, cfg.threads, [&](std::size_t k) {
                const std::size_t idx = order[start + k];
                Rng rng(derive_seed(cfg.seed, static_cast<std::uint64_t>(epoch),
                                    static_cast<std::uint64_t>(idx)));
                model::ForwardOptions fo;
                fo.training = true;
                fo.rng = &rng;
                const auto img = image_as_double(train, idx);
                const auto trace = model::model_forward(params, img, train.m0[idx],
                                                        train.pt[idx], fo);
                batch_probs[k] = trace.prob;
                sample_grads[k].set_zero();
                model::model_backward(params, trace, bce_loss(trace.prob, train.labels[idx]).grad,
                                      sample_grads[k]);
            });
            batch_grad.set_zero();
            for (std::size_t k = 0; k < n; ++k) {
                const std::size_t idx = order[start + k];
                batch_grad.add(sample_grads[k]);
                train_scores[start + k] = batch_probs[k];
                train_labels[start + k] = train.labels[idx];
                train_loss += bce_loss(batch_probs[k], train.labels[idx]).loss;
            }
            std::vector<double> g = batch_grad.flatten();
            const double inv = 1.0 / static_cast<double>(n);
            for (double &v : g) {
                v *= inv;
            }
            adam_step(flat, g, adam, cfg.adam);
            params.unflatten(flat);
        }

        const MetricsRecord tr = summarize(epoch, "train", train_loss, train_scores, train_labels);
        const Evaluation ev = evaluate(params, val);
        MetricsRecord vr{epoch, "val", ev.loss, ev.accuracy, ev.auc};
        result.records.push_back(tr);
        result.records.push_back(vr);
        if (ev.auc > result.best_val_auc) {
            result.best_val_auc = ev.auc;
            result.best_epoch = epoch;
            result.best = params;
        }
        if (on_epoch) {
            on_epoch(tr, vr);
        }
    }
    result.last = std::move(params);
    return result;
}

} // namespace qvit::train
