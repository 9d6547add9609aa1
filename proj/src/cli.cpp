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
#include "qvit/cli.hpp"

#include "qvit/attention.hpp"
#include "qvit/checkpoint.hpp"
#include "qvit/data.hpp"
#include "qvit/errors.hpp"
#include "qvit/io.hpp"
#include "qvit/loaders.hpp"
#include "qvit/ortho.hpp"
#include "qvit/run_config.hpp"
#include "qvit/svg_plot.hpp"
#include "qvit/train.hpp"
#include "qvit/verify.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <map>
#include <sstream>

namespace qvit::cli {

namespace fs = std::filesystem;

namespace {

struct UsageError : Error {
    using Error::Error;
};

std::string fixed(double v, int digits = 4) {
    char buf[48];
    std::snprintf(buf, sizeof buf, "%.*f", digits, v);
    return buf;
}

std::string sci(double v) {
    char buf[48];
    std::snprintf(buf, sizeof buf, "%.3e", v);
    return buf;
}

std::string flag_for(const std::string &key) {
    std::string f = "--" + key;
    std::replace(f.begin(), f.end(), '_', '-');
    return f;
}

// ---------------------------------------------------------------- gen-data

struct GenDataArgs {
    std::string out;
    int samples = 2000;
    int image_size = 16;
    std::uint64_t seed = 1;
};

int cmd_gen_data(const GenDataArgs &a, std::ostream &out) {
    data::GeneratorConfig cfg{a.samples, a.image_size, a.seed};
    const auto m = data::generate_dataset(a.out, cfg);
    out << "wrote " << m.total() << " samples (" << m.n_train << " train, " << m.n_val
        << " val, " << m.n_test << " test), " << m.image_size << "x" << m.image_size << "x"
        << m.channels << ", to " << a.out << "\n";
    return kExitOk;
}

// ------------------------------------------------------------------- train

struct TrainArgs {
    std::string config;
    std::map<std::string, std::string> overrides;
    bool quiet = false;
};

std::vector<plot::Panel> curves_panels(
    const std::vector<std::pair<std::string, std::vector<train::MetricsRecord>>> &runs) {
    plot::Panel loss{"Loss", "epoch", "BCE loss", {}};
    plot::Panel auc{"ROC AUC", "epoch", "AUC", {}};
    for (const auto &[name, records] : runs) {
        for (const char *split : {"train", "val"}) {
            plot::Series l{name + " " + split, {}, {}}, a{name + " " + split, {}, {}};
            for (const auto &r : records) {
                if (r.split == split) {
                    l.x.push_back(r.epoch);
                    l.y.push_back(r.loss);
                    a.x.push_back(r.epoch);
                    a.y.push_back(r.auc);
                }
            }
            if (!l.x.empty()) {
                loss.series.push_back(std::move(l));
                auc.series.push_back(std::move(a));
            }
        }
    }
    return {loss, auc};
}

void write_run_checkpoint(const fs::path &dir, const model::ModelParams &params, int epoch,
                          const RunConfig &rc, double val_auc) {
    io::KeyValues meta;
    meta.set("epoch", std::to_string(epoch));
    meta.set("seed", std::to_string(rc.train.seed));
    meta.set("val_auc", io::format_double(val_auc));
    meta.set("data", rc.data);
    model::save_checkpoint(dir, params, meta);
}

int cmd_train(const TrainArgs &a, std::ostream &out) {
    RunConfig rc;
    if (!a.config.empty()) {
        try {
            rc.apply_text(io::read_text_file(a.config), a.config);
        } catch (const FormatError &e) {
            throw UsageError(e.what());
        }
    }
    io::KeyValues kv;
    for (const auto &[k, v] : a.overrides) {
        kv.set(k, v);
    }
    try {
        rc.apply(kv);
    } catch (const FormatError &e) {
        throw UsageError(e.what());
    }
    if (rc.data.empty() || rc.out.empty()) {
        throw UsageError("train needs a dataset (--data) and a run directory (--out)");
    }

    const auto loaded = data::load_dataset(rc.data);
    const bool size_given = kv.contains("image_size") || kv.contains("channels");
    if (size_given && (rc.model.image_size != loaded.manifest.image_size ||
                       rc.model.channels != loaded.manifest.channels)) {
        throw ValidationError("configured image shape does not match dataset " + rc.data);
    }
    rc.model.image_size = loaded.manifest.image_size;
    rc.model.channels = loaded.manifest.channels;
    rc.model.validate();
    rc.train.validate();

    const fs::path run = rc.out;
    std::error_code ec;
    fs::create_directories(run, ec);
    if (ec) {
        throw IoError("cannot create run directory '" + run.string() + "': " + ec.message());
    }
    io::write_text_file(run / "config.txt", rc.to_text());

    const auto splits = loaded.scaled();
    auto params = model::init_params(rc.model, rc.train.seed);
    if (!a.quiet) {
        out << "training " << model::to_string(rc.model.attention) << " model ("
            << params.num_values() << " parameters) on " << splits.train.size()
            << " samples, validating on " << splits.val.size() << "\n";
    }
    const auto started = std::chrono::steady_clock::now();
    auto on_epoch = [&](const train::MetricsRecord &t, const train::MetricsRecord &v) {
        if (a.quiet) {
            return;
        }
        const double secs =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
        out << "epoch " << t.epoch << "  train loss " << fixed(t.loss) << " auc "
            << fixed(t.auc) << "  val loss " << fixed(v.loss) << " acc " << fixed(v.accuracy)
            << " auc " << fixed(v.auc) << "  (" << fixed(secs, 1) << " s)\n";
    };
    const auto result = train::train_loop(std::move(params), splits.train, splits.val, rc.train,
                                          on_epoch);

    train::write_metrics_csv(run / "metrics.csv", result.records);
    const double last_auc = result.records.empty() ? 0.0 : result.records.back().auc;
    write_run_checkpoint(run / "checkpoint_best", result.best, result.best_epoch, rc,
                         result.best_val_auc);
    write_run_checkpoint(run / "checkpoint_last", result.last, rc.train.epochs, rc, last_auc);
    io::write_text_file(run / "curves.svg",
                        plot::render_svg(curves_panels(
                            {{model::to_string(rc.model.attention), result.records}})));
    if (!a.quiet) {
        out << "best val auc " << fixed(result.best_val_auc) << " at epoch "
            << result.best_epoch << "; outputs in " << run.string() << "\n";
    }
    return kExitOk;
}

// -------------------------------------------------------------------- eval

struct EvalArgs {
    std::string checkpoint;
    std::string data;
    std::string split = "test";
    std::string csv;
};

int cmd_eval(const EvalArgs &a, std::ostream &out) {
    const auto ckpt = model::load_checkpoint(a.checkpoint);
    const auto loaded = data::load_dataset(a.data);
    const auto &cfg = ckpt.params.config;
    if (cfg.image_size != loaded.manifest.image_size ||
        cfg.channels != loaded.manifest.channels) {
        throw ValidationError("checkpoint expects " + std::to_string(cfg.image_size) + "x" +
                              std::to_string(cfg.image_size) + "x" +
                              std::to_string(cfg.channels) + " images, dataset has " +
                              std::to_string(loaded.manifest.image_size) + "x" +
                              std::to_string(loaded.manifest.image_size) + "x" +
                              std::to_string(loaded.manifest.channels));
    }
    const auto splits = loaded.scaled();
    const data::Dataset *d = a.split == "train" ? &splits.train
                             : a.split == "val" ? &splits.val
                                                : &splits.test;
    const auto ev = train::evaluate(ckpt.params, *d);
    train::MetricsRecord rec;
    rec.epoch = ckpt.metadata.contains("epoch")
                    ? static_cast<int>(ckpt.metadata.get_int("epoch"))
                    : 0;
    rec.split = a.split;
    rec.loss = ev.loss;
    rec.accuracy = ev.accuracy;
    rec.auc = ev.auc;
    out << train::metrics_csv_header() << "\n" << train::metrics_csv_row(rec) << "\n";
    if (!a.csv.empty()) {
        train::append_metrics_csv(a.csv, rec);
    }
    return kExitOk;
}

// ------------------------------------------------------------------ verify

struct VerifyArgs {
    bool inject_fault = false;
    double effort = 1.0;
    std::uint64_t seed = 2024;
};

int cmd_verify(const VerifyArgs &a, std::ostream &out) {
    verify::VerifyOptions opts;
    opts.inject_sign_fault = a.inject_fault;
    opts.effort = a.effort;
    opts.seed = a.seed;
    const auto results = verify::run_suite(opts);
    std::size_t passed = 0;
    for (const auto &r : results) {
        passed += r.passed ? 1 : 0;
        out << (r.passed ? "PASS " : "FAIL ") << r.name << "  max error " << sci(r.max_error)
            << " (tolerance " << sci(r.tolerance) << ")";
        if (!r.detail.empty()) {
            out << "  " << r.detail;
        }
        out << "\n";
    }
    out << passed << "/" << results.size() << " checks passed\n";
    return passed == results.size() ? kExitOk : kExitValidation;
}

// ----------------------------------------------------------------- compile

struct CompileArgs {
    std::string in;
    std::string out;
};

Matrix parse_matrix(const std::string &text, const std::string &source) {
    std::vector<std::vector<double>> rows;
    std::istringstream lines(text);
    std::string line;
    int line_no = 0;
    while (std::getline(lines, line)) {
        ++line_no;
        if (auto hash = line.find('#'); hash != std::string::npos) {
            line.resize(hash);
        }
        std::replace(line.begin(), line.end(), ',', ' ');
        std::istringstream fields(line);
        std::vector<double> row;
        std::string tok;
        while (fields >> tok) {
            row.push_back(io::parse_double(tok, source + ":" + std::to_string(line_no)));
        }
        if (!row.empty()) {
            rows.push_back(std::move(row));
        }
    }
    if (rows.empty()) {
        throw FormatError(source + ": no matrix rows");
    }
    const std::size_t n = rows.size();
    Matrix m(n, n);
    for (std::size_t r = 0; r < n; ++r) {
        if (rows[r].size() != n) {
            throw DimensionError(source + ": row " + std::to_string(r + 1) + " has " +
                                 std::to_string(rows[r].size()) + " entries, expected a " +
                                 std::to_string(n) + "x" + std::to_string(n) + " matrix");
        }
        std::copy(rows[r].begin(), rows[r].end(), m.row(r).begin());
    }
    return m;
}

int cmd_compile(const CompileArgs &a, std::ostream &out) {
    const Matrix m = parse_matrix(io::read_text_file(a.in), a.in);
    const auto layer = ortho::compile_matrix(m);
    std::string text;
    for (double t : layer.angles()) {
        text += io::format_double(t) + "\n";
    }
    if (a.out.empty()) {
        out << text;
    } else {
        io::write_text_file(a.out, text);
        out << "wrote " << layer.num_angles() << " angles for n = " << layer.dim() << " to "
            << a.out << "\n";
    }
    return kExitOk;
}

// ----------------------------------------------------------------- inspect

struct InspectArgs {
    std::string circuit;
    int n = 4;
    double angle = 0.5;
    std::vector<double> vector;
    std::uint64_t seed = 0;
    bool random = false;
};

std::vector<double> inspect_vector(const InspectArgs &a, Rng &rng, bool second = false) {
    if (!a.vector.empty() && !second) {
        if (static_cast<int>(a.vector.size()) != a.n) {
            throw UsageError("--vector has " + std::to_string(a.vector.size()) +
                             " entries but --n is " + std::to_string(a.n));
        }
        const double len = norm2(a.vector);
        if (!(len > 0.0)) {
            throw DomainError("--vector must have a nonzero, finite norm");
        }
        std::vector<double> v = a.vector;
        for (double &x : v) {
            x /= len;
        }
        return v;
    }
    if (a.random || second) {
        return verify::random_unit_vector(a.n, rng);
    }
    return std::vector<double>(static_cast<std::size_t>(a.n), 1.0 / std::sqrt(a.n));
}

int cmd_inspect(const InspectArgs &a, std::ostream &out) {
    if (a.n < 2 || a.n > qsim::kMaxDenseQubits) {
        throw UsageError("--n must be in [2, " + std::to_string(qsim::kMaxDenseQubits) + "]");
    }
    Rng rng(a.seed);
    qsim::Circuit c;
    if (a.circuit == "pyramid") {
        const auto layer = a.random ? ortho::random_layer(a.n, rng, 1.0) : ortho::PyramidLayer(a.n);
        c = ortho::layer_circuit(layer);
    } else if (a.circuit == "loader") {
        c = loaders::build_loader_circuit(loaders::compute_loader_angles(inspect_vector(a, rng)));
    } else if (a.circuit == "rbs") {
        c = qsim::Circuit(2);
        for (const auto &g : qsim::rbs_decomposition(0, 1, a.angle)) {
            c.append(g);
        }
    } else if (a.circuit == "attention") {
        const auto xi = inspect_vector(a, rng);
        const auto xj = inspect_vector(a, rng, true);
        const auto layer = a.random ? ortho::random_layer(a.n, rng, 1.0) : ortho::PyramidLayer(a.n);
        c = attention::attention_circuit(xi, xj, layer);
    } else {
        throw UsageError("unknown circuit '" + a.circuit +
                         "' (expected pyramid|loader|rbs|attention)");
    }
    out << qsim::to_text(c);
    return kExitOk;
}

// -------------------------------------------------------------------- plot

struct PlotArgs {
    std::vector<std::string> runs;
    std::vector<std::string> labels;
    std::string out;
};

int cmd_plot(const PlotArgs &a, std::ostream &out) {
    if (!a.labels.empty() && a.labels.size() != a.runs.size()) {
        throw UsageError("--label must be given once per --run");
    }
    std::vector<std::pair<std::string, std::vector<train::MetricsRecord>>> runs;
    for (std::size_t i = 0; i < a.runs.size(); ++i) {
        const fs::path dir = a.runs[i];
        std::string name = a.labels.empty() ? dir.filename().string() : a.labels[i];
        if (name.empty()) {
            name = dir.parent_path().filename().string();
        }
        runs.emplace_back(name, train::read_metrics_csv(dir / "metrics.csv"));
    }
    io::write_text_file(a.out, plot::render_svg(curves_panels(runs)));
    out << "wrote " << a.out << "\n";
    return kExitOk;
}

} // namespace

int run_cli(const std::vector<std::string> &args, std::ostream &out, std::ostream &err) {
    CLI::App app{"Quantum vision transformer toolkit", "qvit"};
    app.require_subcommand(1);
    app.set_version_flag("--version", "qvit 1.0.0");

    GenDataArgs gen;
    auto *gen_cmd = app.add_subcommand("gen-data", "Generate the synthetic jet-image dataset");
    gen_cmd->add_option("--out", gen.out, "Dataset directory")->required();
    gen_cmd->add_option("--samples", gen.samples, "Number of samples")->capture_default_str();
    gen_cmd->add_option("--image-size", gen.image_size, "Image side in pixels")
        ->capture_default_str();
    gen_cmd->add_option("--seed", gen.seed, "Generator seed")->capture_default_str();

    TrainArgs tr;
    std::map<std::string, std::string> train_flags;
    auto *train_cmd = app.add_subcommand("train", "Train a QViT or classical ViT");
    train_cmd->add_option("--config", tr.config, "key = value config file; flags override it");
    for (const auto &key : run_config_keys()) {
        train_cmd->add_option(flag_for(key), train_flags[key], "Config key '" + key + "'");
    }
    train_cmd->add_flag("--quiet", tr.quiet, "Suppress progress output");

    EvalArgs ev;
    auto *eval_cmd = app.add_subcommand("eval", "Evaluate a checkpoint on a dataset split");
    eval_cmd->add_option("--checkpoint", ev.checkpoint, "Checkpoint directory")->required();
    eval_cmd->add_option("--data", ev.data, "Dataset directory")->required();
    eval_cmd->add_option("--split", ev.split, "Split to evaluate")
        ->check(CLI::IsMember({"train", "val", "test"}))
        ->capture_default_str();
    eval_cmd->add_option("--csv", ev.csv, "Metrics CSV to append the result to");

    VerifyArgs ver;
    auto *verify_cmd = app.add_subcommand("verify", "Run the circuit identity suite");
    verify_cmd->add_flag("--inject-fault", ver.inject_fault,
                         "Negate RBS angles on the fast path (the suite must fail)");
    verify_cmd->add_option("--effort", ver.effort, "Scale of the random trial counts")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    verify_cmd->add_option("--seed", ver.seed, "Seed of the random trials")
        ->capture_default_str();

    CompileArgs comp;
    auto *compile_cmd =
        app.add_subcommand("compile", "Compile a special-orthogonal matrix to pyramid angles");
    compile_cmd->add_option("--in", comp.in, "Matrix text file, one row per line")->required();
    compile_cmd->add_option("--out", comp.out, "Angles file (stdout if omitted)");

    InspectArgs ins;
    auto *inspect_cmd = app.add_subcommand("inspect", "Print a circuit in text form");
    inspect_cmd->add_option("--circuit", ins.circuit, "pyramid | loader | rbs | attention")
        ->required()
        ->check(CLI::IsMember({"pyramid", "loader", "rbs", "attention"}));
    inspect_cmd->add_option("--n", ins.n, "Number of qubits (defaults to the --vector length)")
        ->capture_default_str();
    inspect_cmd->add_option("--angle", ins.angle, "RBS angle for --circuit rbs")
        ->capture_default_str();
    inspect_cmd->add_option("--vector", ins.vector, "Vector to load (normalized)")
        ->delimiter(',');
    inspect_cmd->add_flag("--random", ins.random, "Random angles and vectors");
    inspect_cmd->add_option("--seed", ins.seed, "Seed for --random")->capture_default_str();

    PlotArgs pl;
    auto *plot_cmd = app.add_subcommand("plot", "Overlay the curves of several runs");
    plot_cmd->add_option("--run", pl.runs, "Run directory (repeatable)")->required();
    plot_cmd->add_option("--label", pl.labels, "Legend label per run");
    plot_cmd->add_option("--out", pl.out, "Output SVG")->required();

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::ParseError &e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kExitOk : kExitUsage;
    }

    try {
        if (*gen_cmd) {
            return cmd_gen_data(gen, out);
        }
        if (*train_cmd) {
            for (const auto &key : run_config_keys()) {
                if (train_cmd->count(flag_for(key)) > 0) {
                    tr.overrides[key] = train_flags[key];
                }
            }
            return cmd_train(tr, out);
        }
        if (*eval_cmd) {
            return cmd_eval(ev, out);
        }
        if (*verify_cmd) {
            return cmd_verify(ver, out);
        }
        if (*compile_cmd) {
            return cmd_compile(comp, out);
        }
        if (*inspect_cmd) {
            if (inspect_cmd->count("--n") == 0 && !ins.vector.empty()) {
                ins.n = static_cast<int>(ins.vector.size());
            }
            return cmd_inspect(ins, out);
        }
        if (*plot_cmd) {
            return cmd_plot(pl, out);
        }
    } catch (const UsageError &e) {
        err << "usage error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const IoError &e) {
        err << "I/O error: " << e.what() << "\n";
        return kExitIo;
    } catch (const Error &e) {
        err << "error: " << e.what() << "\n";
        return kExitValidation;
    }
    return kExitUsage;
}

int run_cli(int argc, char **argv) {
    std::vector<std::string> args(argv + (argc > 0 ? 1 : 0), argv + argc);
    return run_cli(args, std::cout, std::cerr);
}

} // namespace qvit::cli
