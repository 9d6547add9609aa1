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
#include "qvit/attention.hpp"
#include "qvit/checkpoint.hpp"
#include "qvit/cli.hpp"
#include "qvit/data.hpp"
#include "qvit/errors.hpp"
#include "qvit/loaders.hpp"
#include "qvit/model.hpp"
#include "qvit/ortho.hpp"
#include "qvit/qsim.hpp"

#include <pybind11/complex.h>
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

namespace py = pybind11;
using namespace qvit;

namespace {

using DoubleArray = py::array_t<double, py::array::c_style | py::array::forcecast>;

py::array_t<double> to_numpy(const Matrix &m) {
    py::array_t<double> out({m.rows(), m.cols()});
    std::copy(m.data().begin(), m.data().end(), out.mutable_data());
    return out;
}

Matrix from_numpy(const DoubleArray &a) {
    if (a.ndim() != 2) {
        throw DimensionError("expected a 2-D array, got " + std::to_string(a.ndim()) + "-D");
    }
    const auto rows = static_cast<std::size_t>(a.shape(0));
    const auto cols = static_cast<std::size_t>(a.shape(1));
    return Matrix(rows, cols, std::vector<double>(a.data(), a.data() + rows * cols));
}

std::vector<double> angles_copy(const ortho::PyramidLayer &l) {
    return {l.angles().begin(), l.angles().end()};
}

std::vector<double> to_vector(const DoubleArray &a) {
    return {a.data(), a.data() + a.size()};
}

py::array_t<double> unary_to_numpy(const qsim::UnaryState &s) {
    py::array_t<double> out(static_cast<py::ssize_t>(s.n_qubits()));
    std::copy(s.amplitudes().begin(), s.amplitudes().end(), out.mutable_data());
    return out;
}

py::tuple run_cli_captured(const std::vector<std::string> &args) {
    std::ostringstream out, err;
    const int code = cli::run_cli(args, out, err);
    return py::make_tuple(code, out.str(), err.str());
}

model::ModelConfig config_from_kwargs(const std::string &attention, int image_size,
                                      int channels, int patch_size, int dim, int n_blocks,
                                      double dropout) {
    model::ModelConfig c;
    c.attention = model::parse_attention_kind(attention);
    c.image_size = image_size;
    c.channels = channels;
    c.patch_size = patch_size;
    c.dim = dim;
    c.n_blocks = n_blocks;
    c.dropout = dropout;
    c.validate();
    return c;
}

} // namespace

PYBIND11_MODULE(_qvit, m) {
    m.doc() = "Unary-subspace circuit simulation, pyramid orthogonal layers and the "
              "quantum vision transformer.";

    auto base = py::register_exception<Error>(m, "Error", PyExc_ValueError);
    py::register_exception<DimensionError>(m, "DimensionError", base.ptr());
    py::register_exception<DomainError>(m, "DomainError", base.ptr());
    auto validation = py::register_exception<ValidationError>(m, "ValidationError", base.ptr());
    py::register_exception<NotOrthogonalError>(m, "NotOrthogonalError", validation.ptr());
    py::register_exception<NegativeDeterminantError>(m, "NegativeDeterminantError",
                                                     validation.ptr());
    py::register_exception<FormatError>(m, "FormatError", validation.ptr());
    py::register_exception<IoError>(m, "IoError", PyExc_OSError);

    // Circuits.
    py::enum_<qsim::GateKind>(m, "GateKind")
        .value("X", qsim::GateKind::X)
        .value("H", qsim::GateKind::H)
        .value("CZ", qsim::GateKind::CZ)
        .value("Ry", qsim::GateKind::Ry)
        .value("RBS", qsim::GateKind::RBS);

    py::class_<qsim::Gate>(m, "Gate")
        .def_readonly("kind", &qsim::Gate::kind)
        .def_readonly("q1", &qsim::Gate::q1)
        .def_readonly("q2", &qsim::Gate::q2)
        .def_readonly("angle", &qsim::Gate::angle)
        .def_static("x", &qsim::Gate::x, py::arg("q"))
        .def_static("h", &qsim::Gate::h, py::arg("q"))
        .def_static("cz", &qsim::Gate::cz, py::arg("q1"), py::arg("q2"))
        .def_static("ry", &qsim::Gate::ry, py::arg("q"), py::arg("angle"))
        .def_static("rbs", &qsim::Gate::rbs, py::arg("q1"), py::arg("q2"), py::arg("angle"));

    py::class_<qsim::Circuit>(m, "Circuit")
        .def(py::init<int>(), py::arg("n_qubits"))
        .def_readonly("n_qubits", &qsim::Circuit::n_qubits)
        .def_readonly("gates", &qsim::Circuit::gates)
        .def("append", py::overload_cast<const qsim::Gate &>(&qsim::Circuit::append),
             py::arg("gate"), py::return_value_policy::reference_internal)
        .def("count", &qsim::Circuit::count, py::arg("kind"))
        .def("inverse", &qsim::Circuit::inverse)
        .def("to_text", [](const qsim::Circuit &c) { return qsim::to_text(c); })
        .def_static("from_text", &qsim::parse_circuit, py::arg("text"))
        .def("__len__", [](const qsim::Circuit &c) { return c.gates.size(); });

    m.def("rbs_matrix", [](double angle) { return to_numpy(qsim::rbs_matrix(angle)); },
          py::arg("angle"), "4x4 RBS gate matrix.");
    m.def("rbs_decomposition", &qsim::rbs_decomposition, py::arg("q1"), py::arg("q2"),
          py::arg("angle"), "Hadamard, CZ and Ry gates equal to RBS up to a global phase.");
    m.def(
        "simulate_dense",
        [](const qsim::Circuit &c) {
            const auto s = qsim::simulate_dense(c);
            py::array_t<std::complex<double>> out(static_cast<py::ssize_t>(s.amplitudes().size()));
            std::copy(s.amplitudes().begin(), s.amplitudes().end(), out.mutable_data());
            return out;
        },
        py::arg("circuit"), "Full statevector from |0...0>; qubit 0 is the most significant bit.");
    m.def(
        "simulate_unary",
        [](const qsim::Circuit &c, const DoubleArray &initial) {
            return unary_to_numpy(qsim::simulate_unary(c, qsim::UnaryState(to_vector(initial))));
        },
        py::arg("circuit"), py::arg("initial"),
        "Unary-subspace amplitudes after an RBS-only circuit.");

    // Loaders.
    py::class_<loaders::LoaderProgram>(m, "LoaderProgram")
        .def_readonly("angles", &loaders::LoaderProgram::angles)
        .def_readonly("sign", &loaders::LoaderProgram::sign)
        .def_property_readonly("dim", &loaders::LoaderProgram::dim);
    m.def(
        "loader_angles",
        [](const DoubleArray &x) { return loaders::compute_loader_angles(to_vector(x)); },
        py::arg("x"), "Angles of the unary loader for a unit vector.");
    m.def("loader_circuit", &loaders::build_loader_circuit, py::arg("program"));
    m.def(
        "load_unary",
        [](const loaders::LoaderProgram &p) { return unary_to_numpy(loaders::load_unary(p)); },
        py::arg("program"), "Amplitudes produced by the loader (sign * x).");

    // Orthogonal layers.
    m.def(
        "pyramid_wiring",
        [](int n) {
            std::vector<std::pair<int, int>> out;
            for (const auto &p : ortho::pyramid_wiring(n)) {
                out.emplace_back(p.q1, p.q2);
            }
            return out;
        },
        py::arg("n"), "Qubit pairs of the pyramid's RBS gates in application order.");
    m.def(
        "pyramid_matrix",
        [](int n, std::vector<double> angles) {
            return to_numpy(ortho::extract_matrix(ortho::PyramidLayer(n, std::move(angles))));
        },
        py::arg("n"), py::arg("angles"), "Orthogonal matrix of a pyramid layer.");
    m.def(
        "compile_matrix",
        [](const DoubleArray &m) { return angles_copy(ortho::compile_matrix(from_numpy(m))); },
        py::arg("matrix"), "Pyramid angles realizing a special-orthogonal matrix.");
    m.def(
        "pyramid_circuit",
        [](int n, std::vector<double> angles) {
            return ortho::layer_circuit(ortho::PyramidLayer(n, std::move(angles)));
        },
        py::arg("n"), py::arg("angles"));

    // Attention.
    m.def(
        "attention_coefficient",
        [](const DoubleArray &xi, const DoubleArray &xj, std::vector<double> angles) {
            const auto a = to_vector(xi), b = to_vector(xj);
            return attention::attention_coefficient(
                a, b, ortho::PyramidLayer(static_cast<int>(a.size()), std::move(angles)));
        },
        py::arg("xi"), py::arg("xj"), py::arg("angles"), "(xi^T W xj)^2 on the fast path.");
    m.def(
        "attention_coefficient_dense",
        [](const DoubleArray &xi, const DoubleArray &xj, std::vector<double> angles) {
            const auto a = to_vector(xi), b = to_vector(xj);
            return attention::attention_coefficient_dense(
                a, b, ortho::PyramidLayer(static_cast<int>(a.size()), std::move(angles)));
        },
        py::arg("xi"), py::arg("xj"), py::arg("angles"),
        "The same coefficient measured on a dense simulation of the circuit.");
    m.def(
        "attention_circuit",
        [](const DoubleArray &xi, const DoubleArray &xj, std::vector<double> angles) {
            const auto a = to_vector(xi), b = to_vector(xj);
            return attention::attention_circuit(
                a, b, ortho::PyramidLayer(static_cast<int>(a.size()), std::move(angles)));
        },
        py::arg("xi"), py::arg("xj"), py::arg("angles"));

    // Model.
    py::class_<model::ModelParams>(m, "Model")
        .def(py::init([](const std::string &attention, int image_size, int channels,
                         int patch_size, int dim, int n_blocks, double dropout,
                         std::uint64_t seed) {
                 return model::init_params(config_from_kwargs(attention, image_size, channels,
                                                              patch_size, dim, n_blocks, dropout),
                                           seed);
             }),
             py::arg("attention") = "qvit", py::arg("image_size") = 16, py::arg("channels") = 3,
             py::arg("patch_size") = 4, py::arg("dim") = 8, py::arg("n_blocks") = 1,
             py::arg("dropout") = 0.5, py::arg("seed") = 1)
        .def_static(
            "load", [](const std::string &dir) { return model::load_checkpoint(dir).params; },
            py::arg("checkpoint_dir"))
        .def("save",
             [](const model::ModelParams &p, const std::string &dir) {
                 model::save_checkpoint(dir, p);
             },
             py::arg("checkpoint_dir"))
        .def_property_readonly("attention",
                               [](const model::ModelParams &p) {
                                   return model::to_string(p.config.attention);
                               })
        .def_property_readonly("num_parameters", &model::ModelParams::num_values)
        .def("parameters",
             [](const model::ModelParams &p) {
                 py::dict out;
                 p.for_each([&](std::string_view name, const std::vector<std::size_t> &shape,
                                auto values) {
                     py::array_t<double> a(shape);
                     std::copy(values.begin(), values.end(), a.mutable_data());
                     out[py::str(std::string(name))] = a;
                 });
                 return out;
             })
        .def(
            "predict",
            [](const model::ModelParams &p, const DoubleArray &image, double m0, double pt) {
                return model::model_forward(p, to_vector(image), m0, pt).prob;
            },
            py::arg("image"), py::arg("m0"), py::arg("pt"),
            "Probability of the gluon-like class for one H x W x C image.")
        .def(
            "patches",
            [](const model::ModelParams &p, const DoubleArray &image) {
                return to_numpy(model::extract_patches(to_vector(image), p.config));
            },
            py::arg("image"));

    // Data and command line.
    m.def(
        "generate_dataset",
        [](const std::string &dir, int samples, int image_size, std::uint64_t seed) {
            const auto man = data::generate_dataset(dir, {samples, image_size, seed});
            return py::make_tuple(man.n_train, man.n_val, man.n_test);
        },
        py::arg("out_dir"), py::arg("samples") = 2000, py::arg("image_size") = 16,
        py::arg("seed") = 1, "Writes a dataset directory; returns the split sizes.");
    m.def(
        "load_split",
        [](const std::string &dir, const std::string &split) {
            const auto loaded = data::load_dataset(dir).scaled();
            const data::Dataset *d = split == "train" ? &loaded.train
                                     : split == "val" ? &loaded.val
                                     : split == "test"
                                         ? &loaded.test
                                         : throw DomainError("unknown split '" + split + "'");
            const auto s = static_cast<py::ssize_t>(d->image_size);
            py::array_t<float> images({static_cast<py::ssize_t>(d->size()), s, s,
                                       static_cast<py::ssize_t>(d->channels)});
            std::copy(d->images.begin(), d->images.end(), images.mutable_data());
            py::array_t<double> aux({static_cast<py::ssize_t>(d->size()), py::ssize_t{2}});
            auto a = aux.mutable_unchecked<2>();
            for (std::size_t i = 0; i < d->size(); ++i) {
                a(static_cast<py::ssize_t>(i), 0) = d->m0[i];
                a(static_cast<py::ssize_t>(i), 1) = d->pt[i];
            }
            py::array_t<std::uint8_t> labels(static_cast<py::ssize_t>(d->size()));
            std::copy(d->labels.begin(), d->labels.end(), labels.mutable_data());
            return py::make_tuple(images, aux, labels);
        },
        py::arg("dataset_dir"), py::arg("split") = "test",
        "(images, aux, labels) of one split, aux min-max scaled with the training bounds.");
    m.def("run_cli", &run_cli_captured, py::arg("args"),
          "Runs a qvit subcommand; returns (exit_code, stdout, stderr).");
}
