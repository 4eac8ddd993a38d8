#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include <algorithm>
#include <sstream>

#include "ecgbeat/balance.hpp"
#include "ecgbeat/encode.hpp"
#include "ecgbeat/errors.hpp"
#include "ecgbeat/metrics.hpp"
#include "ecgbeat/model.hpp"
#include "ecgbeat/pipeline.hpp"
#include "ecgbeat/preprocess.hpp"
#include "ecgbeat/synth.hpp"

namespace py = pybind11;
using namespace ecgbeat;

namespace {

using Array = py::array_t<double, py::array::c_style | py::array::forcecast>;
using LabelArray = py::array_t<ClassId, py::array::c_style | py::array::forcecast>;

std::span<const double> as_span(const Array& a) {
    if (a.ndim() != 1) throw ValidationError("expected a 1-d array");
    return {a.data(), static_cast<std::size_t>(a.shape(0))};
}

std::vector<ClassId> as_labels(const LabelArray& a) {
    if (a.ndim() != 1) throw ValidationError("labels must be a 1-d array");
    return {a.data(), a.data() + a.shape(0)};
}

Matrix as_matrix(const Array& a) {
    if (a.ndim() != 2) throw ValidationError("expected a 2-d array");
    Matrix m(static_cast<std::size_t>(a.shape(0)), static_cast<std::size_t>(a.shape(1)));
    std::copy(a.data(), a.data() + a.size(), m.data().begin());
    return m;
}

py::array_t<double> to_numpy(const std::vector<double>& v) {
    py::array_t<double> out(static_cast<py::ssize_t>(v.size()));
    std::copy(v.begin(), v.end(), out.mutable_data());
    return out;
}

py::array_t<double> to_numpy(const Matrix& m) {
    py::array_t<double> out({static_cast<py::ssize_t>(m.rows()), static_cast<py::ssize_t>(m.cols())});
    std::copy(m.data().begin(), m.data().end(), out.mutable_data());
    return out;
}

py::array_t<ClassId> to_numpy(const std::vector<ClassId>& v) {
    py::array_t<ClassId> out(static_cast<py::ssize_t>(v.size()));
    std::copy(v.begin(), v.end(), out.mutable_data());
    return out;
}

py::tuple to_tuple(const LabeledRows& r) { return py::make_tuple(to_numpy(r.rows), to_numpy(r.labels)); }

std::map<ClassId, std::size_t> as_targets(const py::dict& d) {
    std::map<ClassId, std::size_t> t;
    for (const auto& [k, v] : d) t[k.cast<ClassId>()] = v.cast<std::size_t>();
    return t;
}

EcgRecord make_record(const Array& signal, double fs, std::vector<std::size_t> rpeaks, std::vector<ClassId> labels) {
    EcgRecord r;
    const auto s = as_span(signal);
    r.leads.emplace_back(s.begin(), s.end());
    r.fs = fs;
    r.rpeaks = std::move(rpeaks);
    r.labels = std::move(labels);
    r.validate();
    return r;
}

}  // namespace

PYBIND11_MODULE(_ecgbeat, m) {
    m.doc() = "ECG heartbeat classification: preprocessing, image encoders, SMOTE and tree ensembles";

    py::register_exception<ValidationError>(m, "ValidationError", PyExc_ValueError);
    py::register_exception<ParseError>(m, "ParseError", PyExc_ValueError);
    py::register_exception<IoError>(m, "IoError", PyExc_OSError);

    m.attr("BEAT_LENGTH") = kBeatLength;
    m.attr("FEATURE_DIM") = kFeatureDim;
    m.attr("IMAGE_SIDE") = kImageSide;

    // preprocess
    m.def("resample", [](const Array& x, double from_hz, double to_hz) {
        return to_numpy(resample(as_span(x), from_hz, to_hz));
    }, py::arg("signal"), py::arg("from_hz"), py::arg("to_hz"));
    m.def("butterworth_bandpass_sos", [](int order, double low, double high, double fs) {
        const auto sos = design_butterworth_bandpass(order, low, high, fs);
        py::array_t<double> out({static_cast<py::ssize_t>(sos.size()), py::ssize_t{6}});
        auto v = out.mutable_unchecked<2>();
        for (std::size_t i = 0; i < sos.size(); ++i) {
            const double row[6] = {sos[i].b0, sos[i].b1, sos[i].b2, 1.0, sos[i].a1, sos[i].a2};
            for (py::ssize_t c = 0; c < 6; ++c) v(static_cast<py::ssize_t>(i), c) = row[c];
        }
        return out;
    }, py::arg("order"), py::arg("low_hz"), py::arg("high_hz"), py::arg("fs"),
       "Second-order sections in scipy layout [b0, b1, b2, 1, a1, a2].");
    m.def("bandpass_filter", [](const Array& x, double fs, double low, double high) {
        return to_numpy(bandpass_filter(as_span(x), fs, low, high));
    }, py::arg("signal"), py::arg("fs"), py::arg("low_hz") = 0.5, py::arg("high_hz") = 35.0);
    m.def("normalize_beat", [](const Array& x) { return to_numpy(normalize_beat(as_span(x))); });

    m.def("extract_features", [](const Array& signal, double fs, std::vector<std::size_t> rpeaks,
                                 std::vector<ClassId> labels, double target_fs) {
        PreprocessConfig cfg;
        cfg.target_fs = target_fs;
        return to_tuple(featurize(preprocess_record(make_record(signal, fs, std::move(rpeaks), std::move(labels)), cfg)));
    }, py::arg("signal"), py::arg("fs"), py::arg("rpeaks"), py::arg("labels"), py::arg("target_fs") = kTargetFs,
       "Resample, filter, segment and featurize one lead; returns (X[n, 76], y[n]).");

    // encoders
    m.def("paa", [](const Array& x, std::size_t m_out) { return to_numpy(paa(as_span(x), m_out)); });
    m.def("gasf", [](const Array& x) { return to_numpy(gasf(as_span(x))); });
    m.def("mtf", [](const Array& x, std::size_t bins) { return to_numpy(mtf(as_span(x), {bins})); },
          py::arg("series"), py::arg("n_bins") = 8);
    m.def("recurrence", [](const Array& x, std::optional<double> eps) { return to_numpy(recurrence(as_span(x), eps)); },
          py::arg("series"), py::arg("epsilon") = py::none());
    m.def("encode_beat", [](const Array& x, std::size_t bins) {
        const auto img = encode_beat(as_span(x), {bins});
        const auto side = static_cast<py::ssize_t>(kImageSide);
        py::array_t<double> out({py::ssize_t{3}, side, side});
        double* dst = out.mutable_data();
        for (const Matrix* ch : {&img.gasf, &img.mtf, &img.rp}) dst = std::copy(ch->data().begin(), ch->data().end(), dst);
        return out;
    }, py::arg("beat"), py::arg("n_bins") = 8, "Returns a (3, 32, 32) stack: GASF, MTF, RP.");

    // balancing
    m.def("smote", [](const Array& rows, const LabelArray& labels, const py::dict& targets, std::size_t k,
                      std::uint64_t seed) {
        return to_tuple(smote(as_matrix(rows), as_labels(labels), as_targets(targets), k, seed));
    }, py::arg("rows"), py::arg("labels"), py::arg("targets"), py::arg("k_neighbors") = 5, py::arg("seed") = 0);
    m.def("balance", [](const Array& rows, const LabelArray& labels, const py::dict& targets, std::size_t k,
                        std::uint64_t seed) {
        BalancePlan plan;
        plan.targets = as_targets(targets);
        plan.k_neighbors = k;
        plan.seed = seed;
        return to_tuple(balance(as_matrix(rows), as_labels(labels), plan));
    }, py::arg("rows"), py::arg("labels"), py::arg("targets"), py::arg("k_neighbors") = 5, py::arg("seed") = 0);

    // models
    py::class_<GbdtParams>(m, "GbdtParams")
        .def(py::init<>())
        .def_readwrite("learning_rate", &GbdtParams::learning_rate)
        .def_readwrite("max_depth", &GbdtParams::max_depth)
        .def_readwrite("n_estimators", &GbdtParams::n_estimators)
        .def_readwrite("min_data_in_leaf", &GbdtParams::min_data_in_leaf)
        .def_readwrite("l1_alpha", &GbdtParams::l1_alpha)
        .def_readwrite("l2_lambda", &GbdtParams::l2_lambda)
        .def_readwrite("seed", &GbdtParams::seed);
    py::class_<RfParams>(m, "RfParams")
        .def(py::init<>())
        .def_readwrite("n_trees", &RfParams::n_trees)
        .def_readwrite("max_depth", &RfParams::max_depth)
        .def_readwrite("min_samples_leaf", &RfParams::min_samples_leaf)
        .def_readwrite("features_per_split", &RfParams::features_per_split)
        .def_readwrite("bootstrap", &RfParams::bootstrap)
        .def_readwrite("seed", &RfParams::seed);

    py::class_<EnsembleModel>(m, "Model")
        .def_property_readonly("kind", [](const EnsembleModel& e) { return e.kind == ModelKind::gbdt ? "gbdt" : "rf"; })
        .def_readonly("n_classes", &EnsembleModel::n_classes)
        .def_readonly("n_features", &EnsembleModel::n_features)
        .def_readonly("n_rounds", &EnsembleModel::n_rounds)
        .def_property_readonly("n_trees", [](const EnsembleModel& e) { return e.trees.size(); })
        .def("predict_proba", [](const EnsembleModel& e, const Array& rows) {
            const Matrix x = as_matrix(rows);
            py::array_t<double> out({static_cast<py::ssize_t>(x.rows()), static_cast<py::ssize_t>(e.n_classes)});
            double* dst = out.mutable_data();
            for (std::size_t i = 0; i < x.rows(); ++i) {
                const auto p = e.predict(x.row(i)).probabilities;
                dst = std::copy(p.begin(), p.end(), dst);
            }
            return out;
        })
        .def("predict", [](const EnsembleModel& e, const Array& rows) { return to_numpy(predict_labels(e, as_matrix(rows))); })
        .def("dumps", [](const EnsembleModel& e) {
            std::ostringstream out;
            write_model(e, out);
            return out.str();
        })
        .def_static("loads", [](const std::string& text) {
            std::istringstream in(text);
            return read_model(in);
        })
        .def("save", [](const EnsembleModel& e, const std::filesystem::path& p) { save_model(e, p); })
        .def_static("load", [](const std::filesystem::path& p) { return load_model(p); });

    m.def("fit_gbdt", [](const Array& rows, const LabelArray& labels, const GbdtParams& params, std::size_t n_classes) {
        std::vector<double> loss;
        auto model = fit_gbdt(as_matrix(rows), as_labels(labels), params, n_classes, &loss);
        return py::make_tuple(std::move(model), to_numpy(loss));
    }, py::arg("rows"), py::arg("labels"), py::arg("params") = GbdtParams{}, py::arg("n_classes") = 0,
       "Returns (model, training logloss before training and after every round).");
    m.def("fit_random_forest", [](const Array& rows, const LabelArray& labels, const RfParams& params,
                                  std::size_t n_classes) {
        return fit_random_forest(as_matrix(rows), as_labels(labels), params, n_classes);
    }, py::arg("rows"), py::arg("labels"), py::arg("params") = RfParams{}, py::arg("n_classes") = 0);

    // metrics
    m.def("macro_metrics", [](const LabelArray& y_true, const LabelArray& y_pred, std::size_t n_classes) {
        const auto t = as_labels(y_true), q = as_labels(y_pred);
        if (n_classes == 0)
            for (const auto* v : {&t, &q})
                for (ClassId c : *v) n_classes = std::max(n_classes, static_cast<std::size_t>(std::max(c, 0)) + 1);
        const auto mm = macro_metrics(confusion_matrix(t, q, n_classes));
        py::dict d;
        d["precision"] = mm.precision;
        d["recall"] = mm.recall;
        d["accuracy"] = mm.accuracy;
        d["f1"] = mm.f1;
        return d;
    }, py::arg("y_true"), py::arg("y_pred"), py::arg("n_classes") = 0);

    // synthetic data
    m.def("synth_record", [](std::size_t beats_per_class, double fs, double noise_std, std::uint64_t seed) {
        SynthConfig cfg;
        cfg.beats_per_class = beats_per_class;
        cfg.fs = fs;
        cfg.noise_std = noise_std;
        cfg.seed = seed;
        const auto r = generate(cfg);
        py::dict d;
        d["signal"] = to_numpy(r.leads.front());
        d["fs"] = r.fs;
        d["rpeaks"] = r.rpeaks;
        d["labels"] = to_numpy(r.labels);
        return d;
    }, py::arg("beats_per_class") = 30, py::arg("fs") = 250.0, py::arg("noise_std") = 0.05, py::arg("seed") = 0);
}
