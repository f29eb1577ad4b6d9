#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "t3s2s/attention.hpp"
#include "t3s2s/cli_ops.hpp"
#include "t3s2s/embedding.hpp"
#include "t3s2s/error.hpp"
#include "t3s2s/keywords.hpp"
#include "t3s2s/pipeline.hpp"
#include "t3s2s/prompt_balance.hpp"
#include "t3s2s/scene.hpp"
#include "t3s2s/sketch.hpp"
#include "t3s2s/tokenizer.hpp"

namespace py = pybind11;
using namespace t3s2s;

namespace {

Matrix matrix_from_array(py::array_t<double, py::array::c_style | py::array::forcecast> arr) {
    if (arr.ndim() != 2) throw Error(ErrorKind::DimensionMismatch, "expected a 2-D array");
    Matrix m(static_cast<int>(arr.shape(0)), static_cast<int>(arr.shape(1)));
    std::memcpy(m.data.data(), arr.data(), m.data.size() * sizeof(double));
    return m;
}

py::array_t<double> array_from_matrix(const Matrix& m) {
    py::array_t<double> arr({m.rows, m.cols});
    std::memcpy(arr.mutable_data(), m.data.data(), m.data.size() * sizeof(double));
    return arr;
}

py::array_t<uint8_t> array_from_mask(const InstanceMask& mask) {
    py::array_t<uint8_t> arr({mask.h, mask.w});
    std::memcpy(arr.mutable_data(), mask.cells.data(), mask.cells.size());
    return arr;
}

InstanceMask mask_from_array(py::array_t<uint8_t, py::array::c_style | py::array::forcecast> arr) {
    if (arr.ndim() != 2) throw Error(ErrorKind::DimensionMismatch, "expected a 2-D mask");
    InstanceMask mask;
    mask.h = static_cast<int>(arr.shape(0));
    mask.w = static_cast<int>(arr.shape(1));
    mask.cells.assign(arr.data(), arr.data() + arr.size());
    for (uint8_t& c : mask.cells) c = c ? 1 : 0;
    return mask;
}

MaskPyramid::Level level_from_dict(const py::dict& level, int h, int w) {
    MaskPyramid::Level out;
    out.h = h;
    out.w = w;
    for (const auto& item : level) {
        int id = item.first.cast<int>();
        auto arr = item.second.cast<
            py::array_t<uint8_t, py::array::c_style | py::array::forcecast>>();
        std::vector<uint8_t> cells(arr.data(), arr.data() + arr.size());
        for (uint8_t& c : cells) c = c ? 1 : 0;
        out.masks.emplace(id, std::move(cells));
    }
    return out;
}

py::dict report_to_dict(const RunReport& report) {
    py::dict out;
    out["scene"] = report.scene_name;
    out["seed"] = report.seed;
    out["timesteps"] = report.timesteps;
    out["digest"] = report.digest;
    out["i_end"] = report.tokens.i_end;
    py::list responses;
    for (const ResponseEntry& r : report.responses) {
        py::dict d;
        d["t"] = r.t;
        d["layer"] = r.layer;
        d["instance"] = r.instance_id;
        d["in_mask"] = r.in_mask;
        d["out_mask"] = r.out_mask;
        responses.append(d);
    }
    out["responses"] = responses;
    out["topk_hist"] = report.topk_hist;
    py::dict aggregates;
    for (size_t i = 0; i < report.keywords.indices.size(); ++i) {
        int id = report.keywords.instance_ids[i];
        py::dict d;
        d["word"] = report.tokens.word_at(report.keywords.indices[i]);
        d["in_mask"] = report.aggregate_in_mask(id);
        d["out_mask"] = report.aggregate_out_mask(id);
        aggregates[py::int_(id)] = d;
    }
    out["aggregates"] = aggregates;
    return out;
}

}  // namespace

PYBIND11_MODULE(_t3s2s, m) {
    m.doc() = "training-free triplet tuning primitives (prompt balance, "
              "characteristics prominence, dense tuning)";

    py::register_exception<Error>(m, "T3Error");

    py::class_<TokenSequence>(m, "TokenSequence")
        .def_readonly("words", &TokenSequence::words)
        .def_readonly("i_end", &TokenSequence::i_end)
        .def_readonly("n", &TokenSequence::n)
        .def("token_name", &TokenSequence::token_name);

    py::class_<KeywordIndices>(m, "KeywordIndices")
        .def(py::init<>())
        .def_readwrite("indices", &KeywordIndices::indices)
        .def_readwrite("instance_ids", &KeywordIndices::instance_ids)
        .def_readonly("warning_no_keywords", &KeywordIndices::warning_no_keywords);

    py::class_<EmbeddingProvider>(m, "EmbeddingProvider")
        .def_static("synthetic", &EmbeddingProvider::synthetic, py::arg("seed"), py::arg("d"))
        .def_static("from_file", &EmbeddingProvider::from_file, py::arg("path"), py::arg("d"))
        .def_readonly("d", &EmbeddingProvider::d);

    py::class_<EmbeddingMatrix>(m, "EmbeddingMatrix")
        .def_property_readonly("array",
                               [](const EmbeddingMatrix& e) { return array_from_matrix(e.m); })
        .def_property_readonly("stage", [](const EmbeddingMatrix& e) {
            switch (e.stage) {
                case EmbedStage::global: return "global";
                case EmbedStage::recombined: return "recombined";
                default: return "balanced";
            }
        });

    m.def("tokenize", &tokenize, py::arg("text"), py::arg("n"));
    m.def(
        "extract_keywords",
        [](const TokenSequence& tokens,
           std::optional<std::vector<std::pair<std::string, int>>> overrides) {
            return extract_keywords(tokens, default_lexicon(),
                                    overrides ? &*overrides : nullptr);
        },
        py::arg("tokens"), py::arg("overrides") = py::none());
    m.def("embed", &embed, py::arg("tokens"), py::arg("provider"));
    m.def("embed_word", &embed_word, py::arg("word"), py::arg("provider"));
    m.def("prompt_balance", &prompt_balance, py::arg("global_embeddings"), py::arg("keywords"),
          py::arg("tokens"), py::arg("provider"));
    m.def("energy_profile", &energy_profile, py::arg("embeddings"), py::arg("i_end"));
    m.def("cosine_profile", &cosine_profile, py::arg("global_embeddings"), py::arg("keywords"),
          py::arg("tokens"), py::arg("provider"));

    py::class_<SketchLabelMap>(m, "SketchLabelMap")
        .def_readonly("h", &SketchLabelMap::h)
        .def_readonly("w", &SketchLabelMap::w)
        .def_readonly("instance_count", &SketchLabelMap::instance_count)
        .def_property_readonly("array", [](const SketchLabelMap& map) {
            py::array_t<uint8_t> arr({map.h, map.w});
            std::memcpy(arr.mutable_data(), map.cells.data(), map.cells.size());
            return arr;
        });

    m.def("load_label_map", &load_label_map, py::arg("path"), py::arg("expected_instances"));
    m.def(
        "instance_mask",
        [](const SketchLabelMap& map, int id) { return array_from_mask(instance_mask(map, id)); },
        py::arg("map"), py::arg("id"));
    m.def(
        "downsample_any",
        [](py::array_t<uint8_t, py::array::c_style | py::array::forcecast> mask, int h, int w) {
            return array_from_mask(downsample_any(mask_from_array(mask), h, w));
        },
        py::arg("mask"), py::arg("target_h"), py::arg("target_w"));
    m.def(
        "build_pyramid",
        [](const SketchLabelMap& map, const KeywordIndices& binding,
           const std::vector<std::pair<int, int>>& resolutions, bool allow_empty) {
            MaskPyramid pyr = build_pyramid(map, binding, resolutions, allow_empty);
            py::list levels;
            for (const MaskPyramid::Level& level : pyr.levels) {
                py::dict d;
                d["h"] = level.h;
                d["w"] = level.w;
                py::dict masks;
                for (const auto& [id, cells] : level.masks) {
                    py::array_t<uint8_t> arr(static_cast<py::ssize_t>(cells.size()));
                    std::memcpy(arr.mutable_data(), cells.data(), cells.size());
                    masks[py::int_(id)] = arr;
                }
                d["masks"] = masks;
                levels.append(d);
            }
            return levels;
        },
        py::arg("map"), py::arg("binding"), py::arg("resolutions"),
        py::arg("allow_empty") = false);

    m.def(
        "softmax_rows",
        [](py::array_t<double, py::array::c_style | py::array::forcecast> logits) {
            return array_from_matrix(softmax_rows(matrix_from_array(logits)));
        },
        py::arg("logits"));
    m.def(
        "attention_logits",
        [](py::array_t<double, py::array::c_style | py::array::forcecast> q,
           py::array_t<double, py::array::c_style | py::array::forcecast> k) {
            return array_from_matrix(attention_logits(matrix_from_array(q), matrix_from_array(k)));
        },
        py::arg("q"), py::arg("k"));
    m.def(
        "attend",
        [](py::array_t<double, py::array::c_style | py::array::forcecast> a,
           py::array_t<double, py::array::c_style | py::array::forcecast> v) {
            return array_from_matrix(attend(matrix_from_array(a), matrix_from_array(v)));
        },
        py::arg("a"), py::arg("v"));
    m.def(
        "topk_value_indices",
        [](py::array_t<double, py::array::c_style | py::array::forcecast> v, int k, int i_end) {
            return topk_value_indices(matrix_from_array(v), k, i_end);
        },
        py::arg("v"), py::arg("k"), py::arg("i_end"));
    m.def(
        "amplify_value_topk",
        [](py::array_t<double, py::array::c_style | py::array::forcecast> v, int k, double factor,
           int i_end) {
            return array_from_matrix(amplify_value_topk(matrix_from_array(v), k, factor, i_end));
        },
        py::arg("v"), py::arg("k"), py::arg("factor"), py::arg("i_end"));
    m.def(
        "characteristics_mask",
        [](const std::vector<std::vector<int>>& topk, const KeywordIndices& q,
           const py::dict& level, int h, int w) {
            MaskPyramid::Level lv = level_from_dict(level, h, w);
            return array_from_matrix(characteristics_mask(topk, q, lv, h * w).h);
        },
        py::arg("topk"), py::arg("keywords"), py::arg("level"), py::arg("h"), py::arg("w"));
    m.def(
        "prominence",
        [](py::array_t<double, py::array::c_style | py::array::forcecast> f,
           py::array_t<double, py::array::c_style | py::array::forcecast> h, double beta) {
            EnhancementMask mask{matrix_from_array(h)};
            return array_from_matrix(prominence(matrix_from_array(f), mask, beta));
        },
        py::arg("f"), py::arg("h"), py::arg("beta"));
    m.def(
        "dense_tune",
        [](py::array_t<double, py::array::c_style | py::array::forcecast> logits,
           const py::dict& level, int h, int w, const KeywordIndices& q, double lambda0,
           double gamma, double tau) {
            MaskPyramid::Level lv = level_from_dict(level, h, w);
            DenseTuneParams params{lambda0, gamma};
            return array_from_matrix(dense_tune(matrix_from_array(logits), lv, q, params, tau));
        },
        py::arg("logits"), py::arg("level"), py::arg("h"), py::arg("w"), py::arg("keywords"),
        py::arg("lambda0") = 2.5, py::arg("gamma") = 2.0, py::arg("tau") = 1.0);

    m.def("synth_query_features",
          [](uint64_t seed, int layer, int timestep, int b, int d) {
              return array_from_matrix(synth_query_features(seed, layer, timestep, b, d));
          },
          py::arg("seed"), py::arg("layer"), py::arg("timestep"), py::arg("b"), py::arg("d"));
    m.def("schedule_tau", &schedule_tau, py::arg("t"), py::arg("timesteps"));

    py::class_<SceneSpec>(m, "SceneSpec")
        .def_readonly("name", &SceneSpec::name)
        .def_readonly("prompt", &SceneSpec::prompt)
        .def_readonly("n", &SceneSpec::n)
        .def_readwrite("k", &SceneSpec::k)
        .def_readwrite("beta", &SceneSpec::beta)
        .def_readwrite("timesteps", &SceneSpec::timesteps)
        .def_readwrite("seed", &SceneSpec::seed);

    m.def("load_scene", &load_scene, py::arg("path"));
    m.def(
        "run_scene",
        [](const SceneSpec& scene, bool pb, bool cp, bool dt, std::optional<uint64_t> seed) {
            RunOptions options;
            options.pb = pb;
            options.cp = cp;
            options.dt = dt;
            options.seed_override = seed;
            return report_to_dict(run(scene, options));
        },
        py::arg("scene"), py::arg("pb") = true, py::arg("cp") = true, py::arg("dt") = true,
        py::arg("seed") = py::none());
    m.def(
        "probe_scene",
        [](const SceneSpec& scene, const std::vector<int>& k_values, double factor) {
            ProbeReport probe = topk_probe(scene, k_values, factor);
            py::dict out;
            out["k_values"] = probe.k_values;
            out["factor"] = probe.factor;
            out["instance_ids"] = probe.instance_ids;
            out["instance_words"] = probe.instance_words;
            out["responses"] = probe.responses;
            return out;
        },
        py::arg("scene"), py::arg("k_values"), py::arg("factor") = 2.0);
}
