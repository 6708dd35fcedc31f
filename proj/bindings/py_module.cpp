#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include "landscape/runner.hpp"
#include "landscape/serialize.hpp"
#include "landscape/space_filling.hpp"

namespace py = pybind11;

namespace {

using namespace landscape;
using nlohmann::json;

json to_json(const py::handle& obj) {
    if (obj.is_none()) return nullptr;
    if (py::isinstance<py::bool_>(obj)) return obj.cast<bool>();
    if (py::isinstance<py::int_>(obj)) return obj.cast<std::int64_t>();
    if (py::isinstance<py::float_>(obj)) return obj.cast<double>();
    if (py::isinstance<py::str>(obj)) return obj.cast<std::string>();
    if (py::isinstance<py::dict>(obj)) {
        json out = json::object();
        for (const auto& item : obj.cast<py::dict>())
            out[item.first.cast<std::string>()] = to_json(item.second);
        return out;
    }
    if (py::isinstance<py::list>(obj) || py::isinstance<py::tuple>(obj)) {
        json out = json::array();
        for (const auto& item : obj.cast<py::sequence>()) out.push_back(to_json(item));
        return out;
    }
    throw py::type_error("cannot convert python object to a config value");
}

py::object to_py(const json& j) {
    switch (j.type()) {
        case json::value_t::null: return py::none();
        case json::value_t::boolean: return py::bool_(j.get<bool>());
        case json::value_t::number_integer: return py::int_(j.get<std::int64_t>());
        case json::value_t::number_unsigned: return py::int_(j.get<std::uint64_t>());
        case json::value_t::number_float: return py::float_(j.get<double>());
        case json::value_t::string: return py::str(j.get<std::string>());
        case json::value_t::array: {
            py::list out;
            for (const json& item : j) out.append(to_py(item));
            return out;
        }
        case json::value_t::object: {
            py::dict out;
            for (auto it = j.begin(); it != j.end(); ++it)
                out[py::str(it.key())] = to_py(it.value());
            return out;
        }
        default: return py::none();
    }
}

Architecture arch_from_py(const py::dict& arch) {
    return architecture_from_json(to_json(arch), "architecture");
}

Dataset dataset_from_py(const std::vector<std::vector<double>>& points,
                        const std::vector<double>& values, const std::vector<double>& weights) {
    auto [mu, target] = make_dataset(points, values, weights);
    return Dataset{std::move(mu), std::move(target)};
}

std::vector<AffineSegment> canonical_segments(const Architecture& arch, bool constant,
                                              int constant_layer) {
    std::vector<AffineSegment> out(static_cast<std::size_t>(arch.depth()));
    for (int l = 1; l <= arch.depth(); ++l) {
        if (constant && l != constant_layer) continue;
        const Activation& act = arch.activations[static_cast<std::size_t>(l - 1)];
        const std::optional<AffineSegment> seg = act.default_segment(constant);
        if (!seg)
            throw NoSuchSegmentError("layer " + std::to_string(l) + ": " + tag_name(act.tag()) +
                                     " has no " + (constant ? "constant" : "nonconstant") +
                                     " affine segment");
        out[static_cast<std::size_t>(l - 1)] = *seg;
    }
    return out;
}

SpuriousConstruction construct_impl(const py::dict& arch_dict,
                                    const std::vector<std::vector<double>>& points,
                                    const std::vector<double>& values,
                                    const std::vector<double>& weights, double p,
                                    const std::string& variant, int constant_layer) {
    const Architecture arch = arch_from_py(arch_dict);
    const Dataset data = dataset_from_py(points, values, weights);
    const LossSpec spec{p};
    const bool constant = variant == "constant";
    if (!constant && variant != "nonconstant")
        throw PreconditionError("variant must be \"nonconstant\" or \"constant\"");
    const std::vector<AffineSegment> segments =
        canonical_segments(arch, constant, constant_layer);
    if (constant) {
        const BestConstant fit = best_constant(spec, data.measure, data.target);
        return construct_constant(arch, constant_layer,
                                  segments[static_cast<std::size_t>(constant_layer - 1)],
                                  fit.value, data.measure);
    }
    const BestAffine fit = best_affine(spec, data.measure, data.target);
    return construct_nonconstant(arch, segments, fit.map.slope, fit.map.intercept, data.measure);
}

} // namespace

PYBIND11_MODULE(_landscape, m) {
    m.doc() = "Spurious-minimum constructions and image geometry for small feedforward nets";

    py::register_exception<IoError>(m, "IoError");
    py::register_exception<PreconditionError>(m, "PreconditionError");
    py::register_exception<SearchError>(m, "SearchError");

    m.def(
        "run",
        [](const std::vector<std::string>& args) {
            std::ostringstream out, err;
            const int code = run_command(args, out, err);
            return py::make_tuple(code, out.str(), err.str());
        },
        py::arg("args"), "Run one CLI invocation; returns (exit_code, stdout, stderr).");

    m.def(
        "forward",
        [](const py::dict& arch, const py::dict& params, const std::vector<double>& x) {
            const Architecture a = arch_from_py(arch);
            return forward(a, parameters_from_json(a, to_json(params), "params"), x);
        },
        py::arg("arch"), py::arg("params"), py::arg("x"));

    m.def(
        "best_affine",
        [](const std::vector<std::vector<double>>& points, const std::vector<double>& values,
           const std::vector<double>& weights, double p) {
            const Dataset data = dataset_from_py(points, values, weights);
            const BestAffine fit = best_affine(LossSpec{p}, data.measure, data.target);
            return to_py(json{{"a", fit.map.slope},
                              {"c", fit.map.intercept},
                              {"loss", fit.loss},
                              {"iterations", fit.iterations}});
        },
        py::arg("points"), py::arg("values"), py::arg("weights") = std::vector<double>{},
        py::arg("p") = 2.0);

    m.def(
        "best_constant",
        [](const std::vector<std::vector<double>>& points, const std::vector<double>& values,
           const std::vector<double>& weights, double p) {
            const Dataset data = dataset_from_py(points, values, weights);
            const BestConstant fit = best_constant(LossSpec{p}, data.measure, data.target);
            return to_py(json{{"c", fit.value}, {"loss", fit.loss}});
        },
        py::arg("points"), py::arg("values"), py::arg("weights") = std::vector<double>{},
        py::arg("p") = 2.0);

    m.def(
        "construct",
        [](const py::dict& arch, const std::vector<std::vector<double>>& points,
           const std::vector<double>& values, const std::vector<double>& weights, double p,
           const std::string& variant, int constant_layer) {
            const SpuriousConstruction c =
                construct_impl(arch, points, values, weights, p, variant, constant_layer);
            const Dataset data = dataset_from_py(points, values, weights);
            json report = construction_report(c, data.measure);
            std::vector<double> preds;
            for (const std::vector<double>& x : data.measure.points)
                preds.push_back(c.realization(x));
            report["loss"] = loss_value(LossSpec{p}, data.measure, preds, data.target);
            return to_py(report);
        },
        py::arg("arch"), py::arg("points"), py::arg("values"),
        py::arg("weights") = std::vector<double>{}, py::arg("p") = 2.0,
        py::arg("variant") = "nonconstant", py::arg("constant_layer") = 1);

    m.def(
        "check_local_min",
        [](const py::dict& arch, const std::vector<std::vector<double>>& points,
           const std::vector<double>& values, const std::vector<double>& weights, double p,
           const std::string& variant, int constant_layer, int samples, std::uint64_t seed,
           int threads) {
            const SpuriousConstruction c =
                construct_impl(arch, points, values, weights, p, variant, constant_layer);
            const Dataset data = dataset_from_py(points, values, weights);
            return to_py(local_min_report_json(check_local_min(
                c, data.measure, data.target, LossSpec{p}, samples, seed, threads)));
        },
        py::arg("arch"), py::arg("points"), py::arg("values"),
        py::arg("weights") = std::vector<double>{}, py::arg("p") = 2.0,
        py::arg("variant") = "nonconstant", py::arg("constant_layer") = 1,
        py::arg("samples") = 1000, py::arg("seed") = 1, py::arg("threads") = 1);

    m.def(
        "find_escape",
        [](const py::dict& arch, const std::vector<std::vector<double>>& points,
           const std::vector<double>& values, const std::vector<double>& weights, double p,
           const std::string& variant, int constant_layer, int restarts, std::uint64_t seed,
           int threads) {
            const SpuriousConstruction c =
                construct_impl(arch, points, values, weights, p, variant, constant_layer);
            const Dataset data = dataset_from_py(points, values, weights);
            return to_py(escape_report_json(find_escape(c, data.measure, data.target,
                                                        LossSpec{p}, restarts, seed, threads)));
        },
        py::arg("arch"), py::arg("points"), py::arg("values"),
        py::arg("weights") = std::vector<double>{}, py::arg("p") = 2.0,
        py::arg("variant") = "nonconstant", py::arg("constant_layer") = 1,
        py::arg("restarts") = 200, py::arg("seed") = 1, py::arg("threads") = 1);

    m.def(
        "monotone_distance",
        [](const std::vector<double>& u) {
            const MonotoneProjection proj = monotone_distance(u);
            return to_py(json{{"distance_sq", proj.distance_sq}, {"minimizers", proj.minimizers}});
        },
        py::arg("u"));

    m.def(
        "sample_image",
        [](const py::dict& arch, const std::vector<std::vector<double>>& points, int draws,
           double w_lo, double w_hi, double b_lo, double b_hi, std::uint64_t seed, int threads) {
            const ImageCloud cloud =
                sample_image(arch_from_py(arch), FiniteMeasure::from_points(points), draws, w_lo,
                             w_hi, b_lo, b_hi, seed, threads);
            return cloud.rows;
        },
        py::arg("arch"), py::arg("points"), py::arg("draws"), py::arg("w_lo") = -10.0,
        py::arg("w_hi") = 10.0, py::arg("b_lo") = -5.0, py::arg("b_hi") = 5.0,
        py::arg("seed") = 1, py::arg("threads") = 1);

    m.def(
        "project",
        [](const py::dict& arch, const std::vector<std::vector<double>>& points,
           const std::vector<double>& u, int restarts, std::uint64_t seed, int threads) {
            const ProjectionResult result = project_multistart(
                arch_from_py(arch), FiniteMeasure::from_points(points), u, restarts, seed,
                threads);
            return to_py(projection_report_json(result, u));
        },
        py::arg("arch"), py::arg("points"), py::arg("u"), py::arg("restarts") = 500,
        py::arg("seed") = 1, py::arg("threads") = 1);

    m.def(
        "space_fill_eval",
        [](const py::dict& base, double lo, double hi, double amplitude,
           const std::vector<double>& s) {
            const SpaceFillingActivation act(activation_from_json(to_json(base), "base"), lo, hi,
                                             amplitude);
            std::vector<double> out;
            out.reserve(s.size());
            for (double v : s) out.push_back(act.eval(v));
            return out;
        },
        py::arg("base"), py::arg("lo"), py::arg("hi"), py::arg("amplitude"), py::arg("s"));
}
