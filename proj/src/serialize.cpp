#include "landscape/serialize.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "landscape/space_filling.hpp"

namespace landscape {

using nlohmann::json;

std::string format_double(double v) {
    if (!std::isfinite(v)) return "null"; // JSON has no inf/nan literals
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

namespace {

void dump_rec(const json& j, std::string& out, int indent, int depth) {
    const auto pad = [&](int d) { out.append(static_cast<std::size_t>(d * indent), ' '); };
    switch (j.type()) {
        case json::value_t::object: {
            if (j.empty()) {
                out += "{}";
                return;
            }
            out += "{\n";
            bool first = true;
            for (auto it = j.begin(); it != j.end(); ++it) {
                if (!first) out += ",\n";
                first = false;
                pad(depth + 1);
                out += json(it.key()).dump();
                out += ": ";
                dump_rec(it.value(), out, indent, depth + 1);
            }
            out += "\n";
            pad(depth);
            out += "}";
            return;
        }
        case json::value_t::array: {
            if (j.empty()) {
                out += "[]";
                return;
            }
            out += "[\n";
            bool first = true;
            for (const json& item : j) {
                if (!first) out += ",\n";
                first = false;
                pad(depth + 1);
                dump_rec(item, out, indent, depth + 1);
            }
            out += "\n";
            pad(depth);
            out += "]";
            return;
        }
        case json::value_t::number_float: out += format_double(j.get<double>()); return;
        default: out += j.dump(); return; // strings, ints, bools, null
    }
}

} // namespace

std::string fixed_dump(const json& j, int indent) {
    std::string out;
    dump_rec(j, out, indent, 0);
    out += "\n";
    return out;
}

void reject_unknown_fields(const json& obj, const std::vector<std::string>& allowed,
                           const std::string& path) {
    if (!obj.is_object()) throw ConfigError(path + ": expected a JSON object");
    for (auto it = obj.begin(); it != obj.end(); ++it) {
        bool known = false;
        for (const std::string& key : allowed)
            if (it.key() == key) {
                known = true;
                break;
            }
        if (!known) throw ConfigError(path + "." + it.key() + ": unknown field");
    }
}

namespace {

const json& require_key(const json& obj, const std::string& key, const std::string& path) {
    if (!obj.is_object() || !obj.contains(key))
        throw ConfigError(path + "." + key + ": missing");
    return obj.at(key);
}

} // namespace

double get_double(const json& obj, const std::string& key, const std::string& path) {
    const json& v = require_key(obj, key, path);
    if (!v.is_number()) throw ConfigError(path + "." + key + ": expected a number");
    return v.get<double>();
}

double get_double_or(const json& obj, const std::string& key, const std::string& path,
                     double fallback) {
    if (!obj.is_object() || !obj.contains(key)) return fallback;
    return get_double(obj, key, path);
}

std::int64_t get_int(const json& obj, const std::string& key, const std::string& path) {
    const json& v = require_key(obj, key, path);
    if (!v.is_number_integer() && !v.is_number_unsigned())
        throw ConfigError(path + "." + key + ": expected an integer");
    return v.get<std::int64_t>();
}

std::int64_t get_int_or(const json& obj, const std::string& key, const std::string& path,
                        std::int64_t fallback) {
    if (!obj.is_object() || !obj.contains(key)) return fallback;
    return get_int(obj, key, path);
}

std::string get_string(const json& obj, const std::string& key, const std::string& path) {
    const json& v = require_key(obj, key, path);
    if (!v.is_string()) throw ConfigError(path + "." + key + ": expected a string");
    return v.get<std::string>();
}

std::vector<double> get_double_array(const json& value, const std::string& path) {
    if (!value.is_array()) throw ConfigError(path + ": expected an array of numbers");
    std::vector<double> out;
    out.reserve(value.size());
    for (const json& v : value) {
        if (!v.is_number()) throw ConfigError(path + ": expected an array of numbers");
        out.push_back(v.get<double>());
    }
    return out;
}

json parameters_to_json(const Parameters& params) {
    json layers = json::array();
    for (std::size_t l = 0; l < params.weights.size(); ++l) {
        const Matrix& A = params.weights[l];
        json rows = json::array();
        for (int i = 0; i < A.rows; ++i) {
            json row = json::array();
            for (int j = 0; j < A.cols; ++j) row.push_back(A(i, j));
            rows.push_back(std::move(row));
        }
        layers.push_back(json{{"A", std::move(rows)}, {"b", params.biases[l]}});
    }
    return json{{"layers", std::move(layers)}};
}

Parameters parameters_from_json(const Architecture& arch, const json& j,
                                const std::string& path) {
    reject_unknown_fields(j, {"layers"}, path);
    const json& layers = require_key(j, "layers", path);
    if (!layers.is_array() || static_cast<int>(layers.size()) != arch.depth() + 1)
        throw ConfigError(path + ".layers: expected " + std::to_string(arch.depth() + 1) +
                          " layers");
    Parameters params = Parameters::zeros(arch);
    for (int l = 0; l <= arch.depth(); ++l) {
        const std::string lp = path + ".layers[" + std::to_string(l) + "]";
        const json& layer = layers.at(static_cast<std::size_t>(l));
        reject_unknown_fields(layer, {"A", "b"}, lp);
        const json& A = require_key(layer, "A", lp);
        Matrix& W = params.weights[static_cast<std::size_t>(l)];
        if (!A.is_array() || static_cast<int>(A.size()) != W.rows)
            throw ConfigError(lp + ".A: expected " + std::to_string(W.rows) + " rows");
        for (int i = 0; i < W.rows; ++i) {
            const std::vector<double> row =
                get_double_array(A.at(static_cast<std::size_t>(i)), lp + ".A");
            if (static_cast<int>(row.size()) != W.cols)
                throw ConfigError(lp + ".A: expected " + std::to_string(W.cols) + " columns");
            for (int c = 0; c < W.cols; ++c) W(i, c) = row[static_cast<std::size_t>(c)];
        }
        const std::vector<double> b = get_double_array(require_key(layer, "b", lp), lp + ".b");
        if (b.size() != params.biases[static_cast<std::size_t>(l)].size())
            throw ConfigError(lp + ".b: wrong length");
        params.biases[static_cast<std::size_t>(l)] = b;
    }
    return params;
}

json segment_to_json(const AffineSegment& segment) {
    return json{{"center", segment.center},
                {"radius", segment.radius},
                {"slope", segment.slope},
                {"offset", segment.offset}};
}

AffineSegment segment_from_json(const json& j, const std::string& path) {
    reject_unknown_fields(j, {"center", "radius", "slope", "offset"}, path);
    AffineSegment seg;
    seg.center = get_double(j, "center", path);
    seg.radius = get_double(j, "radius", path);
    seg.slope = get_double_or(j, "slope", path, 0.0);
    seg.offset = get_double_or(j, "offset", path, 0.0);
    if (!(seg.radius > 0.0)) throw ConfigError(path + ".radius: must be positive");
    return seg;
}

json activation_to_json(const Activation& act) {
    switch (act.tag()) {
        case ActivationTag::ReLU: return json{{"kind", "relu"}};
        case ActivationTag::LeakyReLU: return json{{"kind", "leaky_relu"}, {"slope", act.param1()}};
        case ActivationTag::PReLU: return json{{"kind", "prelu"}, {"slope", act.param1()}};
        case ActivationTag::ELU: return json{{"kind", "elu"}, {"scale", act.param1()}};
        case ActivationTag::ISRLU: return json{{"kind", "isrlu"}, {"scale", act.param1()}};
        case ActivationTag::PLU:
            return json{{"kind", "plu"}, {"slope", act.param1()}, {"knee", act.param2()}};
        case ActivationTag::SQNL: return json{{"kind", "sqnl"}};
        case ActivationTag::SpaceFilling: {
            const SpaceFillingActivation& sf = *act.payload();
            return json{{"kind", "space_filling"},
                        {"base", activation_to_json(sf.base())},
                        {"interval", json::array({sf.interval_lo(), sf.interval_hi()})},
                        {"amplitude", sf.amplitude()}};
        }
    }
    throw PreconditionError("activation_to_json: unknown tag");
}

Activation activation_from_json(const json& j, const std::string& path) {
    if (!j.is_object()) throw ConfigError(path + ": expected an activation object");
    const std::string kind = get_string(j, "kind", path);
    if (kind == "relu") {
        reject_unknown_fields(j, {"kind"}, path);
        return Activation::relu();
    }
    if (kind == "leaky_relu") {
        reject_unknown_fields(j, {"kind", "slope"}, path);
        return Activation::leaky_relu(get_double_or(j, "slope", path, 0.01));
    }
    if (kind == "prelu") {
        reject_unknown_fields(j, {"kind", "slope"}, path);
        return Activation::prelu(get_double(j, "slope", path));
    }
    if (kind == "elu") {
        reject_unknown_fields(j, {"kind", "scale"}, path);
        return Activation::elu(get_double_or(j, "scale", path, 1.0));
    }
    if (kind == "isrlu") {
        reject_unknown_fields(j, {"kind", "scale"}, path);
        return Activation::isrlu(get_double_or(j, "scale", path, 1.0));
    }
    if (kind == "plu") {
        reject_unknown_fields(j, {"kind", "slope", "knee"}, path);
        return Activation::plu(get_double_or(j, "slope", path, 0.1),
                               get_double_or(j, "knee", path, 1.0));
    }
    if (kind == "sqnl") {
        reject_unknown_fields(j, {"kind"}, path);
        return Activation::sqnl();
    }
    if (kind == "space_filling") {
        reject_unknown_fields(j, {"kind", "base", "interval", "amplitude"}, path);
        const Activation base = activation_from_json(require_key(j, "base", path), path + ".base");
        const std::vector<double> interval =
            get_double_array(require_key(j, "interval", path), path + ".interval");
        if (interval.size() != 2) throw ConfigError(path + ".interval: expected [lo, hi]");
        const double amplitude = get_double(j, "amplitude", path);
        return Activation::space_filling(std::make_shared<const SpaceFillingActivation>(
            base, interval[0], interval[1], amplitude));
    }
    throw ConfigError(path + ".kind: unknown activation \"" + kind + "\"");
}

json architecture_to_json(const Architecture& arch) {
    json acts = json::array();
    for (const Activation& a : arch.activations) acts.push_back(activation_to_json(a));
    return json{{"input_dim", arch.input_dim}, {"widths", arch.widths}, {"activations", acts}};
}

Architecture architecture_from_json(const json& j, const std::string& path) {
    reject_unknown_fields(j, {"input_dim", "widths", "activations"}, path);
    Architecture arch;
    arch.input_dim = static_cast<int>(get_int(j, "input_dim", path));
    const json& widths = require_key(j, "widths", path);
    if (!widths.is_array() || widths.empty())
        throw ConfigError(path + ".widths: expected a nonempty array");
    for (const json& w : widths) {
        if (!w.is_number_integer() && !w.is_number_unsigned())
            throw ConfigError(path + ".widths: expected integers");
        arch.widths.push_back(w.get<int>());
    }
    const json& acts = require_key(j, "activations", path);
    if (acts.is_object()) {
        const Activation a = activation_from_json(acts, path + ".activations");
        arch.activations.assign(arch.widths.size(), a);
    } else if (acts.is_array() && acts.size() == arch.widths.size()) {
        for (std::size_t i = 0; i < acts.size(); ++i)
            arch.activations.push_back(activation_from_json(
                acts.at(i), path + ".activations[" + std::to_string(i) + "]"));
    } else {
        throw ConfigError(path + ".activations: expected one object or one entry per layer");
    }
    try {
        arch.validate();
    } catch (const PreconditionError& e) {
        throw ConfigError(path + ": " + e.what());
    }
    return arch;
}

json affine_map_to_json(const AffineMap& map) {
    return json{{"slope", map.slope}, {"intercept", map.intercept}};
}

json construction_report(const SpuriousConstruction& construction, const FiniteMeasure& mu) {
    const bool constant = construction.variant.kind == VariantKind::Constant;
    json segments = json::array();
    json margins = json::array();
    for (int l = 1; l <= construction.arch.depth(); ++l) {
        const AffineSegment& seg = construction.segments[static_cast<std::size_t>(l - 1)];
        const bool constrained = constant ? l == construction.variant.constant_layer : true;
        if (!constrained) {
            segments.push_back(nullptr);
            continue;
        }
        segments.push_back(segment_to_json(seg));
        double margin = seg.radius;
        for (const std::vector<double>& x : mu.points) {
            const ForwardTrace trace = forward_trace(construction.arch, construction.params, x);
            for (double v : trace.pre[static_cast<std::size_t>(l - 1)])
                margin = std::min(margin, seg.radius - std::abs(v - seg.center));
        }
        margins.push_back(json{{"layer", l}, {"margin", margin}});
    }
    json out{{"variant", constant ? "constant" : "nonconstant"},
             {"params", parameters_to_json(construction.params)},
             {"realization", affine_map_to_json(construction.realization)},
             {"segments", std::move(segments)},
             {"margins", std::move(margins)},
             {"input_bound", construction.input_bound},
             {"certified_radius", construction.certified_radius},
             {"empirical_radius", construction.empirical_radius},
             {"radius_vacuous", construction.radius_vacuous}};
    if (constant) out["constant_layer"] = construction.variant.constant_layer;
    return out;
}

json local_min_report_json(const LocalMinReport& report) {
    return json{{"base_loss", report.base_loss},
                {"gradient_norm", report.gradient_norm},
                {"radius", report.radius},
                {"radius_vacuous", report.radius_vacuous},
                {"samples", report.samples},
                {"min_gap", report.min_gap},
                {"mean_gap", report.mean_gap},
                {"regime_violations", report.regime_violations},
                {"passed", report.passed}};
}

json escape_report_json(const EscapeCertificate& certificate) {
    return json{{"escape_loss", certificate.escape_loss},
                {"spurious_loss", certificate.spurious_loss},
                {"gap", certificate.gap},
                {"method", certificate.method},
                {"restarts_used", certificate.restarts_used},
                {"params", parameters_to_json(certificate.params)}};
}

json projection_report_json(const ProjectionResult& result, const std::vector<double>& target) {
    return json{{"target", target},
                {"distance_sq", result.distance_sq},
                {"minimizers", result.minimizers},
                {"cluster_counts", result.cluster_counts},
                {"restarts", result.restarts},
                {"oracle_used", result.oracle_used},
                {"oracle_distance_sq", result.oracle_distance_sq}};
}

json scan_report_json(const ScanResult& result) {
    json points = json::array();
    for (const ScanPoint& p : result.points)
        points.push_back(json{{"t", p.t},
                              {"target", p.target},
                              {"distance_sq", p.distance_sq},
                              {"minimizer", p.minimizer}});
    json jumps = json::array();
    for (const ScanJump& jmp : result.jumps)
        jumps.push_back(json{{"index", jmp.index}, {"size", jmp.size}});
    return json{{"points", std::move(points)}, {"jumps", std::move(jumps)}};
}

json expressiveness_report_json(const ExpressivenessReport& report) {
    json dirs = json::array();
    for (const DirectionGap& d : report.directions)
        dirs.push_back(json{{"direction", d.direction}, {"distance_sq", d.distance_sq}});
    return json{{"max_distance_sq", report.max_distance_sq}, {"directions", std::move(dirs)}};
}

namespace {

std::string trim(const std::string& s) {
    std::size_t a = s.find_first_not_of(" \t\r");
    std::size_t b = s.find_last_not_of(" \t\r");
    if (a == std::string::npos) return "";
    return s.substr(a, b - a + 1);
}

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> cells;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) cells.push_back(trim(cell));
    if (!line.empty() && line.back() == ',') cells.push_back("");
    return cells;
}

double parse_cell(const std::string& cell, const std::string& name, int line_no) {
    try {
        std::size_t used = 0;
        const double v = std::stod(cell, &used);
        if (used != cell.size()) throw std::invalid_argument("trailing junk");
        return v;
    } catch (const std::exception&) {
        throw IoError(name + ":" + std::to_string(line_no) + ": bad number \"" + cell + "\"");
    }
}

} // namespace

Dataset parse_dataset_csv(std::istream& in, const std::string& name) {
    std::string line;
    if (!std::getline(in, line)) throw IoError(name + ": empty dataset");
    const std::vector<std::string> header = split_csv_line(line);
    int d = 0;
    while (d < static_cast<int>(header.size()) &&
           header[static_cast<std::size_t>(d)] == "x" + std::to_string(d + 1))
        ++d;
    if (d == 0 || d >= static_cast<int>(header.size()) ||
        header[static_cast<std::size_t>(d)] != "y")
        throw IoError(name + ": header must be x1..xd,y[,weight]");
    const bool has_weight =
        static_cast<int>(header.size()) == d + 2 && header[static_cast<std::size_t>(d) + 1] == "weight";
    if (!has_weight && static_cast<int>(header.size()) != d + 1)
        throw IoError(name + ": header must be x1..xd,y[,weight]");

    std::vector<std::vector<double>> points;
    std::vector<double> values, weights;
    int line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (trim(line).empty()) continue;
        const std::vector<std::string> cells = split_csv_line(line);
        if (static_cast<int>(cells.size()) != d + 1 + (has_weight ? 1 : 0))
            throw IoError(name + ":" + std::to_string(line_no) + ": wrong column count");
        std::vector<double> x(static_cast<std::size_t>(d));
        for (int i = 0; i < d; ++i)
            x[static_cast<std::size_t>(i)] = parse_cell(cells[static_cast<std::size_t>(i)], name, line_no);
        points.push_back(std::move(x));
        values.push_back(parse_cell(cells[static_cast<std::size_t>(d)], name, line_no));
        if (has_weight)
            weights.push_back(parse_cell(cells[static_cast<std::size_t>(d) + 1], name, line_no));
    }
    if (points.empty()) throw IoError(name + ": no data rows");
    auto [mu, target] = make_dataset(std::move(points), std::move(values), std::move(weights));
    return Dataset{std::move(mu), std::move(target)};
}

Dataset load_dataset_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open dataset: " + path);
    return parse_dataset_csv(in, path);
}

void write_csv_row(std::ostream& out, const std::vector<double>& row) {
    for (std::size_t i = 0; i < row.size(); ++i) {
        if (i) out << ',';
        out << format_double(row[i]);
    }
    out << '\n';
}

void write_cloud_csv(std::ostream& out, const ImageCloud& cloud, bool full) {
    const std::size_t n = cloud.rows.empty() ? 0 : cloud.rows.front().size();
    for (std::size_t i = 0; i < n; ++i) out << (i ? ",z" : "z") << (i + 1);
    out << '\n';
    for (const std::vector<double>& row : cloud.rows) {
        if (!full) {
            bool keep = true;
            for (double z : row)
                if (!(std::abs(z) <= 1e3)) keep = false;
            if (!keep) continue;
        }
        write_csv_row(out, row);
    }
}

void write_space_fill_csv(std::ostream& out, const SpaceFillingActivation& act, int n) {
    if (n < 2) throw PreconditionError("write_space_fill_csv: need at least two samples");
    out << "s,value\n";
    // cover the modified interval with margin so the plot shows the joins
    const double pad = 0.25 * (act.interval_hi() - act.interval_lo());
    const double lo = act.interval_lo() - pad, hi = act.interval_hi() + pad;
    for (int i = 0; i < n; ++i) {
        const double s = lo + (hi - lo) * i / (n - 1);
        write_csv_row(out, {s, act.eval(s)});
    }
}

} // namespace landscape
