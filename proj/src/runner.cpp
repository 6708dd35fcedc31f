#include "landscape/runner.hpp"

#include <cmath>
#include <fstream>
#include <optional>
#include <ostream>
#include <sstream>

#include "landscape/serialize.hpp"
#include "landscape/space_filling.hpp"

namespace landscape {

using nlohmann::json;

namespace {

const char* kUsage =
    "usage: landscape <command> [flags]\n"
    "\n"
    "commands:\n"
    "  construct     build the affine-regime local minimum for a dataset\n"
    "  verify        certify local minimality of the constructed point\n"
    "  escape        find parameters with strictly smaller loss\n"
    "  best-affine   best affine and constant fits of a dataset\n"
    "  sample-image  sample prediction vectors into a CSV point cloud\n"
    "  project       project the dataset's y column onto the image\n"
    "  scan          project along a target path and report minimizer jumps\n"
    "  space-fill    sample a space-filling activation into a CSV\n"
    "  demo          end-to-end worked example plus a sampled cloud\n"
    "\n"
    "flags:\n"
    "  --config PATH   JSON run configuration\n"
    "  --data PATH     dataset CSV (columns x1..xd,y[,weight])\n"
    "  --out PATH      write the report here instead of stdout\n"
    "  --seed U64      master seed (default 1)\n"
    "  --threads N     worker threads (default 1)\n"
    "  --n-samples N   sample count (meaning depends on the command)\n"
    "  --restarts N    optimizer restarts\n"
    "  --scale D       family sampling radius (construct)\n"
    "  --full          keep cloud rows with entries beyond 1e3\n";

struct CliOptions {
    std::string command;
    std::optional<std::string> config_path, data_path, out_path;
    std::optional<std::uint64_t> seed;
    std::optional<int> threads, n_samples, restarts;
    std::optional<double> scale;
    bool full = false;
    bool help = false;
};

int parse_int_arg(const std::string& s, const std::string& flag) {
    try {
        std::size_t used = 0;
        const int v = std::stoi(s, &used);
        if (used != s.size()) throw std::invalid_argument("trailing junk");
        return v;
    } catch (const std::exception&) {
        throw ConfigError(flag + ": expected an integer, got \"" + s + "\"");
    }
}

CliOptions parse_args(const std::vector<std::string>& args) {
    CliOptions opt;
    for (std::size_t i = 0; i < args.size(); ++i) {
        const std::string& a = args[i];
        if (a == "--help" || a == "-h") {
            opt.help = true;
            continue;
        }
        if (a.rfind("--", 0) != 0) {
            if (!opt.command.empty()) throw ConfigError("unexpected argument \"" + a + "\"");
            opt.command = a;
            continue;
        }
        if (a == "--full") {
            opt.full = true;
            continue;
        }
        const bool takes_value = a == "--config" || a == "--data" || a == "--out" ||
                                 a == "--seed" || a == "--threads" || a == "--n-samples" ||
                                 a == "--restarts" || a == "--scale";
        if (!takes_value) throw ConfigError("unknown flag \"" + a + "\"");
        if (i + 1 >= args.size()) throw ConfigError(a + " needs a value");
        const std::string& v = args[++i];
        if (a == "--config") opt.config_path = v;
        else if (a == "--data") opt.data_path = v;
        else if (a == "--out") opt.out_path = v;
        else if (a == "--seed") {
            try {
                std::size_t used = 0;
                opt.seed = std::stoull(v, &used);
                if (used != v.size()) throw std::invalid_argument("trailing junk");
            } catch (const std::exception&) {
                throw ConfigError("--seed: expected an unsigned integer, got \"" + v + "\"");
            }
        } else if (a == "--threads") opt.threads = parse_int_arg(v, a);
        else if (a == "--n-samples") opt.n_samples = parse_int_arg(v, a);
        else if (a == "--restarts") opt.restarts = parse_int_arg(v, a);
        else {
            try {
                std::size_t used = 0;
                opt.scale = std::stod(v, &used);
                if (used != v.size()) throw std::invalid_argument("trailing junk");
            } catch (const std::exception&) {
                throw ConfigError("--scale: expected a number, got \"" + v + "\"");
            }
        }
    }
    return opt;
}

// Everything a command might consume, after merging config file and flags
// (flags win).
struct RunConfig {
    json raw = json::object();
    CliOptions cli;

    std::uint64_t seed = 1;
    int threads = 1;

    bool has(const std::string& key) const { return raw.contains(key); }

    Architecture architecture() const {
        if (!has("architecture"))
            throw ConfigError("config.architecture: required by this command");
        return architecture_from_json(raw.at("architecture"), "config.architecture");
    }

    LossSpec loss() const {
        LossSpec spec;
        if (has("loss")) {
            reject_unknown_fields(raw.at("loss"), {"p"}, "config.loss");
            spec.p = get_double(raw.at("loss"), "p", "config.loss");
        }
        try {
            spec.validate();
        } catch (const PreconditionError& e) {
            throw ConfigError(std::string("config.loss.p: ") + e.what());
        }
        return spec;
    }

    bool constant_variant() const {
        if (!has("variant")) return false;
        const std::string v = raw.at("variant").is_string()
                                  ? raw.at("variant").get<std::string>()
                                  : throw ConfigError("config.variant: expected a string");
        if (v == "nonconstant") return false;
        if (v == "constant") return true;
        throw ConfigError("config.variant: expected \"nonconstant\" or \"constant\"");
    }

    int constant_layer() const {
        return static_cast<int>(get_int_or(raw, "constant_layer", "config", 1));
    }

    Dataset dataset() const {
        if (cli.data_path) return load_dataset_csv(*cli.data_path);
        if (has("data")) return load_dataset_csv(get_string(raw, "data", "config"));
        throw ConfigError("dataset required: pass --data or set config.data");
    }

    int n_samples(int fallback) const {
        if (cli.n_samples) return *cli.n_samples;
        return static_cast<int>(get_int_or(raw, "n_samples", "config", fallback));
    }

    int restarts(int fallback) const {
        if (cli.restarts) return *cli.restarts;
        return static_cast<int>(get_int_or(raw, "restarts", "config", fallback));
    }

    double scale(double fallback) const {
        if (cli.scale) return *cli.scale;
        return get_double_or(raw, "scale", "config", fallback);
    }

    std::pair<double, double> range(const std::string& key, double lo, double hi) const {
        if (!has(key)) return {lo, hi};
        const std::vector<double> r = get_double_array(raw.at(key), "config." + key);
        if (r.size() != 2 || !(r[0] <= r[1]))
            throw ConfigError("config." + key + ": expected [lo, hi]");
        return {r[0], r[1]};
    }
};

RunConfig load_config(const CliOptions& cli) {
    RunConfig cfg;
    cfg.cli = cli;
    if (cli.config_path) {
        std::ifstream in(*cli.config_path);
        if (!in) throw IoError("cannot open config: " + *cli.config_path);
        try {
            in >> cfg.raw;
        } catch (const json::exception& e) {
            throw ConfigError("config: " + std::string(e.what()));
        }
        reject_unknown_fields(cfg.raw,
                              {"architecture", "segments", "variant", "constant_layer", "loss",
                               "data", "seed", "threads", "n_samples", "restarts", "scale",
                               "weight_range", "bias_range", "space_fill", "waypoints",
                               "points_per_segment"},
                              "config");
    }
    cfg.seed = cli.seed ? *cli.seed
                        : static_cast<std::uint64_t>(get_int_or(cfg.raw, "seed", "config", 1));
    cfg.threads = cli.threads ? *cli.threads
                              : static_cast<int>(get_int_or(cfg.raw, "threads", "config", 1));
    if (cfg.threads < 1) throw ConfigError("config.threads: must be >= 1");
    return cfg;
}

// Per-layer segments: explicit overrides from config.segments (null entries
// fall back), otherwise the activation's canonical window of the right kind.
std::vector<AffineSegment> resolve_segments(const Architecture& arch, const RunConfig& cfg,
                                            bool constant, int constant_layer) {
    const json* overrides = cfg.has("segments") ? &cfg.raw.at("segments") : nullptr;
    if (overrides && (!overrides->is_array() ||
                      static_cast<int>(overrides->size()) != arch.depth()))
        throw ConfigError("config.segments: expected one entry per hidden layer");
    std::vector<AffineSegment> out(static_cast<std::size_t>(arch.depth()));
    for (int l = 1; l <= arch.depth(); ++l) {
        const bool needed = constant ? l == constant_layer : true;
        if (!needed) continue;
        const std::string path = "config.segments[" + std::to_string(l - 1) + "]";
        if (overrides && !overrides->at(static_cast<std::size_t>(l - 1)).is_null()) {
            out[static_cast<std::size_t>(l - 1)] =
                segment_from_json(overrides->at(static_cast<std::size_t>(l - 1)), path);
            continue;
        }
        const Activation& act = arch.activations[static_cast<std::size_t>(l - 1)];
        const std::optional<AffineSegment> seg = act.default_segment(constant);
        if (!seg)
            throw NoSuchSegmentError("layer " + std::to_string(l) + ": " +
                                     tag_name(act.tag()) + " has no " +
                                     (constant ? "constant" : "nonconstant") +
                                     " affine segment");
        out[static_cast<std::size_t>(l - 1)] = *seg;
    }
    return out;
}

void reject_degenerate(bool constant, const FiniteMeasure& mu, const Target& y) {
    const TargetClassification cls = classify_target(mu, y);
    if (!constant && cls.affine_fit)
        throw TargetDegenerateError(
            "target is exactly affine on the support; no spurious minimum exists");
    if (constant && cls.constant_fit)
        throw TargetDegenerateError(
            "target is exactly constant on the support; no spurious minimum exists");
}

SpuriousConstruction construct_from(const RunConfig& cfg, const Dataset& data,
                                    const LossSpec& spec, Architecture arch) {
    const bool constant = cfg.constant_variant();
    const int layer = cfg.constant_layer();
    reject_degenerate(constant, data.measure, data.target);
    const std::vector<AffineSegment> segments = resolve_segments(arch, cfg, constant, layer);
    if (constant) {
        const BestConstant fit = best_constant(spec, data.measure, data.target);
        return construct_constant(arch, layer, segments[static_cast<std::size_t>(layer - 1)],
                                  fit.value, data.measure);
    }
    const BestAffine fit = best_affine(spec, data.measure, data.target);
    return construct_nonconstant(arch, segments, fit.map.slope, fit.map.intercept, data.measure);
}

double realization_loss(const SpuriousConstruction& c, const Dataset& data,
                        const LossSpec& spec) {
    std::vector<double> preds;
    preds.reserve(data.measure.points.size());
    for (const std::vector<double>& x : data.measure.points) preds.push_back(c.realization(x));
    return loss_value(spec, data.measure, preds, data.target);
}

json cmd_construct(const RunConfig& cfg) {
    const Dataset data = cfg.dataset();
    const LossSpec spec = cfg.loss();
    const SpuriousConstruction c = construct_from(cfg, data, spec, cfg.architecture());
    json report = construction_report(c, data.measure);
    report["p"] = spec.p;
    report["loss"] = realization_loss(c, data, spec);
    report["free_parameters"] =
        static_cast<int>(family_free_indices(c.arch, c.variant).size());
    const int n = cfg.n_samples(0);
    if (n > 0) {
        const FamilySamples family =
            sample_family(c, data.measure, n, cfg.scale(1e-3), cfg.seed);
        double max_dev = 0.0;
        json members = json::array();
        for (const Parameters& p : family.members) {
            for (std::size_t k = 0; k < data.measure.points.size(); ++k)
                max_dev = std::max(max_dev, std::abs(forward(c.arch, p, data.measure.points[k]) -
                                                     c.realization(data.measure.points[k])));
            members.push_back(flatten(c.arch, p));
        }
        report["family"] = json{{"count", static_cast<int>(family.members.size())},
                                {"delta", family.delta_used},
                                {"halvings", family.halvings},
                                {"max_realization_error", max_dev},
                                {"members", std::move(members)}};
    }
    return report;
}

json cmd_verify(const RunConfig& cfg) {
    const Dataset data = cfg.dataset();
    const LossSpec spec = cfg.loss();
    const SpuriousConstruction c = construct_from(cfg, data, spec, cfg.architecture());
    const LocalMinReport report = check_local_min(c, data.measure, data.target, spec,
                                                  cfg.n_samples(1000), cfg.seed, cfg.threads);
    json out = local_min_report_json(report);
    out["realization"] = affine_map_to_json(c.realization);
    return out;
}

json cmd_escape(const RunConfig& cfg) {
    const Dataset data = cfg.dataset();
    const LossSpec spec = cfg.loss();
    const SpuriousConstruction c = construct_from(cfg, data, spec, cfg.architecture());
    const EscapeCertificate cert = find_escape(c, data.measure, data.target, spec,
                                               cfg.restarts(200), cfg.seed, cfg.threads);
    return escape_report_json(cert);
}

json cmd_best_affine(const RunConfig& cfg) {
    const Dataset data = cfg.dataset();
    const LossSpec spec = cfg.loss();
    const BestAffine affine = best_affine(spec, data.measure, data.target);
    const BestConstant constant = best_constant(spec, data.measure, data.target);
    return json{{"p", spec.p},
                {"a", affine.map.slope},
                {"c", affine.map.intercept},
                {"loss", affine.loss},
                {"iterations", affine.iterations},
                {"constant", json{{"c", constant.value}, {"loss", constant.loss}}}};
}

void cmd_sample_image(const RunConfig& cfg, std::ostream& out) {
    const Dataset data = cfg.dataset();
    const Architecture arch = cfg.architecture();
    const auto [w_lo, w_hi] = cfg.range("weight_range", -10.0, 10.0);
    const auto [b_lo, b_hi] = cfg.range("bias_range", -5.0, 5.0);
    const ImageCloud cloud = sample_image(arch, data.measure, cfg.n_samples(100000), w_lo, w_hi,
                                          b_lo, b_hi, cfg.seed, cfg.threads);
    write_cloud_csv(out, cloud, cfg.cli.full);
}

json cmd_project(const RunConfig& cfg) {
    const Dataset data = cfg.dataset();
    const ProjectionResult result =
        project_multistart(cfg.architecture(), data.measure, data.target.values,
                           cfg.restarts(500), cfg.seed, cfg.threads);
    return projection_report_json(result, data.target.values);
}

json cmd_scan(const RunConfig& cfg) {
    const Dataset data = cfg.dataset();
    if (!cfg.has("waypoints")) throw ConfigError("config.waypoints: required by scan");
    const json& wps = cfg.raw.at("waypoints");
    if (!wps.is_array() || wps.size() < 2)
        throw ConfigError("config.waypoints: expected at least two target vectors");
    std::vector<std::vector<double>> waypoints;
    for (std::size_t i = 0; i < wps.size(); ++i)
        waypoints.push_back(
            get_double_array(wps.at(i), "config.waypoints[" + std::to_string(i) + "]"));
    const int per_segment =
        static_cast<int>(get_int_or(cfg.raw, "points_per_segment", "config", 100));
    const ScanResult result = discontinuity_scan(cfg.architecture(), data.measure, waypoints,
                                                 per_segment, cfg.restarts(50), cfg.seed,
                                                 cfg.threads);
    return scan_report_json(result);
}

void cmd_space_fill(const RunConfig& cfg, std::ostream& out) {
    if (!cfg.has("space_fill")) throw ConfigError("config.space_fill: required by space-fill");
    const json& sf = cfg.raw.at("space_fill");
    reject_unknown_fields(sf, {"base", "interval", "amplitude"}, "config.space_fill");
    if (!sf.contains("base")) throw ConfigError("config.space_fill.base: missing");
    const Activation base = activation_from_json(sf.at("base"), "config.space_fill.base");
    if (!sf.contains("interval")) throw ConfigError("config.space_fill.interval: missing");
    const std::vector<double> interval =
        get_double_array(sf.at("interval"), "config.space_fill.interval");
    if (interval.size() != 2) throw ConfigError("config.space_fill.interval: expected [lo, hi]");
    const SpaceFillingActivation act(base, interval[0], interval[1],
                                     get_double(sf, "amplitude", "config.space_fill"));
    write_space_fill_csv(out, act, cfg.n_samples(2001));
}

json cmd_demo(const RunConfig& cfg) {
    // the worked example: K = {-1, 0, 1}, y = (1, 0, 1), leaky ReLU, one
    // hidden layer of width 2, squared loss
    auto [mu, target] = make_dataset({{-1.0}, {0.0}, {1.0}}, {1.0, 0.0, 1.0});
    const Dataset data{std::move(mu), std::move(target)};
    const LossSpec spec{2.0};

    Architecture arch;
    arch.input_dim = 1;
    arch.widths = {2};
    arch.activations = {Activation::leaky_relu(0.01)};

    RunConfig base = cfg;
    base.raw = json::object();

    const SpuriousConstruction c = construct_from(base, data, spec, arch);
    const LocalMinReport local =
        check_local_min(c, data.measure, data.target, spec, 1000, cfg.seed, cfg.threads);
    const EscapeCertificate cert =
        find_escape(c, data.measure, data.target, spec, 200, cfg.seed, cfg.threads);

    // Fig. 1 style cloud on K = {-1, 0, 2} with a one-unit ReLU network
    Architecture unit;
    unit.input_dim = 1;
    unit.widths = {1};
    unit.activations = {Activation::relu()};
    const FiniteMeasure cloud_mu = FiniteMeasure::from_points({{-1.0}, {0.0}, {2.0}});
    const int draws = cfg.n_samples(1000);
    const ImageCloud cloud =
        sample_image(unit, cloud_mu, draws, -10.0, 10.0, -5.0, 5.0, cfg.seed, cfg.threads);
    int monotone_rows = 0;
    for (const std::vector<double>& row : cloud.rows)
        if (is_monotone(row, 1e-12)) ++monotone_rows;

    json report{{"construction", construction_report(c, data.measure)},
                {"local_min", local_min_report_json(local)},
                {"escape", escape_report_json(cert)},
                {"spurious_loss", cert.spurious_loss},
                {"escape_loss", cert.escape_loss},
                {"gap", cert.gap},
                {"cloud", json{{"draws", draws},
                               {"rows", static_cast<int>(cloud.rows.size())},
                               {"monotone_fraction",
                                cloud.rows.empty()
                                    ? 0.0
                                    : static_cast<double>(monotone_rows) /
                                          static_cast<double>(cloud.rows.size())}}}};
    return report;
}

void write_text(const CliOptions& cli, std::ostream& fallback, const std::string& text) {
    if (cli.out_path) {
        std::ofstream out(*cli.out_path);
        if (!out) throw IoError("cannot open output: " + *cli.out_path);
        out << text;
        if (!out) throw IoError("write failed: " + *cli.out_path);
        return;
    }
    fallback << text;
}

int dispatch(const CliOptions& cli, std::ostream& out, std::ostream& err) {
    if (cli.help || cli.command.empty()) {
        (cli.help ? out : err) << kUsage;
        return cli.help ? 0 : 2;
    }
    const RunConfig cfg = load_config(cli);
    if (cli.command == "construct") {
        write_text(cli, out, fixed_dump(cmd_construct(cfg)));
    } else if (cli.command == "verify") {
        write_text(cli, out, fixed_dump(cmd_verify(cfg)));
    } else if (cli.command == "escape") {
        write_text(cli, out, fixed_dump(cmd_escape(cfg)));
    } else if (cli.command == "best-affine") {
        write_text(cli, out, fixed_dump(cmd_best_affine(cfg)));
    } else if (cli.command == "sample-image") {
        std::ostringstream buf;
        cmd_sample_image(cfg, buf);
        write_text(cli, out, buf.str());
    } else if (cli.command == "project") {
        write_text(cli, out, fixed_dump(cmd_project(cfg)));
    } else if (cli.command == "scan") {
        write_text(cli, out, fixed_dump(cmd_scan(cfg)));
    } else if (cli.command == "space-fill") {
        std::ostringstream buf;
        cmd_space_fill(cfg, buf);
        write_text(cli, out, buf.str());
    } else if (cli.command == "demo") {
        write_text(cli, out, fixed_dump(cmd_demo(cfg)));
    } else {
        err << "unknown command \"" << cli.command << "\"\n" << kUsage;
        return 2;
    }
    return 0;
}

} // namespace

int run_command(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    try {
        return dispatch(parse_args(args), out, err);
    } catch (const IoError& e) {
        err << "error: IoError: " << e.what() << "\n";
        return 1;
    } catch (const TargetDegenerateError& e) {
        err << "error: TargetDegenerate: " << e.what() << "\n";
        return 2;
    } catch (const PreconditionError& e) {
        err << "error: precondition: " << e.what() << "\n";
        return 2;
    } catch (const SearchError& e) {
        err << "error: search: " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return 1;
    }
}

} // namespace landscape
