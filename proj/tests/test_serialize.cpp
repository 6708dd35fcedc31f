#include <cmath>
#include <limits>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include "doctest.h"
#include "landscape/rng.hpp"
#include "landscape/serialize.hpp"
#include "landscape/space_filling.hpp"

using namespace landscape;
using nlohmann::json;

namespace {

bool contains(const std::string& haystack, const std::string& needle) {
    return haystack.find(needle) != std::string::npos;
}

template <typename Fn>
std::string thrown_message(Fn&& fn) {
    try {
        fn();
    } catch (const std::exception& e) {
        return e.what();
    }
    return {};
}

} // namespace

TEST_CASE("doubles are rendered with round-trip precision") {
    CHECK(format_double(2.0 / 3.0) == "0.66666666666666663");
    CHECK(format_double(1.0) == "1");
    CHECK(format_double(0.1) == "0.10000000000000001");
    CHECK(format_double(-0.0) == "-0");
    CHECK(format_double(std::numeric_limits<double>::quiet_NaN()) == "null");
    CHECK(format_double(std::numeric_limits<double>::infinity()) == "null");

    for (double v : {0.1 + 0.2, 1e-300, -3.5e17, 2.2250738585072014e-308})
        CHECK(std::stod(format_double(v)) == v);
}

TEST_CASE("fixed_dump emits sorted keys and is byte-stable") {
    json j;
    j["beta"] = 2.0 / 3.0;
    j["alpha"] = json::array({1, 2.5});
    j["nested"] = json{{"z", 1.0}, {"a", true}, {"s", "text"}};

    const std::string once = fixed_dump(j);
    CHECK(once == fixed_dump(j));
    CHECK(once.back() == '\n');
    CHECK(once.find("\"alpha\"") < once.find("\"beta\""));
    CHECK(once.find("\"a\"") < once.find("\"s\""));
    CHECK(contains(once, "0.66666666666666663"));

    // key insertion order must not leak into the output
    json other;
    other["nested"] = json{{"s", "text"}, {"a", true}, {"z", 1.0}};
    other["alpha"] = json::array({1, 2.5});
    other["beta"] = 2.0 / 3.0;
    CHECK(fixed_dump(other) == once);
}

TEST_CASE("config accessors name the offending path") {
    const json obj = json::parse(R"({"a": 1.5, "s": "x"})");
    CHECK(get_double(obj, "a", "cfg") == 1.5);
    CHECK(get_double_or(obj, "missing", "cfg", 7.0) == 7.0);
    CHECK(get_string(obj, "s", "cfg") == "x");

    CHECK(contains(thrown_message([&] { get_double(obj, "b", "cfg"); }), "cfg.b"));
    CHECK(contains(thrown_message([&] { get_string(obj, "a", "cfg"); }), "cfg.a"));
    CHECK(contains(thrown_message([&] { reject_unknown_fields(obj, {"a"}, "cfg"); }), "cfg.s"));
    CHECK_THROWS_AS(reject_unknown_fields(json::array(), {}, "cfg"), ConfigError);
}

TEST_CASE("parameters survive a JSON round trip bit-for-bit") {
    Architecture arch;
    arch.input_dim = 2;
    arch.widths = {2, 3};
    arch.activations = {Activation::relu(), Activation::relu()};
    arch.validate();

    Rng rng(8);
    Parameters p = Parameters::zeros(arch);
    for (std::size_t i = 0; i < p.weights.size(); ++i) {
        for (double& v : p.weights[i].data) v = rng.uniform(-3.0, 3.0);
        for (double& v : p.biases[i]) v = rng.uniform(-3.0, 3.0);
    }

    const json j = parameters_to_json(p);
    const Parameters back = parameters_from_json(arch, j, "params");
    for (std::size_t i = 0; i < p.weights.size(); ++i) {
        CHECK(back.weights[i].data == p.weights[i].data);
        CHECK(back.biases[i] == p.biases[i]);
    }

    json bad = j;
    bad["layers"][0]["b"] = json::array({1.0}); // wrong width
    CHECK_THROWS_AS(parameters_from_json(arch, bad, "params"), ConfigError);
}

TEST_CASE("segments and activations round trip through JSON") {
    const AffineSegment seg{1.25, 0.5, 1.0, -0.75};
    const AffineSegment back = segment_from_json(segment_to_json(seg), "seg");
    CHECK(back.center == seg.center);
    CHECK(back.radius == seg.radius);
    CHECK(back.slope == seg.slope);
    CHECK(back.offset == seg.offset);
    CHECK_THROWS_AS(segment_from_json(json::parse(R"({"center":0,"radius":0})"), "seg"),
                    ConfigError);

    const std::vector<Activation> acts = {
        Activation::relu(),          Activation::leaky_relu(0.03), Activation::prelu(-0.2),
        Activation::elu(1.5),        Activation::isrlu(0.7),       Activation::plu(0.2, 2.0),
        Activation::sqnl(),
    };
    for (const auto& act : acts) {
        const Activation rebuilt = activation_from_json(activation_to_json(act), "act");
        CHECK(rebuilt.tag() == act.tag());
        CHECK(rebuilt.param1() == act.param1());
        CHECK(rebuilt.param2() == act.param2());
        for (double s : {-2.0, -0.5, 0.0, 0.4, 3.0}) CHECK(rebuilt(s) == act(s));
    }

    CHECK_THROWS_AS(activation_from_json(json::parse(R"({"kind":"swish"})"), "act"), ConfigError);
    CHECK(contains(thrown_message([&] {
                       activation_from_json(json::parse(R"({"kind":"relu","slope":1})"), "act");
                   }),
                   "act.slope"));
}

TEST_CASE("the oscillating activation is rebuilt identically from its description") {
    auto payload =
        std::make_shared<const SpaceFillingActivation>(Activation::sqnl(), 5.0, 6.0, 0.1);
    const Activation act = Activation::space_filling(payload);
    const Activation rebuilt = activation_from_json(activation_to_json(act), "act");
    REQUIRE(rebuilt.tag() == ActivationTag::SpaceFilling);
    for (int i = 0; i <= 200; ++i) {
        const double s = 4.5 + 2.0 * i / 200.0;
        CHECK(rebuilt(s) == act(s));
    }
}

TEST_CASE("architectures round trip and broadcast a single activation") {
    Architecture arch;
    arch.input_dim = 3;
    arch.widths = {2, 4};
    arch.activations = {Activation::leaky_relu(0.05), Activation::elu(2.0)};
    arch.validate();

    const Architecture back = architecture_from_json(architecture_to_json(arch), "arch");
    CHECK(back.input_dim == 3);
    CHECK(back.widths == arch.widths);
    CHECK(back.activations[0].tag() == ActivationTag::LeakyReLU);
    CHECK(back.activations[1].tag() == ActivationTag::ELU);
    CHECK(back.activations[1].param1() == 2.0);

    const json broadcast = json::parse(
        R"({"input_dim": 1, "widths": [2, 2, 2], "activations": {"kind": "sqnl"}})");
    const Architecture b = architecture_from_json(broadcast, "arch");
    REQUIRE(b.activations.size() == 3);
    for (const auto& a : b.activations) CHECK(a.tag() == ActivationTag::SQNL);

    CHECK(contains(thrown_message([&] {
                       architecture_from_json(json::parse(R"({"input_dim": 1})"), "arch");
                   }),
                   "arch.widths"));
    CHECK_THROWS_AS(architecture_from_json(
                        json::parse(R"({"input_dim": 0, "widths": [1], "activations": {"kind": "relu"}})"),
                        "arch"),
                    ConfigError);
}

TEST_CASE("construction reports carry the certificate fields") {
    Architecture arch;
    arch.input_dim = 1;
    arch.widths = {2};
    arch.activations = {Activation::leaky_relu(0.01)};
    arch.validate();
    const std::vector<AffineSegment> segs = {*arch.activations[0].default_segment(false)};
    const FiniteMeasure mu = FiniteMeasure::from_points({{-1.0}, {0.0}, {1.0}});
    const auto con = construct_nonconstant(arch, segs, {0.0}, 2.0 / 3.0, mu);

    const json j = construction_report(con, mu);
    CHECK(j.at("variant") == "nonconstant");
    CHECK(j.at("realization").at("intercept").get<double>() == doctest::Approx(2.0 / 3.0));
    CHECK(j.at("certified_radius").get<double>() > 0.0);
    CHECK(j.at("empirical_radius").get<double>() >= j.at("certified_radius").get<double>());
    CHECK(j.at("radius_vacuous") == false);
    CHECK(j.at("input_bound").get<double>() == 0.0);
    CHECK(j.at("segments").size() == 1);
    CHECK(j.at("margins").size() == 1);
    CHECK(j.at("margins")[0].at("layer") == 1);
    CHECK(j.at("margins")[0].at("margin").get<double>() > 0.0);
    CHECK(j.at("params").at("layers").size() == 2);

    Architecture carch;
    carch.input_dim = 1;
    carch.widths = {2, 2};
    carch.activations = {Activation::relu(), Activation::relu()};
    carch.validate();
    const auto ccon =
        construct_constant(carch, 1, *carch.activations[0].default_segment(true), 0.5, mu);
    const json cj = construction_report(ccon, mu);
    CHECK(cj.at("variant") == "constant");
    CHECK(cj.at("constant_layer") == 1);
    REQUIRE(cj.at("segments").size() == 2);
    CHECK_FALSE(cj.at("segments")[0].is_null());
    CHECK(cj.at("segments")[1].is_null());
}

TEST_CASE("dataset CSV ingestion handles weights, duplicates and line endings") {
    {
        std::istringstream in("x1,y\n-1,1\n0,0\n1,1\n");
        const Dataset ds = parse_dataset_csv(in, "mem");
        CHECK(ds.measure.size() == 3);
        CHECK(ds.measure.dim() == 1);
        CHECK(ds.measure.weights[0] == doctest::Approx(1.0 / 3.0));
        CHECK(ds.target.values == std::vector<double>{1.0, 0.0, 1.0});
    }
    {
        std::istringstream in("x1,x2,y,weight\r\n0,0,1,2\r\n1,0,2,3\r\n");
        const Dataset ds = parse_dataset_csv(in, "mem");
        CHECK(ds.measure.dim() == 2);
        CHECK(ds.measure.weights == std::vector<double>{2.0, 3.0});
        CHECK(ds.target.values == std::vector<double>{1.0, 2.0});
    }
    {
        // duplicate rows merge, summing weight
        std::istringstream in("x1,y,weight\n0.5,1,1\n0.5,1,2\n");
        const Dataset ds = parse_dataset_csv(in, "mem");
        CHECK(ds.measure.size() == 1);
        CHECK(ds.measure.weights[0] == 3.0);
    }
    {
        std::istringstream in("x1,y\n0.5,1\n0.5,2\n");
        CHECK_THROWS_AS(parse_dataset_csv(in, "mem"), PreconditionError);
    }
    {
        std::istringstream in("x1,y\n1,2\n\n");
        const Dataset ds = parse_dataset_csv(in, "mem"); // trailing blank line is fine
        CHECK(ds.measure.size() == 1);
    }
    {
        std::istringstream in("x1,y\n1,oops\n");
        const std::string msg = thrown_message([&] { parse_dataset_csv(in, "bad.csv"); });
        CHECK(contains(msg, "bad.csv"));
        CHECK(contains(msg, "2"));
    }
    {
        std::istringstream in("x1,value\n1,2\n");
        CHECK_THROWS_AS(parse_dataset_csv(in, "mem"), IoError);
    }
    {
        std::istringstream in("x1,y\n1,2,3\n");
        CHECK_THROWS_AS(parse_dataset_csv(in, "mem"), IoError);
    }
    {
        std::istringstream in("");
        CHECK_THROWS_AS(parse_dataset_csv(in, "mem"), IoError);
    }
}

TEST_CASE("CSV rows render at full precision") {
    std::ostringstream out;
    write_csv_row(out, {1.5, 2.0 / 3.0});
    CHECK(out.str() == "1.5,0.66666666666666663\n");
}

TEST_CASE("cloud CSV drops far-out rows unless asked for everything") {
    ImageCloud cloud;
    cloud.rows = {{0.5, 1.0}, {2000.0, 0.0}, {-3.0, -999.0}};

    std::ostringstream trimmed;
    write_cloud_csv(trimmed, cloud, false);
    CHECK(trimmed.str() == "z1,z2\n0.5,1\n-3,-999\n");

    std::ostringstream full;
    write_cloud_csv(full, cloud, true);
    CHECK(full.str() == "z1,z2\n0.5,1\n2000,0\n-3,-999\n");
}

TEST_CASE("trace CSV covers the padded interval") {
    const SpaceFillingActivation act(Activation::sqnl(), 5.0, 6.0, 0.1);
    std::ostringstream out;
    write_space_fill_csv(out, act, 11);

    std::istringstream in(out.str());
    std::string header;
    std::getline(in, header);
    CHECK(header == "s,value");
    std::vector<double> ss;
    std::string line;
    while (std::getline(in, line) && !line.empty()) {
        const auto comma = line.find(',');
        ss.push_back(std::stod(line.substr(0, comma)));
        const double v = std::stod(line.substr(comma + 1));
        CHECK(v == doctest::Approx(act.eval(ss.back())).epsilon(1e-12));
    }
    REQUIRE(ss.size() == 11);
    CHECK(ss.front() == doctest::Approx(4.75).epsilon(1e-12));
    CHECK(ss.back() == doctest::Approx(6.25).epsilon(1e-12));
}
